#pragma once

#include <string>

#include "missionware/model_io.hpp"
#include "missionware/threatdb.hpp"

namespace mwtest {

inline std::string data_path(const std::string& name) { return std::string(MW_DATA_DIR) + "/" + name; }

inline const missionware::SGraph& uav() {
  static const auto g = missionware::load_model(data_path("uav.model.json"));
  return g;
}

inline const missionware::ThreatCorpus& corpus() {
  static const auto c = missionware::ThreatCorpus::load(data_path("corpus.json"));
  return c;
}

inline constexpr const char* kFireLoss = "loss_fire_suppression_misallocation";
inline constexpr const char* kLatLongHazard = "hazard_latlong_payload";

}  // namespace mwtest
