#pragma once

// Interchange (JSON, stable field order) and plain-text table renderings of
// analysis results.

#include <cmath>
#include <iomanip>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "missionware/model_io.hpp"
#include "missionware/risk.hpp"
#include "missionware/sim.hpp"
#include "missionware/stamp.hpp"
#include "missionware/surface.hpp"
#include "missionware/threatdb.hpp"

namespace missionware {

inline Json to_json(const ValidationReport& r) {
  Json j;
  j["analysis_ready"] = r.analysis_ready;
  j["findings"] = Json::array();
  for (const auto& f : r.findings) {
    j["findings"].push_back(
        {{"severity", to_string(f.severity)}, {"code", f.code}, {"subject", f.subject}, {"message", f.message}});
  }
  return j;
}

inline Json to_json(const TraceUp& t) {
  Json j;
  j["hazards"] = t.hazards;
  j["losses"] = t.losses;
  return j;
}

inline Json to_json(const CriticalSet& c) {
  Json j;
  j["components"] = c.components;
  Json why = Json::object();
  for (const auto& id : c.components) {
    Json list = Json::array();
    for (const auto& entry : c.justification.at(id)) {
      Json e;
      e["hazard"] = entry.hazard ? Json(*entry.hazard) : Json(nullptr);
      e["loss"] = entry.loss;
      list.push_back(std::move(e));
    }
    why[id] = std::move(list);
  }
  j["justification"] = std::move(why);
  return j;
}

inline Json to_json(const Hit& h) {
  Json j;
  j["record_id"] = h.record_id;
  j["kind"] = to_string(h.kind);
  j["score"] = h.score;
  j["derived"] = h.derived;
  j["derivation"] = h.derivation;
  return j;
}

inline Json to_json(const Mapping& m) {
  Json j;
  j["component"] = m.component;
  j["hits"] = Json::array();
  for (const auto& h : m.hits) j["hits"].push_back(to_json(h));
  return j;
}

inline Json to_json(const AttackSurface& s) {
  Json j;
  j["entries"] = Json::array();
  for (const auto& e : s.entries) j["entries"].push_back({{"node", e.node}, {"mapping", to_json(e.mapping)}});
  return j;
}

inline Json to_json(const ExploitChain& c) {
  Json j;
  j["path"] = c.path;
  j["length"] = c.length();
  if (!c.per_hop_vectors.empty()) {
    Json hops = Json::array();
    for (const auto& m : c.per_hop_vectors) hops.push_back(m ? to_json(*m) : Json(nullptr));
    j["per_hop_vectors"] = std::move(hops);
  }
  return j;
}

inline Json to_json(const std::vector<ExploitChain>& chains) {
  Json j = Json::array();
  for (const auto& c : chains) j.push_back(to_json(c));
  return j;
}

/// +inf complexity is written as null.
inline Json to_json(const RiskScore& s) {
  Json j;
  j["loss"] = s.loss;
  j["severity"] = s.severity;
  j["attack_complexity"] = std::isinf(s.attack_complexity) ? Json(nullptr) : Json(s.attack_complexity);
  j["mitigability"] = s.mitigability;
  j["scalar"] = s.scalar;
  return j;
}

inline Json to_json(const VariantRanking& r) {
  Json j;
  j["variants"] = Json::array();
  for (const auto& v : r.variants) {
    Json jv;
    jv["id"] = v.id;
    jv["applications"] = Json::array();
    for (const auto& a : v.applications) jv["applications"].push_back(to_json(a));
    jv["scores"] = Json::array();
    for (const auto& s : v.scores) jv["scores"].push_back(to_json(s));
    jv["aggregate_risk"] = v.aggregate_risk;
    jv["total_cost"] = v.total_cost;
    j["variants"].push_back(std::move(jv));
  }
  j["pareto_front"] = Json::array();
  for (auto i : r.pareto_front) j["pareto_front"].push_back(r.variants[i].id);
  return j;
}

inline Json to_json(const SimResult& r) {
  Json j;
  j["trials"] = r.trials;
  j["seed"] = r.seed;
  Json losses = Json::object();
  for (const auto& [id, f] : r.loss_frequency) losses[id] = f;
  j["loss_frequency"] = std::move(losses);
  j["detection_frequency"] = r.detection_frequency;
  return j;
}

inline Json to_json(const ExactResult& r) {
  Json j;
  Json losses = Json::object();
  for (const auto& [id, p] : r.loss_probability) losses[id] = p;
  j["loss_probability"] = std::move(losses);
  j["detection_probability"] = r.detection_probability;
  return j;
}

/// Left-aligned text table with a dashed rule under the header.
class TextTable {
 public:
  explicit TextTable(std::vector<std::string> header) : header_(std::move(header)) {}

  void add(std::vector<std::string> row) { rows_.push_back(std::move(row)); }

  void print(std::ostream& out) const {
    std::vector<std::size_t> width(header_.size(), 0);
    auto measure = [&](const std::vector<std::string>& row) {
      for (std::size_t i = 0; i < row.size() && i < width.size(); ++i) width[i] = std::max(width[i], row[i].size());
    };
    measure(header_);
    for (const auto& r : rows_) measure(r);
    auto line = [&](const std::vector<std::string>& row) {
      std::string text;
      for (std::size_t i = 0; i < width.size(); ++i) {
        std::string cell = i < row.size() ? row[i] : "";
        if (i + 1 < width.size()) cell.resize(width[i], ' ');
        text += cell;
        if (i + 1 < width.size()) text += "  ";
      }
      while (!text.empty() && text.back() == ' ') text.pop_back();
      out << text << '\n';
    };
    line(header_);
    std::vector<std::string> rule;
    for (auto w : width) rule.emplace_back(w, '-');
    line(rule);
    for (const auto& r : rows_) line(r);
  }

 private:
  std::vector<std::string> header_;
  std::vector<std::vector<std::string>> rows_;
};

inline std::string fixed(double v, int digits = 4) {
  if (std::isinf(v)) return "inf";
  std::ostringstream s;
  s << std::fixed << std::setprecision(digits) << v;
  return s.str();
}

inline std::string join(const std::vector<std::string>& items, std::string_view sep) {
  std::string out;
  for (std::size_t i = 0; i < items.size(); ++i) {
    if (i) out += sep;
    out += items[i];
  }
  return out;
}

}  // namespace missionware
