#pragma once

// Monte Carlo attack injection and an exact enumeration oracle sharing the
// same semantics.
//
// Per trial:
//   * SupplyChain(attribute, value) compromises every component whose
//     attribute equals value; Insider(component) compromises that component.
//   * NetworkIntrusion(entry, p): the entry is compromised and every
//     Connectivity edge reachable from it is live with probability p,
//     independently; every component reachable over live edges is
//     compromised.
//   * Each configuration-hopping group draws one active replica per
//     hop_period steps over the horizon; only the replica active at
//     critical_step keeps its compromise, the others are forced sound.
//   * Compromised components are true leaves, context assigns physical
//     states, everything else is false; losses follow from evaluate().
//
// RNG: trial i uses std::mt19937_64 seeded with splitmix64(seed + i *
// 0x9E3779B97F4A7C15). Uniform reals take the top 53 bits of one draw, so
// results are identical on every platform and independent of trial order.

#include <cmath>
#include <cstdint>
#include <map>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "missionware/error.hpp"
#include "missionware/model_io.hpp"
#include "missionware/sgraph.hpp"
#include "missionware/stamp.hpp"

namespace missionware {

enum class ScenarioKind { SupplyChain, NetworkIntrusion, Insider };

inline std::string_view to_string(ScenarioKind kind) {
  switch (kind) {
    case ScenarioKind::SupplyChain: return "SupplyChain";
    case ScenarioKind::NetworkIntrusion: return "NetworkIntrusion";
    case ScenarioKind::Insider: return "Insider";
  }
  return "?";
}

struct AttackScenario {
  ScenarioKind kind = ScenarioKind::Insider;
  std::string attribute;  // SupplyChain
  std::string value;      // SupplyChain
  std::string entry;      // NetworkIntrusion
  double p = 1.0;         // NetworkIntrusion, per-hop success
  std::string component;  // Insider
  std::size_t critical_step = 0;
  std::size_t horizon = 1;
  std::map<std::string, bool> context;  // PhysicalState values during the mission

  static AttackScenario supply_chain(std::string attribute, std::string value) {
    AttackScenario s;
    s.kind = ScenarioKind::SupplyChain;
    s.attribute = std::move(attribute);
    s.value = std::move(value);
    return s;
  }
  static AttackScenario network_intrusion(std::string entry, double p) {
    AttackScenario s;
    s.kind = ScenarioKind::NetworkIntrusion;
    s.entry = std::move(entry);
    s.p = p;
    return s;
  }
  static AttackScenario insider(std::string component) {
    AttackScenario s;
    s.kind = ScenarioKind::Insider;
    s.component = std::move(component);
    return s;
  }
};

struct SimResult {
  std::uint64_t trials = 0;
  std::map<std::string, double> loss_frequency;
  double detection_frequency = 0.0;
  std::uint64_t seed = 0;

  bool operator==(const SimResult&) const = default;
};

struct ExactResult {
  std::map<std::string, double> loss_probability;
  double detection_probability = 0.0;
};

inline constexpr std::uint64_t kMaxExactStates = std::uint64_t{1} << 20;

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

inline std::mt19937_64 trial_stream(std::uint64_t seed, std::uint64_t trial) {
  return std::mt19937_64(splitmix64(seed + trial * 0x9E3779B97F4A7C15ULL));
}

/// [0, 1) from the top 53 bits of one draw.
inline double uniform01(std::mt19937_64& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

namespace detail {

struct HopGroup {
  std::string id;
  std::vector<std::size_t> replicas;
  std::size_t period = 1;
};

/// Scenario compiled against a graph: everything a trial needs by index.
struct CompiledScenario {
  std::vector<char> base;  // compromised before any random draw
  std::size_t entry = 0;
  double p = 1.0;
  std::vector<std::pair<std::size_t, std::size_t>> edges;  // intrusion-reachable Connectivity edges
  std::vector<HopGroup> groups;
  std::size_t critical_step = 0;
  std::size_t horizon = 1;
  std::vector<std::pair<std::size_t, bool>> context;
  std::vector<std::size_t> losses;
  std::vector<std::size_t> detectors;
  bool intrusion = false;
};

inline CompiledScenario compile(const SGraph& g, const AttackScenario& s) {
  require_analysis_ready(g);
  CompiledScenario c;
  c.base.assign(g.size(), 0);
  if (s.horizon < 1) throw Error(ErrorCode::BadScenario, "horizon", "must be at least 1");
  if (s.critical_step >= s.horizon) throw Error(ErrorCode::BadScenario, "critical_step", "must lie inside the horizon");
  c.critical_step = s.critical_step;
  c.horizon = s.horizon;

  auto component = [&](const std::string& id, const char* what) {
    auto idx = g.index_of(id);
    if (!idx) throw Error(ErrorCode::UnknownReference, id, std::string(what) + " does not exist");
    if (!is_component(g.node(*idx).kind)) throw Error(ErrorCode::BadScenario, id, std::string(what) + " must be a component");
    return *idx;
  };

  switch (s.kind) {
    case ScenarioKind::SupplyChain: {
      bool known = false;
      for (std::size_t i = 0; i < g.size(); ++i) {
        auto v = g.node(i).attribute(s.attribute);
        known |= v.has_value();
        if (v && *v == s.value && is_component(g.node(i).kind)) c.base[i] = 1;
      }
      if (s.attribute.empty() || !known)
        throw Error(ErrorCode::UnknownReference, s.attribute, "no node carries this attribute");
      break;
    }
    case ScenarioKind::Insider: c.base[component(s.component, "insider target")] = 1; break;
    case ScenarioKind::NetworkIntrusion: {
      if (!(s.p > 0.0 && s.p <= 1.0)) throw Error(ErrorCode::BadScenario, "p", "per-hop probability must lie in (0, 1]");
      c.intrusion = true;
      c.p = s.p;
      c.entry = component(s.entry, "intrusion entry");
      c.base[c.entry] = 1;
      std::vector<bool> seen(g.size(), false);
      std::vector<std::size_t> stack{c.entry};
      seen[c.entry] = true;
      while (!stack.empty()) {
        auto u = stack.back();
        stack.pop_back();
        for (auto v : g.connectivity_successors(u)) {
          c.edges.emplace_back(u, v);
          if (!seen[v]) {
            seen[v] = true;
            stack.push_back(v);
          }
        }
      }
      std::sort(c.edges.begin(), c.edges.end());
      break;
    }
  }

  for (const auto& [id, value] : s.context) {
    auto idx = g.index_of(id);
    if (!idx) throw Error(ErrorCode::UnknownReference, id, "context node does not exist");
    if (g.node(*idx).kind != NodeKind::PhysicalState)
      throw Error(ErrorCode::BadScenario, id, "context may only assign physical states");
    c.context.emplace_back(*idx, value);
  }

  std::map<std::string, HopGroup> groups;
  for (std::size_t i = 0; i < g.size(); ++i) {
    auto group = g.node(i).attribute("hop_group");
    if (!group) continue;
    auto& hg = groups[*group];
    hg.id = *group;
    hg.replicas.push_back(i);
  }
  for (auto& [id, hg] : groups) {
    const auto* controller = g.find(id);
    if (!controller) throw Error(ErrorCode::UnknownReference, id, "hop controller does not exist");
    auto period = controller->attribute("hop_period").value_or("1");
    try {
      hg.period = std::stoul(period);
    } catch (const std::exception&) {
      hg.period = 0;
    }
    if (hg.period < 1) throw Error(ErrorCode::BadScenario, id, "hop_period must be a positive integer");
    c.groups.push_back(std::move(hg));
  }

  c.losses = g.nodes_of_kind(NodeKind::MissionLoss);
  for (std::size_t i = 0; i < g.size(); ++i) {
    if (g.node(i).attribute("role") == "disagreement_detected") c.detectors.push_back(i);
  }
  return c;
}

/// Leaf values for one outcome: compromise set, then hopping, then context.
inline void assemble(const CompiledScenario& c, const std::vector<char>& compromised,
                     const std::vector<std::size_t>& active, std::vector<char>& values) {
  values = compromised;
  for (std::size_t k = 0; k < c.groups.size(); ++k) {
    for (auto r : c.groups[k].replicas) {
      if (r != active[k]) values[r] = 0;
    }
  }
  for (const auto& [idx, v] : c.context) values[idx] = v ? 1 : 0;
}

inline void spread(const CompiledScenario& c, const std::vector<char>& live, std::vector<char>& out) {
  out = c.base;
  std::vector<std::size_t> stack{c.entry};
  while (!stack.empty()) {
    auto u = stack.back();
    stack.pop_back();
    for (std::size_t e = 0; e < c.edges.size(); ++e) {
      if (!live[e] || c.edges[e].first != u) continue;
      auto v = c.edges[e].second;
      if (!out[v]) {
        out[v] = 1;
        stack.push_back(v);
      }
    }
  }
}

}  // namespace detail

inline SimResult run(const SGraph& g, const AttackScenario& scenario, std::uint64_t trials, std::uint64_t seed) {
  if (trials < 1) throw Error(ErrorCode::BadScenario, "trials", "need at least one trial");
  const auto c = detail::compile(g, scenario);

  std::vector<std::uint64_t> loss_hits(c.losses.size(), 0);
  std::uint64_t detections = 0;
  std::vector<char> live(c.edges.size(), 0);
  std::vector<char> compromised;
  std::vector<char> values;
  std::vector<std::size_t> active(c.groups.size(), 0);

  for (std::uint64_t t = 0; t < trials; ++t) {
    auto rng = trial_stream(seed, t);
    if (c.intrusion) {
      for (auto& l : live) l = uniform01(rng) < c.p ? 1 : 0;
      detail::spread(c, live, compromised);
    } else {
      compromised = c.base;
    }
    for (std::size_t k = 0; k < c.groups.size(); ++k) {
      const auto& hg = c.groups[k];
      const std::size_t decisions = (c.horizon + hg.period - 1) / hg.period;
      const std::size_t critical_decision = c.critical_step / hg.period;
      for (std::size_t d = 0; d < decisions; ++d) {
        auto choice = static_cast<std::size_t>(uniform01(rng) * static_cast<double>(hg.replicas.size()));
        if (d == critical_decision) active[k] = hg.replicas[choice];
      }
    }
    detail::assemble(c, compromised, active, values);
    evaluate_in_place(g, values);
    for (std::size_t l = 0; l < c.losses.size(); ++l) loss_hits[l] += values[c.losses[l]] ? 1 : 0;
    bool detected = false;
    for (auto d : c.detectors) detected |= values[d] != 0;
    detections += detected ? 1 : 0;
  }

  SimResult r;
  r.trials = trials;
  r.seed = seed;
  for (std::size_t l = 0; l < c.losses.size(); ++l)
    r.loss_frequency[g.node(c.losses[l]).id] = static_cast<double>(loss_hits[l]) / static_cast<double>(trials);
  r.detection_frequency = static_cast<double>(detections) / static_cast<double>(trials);
  return r;
}

/// Full enumeration of edge outcomes and active replicas at the critical
/// step. Throws StateSpaceTooLarge above 2^20 states.
inline ExactResult exact(const SGraph& g, const AttackScenario& scenario) {
  const auto c = detail::compile(g, scenario);

  double states = std::ldexp(1.0, static_cast<int>(c.edges.size()));
  for (const auto& hg : c.groups) states *= static_cast<double>(hg.replicas.size());
  if (states > static_cast<double>(kMaxExactStates))
    throw Error(ErrorCode::StateSpaceTooLarge, "", "more than 2^20 outcomes to enumerate");

  std::vector<double> loss_p(c.losses.size(), 0.0);
  double detect_p = 0.0;
  std::vector<char> live(c.edges.size(), 0);
  std::vector<char> compromised;
  std::vector<char> values;
  std::vector<std::size_t> choice(c.groups.size(), 0);
  std::vector<std::size_t> active(c.groups.size(), 0);

  const std::uint64_t edge_outcomes = std::uint64_t{1} << c.edges.size();
  for (std::uint64_t mask = 0; mask < edge_outcomes; ++mask) {
    double p_edges = 1.0;
    for (std::size_t e = 0; e < c.edges.size(); ++e) {
      live[e] = (mask >> e) & 1U;
      p_edges *= live[e] ? c.p : 1.0 - c.p;
    }
    if (p_edges == 0.0) continue;
    if (c.intrusion) {
      detail::spread(c, live, compromised);
    } else {
      compromised = c.base;
    }
    std::fill(choice.begin(), choice.end(), 0);
    while (true) {
      double p = p_edges;
      for (std::size_t k = 0; k < c.groups.size(); ++k) {
        active[k] = c.groups[k].replicas[choice[k]];
        p /= static_cast<double>(c.groups[k].replicas.size());
      }
      detail::assemble(c, compromised, active, values);
      evaluate_in_place(g, values);
      for (std::size_t l = 0; l < c.losses.size(); ++l) loss_p[l] += values[c.losses[l]] ? p : 0.0;
      bool detected = false;
      for (auto d : c.detectors) detected |= values[d] != 0;
      detect_p += detected ? p : 0.0;

      // mixed-radix increment over the groups
      std::size_t k = 0;
      for (; k < c.groups.size(); ++k) {
        if (++choice[k] < c.groups[k].replicas.size()) break;
        choice[k] = 0;
      }
      if (k == c.groups.size()) break;
    }
  }

  ExactResult r;
  for (std::size_t l = 0; l < c.losses.size(); ++l) r.loss_probability[g.node(c.losses[l]).id] = loss_p[l];
  r.detection_probability = detect_p;
  return r;
}

inline AttackScenario scenario_from_json(const Json& j) {
  io::expect_keys(j, {"kind", "attribute", "value", "entry", "p", "component", "critical_step", "horizon", "context"},
                  "scenario");
  AttackScenario s;
  auto kind = io::require_string(j, "kind", "scenario");
  if (kind == "SupplyChain") {
    s = AttackScenario::supply_chain(io::require_string(j, "attribute", "scenario"),
                                     io::require_string(j, "value", "scenario"));
  } else if (kind == "NetworkIntrusion") {
    auto p = j.find("p");
    if (p == j.end() || !p->is_number()) throw Error(ErrorCode::SchemaError, "scenario", "NetworkIntrusion needs numeric 'p'");
    s = AttackScenario::network_intrusion(io::require_string(j, "entry", "scenario"), p->get<double>());
  } else if (kind == "Insider") {
    s = AttackScenario::insider(io::require_string(j, "component", "scenario"));
  } else {
    throw Error(ErrorCode::SchemaError, kind, "unknown scenario kind");
  }
  for (auto [key, field] : {std::pair{"critical_step", &s.critical_step}, std::pair{"horizon", &s.horizon}}) {
    if (auto it = j.find(key); it != j.end()) {
      if (!it->is_number_unsigned()) throw Error(ErrorCode::SchemaError, key, "must be a nonnegative integer");
      *field = it->get<std::size_t>();
    }
  }
  if (auto it = j.find("context"); it != j.end()) {
    if (!it->is_object()) throw Error(ErrorCode::SchemaError, "context", "must be an object of booleans");
    for (const auto& [id, v] : it->items()) {
      if (!v.is_boolean()) throw Error(ErrorCode::SchemaError, id, "context values must be booleans");
      s.context[id] = v.get<bool>();
    }
  }
  return s;
}

inline Json to_json(const AttackScenario& s) {
  Json j;
  j["kind"] = to_string(s.kind);
  switch (s.kind) {
    case ScenarioKind::SupplyChain:
      j["attribute"] = s.attribute;
      j["value"] = s.value;
      break;
    case ScenarioKind::NetworkIntrusion:
      j["entry"] = s.entry;
      j["p"] = s.p;
      break;
    case ScenarioKind::Insider: j["component"] = s.component; break;
  }
  j["critical_step"] = s.critical_step;
  j["horizon"] = s.horizon;
  Json ctx = Json::object();
  for (const auto& [id, v] : s.context) ctx[id] = v;
  j["context"] = std::move(ctx);
  return j;
}

}  // namespace missionware
