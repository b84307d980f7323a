#pragma once

// Resilience design patterns as S-graph rewrites.
//
// Every pattern replaces a component-class target by n replicas
// `<target>_1 .. <target>_n` that inherit its edges, keywords and
// attributes. Truth tables that read the target are rewritten to read the
// replicas through an aggregate:
//
//   DiverseRedundancy, VerifiableVoting   target' = AND(replicas)
//       (the function is lost only when every replica is compromised)
//   Physical/VirtualConfigHopping          target' = OR(replicas)
//       (whichever replica is active drives the function; the simulator
//        forces inactive replicas sound)
//
// Bookkeeping attributes written on new nodes:
//   replica_of     id of the node the replica mirrors (used by preserves_nominal)
//   pattern_group  id of the rewritten target
//   patterns       comma-separated protective tags on the replica
//   hop_group      hop-controller id (hopping replicas)
//   role           voter | disagreement_detected | hop_controller

#include <algorithm>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "missionware/error.hpp"
#include "missionware/model_io.hpp"
#include "missionware/sgraph.hpp"

namespace missionware {

enum class PatternKind { DiverseRedundancy, VerifiableVoting, PhysicalConfigHopping, VirtualConfigHopping };

inline std::string_view to_string(PatternKind kind) {
  switch (kind) {
    case PatternKind::DiverseRedundancy: return "DiverseRedundancy";
    case PatternKind::VerifiableVoting: return "VerifiableVoting";
    case PatternKind::PhysicalConfigHopping: return "PhysicalConfigHopping";
    case PatternKind::VirtualConfigHopping: return "VirtualConfigHopping";
  }
  return "?";
}

inline std::optional<PatternKind> parse_pattern_kind(std::string_view text) {
  for (auto kind : {PatternKind::DiverseRedundancy, PatternKind::VerifiableVoting, PatternKind::PhysicalConfigHopping,
                    PatternKind::VirtualConfigHopping}) {
    if (to_string(kind) == text) return kind;
  }
  return std::nullopt;
}

inline bool is_hopping(PatternKind kind) {
  return kind == PatternKind::PhysicalConfigHopping || kind == PatternKind::VirtualConfigHopping;
}

namespace tags {
inline constexpr std::string_view kDiverseRedundancy = "diverse_redundancy";
inline constexpr std::string_view kVerifiableVoting = "verifiable_voting";
inline constexpr std::string_view kPhysicalHopping = "physical_config_hopping";
inline constexpr std::string_view kVirtualHopping = "virtual_config_hopping";
}  // namespace tags

struct PatternParams {
  std::size_t replica_count = 2;
  std::string diversity_attribute;  // empty: replicas keep the target's attributes
  std::vector<std::string> diversity_values;
  std::string voter_id;  // VerifiableVoting; defaults to <target>_voter
  std::size_t hop_period = 1;

  bool operator==(const PatternParams&) const = default;
};

/// User-supplied; never computed.
struct PatternCosts {
  double financial = 0.0;
  double complexity_delta = 0.0;
  double performance_degradation = 0.0;  // fraction 0..1

  double total() const { return financial + complexity_delta + performance_degradation; }
  bool operator==(const PatternCosts&) const = default;
};

struct PatternApplication {
  PatternKind kind = PatternKind::DiverseRedundancy;
  std::string target;
  PatternParams params;
  PatternCosts costs;

  bool operator==(const PatternApplication&) const = default;
};

inline std::string replica_id(std::string_view target, std::size_t i) {
  return std::string(target) + "_" + std::to_string(i);
}
inline std::string voter_id(const PatternApplication& app) {
  return app.params.voter_id.empty() ? app.target + "_voter" : app.params.voter_id;
}
inline std::string disagreement_id(const PatternApplication& app) { return voter_id(app) + "_disagreement_detected"; }
inline std::string hop_controller_id(const PatternApplication& app) { return app.target + "_hop_controller"; }

inline std::vector<std::string> split_tags(std::string_view text) {
  std::vector<std::string> out;
  std::string item;
  std::istringstream in{std::string(text)};
  while (std::getline(in, item, ',')) {
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

namespace detail {

inline void check_params(const SGraph& g, const PatternApplication& app) {
  const auto* target = g.find(app.target);
  if (!target) throw Error(ErrorCode::UnknownTarget, app.target, "pattern target does not exist");
  if (!is_component(target->kind))
    throw Error(ErrorCode::BadParams, app.target, "pattern target must be a Controller, Actuator or Sensor");
  const auto& p = app.params;
  if (p.replica_count < 2 || p.replica_count > TruthTable::kMaxInputs)
    throw Error(ErrorCode::BadParams, "replica_count", "must be between 2 and 16");
  if (p.diversity_attribute.empty() != p.diversity_values.empty())
    throw Error(ErrorCode::BadParams, "diversity_values", "diversity needs both an attribute and its values");
  if (!p.diversity_attribute.empty()) {
    if (p.diversity_attribute == "replica_of" || p.diversity_attribute == "pattern_group" ||
        p.diversity_attribute == "patterns" || p.diversity_attribute == "hop_group")
      throw Error(ErrorCode::BadParams, "diversity_attribute", "reserved attribute name");
    std::set<std::string> distinct(p.diversity_values.begin(), p.diversity_values.end());
    if (p.diversity_values.size() != p.replica_count || distinct.size() != p.replica_count)
      throw Error(ErrorCode::BadParams, "diversity_values", "need replica_count distinct values");
  }
  if (is_hopping(app.kind) && p.hop_period < 1) throw Error(ErrorCode::BadParams, "hop_period", "must be positive");
}

inline std::vector<std::string> new_ids(const PatternApplication& app) {
  std::vector<std::string> ids;
  for (std::size_t i = 1; i <= app.params.replica_count; ++i) ids.push_back(replica_id(app.target, i));
  if (app.kind == PatternKind::VerifiableVoting) {
    ids.push_back(voter_id(app));
    ids.push_back(disagreement_id(app));
  }
  if (is_hopping(app.kind)) ids.push_back(hop_controller_id(app));
  return ids;
}

inline std::string join_tags(const std::set<std::string>& tags) {
  std::string out;
  for (const auto& t : tags) out += (out.empty() ? "" : ",") + t;
  return out;
}

inline std::set<std::string> replica_tags(const PatternApplication& app, const Node& target) {
  std::set<std::string> t;
  if (auto existing = target.attribute("patterns")) {
    for (auto& tag : split_tags(*existing)) t.insert(tag);
  }
  const bool diverse = !app.params.diversity_attribute.empty();
  switch (app.kind) {
    case PatternKind::DiverseRedundancy: t.emplace(tags::kDiverseRedundancy); break;
    case PatternKind::VerifiableVoting: t.emplace(tags::kVerifiableVoting); break;
    case PatternKind::PhysicalConfigHopping: t.emplace(tags::kPhysicalHopping); break;
    case PatternKind::VirtualConfigHopping: t.emplace(tags::kVirtualHopping); break;
  }
  if (diverse) t.emplace(tags::kDiverseRedundancy);
  return t;
}

/// Rewrites a table so that `target` is replaced in place by `replicas`,
/// read through the AND / OR aggregate.
inline TruthTable rewrite_table(const TruthTable& old, const std::string& target,
                                const std::vector<std::string>& replicas, bool any_replica, const std::string& owner) {
  auto pos = static_cast<std::size_t>(std::find(old.inputs.begin(), old.inputs.end(), target) - old.inputs.begin());
  std::vector<std::string> inputs(old.inputs.begin(), old.inputs.begin() + static_cast<std::ptrdiff_t>(pos));
  inputs.insert(inputs.end(), replicas.begin(), replicas.end());
  inputs.insert(inputs.end(), old.inputs.begin() + static_cast<std::ptrdiff_t>(pos) + 1, old.inputs.end());
  if (inputs.size() > TruthTable::kMaxInputs)
    throw Error(ErrorCode::BadParams, owner, "rewritten truth table would exceed 16 inputs");

  const auto n = replicas.size();
  return TruthTable::from_function(std::move(inputs), [&](const std::vector<bool>& bits) {
    bool aggregate = any_replica ? false : true;
    for (std::size_t r = 0; r < n; ++r) aggregate = any_replica ? (aggregate || bits[pos + r]) : (aggregate && bits[pos + r]);
    std::uint32_t row = 0;
    for (std::size_t j = 0; j < old.inputs.size(); ++j) {
      bool value = j < pos ? bits[j] : (j == pos ? aggregate : bits[j + n - 1]);
      row = (row << 1U) | (value ? 1U : 0U);
    }
    return old.at(row);
  });
}

inline std::size_t popcount(const std::vector<bool>& bits) {
  return static_cast<std::size_t>(std::count(bits.begin(), bits.end(), true));
}

}  // namespace detail

/// Voter output: true (untrusted) once ceil(n/2) or more replicas are
/// compromised.
inline TruthTable voter_table(const std::vector<std::string>& replicas) {
  const auto n = replicas.size();
  return TruthTable::from_function(replicas, [n](const std::vector<bool>& bits) {
    return detail::popcount(bits) >= (n + 1) / 2;
  });
}

/// Replicas disagree: some but not all are compromised.
inline TruthTable disagreement_table(const std::vector<std::string>& replicas) {
  const auto n = replicas.size();
  return TruthTable::from_function(replicas, [n](const std::vector<bool>& bits) {
    auto k = detail::popcount(bits);
    return k > 0 && k < n;
  });
}

/// Returns the rewritten graph; `g` is untouched. Throws UnknownTarget,
/// IdCollision or BadParams.
inline SGraph apply(const SGraph& g, const PatternApplication& app) {
  detail::check_params(g, app);
  for (const auto& id : detail::new_ids(app)) {
    if (id != app.target && g.find(id))
      throw Error(ErrorCode::IdCollision, id, "id produced by the rewrite already exists");
  }

  const Node& target = g.node(app.target);
  const auto n = app.params.replica_count;
  std::vector<std::string> replicas;
  for (std::size_t i = 1; i <= n; ++i) replicas.push_back(replica_id(app.target, i));
  const bool any_replica = is_hopping(app.kind);
  const auto tag_set = detail::replica_tags(app, target);

  std::vector<Node> nodes;
  for (const auto& node : g.nodes()) {
    if (node.id == app.target) continue;
    Node copy = node;
    if (copy.truth_table && std::find(copy.truth_table->inputs.begin(), copy.truth_table->inputs.end(), app.target) !=
                                copy.truth_table->inputs.end()) {
      copy.truth_table = detail::rewrite_table(*copy.truth_table, app.target, replicas, any_replica, copy.id);
    }
    nodes.push_back(std::move(copy));
  }

  for (std::size_t i = 0; i < n; ++i) {
    Node r = target;
    r.id = replicas[i];
    r.label = target.label + " (replica " + std::to_string(i + 1) + ")";
    if (!app.params.diversity_attribute.empty()) r.attributes[app.params.diversity_attribute] = app.params.diversity_values[i];
    // Replicas of a replica point straight at the node it mirrors.
    r.attributes["replica_of"] = target.attribute("replica_of").value_or(app.target);
    r.attributes["pattern_group"] = app.target;
    r.attributes["patterns"] = detail::join_tags(tag_set);
    if (is_hopping(app.kind)) {
      r.attributes["hop_group"] = hop_controller_id(app);
      r.attributes.erase("virtual");
      if (app.kind == PatternKind::VirtualConfigHopping) r.attributes["virtual"] = "true";
    }
    nodes.push_back(std::move(r));
  }

  if (app.kind == PatternKind::VerifiableVoting) {
    Node voter;
    voter.id = voter_id(app);
    voter.kind = NodeKind::Logic;
    voter.label = "majority voter over " + app.target + " replicas";
    voter.attributes = {{"role", "voter"}, {"pattern_group", app.target}};
    voter.truth_table = voter_table(replicas);
    nodes.push_back(std::move(voter));

    Node disagree;
    disagree.id = disagreement_id(app);
    disagree.kind = NodeKind::Logic;
    disagree.label = "disagreement detected among " + app.target + " replicas";
    disagree.attributes = {{"role", "disagreement_detected"}, {"pattern_group", app.target}};
    disagree.truth_table = disagreement_table(replicas);
    nodes.push_back(std::move(disagree));
  }

  if (is_hopping(app.kind)) {
    Node hop;
    hop.id = hop_controller_id(app);
    hop.kind = NodeKind::Controller;
    hop.label = "configuration hopping controller for " + app.target;
    hop.attributes = {{"role", "hop_controller"},
                      {"pattern_group", app.target},
                      {"hop_period", std::to_string(app.params.hop_period)}};
    if (app.kind == PatternKind::VirtualConfigHopping) hop.attributes["virtual"] = "true";
    nodes.push_back(std::move(hop));
  }

  std::vector<Edge> edges;
  for (const auto& e : g.edges()) {
    const bool from_t = e.from == app.target;
    const bool to_t = e.to == app.target;
    if (!from_t && !to_t) {
      edges.push_back(e);
      continue;
    }
    for (std::size_t i = 0; i < n; ++i) {
      Edge copy = e;
      if (from_t) copy.from = replicas[i];
      if (to_t) copy.to = replicas[i];
      edges.push_back(std::move(copy));
    }
  }

  return SGraph::build(std::move(nodes), std::move(edges));
}

inline constexpr std::size_t kExhaustiveLeafLimit = 12;
inline constexpr std::size_t kNominalSampleCount = 4096;
inline constexpr std::uint64_t kNominalSampleSeed = 0x5EED;

namespace detail {

/// Node of `original` whose leaf value a node of `rewritten` mirrors.
inline std::optional<std::size_t> resolve_origin(const SGraph& original, const SGraph& rewritten, std::string id) {
  for (std::size_t guard = 0; guard <= rewritten.size(); ++guard) {
    if (auto idx = original.index_of(id)) return idx;
    const auto* n = rewritten.find(id);
    if (!n) return std::nullopt;
    auto parent = n->attribute("replica_of");
    if (!parent) return std::nullopt;
    id = *parent;
  }
  return std::nullopt;
}

inline std::set<std::string> outcome_ids(const SGraph& g) {
  std::set<std::string> out;
  for (const auto& n : g.nodes()) {
    if (n.kind == NodeKind::MissionLoss || n.kind == NodeKind::Hazard) out.insert(n.id);
  }
  return out;
}

}  // namespace detail

/// True iff `rewritten` yields the same hazard and loss values as `original`
/// for every leaf assignment of `original`, with each replica mirroring the
/// node it was derived from. Exhaustive up to 12 leaves, otherwise 4096
/// seeded samples. Throws IncomparableGraphs.
inline bool preserves_nominal(const SGraph& original, const SGraph& rewritten) {
  const auto outcomes = detail::outcome_ids(original);
  if (outcomes != detail::outcome_ids(rewritten))
    throw Error(ErrorCode::IncomparableGraphs, "", "graphs do not share the same hazards and losses");

  struct Link {
    std::size_t rewritten_index;
    std::size_t original_index;
  };
  std::vector<Link> links;
  for (auto leaf : rewritten.leaves()) {
    const auto& id = rewritten.node(leaf).id;
    auto origin = detail::resolve_origin(original, rewritten, id);
    if (!origin) throw Error(ErrorCode::IncomparableGraphs, id, "leaf has no counterpart in the original graph");
    links.push_back({leaf, *origin});
  }
  std::vector<std::pair<std::size_t, std::size_t>> compare;
  for (const auto& id : outcomes) compare.emplace_back(*original.index_of(id), *rewritten.index_of(id));

  const auto& leaves = original.leaves();
  std::vector<char> a(original.size(), 0);
  std::vector<char> b(rewritten.size(), 0);
  auto agrees = [&](auto&& assign) {
    std::fill(a.begin(), a.end(), 0);
    std::fill(b.begin(), b.end(), 0);
    assign();
    evaluate_in_place(original, a);
    for (const auto& l : links) b[l.rewritten_index] = a[l.original_index];
    evaluate_in_place(rewritten, b);
    return std::all_of(compare.begin(), compare.end(), [&](const auto& p) { return a[p.first] == b[p.second]; });
  };

  if (leaves.size() <= kExhaustiveLeafLimit) {
    for (std::uint32_t mask = 0; mask < (1U << leaves.size()); ++mask) {
      bool ok = agrees([&] {
        for (std::size_t j = 0; j < leaves.size(); ++j) a[leaves[j]] = (mask >> j) & 1U;
      });
      if (!ok) return false;
    }
    return true;
  }
  std::mt19937_64 rng(kNominalSampleSeed);
  for (std::size_t s = 0; s < kNominalSampleCount; ++s) {
    bool ok = agrees([&] {
      std::uint64_t bits = 0;
      for (std::size_t j = 0; j < leaves.size(); ++j) {
        if (j % 64 == 0) bits = rng();
        a[leaves[j]] = (bits >> (j % 64)) & 1U;
      }
    });
    if (!ok) return false;
  }
  return true;
}

inline Json to_json(const PatternApplication& app) {
  Json j;
  j["kind"] = to_string(app.kind);
  j["target"] = app.target;
  Json p;
  p["replica_count"] = app.params.replica_count;
  if (!app.params.diversity_attribute.empty()) {
    p["diversity_attribute"] = app.params.diversity_attribute;
    p["diversity_values"] = app.params.diversity_values;
  }
  if (app.kind == PatternKind::VerifiableVoting) p["voter_id"] = voter_id(app);
  if (is_hopping(app.kind)) p["hop_period"] = app.params.hop_period;
  j["params"] = std::move(p);
  j["costs"] = {{"financial", app.costs.financial},
                {"complexity_delta", app.costs.complexity_delta},
                {"performance_degradation", app.costs.performance_degradation}};
  return j;
}

inline PatternApplication pattern_from_json(const Json& j) {
  io::expect_keys(j, {"kind", "target", "params", "costs"}, "pattern application");
  PatternApplication app;
  auto kind_text = io::require_string(j, "kind", "pattern application");
  auto kind = parse_pattern_kind(kind_text);
  if (!kind) throw Error(ErrorCode::SchemaError, kind_text, "unknown pattern kind");
  app.kind = *kind;
  app.target = io::require_string(j, "target", "pattern application");
  auto count = [&](const Json& obj, const char* key, std::size_t& out) {
    if (auto it = obj.find(key); it != obj.end()) {
      if (!it->is_number_integer() || it->get<long long>() < 0)
        throw Error(ErrorCode::SchemaError, key, "must be a nonnegative integer");
      out = it->get<std::size_t>();
    }
  };
  auto real = [&](const Json& obj, const char* key, double& out) {
    if (auto it = obj.find(key); it != obj.end()) {
      if (!it->is_number()) throw Error(ErrorCode::SchemaError, key, "must be a number");
      out = it->get<double>();
    }
  };
  if (auto it = j.find("params"); it != j.end()) {
    io::expect_keys(*it, {"replica_count", "diversity_attribute", "diversity_values", "voter_id", "hop_period"}, "params");
    count(*it, "replica_count", app.params.replica_count);
    count(*it, "hop_period", app.params.hop_period);
    app.params.diversity_attribute = io::optional_string(*it, "diversity_attribute", "params");
    app.params.diversity_values = io::string_list(*it, "diversity_values", "params", false);
    app.params.voter_id = io::optional_string(*it, "voter_id", "params");
  }
  if (auto it = j.find("costs"); it != j.end()) {
    io::expect_keys(*it, {"financial", "complexity_delta", "performance_degradation"}, "costs");
    real(*it, "financial", app.costs.financial);
    real(*it, "complexity_delta", app.costs.complexity_delta);
    real(*it, "performance_degradation", app.costs.performance_degradation);
  }
  const auto& c = app.costs;
  if (c.financial < 0 || c.complexity_delta < 0 || c.performance_degradation < 0 || c.performance_degradation > 1)
    throw Error(ErrorCode::BadParams, "costs", "costs must be nonnegative and degradation at most 1");
  return app;
}

}  // namespace missionware
