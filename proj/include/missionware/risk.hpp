#pragma once

// Risk scoring on three dimensions (severity of the mission loss, attack
// complexity, mitigability) and ranking of candidate pattern sets against
// their cost.
//
//   scalar = w_s * severity/5 + w_c * 1/attack_complexity + w_m * (1 - mitigability)
//
// Without an expert value, attack_complexity is the cheapest exploit chain
// ending in the loss's trace_down set: hop count plus a per-pattern delta for
// every protective pattern met on the path. No such chain means +inf, and the
// complexity term contributes 0.

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "missionware/error.hpp"
#include "missionware/patterns.hpp"
#include "missionware/sgraph.hpp"
#include "missionware/stamp.hpp"
#include "missionware/surface.hpp"

namespace missionware {

struct RiskWeights {
  double severity = 1.0 / 3.0;
  double complexity = 1.0 / 3.0;
  double mitigability = 1.0 / 3.0;

  void check() const {
    if (severity < 0 || complexity < 0 || mitigability < 0)
      throw Error(ErrorCode::BadWeights, "", "weights must be nonnegative");
    if (std::abs(severity + complexity + mitigability - 1.0) > 1e-9)
      throw Error(ErrorCode::BadWeights, "", "weights must sum to 1");
  }
};

/// Expert values that replace the computed / default ones for one loss.
struct RiskOverride {
  std::optional<double> attack_complexity;
  std::optional<double> mitigability;
};
using RiskOverrides = std::map<std::string, RiskOverride>;

/// Attack-complexity increments for protective patterns met on a chain.
struct PatternDeltas {
  double diverse_redundancy = 1.0;
  double verifiable_voting = 1.0;
  double hopping = 2.0;

  double of(std::string_view tag) const {
    if (tag == tags::kDiverseRedundancy) return diverse_redundancy;
    if (tag == tags::kVerifiableVoting) return verifiable_voting;
    if (tag == tags::kPhysicalHopping || tag == tags::kVirtualHopping) return hopping;
    return 0.0;
  }
};

struct RiskScore {
  std::string loss;
  int severity = 1;
  double attack_complexity = std::numeric_limits<double>::infinity();
  double mitigability = 0.0;
  double scalar = 0.0;
};

inline double risk_scalar(int severity, double attack_complexity, double mitigability, const RiskWeights& w) {
  const double complexity_term = std::isinf(attack_complexity) ? 0.0 : 1.0 / attack_complexity;
  return w.severity * (severity / 5.0) + w.complexity * complexity_term + w.mitigability * (1.0 - mitigability);
}

/// Hop count plus one delta per distinct (pattern group, tag) on the path.
inline double chain_complexity(const SGraph& g, const ExploitChain& chain, const PatternDeltas& deltas = {}) {
  std::set<std::pair<std::string, std::string>> met;
  for (const auto& id : chain.path) {
    const auto& n = g.node(id);
    auto tag_list = n.attribute("patterns");
    if (!tag_list) continue;
    auto group = n.attribute("pattern_group").value_or(id);
    for (auto& t : split_tags(*tag_list)) met.emplace(group, std::move(t));
  }
  double c = static_cast<double>(chain.length());
  for (const auto& [group, tag] : met) c += deltas.of(tag);
  return c;
}

inline RiskScore score(const SGraph& g, const std::vector<ExploitChain>& chains, std::string_view loss,
                       const RiskOverrides& overrides = {}, const RiskWeights& weights = {},
                       const PatternDeltas& deltas = {}) {
  weights.check();
  const auto* node = g.find(loss);
  if (!node || node->kind != NodeKind::MissionLoss)
    throw Error(ErrorCode::UnknownLoss, std::string(loss), "not a mission loss of this model");

  RiskScore s;
  s.loss = node->id;
  s.severity = node->severity.value_or(1);

  const auto relevant_list = trace_down(g, loss);
  const std::set<std::string> relevant(relevant_list.begin(), relevant_list.end());
  for (const auto& chain : chains) {
    if (chain.path.empty() || !relevant.count(chain.path.back())) continue;
    s.attack_complexity = std::min(s.attack_complexity, chain_complexity(g, chain, deltas));
  }

  if (auto it = overrides.find(s.loss); it != overrides.end()) {
    if (const auto& c = it->second.attack_complexity) {
      if (!(*c > 0)) throw Error(ErrorCode::BadParams, s.loss, "attack complexity override must be positive");
      s.attack_complexity = *c;
    }
    if (const auto& m = it->second.mitigability) {
      if (*m < 0 || *m > 1) throw Error(ErrorCode::BadParams, s.loss, "mitigability must lie in [0, 1]");
      s.mitigability = *m;
    }
  }
  s.scalar = risk_scalar(s.severity, s.attack_complexity, s.mitigability, weights);
  return s;
}

/// Scores of every mission loss, ascending by loss id. Overrides must name
/// mission losses.
inline std::vector<RiskScore> score_all(const SGraph& g, const std::vector<ExploitChain>& chains,
                                        const RiskOverrides& overrides = {}, const RiskWeights& weights = {},
                                        const PatternDeltas& deltas = {}) {
  for (const auto& [loss, o] : overrides) {
    const auto* node = g.find(loss);
    if (!node || node->kind != NodeKind::MissionLoss)
      throw Error(ErrorCode::UnknownLoss, loss, "override names no mission loss of this model");
  }
  std::vector<RiskScore> out;
  for (auto idx : g.nodes_of_kind(NodeKind::MissionLoss)) {
    out.push_back(score(g, chains, g.node(idx).id, overrides, weights, deltas));
  }
  return out;
}

struct Variant {
  std::string id;
  std::vector<PatternApplication> applications;
};

enum class Aggregation { Max, Sum };

struct RankingContext {
  RiskWeights weights;
  RiskOverrides overrides;
  PatternDeltas deltas;
  std::size_t max_len = kDefaultMaxChainLength;
  Aggregation aggregation = Aggregation::Max;
};

struct ScoredVariant {
  std::string id;
  std::vector<PatternApplication> applications;
  std::vector<RiskScore> scores;  // ascending by loss id
  double aggregate_risk = 0.0;
  double total_cost = 0.0;

  const RiskScore* score_for(std::string_view loss) const {
    auto it = std::find_if(scores.begin(), scores.end(), [&](const RiskScore& s) { return s.loss == loss; });
    return it == scores.end() ? nullptr : &*it;
  }
};

struct VariantRanking {
  std::vector<ScoredVariant> variants;
  std::vector<std::size_t> pareto_front;  // indices into `variants`, ascending
};

inline constexpr std::string_view kBaselineVariant = "baseline";

/// `a` dominates `b`: no worse on every loss and on cost, better somewhere.
inline bool dominates(const ScoredVariant& a, const ScoredVariant& b) {
  bool strict = a.total_cost < b.total_cost;
  if (a.total_cost > b.total_cost) return false;
  for (std::size_t i = 0; i < a.scores.size(); ++i) {
    if (a.scores[i].scalar > b.scores[i].scalar) return false;
    strict |= a.scores[i].scalar < b.scores[i].scalar;
  }
  return strict;
}

inline std::vector<std::size_t> pareto_front(const std::vector<ScoredVariant>& variants) {
  std::vector<std::size_t> front;
  for (std::size_t i = 0; i < variants.size(); ++i) {
    bool dominated = false;
    for (std::size_t j = 0; j < variants.size() && !dominated; ++j) dominated = j != i && dominates(variants[j], variants[i]);
    if (!dominated) front.push_back(i);
  }
  return front;
}

/// Applies a variant's patterns in order.
inline SGraph apply_all(const SGraph& g, const std::vector<PatternApplication>& apps) {
  SGraph out = g;
  for (const auto& app : apps) out = apply(out, app);
  return out;
}

inline ScoredVariant score_variant(const SGraph& g, const Variant& v, const RankingContext& ctx) {
  ScoredVariant sv{v.id, v.applications, {}, 0.0, 0.0};
  auto fail = [&](std::size_t i, const std::string& why) {
    const auto& app = v.applications[i];
    throw Error(ErrorCode::InvalidCandidate, v.id + "#" + std::to_string(i),
                std::string(to_string(app.kind)) + " on " + app.target + ": " + why);
  };
  SGraph rewritten = g;
  for (std::size_t i = 0; i < v.applications.size(); ++i) {
    try {
      rewritten = apply(rewritten, v.applications[i]);
    } catch (const Error& e) {
      fail(i, e.what());
    }
    sv.total_cost += v.applications[i].costs.total();
  }
  if (!v.applications.empty()) {
    if (!preserves_nominal(g, rewritten)) fail(v.applications.size() - 1, "rewrite changes nominal behaviour");
    if (!validate(rewritten).analysis_ready) fail(v.applications.size() - 1, "rewritten model is not analysis-ready");
  }
  const auto critical = critical_subsystems(rewritten);
  const auto chains = exploit_chains(rewritten, critical, ctx.max_len);
  sv.scores = score_all(rewritten, chains, ctx.overrides, ctx.weights, ctx.deltas);
  for (const auto& s : sv.scores) {
    sv.aggregate_risk =
        ctx.aggregation == Aggregation::Max ? std::max(sv.aggregate_risk, s.scalar) : sv.aggregate_risk + s.scalar;
  }
  return sv;
}

/// Scores the baseline plus every candidate, sorted by (aggregate risk,
/// total cost, id). Throws InvalidCandidate naming the failing application.
inline VariantRanking rank_variants(const SGraph& g, const std::vector<Variant>& candidates,
                                    const RankingContext& ctx = {}) {
  ctx.weights.check();
  require_analysis_ready(g);
  std::set<std::string> ids{std::string(kBaselineVariant)};
  for (const auto& c : candidates) {
    if (!ids.insert(c.id).second) throw Error(ErrorCode::InvalidCandidate, c.id, "duplicate variant id");
  }

  VariantRanking ranking;
  ranking.variants.push_back(score_variant(g, {std::string(kBaselineVariant), {}}, ctx));
  for (const auto& c : candidates) ranking.variants.push_back(score_variant(g, c, ctx));
  std::sort(ranking.variants.begin(), ranking.variants.end(), [](const ScoredVariant& a, const ScoredVariant& b) {
    if (a.aggregate_risk != b.aggregate_risk) return a.aggregate_risk < b.aggregate_risk;
    if (a.total_cost != b.total_cost) return a.total_cost < b.total_cost;
    return a.id < b.id;
  });
  ranking.pareto_front = pareto_front(ranking.variants);
  return ranking;
}

}  // namespace missionware
