#pragma once

// Attack surface (entry points and the attack vectors matched to them) and
// exploit chains from entry points to critical subsystems over Connectivity
// edges.

#include <optional>
#include <string>
#include <vector>

#include "missionware/error.hpp"
#include "missionware/sgraph.hpp"
#include "missionware/stamp.hpp"
#include "missionware/threatdb.hpp"

namespace missionware {

struct SurfaceEntry {
  std::string node;
  Mapping mapping;
};

struct AttackSurface {
  std::vector<SurfaceEntry> entries;  // ascending by node id
};

inline AttackSurface attack_surface(const SGraph& g, const ThreatCorpus& corpus, const MatchOptions& options = {}) {
  require_analysis_ready(g);
  AttackSurface surface;
  for (const auto& n : g.nodes()) {
    if (!n.entry_point) continue;
    Mapping m{n.id, {}};
    // A flagged node without descriptors is still part of the surface.
    if (!descriptor_tokens(n).empty()) m = map_component(corpus, n, options);
    surface.entries.push_back({n.id, std::move(m)});
  }
  return surface;
}

struct ExploitChain {
  std::vector<std::string> path;  // entry first, critical target last
  // Filled by annotate_chains; one slot per node of `path`.
  std::vector<std::optional<Mapping>> per_hop_vectors;

  std::size_t length() const { return path.empty() ? 0 : path.size() - 1; }
  bool operator==(const ExploitChain&) const = default;
};

inline constexpr std::size_t kDefaultMaxChainLength = 8;

/// Every simple Connectivity path of 1..max_len hops from an entry point to a
/// critical component, in lexicographic order of the id sequence.
inline std::vector<ExploitChain> exploit_chains(const SGraph& g, const CriticalSet& critical,
                                                std::size_t max_len = kDefaultMaxChainLength) {
  require_analysis_ready(g);
  if (max_len < 1) throw Error(ErrorCode::BadParams, "max_len", "must be at least 1");

  std::vector<bool> is_target(g.size(), false);
  for (const auto& id : critical.components) {
    if (auto idx = g.index_of(id)) is_target[*idx] = true;
  }

  std::vector<ExploitChain> out;
  std::vector<std::size_t> path;
  std::vector<bool> on_path(g.size(), false);

  // Node indices follow id order, so visiting successors in index order
  // emits paths lexicographically (a prefix sorts before its extensions).
  auto extend = [&](auto&& self) -> void {
    auto tail = path.back();
    if (path.size() > 1 && is_target[tail]) {
      ExploitChain chain;
      for (auto i : path) chain.path.push_back(g.node(i).id);
      out.push_back(std::move(chain));
    }
    if (path.size() - 1 == max_len) return;
    for (auto next : g.connectivity_successors(tail)) {
      if (on_path[next]) continue;
      on_path[next] = true;
      path.push_back(next);
      self(self);
      path.pop_back();
      on_path[next] = false;
    }
  };

  for (std::size_t i = 0; i < g.size(); ++i) {
    if (!g.node(i).entry_point) continue;
    path = {i};
    on_path[i] = true;
    extend(extend);
    on_path[i] = false;
  }
  return out;
}

/// Attaches a threat mapping to every chain node that has descriptors.
inline void annotate_chains(std::vector<ExploitChain>& chains, const SGraph& g, const ThreatCorpus& corpus,
                            const MatchOptions& options = {}) {
  std::map<std::string, std::optional<Mapping>> cache;
  for (auto& chain : chains) {
    chain.per_hop_vectors.clear();
    for (const auto& id : chain.path) {
      auto it = cache.find(id);
      if (it == cache.end()) {
        const auto& n = g.node(id);
        std::optional<Mapping> m;
        if (!descriptor_tokens(n).empty()) m = map_component(corpus, n, options);
        it = cache.emplace(id, std::move(m)).first;
      }
      chain.per_hop_vectors.push_back(it->second);
    }
  }
}

}  // namespace missionware
