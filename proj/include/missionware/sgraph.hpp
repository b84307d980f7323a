#pragma once

// Mission Aware specification graph (S-graph): typed nodes for mission
// losses, hazards, control structure and physical states, with Boolean
// truth tables on the loss/hazard/logic nodes.

#include <algorithm>
#include <cstdint>
#include <deque>
#include <functional>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "missionware/error.hpp"

namespace missionware {

enum class NodeKind { MissionLoss, Hazard, Controller, Actuator, Sensor, PhysicalState, Logic };

enum class EdgeKind { ControlAction, Feedback, Influence, Connectivity };

inline std::string_view to_string(NodeKind kind) {
  switch (kind) {
    case NodeKind::MissionLoss: return "MissionLoss";
    case NodeKind::Hazard: return "Hazard";
    case NodeKind::Controller: return "Controller";
    case NodeKind::Actuator: return "Actuator";
    case NodeKind::Sensor: return "Sensor";
    case NodeKind::PhysicalState: return "PhysicalState";
    case NodeKind::Logic: return "Logic";
  }
  return "?";
}

inline std::string_view to_string(EdgeKind kind) {
  switch (kind) {
    case EdgeKind::ControlAction: return "ControlAction";
    case EdgeKind::Feedback: return "Feedback";
    case EdgeKind::Influence: return "Influence";
    case EdgeKind::Connectivity: return "Connectivity";
  }
  return "?";
}

inline std::optional<NodeKind> parse_node_kind(std::string_view text) {
  for (auto kind : {NodeKind::MissionLoss, NodeKind::Hazard, NodeKind::Controller, NodeKind::Actuator,
                    NodeKind::Sensor, NodeKind::PhysicalState, NodeKind::Logic}) {
    if (to_string(kind) == text) return kind;
  }
  return std::nullopt;
}

inline std::optional<EdgeKind> parse_edge_kind(std::string_view text) {
  for (auto kind : {EdgeKind::ControlAction, EdgeKind::Feedback, EdgeKind::Influence, EdgeKind::Connectivity}) {
    if (to_string(kind) == text) return kind;
  }
  return std::nullopt;
}

/// Controller, Actuator and Sensor: the nodes that map onto real hardware or
/// software and can be attacked, replicated or flagged as entry points.
inline bool is_component(NodeKind kind) {
  return kind == NodeKind::Controller || kind == NodeKind::Actuator || kind == NodeKind::Sensor;
}

inline bool has_truth_table(NodeKind kind) {
  return kind == NodeKind::MissionLoss || kind == NodeKind::Hazard || kind == NodeKind::Logic;
}

/// Kinds a traceability query may start from.
inline bool is_trace_source(NodeKind kind) { return is_component(kind) || kind == NodeKind::PhysicalState; }

/// Total Boolean function over an ordered list of input node ids.
///
/// Row `i` holds the output for the input vector whose bit for `inputs[j]` is
/// bit `n-1-j` of `i`, so the textual key "b0b1...b(n-1)" read as a binary
/// number is the row index.
struct TruthTable {
  static constexpr std::size_t kMaxInputs = 16;

  std::vector<std::string> inputs;
  std::vector<bool> rows;

  std::size_t arity() const { return inputs.size(); }
  bool at(std::uint32_t row) const { return rows.at(row); }

  template <typename Fn>
  static TruthTable from_function(std::vector<std::string> inputs, Fn&& fn) {
    TruthTable table;
    const auto n = inputs.size();
    table.inputs = std::move(inputs);
    table.rows.resize(std::size_t{1} << n);
    std::vector<bool> bits(n);
    for (std::uint32_t row = 0; row < table.rows.size(); ++row) {
      for (std::size_t j = 0; j < n; ++j) bits[j] = (row >> (n - 1 - j)) & 1U;
      table.rows[row] = fn(static_cast<const std::vector<bool>&>(bits));
    }
    return table;
  }

  static std::string row_key(std::uint32_t row, std::size_t arity) {
    std::string key(arity, '0');
    for (std::size_t j = 0; j < arity; ++j) {
      if ((row >> (arity - 1 - j)) & 1U) key[j] = '1';
    }
    return key;
  }

  bool operator==(const TruthTable&) const = default;
};

struct Node {
  std::string id;
  NodeKind kind = NodeKind::Logic;
  std::string label;
  std::set<std::string> keywords;
  // Free-form tokens (supplier, pattern bookkeeping, ...). entry_point and
  // severity are typed fields below.
  std::map<std::string, std::string> attributes;
  bool entry_point = false;
  std::optional<int> severity;
  std::optional<TruthTable> truth_table;

  std::optional<std::string> attribute(std::string_view key) const {
    auto it = attributes.find(std::string(key));
    if (it == attributes.end()) return std::nullopt;
    return it->second;
  }

  bool operator==(const Node&) const = default;
};

struct Edge {
  std::string from;
  std::string to;
  EdgeKind kind = EdgeKind::Connectivity;
  std::string label;

  auto operator<=>(const Edge&) const = default;
};

/// Immutable, validated S-graph. Nodes are held sorted by id and edges by
/// (from, to, kind, label); node indices below refer to that order.
class SGraph {
 public:
  SGraph() = default;

  /// Validates raw nodes and edges. Throws Error with DuplicateId,
  /// InvalidNode, TruthTableIncomplete, DanglingEdge, EdgeKindViolation or
  /// LogicCycle naming the offending element.
  static SGraph build(std::vector<Node> nodes, std::vector<Edge> edges);

  const std::vector<Node>& nodes() const { return nodes_; }
  const std::vector<Edge>& edges() const { return edges_; }
  std::size_t size() const { return nodes_.size(); }

  std::optional<std::size_t> index_of(std::string_view id) const {
    auto it = index_.find(std::string(id));
    if (it == index_.end()) return std::nullopt;
    return it->second;
  }
  const Node* find(std::string_view id) const {
    auto idx = index_of(id);
    return idx ? &nodes_[*idx] : nullptr;
  }
  const Node& node(std::string_view id) const {
    if (const auto* n = find(id)) return *n;
    throw Error(ErrorCode::UnknownNode, std::string(id), "no such node");
  }
  const Node& node(std::size_t index) const { return nodes_[index]; }

  /// Truth-table nodes in dependency order (inputs before consumers).
  const std::vector<std::size_t>& evaluation_order() const { return evaluation_order_; }
  /// Input indices of a truth-table node; empty for other kinds.
  const std::vector<std::size_t>& inputs_of(std::size_t index) const { return table_inputs_[index]; }
  /// Non-table nodes referenced by at least one truth table, ascending by id.
  const std::vector<std::size_t>& leaves() const { return leaves_; }

  /// Traceability adjacency: ControlAction, Feedback and Influence edges plus
  /// input -> table references. Connectivity is attack reachability, not
  /// function, and is left out.
  const std::vector<std::size_t>& trace_successors(std::size_t index) const { return trace_out_[index]; }
  const std::vector<std::size_t>& trace_predecessors(std::size_t index) const { return trace_in_[index]; }

  /// Outgoing Connectivity neighbours, ascending by id.
  const std::vector<std::size_t>& connectivity_successors(std::size_t index) const { return connect_out_[index]; }

  std::vector<std::size_t> nodes_of_kind(NodeKind kind) const {
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < nodes_.size(); ++i) {
      if (nodes_[i].kind == kind) out.push_back(i);
    }
    return out;
  }

  bool operator==(const SGraph& other) const { return nodes_ == other.nodes_ && edges_ == other.edges_; }

 private:
  std::vector<Node> nodes_;
  std::vector<Edge> edges_;
  std::unordered_map<std::string, std::size_t> index_;
  std::vector<std::vector<std::size_t>> table_inputs_;
  std::vector<std::size_t> evaluation_order_;
  std::vector<std::size_t> leaves_;
  std::vector<std::vector<std::size_t>> trace_out_;
  std::vector<std::vector<std::size_t>> trace_in_;
  std::vector<std::vector<std::size_t>> connect_out_;
};

namespace detail {

inline bool is_token(std::string_view id) {
  if (id.empty()) return false;
  return std::none_of(id.begin(), id.end(), [](char c) { return c == ' ' || c == '\t' || c == '\n' || c == '\r'; });
}

inline void check_node(const Node& n) {
  if (!is_token(n.id)) throw Error(ErrorCode::InvalidNode, n.id, "id must be a nonempty token without whitespace");
  if (n.kind == NodeKind::MissionLoss) {
    if (!n.severity || *n.severity < 1 || *n.severity > 5)
      throw Error(ErrorCode::InvalidNode, n.id, "mission loss needs severity 1..5");
  } else if (n.severity) {
    throw Error(ErrorCode::InvalidNode, n.id, "severity only allowed on MissionLoss");
  }
  if (n.entry_point && !is_component(n.kind))
    throw Error(ErrorCode::InvalidNode, n.id, "entry_point only allowed on Controller, Actuator, Sensor");
  if (has_truth_table(n.kind) != n.truth_table.has_value()) {
    throw Error(has_truth_table(n.kind) ? ErrorCode::TruthTableIncomplete : ErrorCode::InvalidNode, n.id,
                has_truth_table(n.kind) ? "truth table required" : "truth table not allowed for this kind");
  }
  if (n.truth_table) {
    const auto& t = *n.truth_table;
    if (t.inputs.empty() || t.inputs.size() > TruthTable::kMaxInputs)
      throw Error(ErrorCode::TruthTableIncomplete, n.id, "truth table needs 1..16 inputs");
    if (t.rows.size() != (std::size_t{1} << t.inputs.size()))
      throw Error(ErrorCode::TruthTableIncomplete, n.id, "truth table must have exactly 2^n rows");
    std::set<std::string> seen(t.inputs.begin(), t.inputs.end());
    if (seen.size() != t.inputs.size())
      throw Error(ErrorCode::TruthTableIncomplete, n.id, "truth table inputs must be distinct");
  }
}

inline bool edge_kind_allowed(EdgeKind kind, NodeKind from, NodeKind to) {
  switch (kind) {
    case EdgeKind::ControlAction:
      return from == NodeKind::Controller && (to == NodeKind::Controller || to == NodeKind::Actuator);
    case EdgeKind::Feedback:
      return (from == NodeKind::Sensor || from == NodeKind::Controller) && to == NodeKind::Controller;
    case EdgeKind::Influence:
      return (from == NodeKind::Actuator && to == NodeKind::PhysicalState) ||
             (from == NodeKind::PhysicalState && to == NodeKind::Sensor) ||
             (from == NodeKind::PhysicalState && to == NodeKind::PhysicalState);
    case EdgeKind::Connectivity:
      return is_component(from) && is_component(to);
  }
  return false;
}

inline void sort_unique(std::vector<std::size_t>& v) {
  std::sort(v.begin(), v.end());
  v.erase(std::unique(v.begin(), v.end()), v.end());
}

}  // namespace detail

inline SGraph SGraph::build(std::vector<Node> nodes, std::vector<Edge> edges) {
  SGraph g;
  std::sort(nodes.begin(), nodes.end(), [](const Node& a, const Node& b) { return a.id < b.id; });
  for (std::size_t i = 1; i < nodes.size(); ++i) {
    if (nodes[i].id == nodes[i - 1].id) throw Error(ErrorCode::DuplicateId, nodes[i].id, "node id used twice");
  }
  for (const auto& n : nodes) detail::check_node(n);

  g.nodes_ = std::move(nodes);
  const auto count = g.nodes_.size();
  for (std::size_t i = 0; i < count; ++i) g.index_.emplace(g.nodes_[i].id, i);

  g.table_inputs_.resize(count);
  g.trace_out_.resize(count);
  g.trace_in_.resize(count);
  g.connect_out_.resize(count);

  std::vector<bool> is_leaf(count, false);
  for (std::size_t i = 0; i < count; ++i) {
    const auto& n = g.nodes_[i];
    if (!n.truth_table) continue;
    for (const auto& input : n.truth_table->inputs) {
      auto idx = g.index_of(input);
      if (!idx) throw Error(ErrorCode::DanglingEdge, n.id, "truth table input '" + input + "' does not exist");
      g.table_inputs_[i].push_back(*idx);
      g.trace_out_[*idx].push_back(i);
      g.trace_in_[i].push_back(*idx);
      if (!has_truth_table(g.nodes_[*idx].kind)) is_leaf[*idx] = true;
    }
  }

  std::sort(edges.begin(), edges.end());
  for (const auto& e : edges) {
    auto from = g.index_of(e.from);
    auto to = g.index_of(e.to);
    if (!from || !to) {
      throw Error(ErrorCode::DanglingEdge, e.from + "->" + e.to,
                  "edge endpoint '" + (from ? e.to : e.from) + "' does not exist");
    }
    if (!detail::edge_kind_allowed(e.kind, g.nodes_[*from].kind, g.nodes_[*to].kind)) {
      throw Error(ErrorCode::EdgeKindViolation, e.from + "->" + e.to,
                  std::string(to_string(e.kind)) + " edge cannot join " + std::string(to_string(g.nodes_[*from].kind)) +
                      " to " + std::string(to_string(g.nodes_[*to].kind)));
    }
    if (e.kind == EdgeKind::Connectivity) {
      g.connect_out_[*from].push_back(*to);
    } else {
      g.trace_out_[*from].push_back(*to);
      g.trace_in_[*to].push_back(*from);
    }
  }
  g.edges_ = std::move(edges);
  for (std::size_t i = 0; i < count; ++i) {
    detail::sort_unique(g.trace_out_[i]);
    detail::sort_unique(g.trace_in_[i]);
    detail::sort_unique(g.connect_out_[i]);
  }

  // Kahn's algorithm over the logic-dependency graph; a leftover table node
  // sits on (or behind) a cycle.
  std::vector<std::size_t> pending(count, 0);
  std::vector<std::vector<std::size_t>> consumers(count);
  std::set<std::size_t> ready;
  for (std::size_t i = 0; i < count; ++i) {
    if (!g.nodes_[i].truth_table) continue;
    for (auto input : g.table_inputs_[i]) {
      if (g.nodes_[input].truth_table) {
        ++pending[i];
        consumers[input].push_back(i);
      }
    }
    if (pending[i] == 0) ready.insert(i);
  }
  while (!ready.empty()) {
    auto i = *ready.begin();
    ready.erase(ready.begin());
    g.evaluation_order_.push_back(i);
    for (auto c : consumers[i]) {
      if (--pending[c] == 0) ready.insert(c);
    }
  }
  for (std::size_t i = 0; i < count; ++i) {
    if (g.nodes_[i].truth_table && pending[i] != 0)
      throw Error(ErrorCode::LogicCycle, g.nodes_[i].id, "truth-table dependencies form a cycle");
  }

  for (std::size_t i = 0; i < count; ++i) {
    if (is_leaf[i]) g.leaves_.push_back(i);
  }
  return g;
}

/// Total mapping node id -> value.
using Activation = std::map<std::string, bool>;

/// Evaluates every truth-table node in place. `values` is indexed by node
/// index; entries of non-table nodes are read, entries of table nodes are
/// overwritten.
inline void evaluate_in_place(const SGraph& g, std::vector<char>& values) {
  for (auto i : g.evaluation_order()) {
    const auto& inputs = g.inputs_of(i);
    std::uint32_t row = 0;
    for (auto input : inputs) row = (row << 1U) | (values[input] ? 1U : 0U);
    values[i] = g.node(i).truth_table->at(row) ? 1 : 0;
  }
}

/// Unassigned nodes are nominal (false). Values given for truth-table nodes
/// are ignored since those nodes are computed.
inline Activation evaluate(const SGraph& g, const std::map<std::string, bool>& leaf_states) {
  std::vector<char> values(g.size(), 0);
  for (const auto& [id, value] : leaf_states) {
    auto idx = g.index_of(id);
    if (!idx) throw Error(ErrorCode::UnknownNode, id, "leaf state for unknown node");
    values[*idx] = value ? 1 : 0;
  }
  evaluate_in_place(g, values);
  Activation out;
  for (std::size_t i = 0; i < g.size(); ++i) out.emplace_hint(out.end(), g.node(i).id, values[i] != 0);
  return out;
}

/// Nodes reachable from `start` (exclusive) along trace successors or
/// predecessors, as a membership mask.
inline std::vector<bool> trace_closure(const SGraph& g, std::size_t start, bool forward) {
  std::vector<bool> seen(g.size(), false);
  std::deque<std::size_t> queue{start};
  while (!queue.empty()) {
    auto i = queue.front();
    queue.pop_front();
    const auto& next = forward ? g.trace_successors(i) : g.trace_predecessors(i);
    for (auto j : next) {
      if (!seen[j]) {
        seen[j] = true;
        queue.push_back(j);
      }
    }
  }
  return seen;
}

struct TraceUp {
  std::vector<std::string> hazards;
  std::vector<std::string> losses;

  bool empty() const { return hazards.empty() && losses.empty(); }
  bool operator==(const TraceUp&) const = default;
};

/// Hazards and mission losses a component or physical state can influence.
inline TraceUp trace_up(const SGraph& g, std::string_view component) {
  auto idx = g.index_of(component);
  if (!idx) throw Error(ErrorCode::UnknownNode, std::string(component), "no such node");
  if (!is_trace_source(g.node(*idx).kind))
    throw Error(ErrorCode::WrongKind, std::string(component), "trace_up starts from a component or physical state");
  auto seen = trace_closure(g, *idx, true);
  TraceUp out;
  for (std::size_t i = 0; i < g.size(); ++i) {
    if (!seen[i]) continue;
    if (g.node(i).kind == NodeKind::Hazard) out.hazards.push_back(g.node(i).id);
    if (g.node(i).kind == NodeKind::MissionLoss) out.losses.push_back(g.node(i).id);
  }
  return out;
}

/// Components and physical states that can contribute to a mission loss.
inline std::vector<std::string> trace_down(const SGraph& g, std::string_view loss) {
  auto idx = g.index_of(loss);
  if (!idx) throw Error(ErrorCode::UnknownNode, std::string(loss), "no such node");
  if (g.node(*idx).kind != NodeKind::MissionLoss)
    throw Error(ErrorCode::WrongKind, std::string(loss), "trace_down starts from a mission loss");
  auto seen = trace_closure(g, *idx, false);
  std::vector<std::string> out;
  for (std::size_t i = 0; i < g.size(); ++i) {
    if (seen[i] && is_trace_source(g.node(i).kind)) out.push_back(g.node(i).id);
  }
  return out;
}

}  // namespace missionware
