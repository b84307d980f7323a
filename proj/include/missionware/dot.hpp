#pragma once

// Graphviz export. Node shape follows NodeKind, edge style follows
// EdgeKind; truth-table input references are drawn as thin grey arrows.

#include <ostream>
#include <sstream>
#include <string>

#include "missionware/sgraph.hpp"

namespace missionware {

namespace dot {

inline std::string quote(std::string_view s) {
  std::string out = "\"";
  for (char c : s) {
    if (c == '"' || c == '\\') out.push_back('\\');
    if (c == '\n') {
      out += "\\n";
      continue;
    }
    out.push_back(c);
  }
  out.push_back('"');
  return out;
}

inline std::string_view shape(NodeKind kind) {
  switch (kind) {
    case NodeKind::MissionLoss: return "doubleoctagon";
    case NodeKind::Hazard: return "octagon";
    case NodeKind::Controller: return "box";
    case NodeKind::Actuator: return "invhouse";
    case NodeKind::Sensor: return "house";
    case NodeKind::PhysicalState: return "ellipse";
    case NodeKind::Logic: return "diamond";
  }
  return "box";
}

inline std::string_view fill(NodeKind kind) {
  switch (kind) {
    case NodeKind::MissionLoss:
    case NodeKind::Hazard: return "orange";
    case NodeKind::Logic: return "grey85";
    case NodeKind::PhysicalState: return "lightblue";
    default: return "white";
  }
}

inline std::string_view style(EdgeKind kind) {
  switch (kind) {
    case EdgeKind::ControlAction: return "solid";
    case EdgeKind::Feedback: return "dashed";
    case EdgeKind::Influence: return "dotted";
    case EdgeKind::Connectivity: return "bold";
  }
  return "solid";
}

}  // namespace dot

inline void write_dot(const SGraph& g, std::ostream& out) {
  out << "digraph sgraph {\n";
  out << "  rankdir=BT;\n";
  out << "  node [style=filled, fontname=\"Helvetica\"];\n";
  for (const auto& n : g.nodes()) {
    std::string label = n.label.empty() ? n.id : n.id + "\n" + n.label;
    out << "  " << dot::quote(n.id) << " [label=" << dot::quote(label) << ", shape=" << dot::shape(n.kind)
        << ", fillcolor=" << dot::fill(n.kind);
    if (n.entry_point) out << ", penwidth=3, color=red";
    out << "];\n";
  }
  for (const auto& e : g.edges()) {
    out << "  " << dot::quote(e.from) << " -> " << dot::quote(e.to) << " [style=" << dot::style(e.kind)
        << ", tooltip=" << dot::quote(std::string(to_string(e.kind)));
    if (!e.label.empty()) out << ", label=" << dot::quote(e.label);
    if (e.kind == EdgeKind::Connectivity) out << ", color=red";
    out << "];\n";
  }
  for (const auto& n : g.nodes()) {
    if (!n.truth_table) continue;
    for (const auto& input : n.truth_table->inputs) {
      out << "  " << dot::quote(input) << " -> " << dot::quote(n.id) << " [color=grey50, arrowhead=vee];\n";
    }
  }
  out << "}\n";
}

inline std::string to_dot(const SGraph& g) {
  std::ostringstream out;
  write_dot(g, out);
  return out.str();
}

}  // namespace missionware
