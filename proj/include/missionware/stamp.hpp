#pragma once

// STAMP workflow checks over an S-graph (losses -> hazards -> control
// structure -> causal factors) and the critical-subsystem list that seeds
// threat modeling.

#include <algorithm>
#include <optional>
#include <string>
#include <vector>

#include "missionware/error.hpp"
#include "missionware/model_io.hpp"
#include "missionware/sgraph.hpp"

namespace missionware {

enum class FindingSeverity { Error, Warning };

inline std::string_view to_string(FindingSeverity s) { return s == FindingSeverity::Error ? "Error" : "Warning"; }

struct Finding {
  FindingSeverity severity = FindingSeverity::Error;
  std::string code;
  std::string subject;
  std::string message;

  bool operator==(const Finding&) const = default;
};

struct ValidationReport {
  std::vector<Finding> findings;
  bool analysis_ready = false;

  std::size_t count(FindingSeverity s) const {
    return static_cast<std::size_t>(
        std::count_if(findings.begin(), findings.end(), [s](const Finding& f) { return f.severity == s; }));
  }
  bool has(std::string_view code) const {
    return std::any_of(findings.begin(), findings.end(), [code](const Finding& f) { return f.code == code; });
  }
  bool operator==(const ValidationReport&) const = default;
};

namespace detail {

/// Truth-table input closure of `start` (transitive inputs), as a mask.
inline std::vector<bool> table_closure(const SGraph& g, std::size_t start) {
  std::vector<bool> seen(g.size(), false);
  std::vector<std::size_t> stack{start};
  while (!stack.empty()) {
    auto i = stack.back();
    stack.pop_back();
    for (auto input : g.inputs_of(i)) {
      if (!seen[input]) {
        seen[input] = true;
        stack.push_back(input);
      }
    }
  }
  return seen;
}

}  // namespace detail

inline ValidationReport validate(const SGraph& g) {
  ValidationReport report;
  auto add = [&](FindingSeverity s, std::string code, std::string subject, std::string message) {
    report.findings.push_back({s, std::move(code), std::move(subject), std::move(message)});
  };

  const auto losses = g.nodes_of_kind(NodeKind::MissionLoss);
  if (losses.empty()) add(FindingSeverity::Error, "NO_LOSSES", "", "model defines no mission loss");

  for (auto loss : losses) {
    auto closure = detail::table_closure(g, loss);
    bool any_hazard = false;
    for (std::size_t i = 0; i < g.size(); ++i) any_hazard |= closure[i] && g.node(i).kind == NodeKind::Hazard;
    if (!any_hazard)
      add(FindingSeverity::Error, "ORPHAN_LOSS", g.node(loss).id, "no hazard in the loss's truth-table closure");
  }

  for (auto hazard : g.nodes_of_kind(NodeKind::Hazard)) {
    auto closure = detail::table_closure(g, hazard);
    bool any_cause = false;
    for (std::size_t i = 0; i < g.size(); ++i) any_cause |= closure[i] && is_trace_source(g.node(i).kind);
    if (!any_cause)
      add(FindingSeverity::Error, "ORPHAN_HAZARD", g.node(hazard).id,
          "no component or physical state in the hazard's truth-table closure");
  }

  for (auto c : g.nodes_of_kind(NodeKind::Controller)) {
    const auto& id = g.node(c).id;
    bool commands = false;
    bool hears_back = false;
    for (const auto& e : g.edges()) {
      commands |= e.kind == EdgeKind::ControlAction && e.from == id;
      hears_back |= e.kind == EdgeKind::Feedback && e.to == id;
    }
    if (commands && !hears_back)
      add(FindingSeverity::Warning, "NO_FEEDBACK", id, "controller issues control actions but receives no feedback");
  }

  for (std::size_t i = 0; i < g.size(); ++i) {
    if (!is_component(g.node(i).kind)) continue;
    if (trace_up(g, g.node(i).id).empty())
      add(FindingSeverity::Warning, "UNREACHED_COMPONENT", g.node(i).id, "component reaches no hazard or loss");
  }

  report.analysis_ready = report.count(FindingSeverity::Error) == 0;
  return report;
}

inline std::string finding_code(ErrorCode code) {
  switch (code) {
    case ErrorCode::DuplicateId: return "DUPLICATE_ID";
    case ErrorCode::DanglingEdge: return "DANGLING_EDGE";
    case ErrorCode::EdgeKindViolation: return "EDGE_KIND_VIOLATION";
    case ErrorCode::LogicCycle: return "LOGIC_CYCLE";
    case ErrorCode::TruthTableIncomplete: return "TRUTH_TABLE_INCOMPLETE";
    case ErrorCode::InvalidNode: return "INVALID_NODE";
    default: return "MODEL_ERROR";
  }
}

/// Builds and validates in one step; construction failures become a single
/// Error finding instead of an exception.
inline ValidationReport validate_document(ModelDocument doc) {
  try {
    return validate(SGraph::build(std::move(doc.nodes), std::move(doc.edges)));
  } catch (const Error& e) {
    ValidationReport report;
    report.findings.push_back({FindingSeverity::Error, finding_code(e.code()), e.subject(), e.what()});
    report.analysis_ready = false;
    return report;
  }
}

struct Justification {
  std::optional<std::string> hazard;  // empty when the loss is reached without a hazard
  std::string loss;

  auto operator<=>(const Justification&) const = default;
};

struct CriticalSet {
  std::vector<std::string> components;
  std::map<std::string, std::vector<Justification>> justification;

  bool contains(std::string_view id) const {
    return std::find(components.begin(), components.end(), id) != components.end();
  }
};

inline void require_analysis_ready(const SGraph& g) {
  if (!validate(g).analysis_ready) throw Error(ErrorCode::NotAnalysisReady, "", "model has validation errors");
}

/// Components and physical states whose compromise can reach a mission loss,
/// ordered by number of distinct losses (descending) then id.
inline CriticalSet critical_subsystems(const SGraph& g) {
  require_analysis_ready(g);

  struct Entry {
    std::string id;
    std::size_t loss_count;
  };
  std::vector<Entry> entries;
  CriticalSet set;
  for (std::size_t c = 0; c < g.size(); ++c) {
    if (!is_trace_source(g.node(c).kind)) continue;
    auto up = trace_up(g, g.node(c).id);
    if (up.losses.empty()) continue;
    std::vector<Justification> why;
    for (const auto& loss : up.losses) {
      bool via_hazard = false;
      auto above_loss = trace_closure(g, *g.index_of(loss), false);
      for (const auto& h : up.hazards) {
        if (above_loss[*g.index_of(h)]) {
          why.push_back({h, loss});
          via_hazard = true;
        }
      }
      // Direct route that bypasses every hazard.
      if (!via_hazard) why.push_back({std::nullopt, loss});
    }
    std::sort(why.begin(), why.end());
    entries.push_back({g.node(c).id, up.losses.size()});
    set.justification.emplace(g.node(c).id, std::move(why));
  }
  std::stable_sort(entries.begin(), entries.end(), [](const Entry& a, const Entry& b) {
    if (a.loss_count != b.loss_count) return a.loss_count > b.loss_count;
    return a.id < b.id;
  });
  for (auto& e : entries) set.components.push_back(std::move(e.id));
  return set;
}

}  // namespace missionware
