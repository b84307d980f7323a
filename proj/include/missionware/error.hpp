#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace missionware {

enum class ErrorCode {
  // model construction
  DuplicateId,
  DanglingEdge,
  EdgeKindViolation,
  LogicCycle,
  TruthTableIncomplete,
  InvalidNode,
  // queries
  UnknownNode,
  WrongKind,
  NotAnalysisReady,
  // threat corpus
  SchemaError,
  HierarchyCycle,
  DanglingReference,
  EmptyDescriptor,
  UnknownRecord,
  // rewrites
  UnknownTarget,
  IdCollision,
  BadParams,
  IncomparableGraphs,
  // scoring
  UnknownLoss,
  BadWeights,
  InvalidCandidate,
  // simulation
  UnknownReference,
  BadScenario,
  StateSpaceTooLarge,
};

inline std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::DuplicateId: return "DuplicateId";
    case ErrorCode::DanglingEdge: return "DanglingEdge";
    case ErrorCode::EdgeKindViolation: return "EdgeKindViolation";
    case ErrorCode::LogicCycle: return "LogicCycle";
    case ErrorCode::TruthTableIncomplete: return "TruthTableIncomplete";
    case ErrorCode::InvalidNode: return "InvalidNode";
    case ErrorCode::UnknownNode: return "UnknownNode";
    case ErrorCode::WrongKind: return "WrongKind";
    case ErrorCode::NotAnalysisReady: return "NotAnalysisReady";
    case ErrorCode::SchemaError: return "SchemaError";
    case ErrorCode::HierarchyCycle: return "HierarchyCycle";
    case ErrorCode::DanglingReference: return "DanglingReference";
    case ErrorCode::EmptyDescriptor: return "EmptyDescriptor";
    case ErrorCode::UnknownRecord: return "UnknownRecord";
    case ErrorCode::UnknownTarget: return "UnknownTarget";
    case ErrorCode::IdCollision: return "IdCollision";
    case ErrorCode::BadParams: return "BadParams";
    case ErrorCode::IncomparableGraphs: return "IncomparableGraphs";
    case ErrorCode::UnknownLoss: return "UnknownLoss";
    case ErrorCode::BadWeights: return "BadWeights";
    case ErrorCode::InvalidCandidate: return "InvalidCandidate";
    case ErrorCode::UnknownReference: return "UnknownReference";
    case ErrorCode::BadScenario: return "BadScenario";
    case ErrorCode::StateSpaceTooLarge: return "StateSpaceTooLarge";
  }
  return "Unknown";
}

/// Every failure raised by the library. `subject` names the offending
/// element (node id, record id, parameter name) and may be empty.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, std::string subject, const std::string& detail)
      : std::runtime_error(std::string(to_string(code)) +
                           (subject.empty() ? "" : "(" + subject + ")") +
                           (detail.empty() ? "" : ": " + detail)),
        code_(code),
        subject_(std::move(subject)) {}

  ErrorCode code() const noexcept { return code_; }
  const std::string& subject() const noexcept { return subject_; }

 private:
  ErrorCode code_;
  std::string subject_;
};

}  // namespace missionware
