// Copyright 2026 The htdg Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace htdg {

enum class ErrorCode {
  // graph building
  FinalizedGraph,
  UnknownDomain,
  UnknownNode,
  DuplicateEdge,
  SelfLoopOnStrongEdge,
  CompositionCycle,
  UnfinalizedChild,
  ValidationFailed,
  KindMismatch,
  // primitives
  ProtocolViolation,
  // executor
  InvalidConfig,
  NotFinalized,
  SecondConcurrentRun,
  ConditionIndexOutOfRange,
  NotInstrumented,
  WaitFromWorker,
  // device flows
  CycleDetected,
  Deadlock,
  DependencyViolation,
  // bench
  NonTermination,
  OracleMismatch,
  ChecksumMismatch,
  BoundViolation,
  UnknownCorpus,
};

std::string_view to_string(ErrorCode code) noexcept;

// All library failures are reported through this one exception type; the
// code is what callers and tests switch on.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

inline std::string_view to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::FinalizedGraph: return "FinalizedGraph";
    case ErrorCode::UnknownDomain: return "UnknownDomain";
    case ErrorCode::UnknownNode: return "UnknownNode";
    case ErrorCode::DuplicateEdge: return "DuplicateEdge";
    case ErrorCode::SelfLoopOnStrongEdge: return "SelfLoopOnStrongEdge";
    case ErrorCode::CompositionCycle: return "CompositionCycle";
    case ErrorCode::UnfinalizedChild: return "UnfinalizedChild";
    case ErrorCode::ValidationFailed: return "ValidationFailed";
    case ErrorCode::KindMismatch: return "KindMismatch";
    case ErrorCode::ProtocolViolation: return "ProtocolViolation";
    case ErrorCode::InvalidConfig: return "InvalidConfig";
    case ErrorCode::NotFinalized: return "NotFinalized";
    case ErrorCode::SecondConcurrentRun: return "SecondConcurrentRun";
    case ErrorCode::ConditionIndexOutOfRange: return "ConditionIndexOutOfRange";
    case ErrorCode::NotInstrumented: return "NotInstrumented";
    case ErrorCode::WaitFromWorker: return "WaitFromWorker";
    case ErrorCode::CycleDetected: return "CycleDetected";
    case ErrorCode::Deadlock: return "Deadlock";
    case ErrorCode::DependencyViolation: return "DependencyViolation";
    case ErrorCode::NonTermination: return "NonTermination";
    case ErrorCode::OracleMismatch: return "OracleMismatch";
    case ErrorCode::ChecksumMismatch: return "ChecksumMismatch";
    case ErrorCode::BoundViolation: return "BoundViolation";
    case ErrorCode::UnknownCorpus: return "UnknownCorpus";
  }
  return "Unknown";
}

}  // namespace htdg
