#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace arbor {

// Every failure raised by the library carries one of these codes. The names
// are printed verbatim by the CLI and must stay stable.
enum class ErrorCode {
  // tree_core
  InvalidSchema,
  DuplicateNode,
  UnknownNode,
  CycleDetected,
  MultipleParents,
  UnreachableNode,
  TerminalHasChild,
  InternalWithoutChild,
  FeatureArityMismatch,
  NonFiniteFeature,
  NotATerminal,
  SameTip,
  EmptyTree,
  RootIsTerminal,
  // characteristic
  FewerThanTwoTips,
  NotBinary,
  InvalidMatrix,
  InvalidWeights,
  DimensionMismatch,
  // morphism
  NonFiniteInput,
  ShapeMismatch,
  ColumnIndexMismatch,
  WrongSource,
  NonComposable,
  // solutions
  InvalidSolution,
  ZeroSolution,
  LengthMismatch,
  // metrics
  TipSetMismatch,
  // problems
  NonRectangular,
  MissingStart,
  MissingGoal,
  MazeSyntax,
  NotSimplyConnected,
  Disconnected,
  InvalidProblem,
  ObjectiveMismatch,
  NonPositiveWeight,
  NoGoalTip,
  // transfer
  DuplicateId,
  StorageFailure,
  InconsistentSolution,
  UnknownId,
  NoCorrespondence,
  BrokenPath,
  InvalidTransform,
  // serialization
  ParseError,
};

std::string_view to_string(ErrorCode code) noexcept;

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& message) {
  throw Error(code, message);
}

}  // namespace arbor
