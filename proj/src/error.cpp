#include "arbor/error.hpp"

namespace arbor {

std::string_view to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::InvalidSchema: return "InvalidSchema";
    case ErrorCode::DuplicateNode: return "DuplicateNode";
    case ErrorCode::UnknownNode: return "UnknownNode";
    case ErrorCode::CycleDetected: return "CycleDetected";
    case ErrorCode::MultipleParents: return "MultipleParents";
    case ErrorCode::UnreachableNode: return "UnreachableNode";
    case ErrorCode::TerminalHasChild: return "TerminalHasChild";
    case ErrorCode::InternalWithoutChild: return "InternalWithoutChild";
    case ErrorCode::FeatureArityMismatch: return "FeatureArityMismatch";
    case ErrorCode::NonFiniteFeature: return "NonFiniteFeature";
    case ErrorCode::NotATerminal: return "NotATerminal";
    case ErrorCode::SameTip: return "SameTip";
    case ErrorCode::EmptyTree: return "EmptyTree";
    case ErrorCode::RootIsTerminal: return "RootIsTerminal";
    case ErrorCode::FewerThanTwoTips: return "FewerThanTwoTips";
    case ErrorCode::NotBinary: return "NotBinary";
    case ErrorCode::InvalidMatrix: return "InvalidMatrix";
    case ErrorCode::InvalidWeights: return "InvalidWeights";
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::NonFiniteInput: return "NonFiniteInput";
    case ErrorCode::ShapeMismatch: return "ShapeMismatch";
    case ErrorCode::ColumnIndexMismatch: return "ColumnIndexMismatch";
    case ErrorCode::WrongSource: return "WrongSource";
    case ErrorCode::NonComposable: return "NonComposable";
    case ErrorCode::InvalidSolution: return "InvalidSolution";
    case ErrorCode::ZeroSolution: return "ZeroSolution";
    case ErrorCode::LengthMismatch: return "LengthMismatch";
    case ErrorCode::TipSetMismatch: return "TipSetMismatch";
    case ErrorCode::NonRectangular: return "NonRectangular";
    case ErrorCode::MissingStart: return "MissingStart";
    case ErrorCode::MissingGoal: return "MissingGoal";
    case ErrorCode::MazeSyntax: return "MazeSyntax";
    case ErrorCode::NotSimplyConnected: return "NotSimplyConnected";
    case ErrorCode::Disconnected: return "Disconnected";
    case ErrorCode::InvalidProblem: return "InvalidProblem";
    case ErrorCode::ObjectiveMismatch: return "ObjectiveMismatch";
    case ErrorCode::NonPositiveWeight: return "NonPositiveWeight";
    case ErrorCode::NoGoalTip: return "NoGoalTip";
    case ErrorCode::DuplicateId: return "DuplicateId";
    case ErrorCode::StorageFailure: return "StorageFailure";
    case ErrorCode::InconsistentSolution: return "InconsistentSolution";
    case ErrorCode::UnknownId: return "UnknownId";
    case ErrorCode::NoCorrespondence: return "NoCorrespondence";
    case ErrorCode::BrokenPath: return "BrokenPath";
    case ErrorCode::InvalidTransform: return "InvalidTransform";
    case ErrorCode::ParseError: return "ParseError";
  }
  return "Unknown";
}

}  // namespace arbor
