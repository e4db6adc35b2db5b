#include "error.hpp"

namespace fw {

const char* error_name(ErrorCode code)
{
    switch (code) {
    case ErrorCode::Config: return "ConfigError";
    case ErrorCode::PoleEvaluation: return "PoleEvaluation";
    case ErrorCode::EmptyFiber: return "EmptyFiber";
    case ErrorCode::DegenerateFiber: return "DegenerateFiber";
    case ErrorCode::MissingTangent: return "MissingTangent";
    case ErrorCode::StepFailure: return "StepFailure";
    case ErrorCode::PoleCrossing: return "PoleCrossing";
    case ErrorCode::RefinementBudgetExceeded: return "RefinementBudgetExceeded";
    case ErrorCode::InsufficientTail: return "InsufficientTail";
    case ErrorCode::MorseViolation: return "MorseViolation";
    case ErrorCode::TurningPointFailure: return "TurningPointFailure";
    case ErrorCode::RouteMismatch: return "RouteMismatch";
    case ErrorCode::BoundaryAmbiguity: return "BoundaryAmbiguity";
    case ErrorCode::EndpointDivergence: return "EndpointDivergence";
    case ErrorCode::FitDegenerate: return "FitDegenerate";
    case ErrorCode::WrongBoundary: return "WrongBoundary";
    case ErrorCode::AssumptionFailure: return "AssumptionFailure";
    case ErrorCode::DegenerateCritical: return "DegenerateCritical";
    case ErrorCode::BudgetExceeded: return "BudgetExceeded";
    case ErrorCode::HypothesisFailure: return "HypothesisFailure";
    case ErrorCode::Precondition: return "PreconditionError";
    case ErrorCode::Io: return "IoError";
    }
    return "Error";
}

}  // namespace fw
