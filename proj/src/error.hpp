#pragma once
#include <stdexcept>
#include <string>

namespace fw {

enum class ErrorCode {
    Config = 1,
    PoleEvaluation,
    EmptyFiber,
    DegenerateFiber,
    MissingTangent,
    StepFailure,
    PoleCrossing,
    RefinementBudgetExceeded,
    InsufficientTail,
    MorseViolation,
    TurningPointFailure,
    RouteMismatch,
    BoundaryAmbiguity,
    EndpointDivergence,
    FitDegenerate,
    WrongBoundary,
    AssumptionFailure,
    DegenerateCritical,
    BudgetExceeded,
    HypothesisFailure,
    Precondition,
    Io
};

const char* error_name(ErrorCode code);

class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& msg)
        : std::runtime_error(std::string(error_name(code)) + ": " + msg), code_(code) {}
    ErrorCode code() const { return code_; }
private:
    ErrorCode code_;
};

}  // namespace fw
