#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace atax {

enum class ErrorKind {
    ZeroVector,
    DimensionMismatch,
    InfeasibleTarget,
    DegenerateAngle,
    InfeasibleBudget,
    ConstraintNotInSubspace,
    NotSPD,
    InvalidSampleCount,
    DegenerateProjection,
    SpecInfeasible,
    EmptyPairSet,
    NotSuperposed,
    NearOrthogonalityViolated,
    InsufficientSeries,
    InvalidArgument,
    ParseError,
    SchemaError,
};

std::string_view to_string(ErrorKind kind) noexcept;

/// Process exit code for an error family. Codes are stable and documented in
/// the README; 0 is success, 1 an unexpected failure and 2 a usage error.
int exit_code(ErrorKind kind) noexcept;

class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& what)
        : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

    ErrorKind kind() const noexcept { return kind_; }

private:
    ErrorKind kind_;
};

}  // namespace atax
