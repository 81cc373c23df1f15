#include "atax/error.hpp"

namespace atax {

std::string_view to_string(ErrorKind kind) noexcept {
    switch (kind) {
        case ErrorKind::ZeroVector: return "ZeroVector";
        case ErrorKind::DimensionMismatch: return "DimensionMismatch";
        case ErrorKind::InfeasibleTarget: return "InfeasibleTarget";
        case ErrorKind::DegenerateAngle: return "DegenerateAngle";
        case ErrorKind::InfeasibleBudget: return "InfeasibleBudget";
        case ErrorKind::ConstraintNotInSubspace: return "ConstraintNotInSubspace";
        case ErrorKind::NotSPD: return "NotSPD";
        case ErrorKind::InvalidSampleCount: return "InvalidSampleCount";
        case ErrorKind::DegenerateProjection: return "DegenerateProjection";
        case ErrorKind::SpecInfeasible: return "SpecInfeasible";
        case ErrorKind::EmptyPairSet: return "EmptyPairSet";
        case ErrorKind::NotSuperposed: return "NotSuperposed";
        case ErrorKind::NearOrthogonalityViolated: return "NearOrthogonalityViolated";
        case ErrorKind::InsufficientSeries: return "InsufficientSeries";
        case ErrorKind::InvalidArgument: return "InvalidArgument";
        case ErrorKind::ParseError: return "ParseError";
        case ErrorKind::SchemaError: return "SchemaError";
    }
    return "Unknown";
}

int exit_code(ErrorKind kind) noexcept {
    switch (kind) {
        case ErrorKind::ZeroVector: return 10;
        case ErrorKind::DimensionMismatch: return 11;
        case ErrorKind::InfeasibleTarget: return 12;
        case ErrorKind::DegenerateAngle: return 13;
        case ErrorKind::InfeasibleBudget: return 14;
        case ErrorKind::ConstraintNotInSubspace: return 15;
        case ErrorKind::NotSPD: return 16;
        case ErrorKind::InvalidSampleCount: return 17;
        case ErrorKind::DegenerateProjection: return 18;
        case ErrorKind::SpecInfeasible: return 19;
        case ErrorKind::EmptyPairSet: return 20;
        case ErrorKind::NotSuperposed: return 21;
        case ErrorKind::NearOrthogonalityViolated: return 22;
        case ErrorKind::InsufficientSeries: return 23;
        case ErrorKind::InvalidArgument: return 24;
        case ErrorKind::ParseError: return 30;
        case ErrorKind::SchemaError: return 31;
    }
    return 1;
}

}  // namespace atax
