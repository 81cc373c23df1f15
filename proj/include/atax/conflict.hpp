#pragma once

// Tradeoffs between two safety objectives when capabilities are held fixed.
// The effective angle between the safety directions is their partial
// correlation given the capability directions.

#include <string_view>

#include "atax/geometry.hpp"

namespace atax {

inline constexpr double kDegenerateProjection = 1e-12;
inline constexpr double kSymmetricTolerance = 1e-12;

struct SafetyPair {
    Direction v1;
    Direction v2;
    double rho = 0.0;

    static SafetyPair of(const Direction& v1, const Direction& v2) {
        return {v1, v2, dot(v1, v2)};
    }
};

struct EffectiveAngleResult {
    double cos_theta = 1.0;
    double theta = 0.0;
    /// C^T v1 and C^T v2; a single entry in the scalar case.
    Vector a;
    Vector b;
    /// ||P_{C-perp} v1||, ||P_{C-perp} v2||.
    double tilde_norm1 = 1.0;
    double tilde_norm2 = 1.0;
};

/// cos(theta) = (rho - a b) / sqrt((1 - a^2)(1 - b^2)), clamped to [-1, 1].
/// Throws DegenerateProjection when 1 - a^2 or 1 - b^2 <= 1e-12.
EffectiveAngleResult effective_angle(double rho, double a, double b);

/// Multi-capability form (rho - a^T (C^T C)^{-1} b) / sqrt((1 - tau1)(1 - tau2)),
/// evaluated on the ranked orthonormal basis of C.
EffectiveAngleResult effective_angle_multi(const SafetyPair& pair, const CapabilitySet& set);

/// Normalized safety-safety frontier s1 = s2 cos(theta) + sin(theta) sqrt(1 - s2^2).
double safety_safety_frontier(double theta, double s2);

/// Largest equal normalized gain on the safety-safety frontier, cos(theta / 2).
double equal_improvement(double theta);

/// Delta_S = s * B' * sqrt(1 - tau): converts a normalized gain to a raw one.
double denormalize_gain(double normalized, double residual_budget, double tax);

enum class ConflictLabel { OppositeSign, SymmetricSameSign, AsymmetricSameSign, ZeroProjection };

std::string_view to_string(ConflictLabel label) noexcept;

struct ConflictClass {
    ConflictLabel label = ConflictLabel::ZeroProjection;
    double effective_corr = 0.0;
    double raw_corr = 0.0;
    bool improves_tradeoff = false;
};

/// Sign-pattern classification of one capability direction's effect on the
/// safety-safety correlation.
ConflictClass classify_capability(double rho, double a, double b);

struct ScalarProjections {
    double rho = 0.0;
    double a = 0.0;
    double b = 0.0;
};

/// (rho, a, b) = (<v1, v2>, <v1, c>, <v2, c>) from actual vectors, which
/// guarantees the triple is jointly realizable.
ScalarProjections projections_from_vectors(const Direction& v1, const Direction& v2,
                                           const Direction& c);

/// Upper bound B' cos(theta / 2) min(sqrt(1 - tau1), sqrt(1 - tau2)) on the
/// smaller of two safety gains, B' = sqrt(B^2 - ||delta_C*||^2).
double decomposition_bound(double budget_radius, double delta_c_star_norm, double theta,
                           double tau1, double tau2);

}  // namespace atax
