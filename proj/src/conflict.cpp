#include "atax/conflict.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "atax/error.hpp"

namespace atax {

namespace {

EffectiveAngleResult finish(double numerator, double one_minus_a2, double one_minus_b2) {
    if (one_minus_a2 <= kDegenerateProjection || one_minus_b2 <= kDegenerateProjection) {
        throw Error(ErrorKind::DegenerateProjection,
                    "a safety direction lies in the capability subspace");
    }
    EffectiveAngleResult r;
    r.tilde_norm1 = std::sqrt(one_minus_a2);
    r.tilde_norm2 = std::sqrt(one_minus_b2);
    r.cos_theta = std::clamp(numerator / (r.tilde_norm1 * r.tilde_norm2), -1.0, 1.0);
    r.theta = std::acos(r.cos_theta);
    return r;
}

}  // namespace

EffectiveAngleResult effective_angle(double rho, double a, double b) {
    if (!(std::abs(rho) <= 1.0)) throw Error(ErrorKind::InvalidArgument, "|rho| must be <= 1");
    auto r = finish(rho - a * b, 1.0 - a * a, 1.0 - b * b);
    r.a = Vector::Constant(1, a);
    r.b = Vector::Constant(1, b);
    return r;
}

EffectiveAngleResult effective_angle_multi(const SafetyPair& pair, const CapabilitySet& set) {
    const Vector p1 = set.coordinates(pair.v1.coords());
    const Vector p2 = set.coordinates(pair.v2.coords());
    // a^T (C^T C)^{-1} b equals <P_C v1, P_C v2> = p1 . p2 on the ranked basis.
    auto r = finish(pair.rho - p1.dot(p2), 1.0 - p1.squaredNorm(), 1.0 - p2.squaredNorm());
    r.a = set.overlaps(pair.v1);
    r.b = set.overlaps(pair.v2);
    return r;
}

double safety_safety_frontier(double theta, double s2) {
    if (!(std::abs(s2) <= 1.0)) {
        throw Error(ErrorKind::InfeasibleTarget, "|s2| = " + std::to_string(std::abs(s2)) + " > 1");
    }
    return s2 * std::cos(theta) + std::sin(theta) * std::sqrt(std::max(0.0, 1.0 - s2 * s2));
}

double equal_improvement(double theta) {
    if (!(theta >= 0.0 && theta <= std::numbers::pi)) {
        throw Error(ErrorKind::InvalidArgument, "theta must lie in [0, pi]");
    }
    return std::cos(theta / 2.0);
}

double denormalize_gain(double normalized, double residual_budget, double tax) {
    return normalized * residual_budget * std::sqrt(std::max(0.0, 1.0 - tax));
}

std::string_view to_string(ConflictLabel label) noexcept {
    switch (label) {
        case ConflictLabel::OppositeSign: return "OppositeSign";
        case ConflictLabel::SymmetricSameSign: return "SymmetricSameSign";
        case ConflictLabel::AsymmetricSameSign: return "AsymmetricSameSign";
        case ConflictLabel::ZeroProjection: return "ZeroProjection";
    }
    return "Unknown";
}

ConflictClass classify_capability(double rho, double a, double b) {
    const auto eff = effective_angle(rho, a, b);
    ConflictClass out;
    const double ab = a * b;
    if (ab < 0.0) {
        out.label = ConflictLabel::OppositeSign;
    } else if (ab == 0.0) {
        out.label = ConflictLabel::ZeroProjection;
    } else if (std::abs(a - b) <= kSymmetricTolerance) {
        out.label = ConflictLabel::SymmetricSameSign;
    } else {
        out.label = ConflictLabel::AsymmetricSameSign;
    }
    out.effective_corr = eff.cos_theta;
    out.raw_corr = rho;
    out.improves_tradeoff = eff.cos_theta > rho;
    return out;
}

ScalarProjections projections_from_vectors(const Direction& v1, const Direction& v2,
                                           const Direction& c) {
    return {dot(v1, v2), dot(v1, c), dot(v2, c)};
}

double decomposition_bound(double budget_radius, double delta_c_star_norm, double theta,
                           double tau1, double tau2) {
    if (!(budget_radius > 0.0)) throw Error(ErrorKind::InvalidArgument, "budget must be positive");
    if (delta_c_star_norm > budget_radius * (1.0 + 1e-12)) {
        throw Error(ErrorKind::InfeasibleBudget, "||delta_C*|| exceeds the budget");
    }
    if (!(tau1 >= 0.0 && tau1 <= 1.0 && tau2 >= 0.0 && tau2 <= 1.0)) {
        throw Error(ErrorKind::InvalidArgument, "tax rates must lie in [0, 1]");
    }
    const double residual =
        std::sqrt(std::max(0.0, budget_radius * budget_radius - delta_c_star_norm * delta_c_star_norm));
    return residual * equal_improvement(theta) *
           std::min(std::sqrt(1.0 - tau1), std::sqrt(1.0 - tau2));
}

}  // namespace atax
