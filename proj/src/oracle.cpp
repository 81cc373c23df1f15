#include "atax/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "atax/error.hpp"
#include "atax/random.hpp"

namespace atax {

namespace {

// Unit vector orthogonal to u: v with its u-component removed, or the first
// standard basis vector that survives the projection.
Vector orthogonal_unit(const Vector& u, const Vector& v) {
    Vector w = v - u.dot(v) * u;
    w -= u.dot(w) * u;
    if (w.norm() > 1e-14) return w / w.norm();
    for (Eigen::Index i = 0; i < u.size(); ++i) {
        Vector e = Vector::Unit(u.size(), i) - u[i] * u;
        if (e.norm() > 0.5) return e / e.norm();
    }
    return Vector::Zero(u.size());
}

}  // namespace

double OracleConfig::tolerance_bound(double budget_radius) const {
    return 2.0 * std::numbers::pi * budget_radius / grid_resolution;
}

void OracleConfig::validate() const {
    if (grid_resolution < 16) {
        throw Error(ErrorKind::InvalidArgument, "oracle grid_resolution must be >= 16");
    }
}

double oracle_max_safety(const Direction& v, const Direction& c, double budget_radius,
                         double delta_c, const OracleConfig& cfg) {
    cfg.validate();
    if (v.dim() != c.dim()) throw Error(ErrorKind::DimensionMismatch, "v and c differ in d");
    if (!(budget_radius > 0.0)) throw Error(ErrorKind::InvalidArgument, "budget must be positive");
    if (std::abs(delta_c) > budget_radius * (1.0 + 1e-12)) {
        throw Error(ErrorKind::InfeasibleTarget, "|delta_c| exceeds the budget");
    }
    const Vector& e1 = c.coords();
    const Vector e2 = orthogonal_unit(e1, v.coords());
    const double half_chord = std::sqrt(std::max(0.0, budget_radius * budget_radius - delta_c * delta_c));
    const double norm_cap = budget_radius * (1.0 + 1e-12);
    const double slack = 1e-9 * budget_radius;

    const int n = cfg.grid_resolution;
    double best = -std::numeric_limits<double>::infinity();
    for (int k = 0; k <= n; ++k) {
        const double y = -half_chord + 2.0 * half_chord * k / n;
        const Vector delta = delta_c * e1 + y * e2;
        if (delta.norm() > norm_cap) continue;
        if (std::abs(e1.dot(delta) - delta_c) > slack) continue;
        best = std::max(best, v.coords().dot(delta));
    }
    return best;
}

double oracle_max_safety_constrained(const Direction& v, const CapabilitySet& set,
                                     const Vector& delta_c_star, double budget_radius,
                                     const OracleConfig& cfg) {
    cfg.validate();
    if (v.dim() != set.dim() || delta_c_star.size() != set.dim()) {
        throw Error(ErrorKind::DimensionMismatch, "safety, capabilities and target must share d");
    }
    const double target_norm = delta_c_star.norm();
    if (target_norm > budget_radius * (1.0 + 1e-12)) {
        throw Error(ErrorKind::InfeasibleBudget, "||delta_C*|| exceeds the budget");
    }
    const double room = std::sqrt(std::max(0.0, budget_radius * budget_radius - target_norm * target_norm));
    const double subsidy = v.coords().dot(delta_c_star);
    const Eigen::Index d = set.dim();
    const Eigen::Index r = set.rank();
    if (r >= d) return subsidy;

    Rng rng(cfg.seed);
    Matrix taken = set.basis();
    Vector p = set.residual(v);
    if (p.norm() > kZeroNormTolerance) {
        p.normalize();
    } else {
        p = sample_orthogonal_direction(taken, rng).coords();
    }
    taken.conservativeResize(Eigen::NoChange, r + 1);
    taken.col(r) = p;
    const Vector q = r + 1 < d ? sample_orthogonal_direction(taken, rng).coords() : Vector::Zero(d);

    const int n = cfg.grid_resolution;
    constexpr int kRadii = 8;
    const double phase = rng.uniform() * 2.0 * std::numbers::pi / n;
    const double norm_cap = budget_radius * (1.0 + 1e-12);
    double best = subsidy;
    for (int k = 0; k < n; ++k) {
        const double phi = phase + 2.0 * std::numbers::pi * k / n;
        const Vector dir = std::cos(phi) * p + std::sin(phi) * q;
        for (int j = 1; j <= kRadii; ++j) {
            const Vector delta = delta_c_star + (room * j / kRadii) * dir;
            if (delta.norm() > norm_cap) continue;
            best = std::max(best, v.coords().dot(delta));
        }
    }
    return best;
}

double oracle_equal_improvement(double theta, const OracleConfig& cfg) {
    cfg.validate();
    if (!(theta >= 0.0 && theta <= std::numbers::pi)) {
        throw Error(ErrorKind::InvalidArgument, "theta must lie in [0, pi]");
    }
    const double ct = std::cos(theta);
    const double st = std::sin(theta);
    // Excess of the frontier over the diagonal at s2 = s. Concave in s with a
    // non-negative value at 0, so {s : excess(s) >= 0} is an interval [0, s*].
    auto excess = [&](double s) { return s * ct + st * std::sqrt(std::max(0.0, 1.0 - s * s)) - s; };
    if (excess(1.0) >= 0.0) return 1.0;
    double lo = 0.0;
    double hi = 1.0;
    for (int it = 0; it < 200 && hi - lo > 0.0; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (mid <= lo || mid >= hi) break;
        (excess(mid) >= 0.0 ? lo : hi) = mid;
    }
    return lo;
}

}  // namespace atax
