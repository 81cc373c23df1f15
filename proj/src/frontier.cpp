#include "atax/frontier.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "atax/error.hpp"

namespace atax {

namespace {

constexpr double kFeasibilitySlack = 1e-12;

void require_positive_radius(double radius) {
    if (!(radius > 0.0) || !std::isfinite(radius)) {
        throw Error(ErrorKind::InvalidArgument, "budget radius must be positive and finite");
    }
}

void require_target(double budget_radius, double delta_c) {
    if (!std::isfinite(delta_c) || std::abs(delta_c) > budget_radius * (1.0 + kFeasibilitySlack)) {
        throw Error(ErrorKind::InfeasibleTarget, "|delta_c| = " + std::to_string(std::abs(delta_c)) +
                                                     " exceeds budget " +
                                                     std::to_string(budget_radius));
    }
}

double chord(double budget_radius, double delta_c) {
    return std::sqrt(std::max(0.0, budget_radius * budget_radius - delta_c * delta_c));
}

}  // namespace

Budget Budget::isotropic(double radius) {
    require_positive_radius(radius);
    return Budget(radius, std::nullopt);
}

Budget Budget::anisotropic(double radius, Matrix fisher) {
    require_positive_radius(radius);
    if (fisher.rows() != fisher.cols() || fisher.rows() == 0) {
        throw Error(ErrorKind::DimensionMismatch, "Fisher matrix must be square and non-empty");
    }
    const double scale = std::max(1.0, fisher.cwiseAbs().maxCoeff());
    if ((fisher - fisher.transpose()).cwiseAbs().maxCoeff() > 1e-10 * scale) {
        throw Error(ErrorKind::NotSPD, "Fisher matrix is not symmetric");
    }
    return Budget(radius, std::move(fisher));
}

double frontier_safety(double alpha, double budget_radius, double delta_c) {
    require_positive_radius(budget_radius);
    if (!(alpha >= 0.0 && alpha <= std::numbers::pi)) {
        throw Error(ErrorKind::InvalidArgument, "alpha must lie in [0, pi]");
    }
    require_target(budget_radius, delta_c);
    const double s = std::sin(alpha);
    const double c = std::cos(alpha);
    if (s < kDegenerateSine) return c >= 0.0 ? delta_c : -delta_c;
    return delta_c * c + s * chord(budget_radius, delta_c);
}

FrontierCurve frontier_curve(double alpha, double budget_radius, int n_samples) {
    if (n_samples < 2) {
        throw Error(ErrorKind::InvalidSampleCount, "need at least 2 samples, got " +
                                                       std::to_string(n_samples));
    }
    FrontierCurve curve{alpha, budget_radius, {}};
    curve.points.reserve(static_cast<std::size_t>(n_samples));
    const double span = 2.0 * budget_radius;
    for (int k = 0; k < n_samples; ++k) {
        const double dc = k + 1 == n_samples ? budget_radius
                                             : -budget_radius + span * k / (n_samples - 1);
        curve.points.push_back({dc, frontier_safety(alpha, budget_radius, dc)});
    }
    return curve;
}

Perturbation optimal_delta_single(const Direction& v, const Direction& c, double budget_radius,
                                  double delta_c) {
    require_positive_radius(budget_radius);
    require_target(budget_radius, delta_c);
    const double cos_alpha = dot(v, c);
    // In-plane unit vector orthogonal to c, pointing towards v.
    Vector w = v.coords() - cos_alpha * c.coords();
    w -= c.coords().dot(w) * c.coords();
    const double sin_alpha = w.norm();
    if (sin_alpha < kDegenerateSine) return Perturbation::of(delta_c * c.coords());
    return Perturbation::of(delta_c * c.coords() + (chord(budget_radius, delta_c) / sin_alpha) * w);
}

ConstrainedMaxResult max_safety_constrained(const Direction& v, const CapabilitySet& set,
                                            const Vector& delta_c_star, double budget_radius) {
    require_positive_radius(budget_radius);
    if (v.dim() != set.dim() || delta_c_star.size() != set.dim()) {
        throw Error(ErrorKind::DimensionMismatch, "safety, capabilities and target must share d");
    }
    const double target_norm = delta_c_star.norm();
    if (target_norm > budget_radius * (1.0 + kFeasibilitySlack)) {
        throw Error(ErrorKind::InfeasibleBudget, "||delta_C*|| = " + std::to_string(target_norm) +
                                                     " exceeds budget " +
                                                     std::to_string(budget_radius));
    }
    const double outside = set.residual(delta_c_star).norm();
    if (outside > 1e-8 * std::max(1.0, target_norm)) {
        throw Error(ErrorKind::ConstraintNotInSubspace,
                    "target has component " + std::to_string(outside) + " outside span(C)");
    }

    ConstrainedMaxResult out;
    out.residual_budget = chord(budget_radius, target_norm);
    out.subsidy = v.coords().dot(delta_c_star);
    const Vector r = set.residual(v);
    const double rn = r.norm();
    if (rn < kVanishingResidual) {
        out.free_fraction = 0.0;
        out.delta_s_max = out.subsidy;
        out.optimizer = Perturbation::of(delta_c_star);
        return out;
    }
    out.free_fraction = rn;
    out.delta_s_max = out.subsidy + out.residual_budget * rn;
    out.optimizer = Perturbation::of(delta_c_star + (out.residual_budget / rn) * r);
    return out;
}

double free_safety(double tax, double budget_radius) {
    return budget_radius * std::sqrt(std::max(0.0, 1.0 - tax));
}

WhitenResult whiten(const Budget& budget, std::span<const Direction> directions) {
    if (budget.is_isotropic()) {
        throw Error(ErrorKind::InvalidArgument, "whitening requires a Fisher matrix");
    }
    const Matrix& f = *budget.fisher();
    Eigen::SelfAdjointEigenSolver<Matrix> eig(f);
    if (eig.info() != Eigen::Success) {
        throw Error(ErrorKind::NotSPD, "eigendecomposition failed");
    }
    const Vector& lambda = eig.eigenvalues();  // ascending
    const double largest = lambda[lambda.size() - 1];
    if (!(largest > 0.0) || lambda[0] <= kSpdTolerance * largest) {
        throw Error(ErrorKind::NotSPD, "smallest eigenvalue " + std::to_string(lambda[0]) +
                                           " is not positive relative to " +
                                           std::to_string(largest));
    }

    WhitenResult w;
    w.radius = budget.radius();
    w.eigenvalues = lambda;
    w.condition_number = largest / lambda[0];
    const Matrix& q = eig.eigenvectors();
    w.inv_sqrt = q * lambda.cwiseSqrt().cwiseInverse().asDiagonal() * q.transpose();
    for (const auto& u : directions) {
        if (u.dim() != f.rows()) {
            throw Error(ErrorKind::DimensionMismatch, "direction and Fisher dimensions differ");
        }
        const Vector mapped = w.inv_sqrt * u.coords();
        w.scales.push_back(mapped.norm());
        w.directions.push_back(Direction::normalize(mapped));
    }
    return w;
}

Vector unwhiten(const WhitenResult& w, const Vector& whitened_delta) {
    if (whitened_delta.size() != w.inv_sqrt.rows()) {
        throw Error(ErrorKind::DimensionMismatch, "perturbation and Fisher dimensions differ");
    }
    return w.inv_sqrt * whitened_delta;
}

double anisotropic_frontier_safety(const Budget& budget, const Direction& v, const Direction& c,
                                   double delta_c) {
    if (budget.is_isotropic()) return frontier_safety(principal_angle(v, c), budget.radius(), delta_c);
    const Direction pair[] = {v, c};
    const WhitenResult w = whiten(budget, pair);
    const double alpha = principal_angle(w.directions[0], w.directions[1]);
    return w.scales[0] * frontier_safety(alpha, w.radius, delta_c / w.scales[1]);
}

}  // namespace atax
