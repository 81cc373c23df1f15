#pragma once

// Safety-capability Pareto frontiers under a norm budget, the perturbations
// that attain them, capability-constrained maxima and Fisher whitening.

#include <optional>
#include <span>
#include <vector>

#include "atax/geometry.hpp"

namespace atax {

inline constexpr double kDegenerateSine = 1e-8;
inline constexpr double kVanishingResidual = 1e-10;
inline constexpr double kSpdTolerance = 1e-12;

/// Perturbation budget ||delta|| <= radius, or delta^T F delta <= radius^2 when
/// a Fisher matrix is present.
class Budget {
public:
    static Budget isotropic(double radius);
    /// Throws NotSPD unless `fisher` is symmetric with eigenvalues above
    /// kSpdTolerance relative to the largest.
    static Budget anisotropic(double radius, Matrix fisher);

    double radius() const noexcept { return radius_; }
    const std::optional<Matrix>& fisher() const noexcept { return fisher_; }
    bool is_isotropic() const noexcept { return !fisher_.has_value(); }

private:
    Budget(double radius, std::optional<Matrix> fisher)
        : radius_(radius), fisher_(std::move(fisher)) {}
    double radius_;
    std::optional<Matrix> fisher_;
};

struct FrontierPoint {
    double delta_c = 0.0;
    double delta_s = 0.0;
};

struct FrontierCurve {
    double alpha = 0.0;
    double radius = 0.0;
    std::vector<FrontierPoint> points;
};

struct Perturbation {
    Vector delta;
    double norm = 0.0;

    static Perturbation of(Vector delta) {
        const double n = delta.norm();
        return {std::move(delta), n};
    }
};

struct ConstrainedMaxResult {
    double delta_s_max = 0.0;
    Perturbation optimizer;
    double residual_budget = 0.0;
    double subsidy = 0.0;
    /// ||P_{C-perp} v|| = sqrt(1 - tau).
    double free_fraction = 0.0;
};

/// Largest safety gain at capability change `delta_c` for principal angle
/// `alpha`: delta_c cos(alpha) + sin(alpha) sqrt(B^2 - delta_c^2).
/// When sin(alpha) < kDegenerateSine the plane collapses and the gain is
/// delta_c * sign(cos(alpha)).
double frontier_safety(double alpha, double budget_radius, double delta_c);

/// `n_samples` points with delta_c uniform over [-B, B], endpoints included.
FrontierCurve frontier_curve(double alpha, double budget_radius, int n_samples);

/// A perturbation on the frontier: ||delta|| = B, <c, delta> = delta_c and
/// <v, delta> = frontier_safety. For collinear v and c returns the
/// minimum-norm achiever delta_c * c.
Perturbation optimal_delta_single(const Direction& v, const Direction& c, double budget_radius,
                                  double delta_c);

/// Maximum of <v, delta> subject to ||delta|| <= B and P_C delta = delta_c_star.
ConstrainedMaxResult max_safety_constrained(const Direction& v, const CapabilitySet& set,
                                            const Vector& delta_c_star, double budget_radius);

/// B sqrt(1 - tax): the safety gain available at zero capability cost.
double free_safety(double tax, double budget_radius);

struct WhitenResult {
    /// Budget radius in whitened coordinates, where the budget is a ball.
    double radius = 0.0;
    /// F^{-1/2} u / ||F^{-1/2} u|| for every input u.
    std::vector<Direction> directions;
    /// ||F^{-1/2} u||, the factor converting whitened gains along u back to
    /// raw inner products.
    std::vector<double> scales;
    Vector eigenvalues;
    double condition_number = 1.0;
    Matrix inv_sqrt;
};

WhitenResult whiten(const Budget& budget, std::span<const Direction> directions);

/// Raw-coordinate perturbation F^{-1/2} delta_w for a whitened perturbation.
Vector unwhiten(const WhitenResult& w, const Vector& whitened_delta);

/// Raw-coordinate frontier under an ellipsoidal budget: the largest <v, delta>
/// with delta^T F delta <= B^2 and <c, delta> = delta_c. Obtained exactly by
/// the whitening change of variables.
double anisotropic_frontier_safety(const Budget& budget, const Direction& v, const Direction& c,
                                   double delta_c);

}  // namespace atax
