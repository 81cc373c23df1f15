#pragma once

// Vector and subspace primitives: unit directions, capability subspaces with a
// rank-revealed orthonormal basis, projections and the alignment tax rate.

#include <cstddef>
#include <span>
#include <utility>
#include <vector>

#include <Eigen/Dense>

namespace atax {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

inline constexpr double kZeroNormTolerance = 1e-12;
inline constexpr double kDefaultRankTolerance = 1e-10;

/// A unit vector in R^d. Only constructible through normalization, so every
/// instance satisfies ||coords|| = 1 up to round-off.
class Direction {
public:
    /// Returns v / ||v||. Throws ZeroVector when ||v|| <= kZeroNormTolerance.
    static Direction normalize(const Vector& v);

    const Vector& coords() const noexcept { return coords_; }
    Eigen::Index dim() const noexcept { return coords_.size(); }
    double operator[](Eigen::Index i) const { return coords_[i]; }

    Direction operator-() const { return Direction(-coords_); }

private:
    explicit Direction(Vector coords) : coords_(std::move(coords)) {}
    Vector coords_;
};

Direction normalize_direction(const Vector& v);

/// Inner product with a dimension check.
double dot(const Direction& a, const Direction& b);

/// Ordered capability directions together with their Gram matrix and an
/// orthonormal basis of their span, truncated at a relative singular-value
/// cutoff.
class CapabilitySet {
public:
    static CapabilitySet build(std::span<const Vector> vectors,
                               double rank_tolerance = kDefaultRankTolerance);
    static CapabilitySet build(std::span<const Direction> directions,
                               double rank_tolerance = kDefaultRankTolerance);

    const std::vector<Direction>& directions() const noexcept { return directions_; }
    const Matrix& gram() const noexcept { return gram_; }
    /// d x r, orthonormal columns.
    const Matrix& basis() const noexcept { return basis_; }
    /// Singular values of the d x m direction matrix, descending.
    const Vector& singular_values() const noexcept { return singular_values_; }

    Eigen::Index dim() const noexcept { return basis_.rows(); }
    std::size_t size() const noexcept { return directions_.size(); }
    Eigen::Index rank() const noexcept { return basis_.cols(); }
    double rank_tolerance() const noexcept { return rank_tolerance_; }

    /// P_C v.
    Vector project(const Vector& v) const;
    Vector project(const Direction& v) const { return project(v.coords()); }
    /// P_{C-perp} v = v - P_C v.
    Vector residual(const Vector& v) const;
    Vector residual(const Direction& v) const { return residual(v.coords()); }
    /// Coordinates of v in the orthonormal basis, basis^T v.
    Vector coordinates(const Vector& v) const;
    /// C^T v, the raw inner products with each capability direction.
    Vector overlaps(const Direction& v) const;

private:
    CapabilitySet() = default;

    std::vector<Direction> directions_;
    Matrix gram_;
    Matrix basis_;
    Vector singular_values_;
    double rank_tolerance_ = kDefaultRankTolerance;
};

Vector project(const CapabilitySet& set, const Direction& v);

/// arccos of the clamped inner product, in [0, pi].
double principal_angle(const Direction& v, const Direction& c);

struct TaxReport {
    double joint_tax = 0.0;
    std::vector<std::pair<std::size_t, double>> per_task;
    double free_safety_fraction = 1.0;
};

/// Joint tax ||P_C v||^2 on the ranked basis, per-capability tax <v, c_i>^2
/// and the free fraction sqrt(1 - joint_tax).
TaxReport tax_rate(const Direction& v, const CapabilitySet& set);

}  // namespace atax
