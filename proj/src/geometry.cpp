#include "atax/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "atax/error.hpp"

namespace atax {

namespace {

void require_same_dim(Eigen::Index a, Eigen::Index b, const char* what) {
    if (a != b) {
        throw Error(ErrorKind::DimensionMismatch,
                    std::string(what) + ": " + std::to_string(a) + " vs " + std::to_string(b));
    }
}

}  // namespace

Direction Direction::normalize(const Vector& v) {
    if (v.size() < 1) {
        throw Error(ErrorKind::DimensionMismatch, "direction must have dimension >= 1");
    }
    const double n = v.norm();
    if (!(n > kZeroNormTolerance)) {
        throw Error(ErrorKind::ZeroVector, "norm " + std::to_string(n) + " is below tolerance");
    }
    return Direction(v / n);
}

Direction normalize_direction(const Vector& v) { return Direction::normalize(v); }

double dot(const Direction& a, const Direction& b) {
    require_same_dim(a.dim(), b.dim(), "inner product");
    return a.coords().dot(b.coords());
}

CapabilitySet CapabilitySet::build(std::span<const Vector> vectors, double rank_tolerance) {
    std::vector<Direction> dirs;
    dirs.reserve(vectors.size());
    for (const auto& v : vectors) dirs.push_back(Direction::normalize(v));
    return build(std::span<const Direction>(dirs), rank_tolerance);
}

CapabilitySet CapabilitySet::build(std::span<const Direction> directions, double rank_tolerance) {
    if (directions.empty()) {
        throw Error(ErrorKind::InvalidArgument, "capability set needs at least one direction");
    }
    if (!(rank_tolerance >= 0.0)) {
        throw Error(ErrorKind::InvalidArgument, "rank tolerance must be non-negative");
    }
    const Eigen::Index d = directions.front().dim();
    const auto m = static_cast<Eigen::Index>(directions.size());

    CapabilitySet set;
    set.directions_.assign(directions.begin(), directions.end());
    set.rank_tolerance_ = rank_tolerance;

    Matrix a(d, m);
    for (Eigen::Index j = 0; j < m; ++j) {
        require_same_dim(directions[j].dim(), d, "capability dimension");
        // Sign-canonical columns: the basis depends only on the lines spanned,
        // so flipping any c_i leaves every derived quantity bit-identical.
        Eigen::Index pivot = 0;
        directions[j].coords().cwiseAbs().maxCoeff(&pivot);
        a.col(j) = directions[j][pivot] < 0.0 ? Vector(-directions[j].coords())
                                              : directions[j].coords();
    }
    set.gram_.resize(m, m);
    for (Eigen::Index i = 0; i < m; ++i) {
        for (Eigen::Index j = i; j < m; ++j) {
            set.gram_(i, j) = set.gram_(j, i) = directions[i].coords().dot(directions[j].coords());
        }
    }

    Eigen::JacobiSVD<Matrix> svd(a, Eigen::ComputeThinU);
    set.singular_values_ = svd.singularValues();
    const double cutoff = rank_tolerance * set.singular_values_[0];
    Eigen::Index r = 0;
    while (r < set.singular_values_.size() && set.singular_values_[r] > cutoff) ++r;
    set.basis_ = svd.matrixU().leftCols(r);
    return set;
}

Vector CapabilitySet::coordinates(const Vector& v) const {
    require_same_dim(v.size(), dim(), "projection");
    return basis_.transpose() * v;
}

Vector CapabilitySet::project(const Vector& v) const { return basis_ * coordinates(v); }

Vector CapabilitySet::residual(const Vector& v) const { return v - project(v); }

Vector CapabilitySet::overlaps(const Direction& v) const {
    require_same_dim(v.dim(), dim(), "overlaps");
    Vector out(static_cast<Eigen::Index>(directions_.size()));
    for (std::size_t i = 0; i < directions_.size(); ++i) {
        out[static_cast<Eigen::Index>(i)] = directions_[i].coords().dot(v.coords());
    }
    return out;
}

Vector project(const CapabilitySet& set, const Direction& v) { return set.project(v); }

double principal_angle(const Direction& v, const Direction& c) {
    return std::acos(std::clamp(dot(v, c), -1.0, 1.0));
}

TaxReport tax_rate(const Direction& v, const CapabilitySet& set) {
    const Vector coords = set.coordinates(v.coords());
    TaxReport report;
    report.joint_tax = std::clamp(coords.squaredNorm(), 0.0, 1.0);
    const Vector a = set.overlaps(v);
    report.per_task.reserve(static_cast<std::size_t>(a.size()));
    for (Eigen::Index i = 0; i < a.size(); ++i) {
        report.per_task.emplace_back(static_cast<std::size_t>(i), std::min(a[i] * a[i], 1.0));
    }
    report.free_safety_fraction = std::sqrt(std::max(0.0, 1.0 - report.joint_tax));
    return report;
}

}  // namespace atax
