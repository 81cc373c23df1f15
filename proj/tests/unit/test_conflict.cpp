#include <doctest.h>

#include <cmath>
#include <numbers>

#include "atax/conflict.hpp"
#include "atax/error.hpp"
#include "atax/frontier.hpp"
#include "atax/oracle.hpp"
#include "test_support.hpp"

using namespace atax;
using namespace atax::testing;
using doctest::Approx;

namespace {

constexpr double kPi = std::numbers::pi;

ErrorKind kind_of(auto&& fn) {
    try {
        fn();
    } catch (const Error& e) {
        return e.kind();
    }
    FAIL("expected atax::Error");
    return ErrorKind::InvalidArgument;
}

CapabilitySet set_of(std::vector<Vector> vs) { return CapabilitySet::build(std::span<const Vector>(vs)); }

}  // namespace

TEST_SUITE("conflict") {

TEST_CASE("effective_angle examples") {
    // (0.99 - 0.0001) / sqrt(0.99 * 0.999999)
    const auto suppressor = effective_angle(0.99, 0.1, 0.001);
    CHECK(suppressor.cos_theta == Approx(0.99489).epsilon(1e-5));
    CHECK(std::abs(suppressor.cos_theta - 0.995) < 1e-3);

    for (double rho : {-0.7, 0.0, 0.3, 0.99}) {
        CHECK(effective_angle(rho, 0.0, 0.0).cos_theta == rho);
    }

    const auto opposite = effective_angle(0.0, 0.5, -0.5);
    CHECK(opposite.cos_theta == Approx(1.0 / 3.0).epsilon(1e-15));
    CHECK(opposite.theta == Approx(1.23096).epsilon(1e-5));
    CHECK(opposite.tilde_norm1 == Approx(std::sqrt(0.75)));

    CHECK(kind_of([] { effective_angle(0.5, 1.0, 0.2); }) == ErrorKind::DegenerateProjection);
    CHECK(kind_of([] { effective_angle(0.5, 0.2, -1.0); }) == ErrorKind::DegenerateProjection);
    CHECK(kind_of([] { effective_angle(1.5, 0.2, 0.2); }) == ErrorKind::InvalidArgument);
}

TEST_CASE("effective_angle_multi examples") {
    Gen g(41);
    for (int i = 0; i < 100; ++i) {
        const Eigen::Index d = g.integer(3, 16);
        const Vector v1 = g.unit_vector(d), v2 = g.unit_vector(d), c = g.unit_vector(d);
        const auto pair = SafetyPair::of(normalize_direction(v1), normalize_direction(v2));
        const auto multi = effective_angle_multi(pair, set_of({c}));
        const auto s = projections_from_vectors(pair.v1, pair.v2, normalize_direction(c));
        const auto scalar = effective_angle(s.rho, s.a, s.b);
        CHECK(std::abs(multi.cos_theta - scalar.cos_theta) < 1e-12);
    }

    const auto e1 = normalize_direction(unit(3, 0));
    const auto mixed = normalize_direction(vec({1, 0, 1}));
    const auto orth = effective_angle_multi(SafetyPair::of(e1, mixed), set_of({unit(3, 1)}));
    CHECK(orth.cos_theta == Approx(1.0 / std::sqrt(2.0)).epsilon(1e-15));
    CHECK(orth.a[0] == 0.0);
    CHECK(orth.b[0] == 0.0);

    CHECK(kind_of([&] {
              effective_angle_multi(SafetyPair::of(e1, mixed), set_of({unit(3, 0), unit(3, 2)}));
          }) == ErrorKind::DegenerateProjection);
}

TEST_CASE("effective_angle_multi equals the residual cosine from an independent projector") {
    Gen g(43);
    for (int i = 0; i < 300; ++i) {
        const Eigen::Index d = g.integer(4, 40);
        const int m = g.integer(1, std::min<int>(8, static_cast<int>(d) - 2));
        std::vector<Vector> cs;
        for (int k = 0; k < m; ++k) cs.push_back(g.unit_vector(d));
        const Vector v1 = g.unit_vector(d), v2 = g.unit_vector(d);
        const auto r = effective_angle_multi(
            SafetyPair::of(normalize_direction(v1), normalize_direction(v2)), set_of(cs));
        const Vector p1 = complement(cs, v1), p2 = complement(cs, v2);
        CHECK(std::abs(r.cos_theta - p1.dot(p2) / (p1.norm() * p2.norm())) < 1e-10);
        CHECK(std::abs(r.tilde_norm1 - p1.norm()) < 1e-10);
    }
}

TEST_CASE("safety_safety_frontier examples") {
    CHECK(safety_safety_frontier(kPi / 2, 0.0) == Approx(1.0));
    CHECK(safety_safety_frontier(0.0, 0.4) == 0.4);
    CHECK(safety_safety_frontier(kPi / 3, 0.5) == Approx(1.0).epsilon(1e-15));
    CHECK(kind_of([] { safety_safety_frontier(1.0, 1.01); }) == ErrorKind::InfeasibleTarget);
}

TEST_CASE("safety_safety_frontier is the unit-budget safety-capability frontier") {
    for (int i = 0; i <= 100; ++i) {
        const double theta = kPi * i / 100.0;
        for (int k = 0; k <= 200; ++k) {
            const double s = -1.0 + 2.0 * k / 200.0;
            if (std::sin(theta) < kDegenerateSine) continue;
            CHECK(std::abs(safety_safety_frontier(theta, s) - frontier_safety(theta, 1.0, s)) <= 1e-12);
        }
    }
}

TEST_CASE("equal_improvement examples and fixed point") {
    CHECK(equal_improvement(0.0) == 1.0);
    CHECK(std::abs(equal_improvement(kPi)) < 1e-15);
    CHECK(equal_improvement(kPi / 2) == Approx(0.70711).epsilon(1e-5));
    CHECK(kind_of([] { equal_improvement(-0.1); }) == ErrorKind::InvalidArgument);
    for (int i = 0; i <= 100; ++i) {
        const double theta = kPi * i / 100.0;
        const double s = equal_improvement(theta);
        CHECK(std::abs(safety_safety_frontier(theta, s) - s) <= 1e-12);
        CHECK(std::abs(oracle_equal_improvement(theta) - s) <= 1e-9);
    }
}

TEST_CASE("classify_capability examples") {
    const auto opp = classify_capability(0.0, 0.5, -0.5);
    CHECK(opp.label == ConflictLabel::OppositeSign);
    CHECK(opp.effective_corr == Approx(1.0 / 3.0));
    CHECK(opp.improves_tradeoff);

    const auto sym = classify_capability(0.5, 0.3, 0.3);
    CHECK(sym.label == ConflictLabel::SymmetricSameSign);
    CHECK(sym.effective_corr == Approx(0.41 / 0.91).epsilon(1e-14));
    CHECK(sym.effective_corr == Approx(0.45055).epsilon(1e-5));
    CHECK_FALSE(sym.improves_tradeoff);

    const auto asym = classify_capability(0.99, 0.1, 0.001);
    CHECK(asym.label == ConflictLabel::AsymmetricSameSign);
    CHECK(asym.effective_corr == Approx(0.99489).epsilon(1e-5));
    CHECK(asym.improves_tradeoff);

    CHECK(classify_capability(0.3, 0.0, 0.4).label == ConflictLabel::ZeroProjection);
    CHECK(kind_of([] { classify_capability(0.3, 1.0, 0.4); }) == ErrorKind::DegenerateProjection);
}

TEST_CASE("sign pattern of projections against the effective correlation") {
    Gen g(47);
    int opposite = 0, symmetric = 0;
    for (int i = 0; i < 2000; ++i) {
        const Eigen::Index d = g.integer(3, 12);
        const Vector v1 = g.unit_vector(d), v2 = g.unit_vector(d);
        const Vector c = g.unit_vector(d);
        const auto s = projections_from_vectors(normalize_direction(v1), normalize_direction(v2),
                                                normalize_direction(c));
        const auto k = classify_capability(s.rho, s.a, s.b);
        CHECK(std::abs(k.effective_corr) <= 1.0);
        if (s.a * s.b < 0.0 && s.rho - s.a * s.b >= 0.0) {
            ++opposite;
            CHECK(k.effective_corr > s.rho);
        }
        // A capability along a combination symmetric in v1, v2 has a = b.
        const Vector sym_c = (v1 + v2) * g.uniform(-1, 1) + complement({v1, v2}, g.gaussian(d));
        if (sym_c.norm() < 1e-6) continue;
        const auto t = projections_from_vectors(normalize_direction(v1), normalize_direction(v2),
                                                normalize_direction(sym_c));
        if (std::abs(t.a - t.b) <= kSymmetricTolerance && 1.0 - t.a * t.a > 1e-9) {
            ++symmetric;
            CHECK(classify_capability(t.rho, t.a, t.b).effective_corr <= t.rho + 1e-12);
        }
    }
    CHECK(opposite > 500);
    CHECK(symmetric > 500);
}

TEST_CASE("opposite signs can lower an already negative correlation") {
    // rho - ab < 0: dividing by sqrt((1 - a^2)(1 - b^2)) < 1 pushes C further below rho.
    const Vector v1 = unit(3, 0);
    const Vector v2 = vec({-0.65, std::sqrt(1.0 - 0.65 * 0.65), 0.0});
    const double y = (-0.1 + 0.65 * 0.3) / v2[1];
    const Vector c = vec({0.3, y, std::sqrt(1.0 - 0.09 - y * y)});
    const auto s = projections_from_vectors(normalize_direction(v1), normalize_direction(v2),
                                            normalize_direction(c));
    CHECK(s.a * s.b < 0.0);
    const auto k = classify_capability(s.rho, s.a, s.b);
    CHECK(k.label == ConflictLabel::OppositeSign);
    CHECK(k.effective_corr < s.rho);
    CHECK_FALSE(k.improves_tradeoff);
}

TEST_CASE("decomposition_bound examples") {
    CHECK(decomposition_bound(1.0, 0.0, kPi / 2, 0.0, 0.0) == Approx(0.70711).epsilon(1e-5));
    CHECK(decomposition_bound(1.0, 1.0, 0.7, 0.2, 0.3) == 0.0);
    CHECK(decomposition_bound(2.0, 0.0, 0.0, 0.0, 0.75) == Approx(1.0).epsilon(1e-15));
    CHECK(kind_of([] { decomposition_bound(1.0, 1.5, 0.0, 0.0, 0.0); }) == ErrorKind::InfeasibleBudget);
}

TEST_CASE("denormalize_gain applies B' sqrt(1 - tau)") {
    CHECK(denormalize_gain(0.5, 2.0, 0.75) == Approx(0.5));
    CHECK(denormalize_gain(1.0, 1.0, 1.0) == 0.0);
}

}  // TEST_SUITE
