#pragma once

// Brute-force maximizers used to falsify the closed-form optima. They only
// enumerate feasible points, so their values are lower bounds that converge
// to the true maximum as the grid is refined.

#include <cstdint>

#include "atax/geometry.hpp"

namespace atax {

struct OracleConfig {
    int grid_resolution = 4096;
    /// Seed for the auxiliary complement direction of the constrained search.
    std::uint64_t seed = 0x5eed;

    /// Worst-case gap 2 pi B / grid_resolution between an oracle value and the
    /// true maximum.
    double tolerance_bound(double budget_radius) const;
    /// Throws InvalidArgument when grid_resolution < 16.
    void validate() const;
};

/// Max of <v, delta> over the plane span(v, c) subject to ||delta|| <= B and
/// <c, delta> = delta_c, by enumerating the feasible chord.
double oracle_max_safety(const Direction& v, const Direction& c, double budget_radius,
                         double delta_c, const OracleConfig& cfg = {});

/// Max of <v, delta> with delta = delta_c_star + delta_perp, delta_perp in the
/// plane spanned by P_{C-perp} v and one random direction of C-perp, by
/// angular and radial enumeration.
double oracle_max_safety_constrained(const Direction& v, const CapabilitySet& set,
                                     const Vector& delta_c_star, double budget_radius,
                                     const OracleConfig& cfg = {});

/// Largest s with s on or below the safety-safety frontier at s1 = s2 = s,
/// located by bisection to machine precision.
double oracle_equal_improvement(double theta, const OracleConfig& cfg = {});

}  // namespace atax
