#pragma once

// Random feature packings and the Monte Carlo laboratory for how the tax and
// the capability-mediated angle behave as the dimension grows.
//
// Every stochastic routine is a pure function of its inputs and a 64-bit
// seed. Trial t draws from stream_seed(seed, t), so results are identical for
// any thread count.

#include <cstdint>
#include <optional>
#include <span>
#include <string_view>
#include <utility>
#include <vector>

#include "atax/conflict.hpp"
#include "atax/geometry.hpp"
#include "atax/random.hpp"

namespace atax {

struct PackingSpec {
    Eigen::Index d = 0;
    /// gamma_i for the intrinsically overlapping capabilities I.
    std::vector<double> intrinsic_overlaps;
    /// Number of incidental capabilities (gamma = 0).
    int m_prime = 0;
    std::optional<int> n_total_features;

    std::size_t intrinsic_count() const noexcept { return intrinsic_overlaps.size(); }
    std::size_t total_capabilities() const noexcept {
        return intrinsic_overlaps.size() + static_cast<std::size_t>(m_prime);
    }
    /// |I| + m' > d: the capabilities cannot be linearly independent.
    bool superposed() const noexcept {
        return static_cast<Eigen::Index>(total_capabilities()) > d;
    }
    /// Throws SpecInfeasible when the overlaps cannot be realized.
    void validate() const;
};

struct PackingEnsemble {
    Direction safety;
    /// Empty when the spec has no capabilities.
    std::optional<CapabilitySet> capabilities;
    std::vector<Direction> capability_directions;
    std::vector<double> realized_overlaps;
    std::uint64_t seed = 0;
};

/// Safety uniform on the sphere; c_i = gamma_i v + sqrt(1 - gamma_i^2) u_i with
/// u_i uniform in v-perp for i in I, incidental c_i uniform on the sphere.
PackingEnsemble build_packing(const PackingSpec& spec, std::uint64_t seed);

/// Tax of an ensemble; 0 when it has no capabilities.
double ensemble_tax(const PackingEnsemble& ensemble);

using IndexPair = std::pair<std::size_t, std::size_t>;

/// max |<f_i, f_j>| over the declared unrelated pairs.
double coherence(std::span<const Direction> vectors, std::span<const IndexPair> unrelated_pairs);

/// Coherence with every pair declared unrelated.
double coherence_all(std::span<const Direction> vectors);

/// Coherence of [safety, c_1, ..., c_m], excluding the intrinsic
/// safety-capability pairs.
double packing_coherence(const PackingEnsemble& ensemble, std::size_t intrinsic_count);

/// sqrt((N - d) / (d (N - 1))). Returns 0 for N = d and throws NotSuperposed
/// for N < d.
double welch_bound(std::int64_t n_features, std::int64_t d);

/// tau_0 = sum of gamma_i^2.
double irreducible_tax(const PackingSpec& spec);

/// Bound on |tau - tau_0| under near-orthogonality m mu < 1:
/// (tau_0 m mu + m' mu^2 + 2 gamma_bar |I| mu + |I| mu^2) / (1 - m mu).
double residual_bound(double tau0, std::int64_t m, std::int64_t m_prime, double mu,
                      double gamma_bar, std::int64_t intrinsic_count);

struct McEstimate {
    double mean = 0.0;
    double std_error = 0.0;
    std::int64_t trials = 0;
};

/// Mean and standard error of the tax over `trials` independent ensembles.
McEstimate monte_carlo_tax(const PackingSpec& spec, std::int64_t trials, std::uint64_t seed,
                           int threads = 1);

enum class Regime { Fixed, Sublinear, Linear, Undetermined };

std::string_view to_string(Regime regime) noexcept;

struct SeriesSample {
    double d = 0.0;
    double mean_tax = 0.0;
    double std_error = 0.0;
};

struct RegimeThresholds {
    /// Minimum share of excess variance explained by the 1/d model.
    double fixed_min_r_squared = 0.95;
    /// Maximum relative spread of the excess for a plateau.
    double linear_max_relative_range = 0.10;
};

struct RegimeVerdict {
    Regime regime = Regime::Undetermined;
    /// Least-squares coefficient of 1/d with the intercept pinned at tau_0.
    double slope = 0.0;
    double r_squared = 0.0;
    double residual_rms = 0.0;
    /// (max - min) / mean of the excess tau(d) - tau_0.
    double excess_relative_range = 0.0;
    /// Ordinary least squares of the means on 1/d with a free intercept.
    double free_intercept = 0.0;
    double free_slope = 0.0;
    /// Standard error of the free intercept propagated from point errors.
    double free_intercept_std_error = 0.0;
};

/// Fits tau(d) = tau_0 + slope / d and classifies how the excess decays.
/// Needs at least three distinct, increasing d values.
RegimeVerdict regime_classify(std::span<const SeriesSample> series, double tau0,
                              const RegimeThresholds& thresholds = {});

struct ScalingPoint {
    std::int64_t d = 0;
    McEstimate estimate;
};

struct ScalingSeries {
    std::vector<ScalingPoint> points;
    double tau0 = 0.0;
    RegimeVerdict verdict;
};

/// Runs monte_carlo_tax at each d (the spec's own d is ignored) and classifies
/// the resulting series. Dimension d uses seed stream_seed(seed, d).
ScalingSeries scaling_series(const PackingSpec& spec, std::span<const std::int64_t> d_values,
                             std::int64_t trials, std::uint64_t seed, int threads = 1);

/// Two safety directions with correlation rho_0 and shared capabilities with
/// prescribed overlaps gamma_1i, gamma_2i, plus m' incidental capabilities.
struct AnglePackingSpec {
    std::vector<double> gamma1;
    std::vector<double> gamma2;
    double rho0 = 0.0;
    int m_prime = 0;

    void validate(Eigen::Index d) const;
};

/// arccos((rho_0 - sum gamma_1i gamma_2i) / sqrt((1 - tau_01)(1 - tau_02))).
double irreducible_angle(const AnglePackingSpec& spec);

struct AnglePacking {
    SafetyPair pair;
    std::optional<CapabilitySet> capabilities;
};

AnglePacking build_angle_packing(const AnglePackingSpec& spec, Eigen::Index d, std::uint64_t seed);

struct AnglePoint {
    std::int64_t d = 0;
    McEstimate theta;
    /// |theta - theta_0| per trial.
    McEstimate deviation;
};

struct AngleSeries {
    double theta0 = 0.0;
    std::vector<AnglePoint> points;
};

AngleSeries angle_convergence(const AnglePackingSpec& spec, std::span<const std::int64_t> d_values,
                              std::int64_t trials, std::uint64_t seed, int threads = 1);

struct RandomProjectionEstimate {
    double analytic = 0.0;
    McEstimate monte_carlo;
};

/// E[<c, P_U c>] = r / d for a uniform rank-r subspace U and uniform unit c,
/// together with a Monte Carlo estimate.
RandomProjectionEstimate expected_random_projection(std::int64_t r, std::int64_t d,
                                                    std::int64_t trials, std::uint64_t seed,
                                                    int threads = 1);

}  // namespace atax
