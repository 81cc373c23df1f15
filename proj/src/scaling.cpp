#include "atax/scaling.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "atax/error.hpp"
#include "parallel.hpp"

namespace atax {

namespace {

McEstimate summarize(const std::vector<double>& values) {
    McEstimate est;
    est.trials = static_cast<std::int64_t>(values.size());
    if (values.empty()) return est;
    double sum = 0.0;
    for (double x : values) sum += x;
    est.mean = sum / static_cast<double>(values.size());
    if (values.size() > 1) {
        double ss = 0.0;
        for (double x : values) ss += (x - est.mean) * (x - est.mean);
        const double var = ss / static_cast<double>(values.size() - 1);
        est.std_error = std::sqrt(var / static_cast<double>(values.size()));
    }
    return est;
}

void require_trials(std::int64_t trials) {
    if (trials < 1) throw Error(ErrorKind::InvalidArgument, "trials must be >= 1");
}

Direction mix(double x, const Direction& a, double y, const Vector& b) {
    return Direction::normalize(x * a.coords() + y * b);
}

}  // namespace

void PackingSpec::validate() const {
    if (d < 1) throw Error(ErrorKind::SpecInfeasible, "dimension must be >= 1");
    if (m_prime < 0) throw Error(ErrorKind::SpecInfeasible, "m' must be >= 0");
    double sum = 0.0;
    for (double g : intrinsic_overlaps) {
        if (!(std::abs(g) < 1.0)) {
            throw Error(ErrorKind::SpecInfeasible, "intrinsic overlap must lie in (-1, 1)");
        }
        sum += g * g;
    }
    if (!(sum < 1.0)) {
        throw Error(ErrorKind::SpecInfeasible,
                    "sum of squared intrinsic overlaps is " + std::to_string(sum) + " >= 1");
    }
    if (!intrinsic_overlaps.empty() && d < 2) {
        throw Error(ErrorKind::SpecInfeasible, "intrinsic overlaps need d >= 2");
    }
}

PackingEnsemble build_packing(const PackingSpec& spec, std::uint64_t seed) {
    spec.validate();
    Rng rng(seed);
    const Direction safety = sample_uniform_direction(spec.d, rng);
    const Matrix safety_col = safety.coords();

    std::vector<Direction> caps;
    caps.reserve(spec.total_capabilities());
    for (double g : spec.intrinsic_overlaps) {
        const Direction u = sample_orthogonal_direction(safety_col, rng);
        caps.push_back(mix(g, safety, std::sqrt(1.0 - g * g), u.coords()));
    }
    for (int i = 0; i < spec.m_prime; ++i) caps.push_back(sample_uniform_direction(spec.d, rng));

    PackingEnsemble ens{safety, std::nullopt, caps, {}, seed};
    ens.realized_overlaps.reserve(caps.size());
    for (const auto& c : caps) ens.realized_overlaps.push_back(dot(safety, c));
    if (!caps.empty()) ens.capabilities = CapabilitySet::build(std::span<const Direction>(caps));
    return ens;
}

double ensemble_tax(const PackingEnsemble& ensemble) {
    if (!ensemble.capabilities) return 0.0;
    return tax_rate(ensemble.safety, *ensemble.capabilities).joint_tax;
}

double coherence(std::span<const Direction> vectors, std::span<const IndexPair> unrelated_pairs) {
    if (vectors.size() < 2) throw Error(ErrorKind::InvalidArgument, "coherence needs >= 2 vectors");
    if (unrelated_pairs.empty()) throw Error(ErrorKind::EmptyPairSet, "no unrelated pairs declared");
    double mu = 0.0;
    for (const auto& [i, j] : unrelated_pairs) {
        if (i >= vectors.size() || j >= vectors.size() || i == j) {
            throw Error(ErrorKind::InvalidArgument, "invalid pair index");
        }
        mu = std::max(mu, std::abs(dot(vectors[i], vectors[j])));
    }
    return mu;
}

double coherence_all(std::span<const Direction> vectors) {
    std::vector<IndexPair> pairs;
    for (std::size_t i = 0; i < vectors.size(); ++i) {
        for (std::size_t j = i + 1; j < vectors.size(); ++j) pairs.emplace_back(i, j);
    }
    return coherence(vectors, pairs);
}

double packing_coherence(const PackingEnsemble& ensemble, std::size_t intrinsic_count) {
    std::vector<Direction> features{ensemble.safety};
    features.insert(features.end(), ensemble.capability_directions.begin(),
                    ensemble.capability_directions.end());
    std::vector<IndexPair> pairs;
    for (std::size_t i = 0; i < features.size(); ++i) {
        for (std::size_t j = i + 1; j < features.size(); ++j) {
            if (i == 0 && j <= intrinsic_count) continue;
            pairs.emplace_back(i, j);
        }
    }
    return coherence(features, pairs);
}

double welch_bound(std::int64_t n_features, std::int64_t d) {
    if (d < 1 || n_features < 1) throw Error(ErrorKind::InvalidArgument, "N and d must be >= 1");
    if (n_features < d) {
        throw Error(ErrorKind::NotSuperposed, "N = " + std::to_string(n_features) + " < d = " +
                                                  std::to_string(d));
    }
    if (n_features == d) return 0.0;
    const auto n = static_cast<double>(n_features);
    const auto dd = static_cast<double>(d);
    return std::sqrt((n - dd) / (dd * (n - 1.0)));
}

double irreducible_tax(const PackingSpec& spec) {
    double s = 0.0;
    for (double g : spec.intrinsic_overlaps) s += g * g;
    return s;
}

double residual_bound(double tau0, std::int64_t m, std::int64_t m_prime, double mu,
                      double gamma_bar, std::int64_t intrinsic_count) {
    const double m_mu = static_cast<double>(m) * mu;
    if (!(m_mu < 1.0)) {
        throw Error(ErrorKind::NearOrthogonalityViolated,
                    "m * mu = " + std::to_string(m_mu) + " >= 1");
    }
    const auto i = static_cast<double>(intrinsic_count);
    const double numerator = tau0 * m_mu + static_cast<double>(m_prime) * mu * mu +
                             2.0 * gamma_bar * i * mu + i * mu * mu;
    return numerator / (1.0 - m_mu);
}

McEstimate monte_carlo_tax(const PackingSpec& spec, std::int64_t trials, std::uint64_t seed,
                           int threads) {
    require_trials(trials);
    spec.validate();
    std::vector<double> values(static_cast<std::size_t>(trials));
    detail::parallel_for(trials, threads, [&](std::int64_t t) {
        values[static_cast<std::size_t>(t)] =
            ensemble_tax(build_packing(spec, stream_seed(seed, static_cast<std::uint64_t>(t))));
    });
    return summarize(values);
}

std::string_view to_string(Regime regime) noexcept {
    switch (regime) {
        case Regime::Fixed: return "Fixed";
        case Regime::Sublinear: return "Sublinear";
        case Regime::Linear: return "Linear";
        case Regime::Undetermined: return "Undetermined";
    }
    return "Unknown";
}

RegimeVerdict regime_classify(std::span<const SeriesSample> series, double tau0,
                              const RegimeThresholds& thresholds) {
    if (series.size() < 3) {
        throw Error(ErrorKind::InsufficientSeries, "need at least 3 dimensions, got " +
                                                       std::to_string(series.size()));
    }
    for (std::size_t k = 1; k < series.size(); ++k) {
        if (!(series[k].d > series[k - 1].d)) {
            throw Error(ErrorKind::InsufficientSeries, "d values must be distinct and increasing");
        }
    }
    if (!(series.front().d > 0.0)) throw Error(ErrorKind::InvalidArgument, "d must be positive");

    const auto n = static_cast<double>(series.size());
    std::vector<double> x, e;
    for (const auto& s : series) {
        x.push_back(1.0 / s.d);
        e.push_back(s.mean_tax - tau0);
    }

    RegimeVerdict v;
    double sxe = 0.0, sxx = 0.0;
    for (std::size_t k = 0; k < x.size(); ++k) {
        sxe += x[k] * e[k];
        sxx += x[k] * x[k];
    }
    v.slope = sxe / sxx;
    const double e_mean = std::accumulate(e.begin(), e.end(), 0.0) / n;
    double ss_res = 0.0, ss_tot = 0.0;
    for (std::size_t k = 0; k < x.size(); ++k) {
        const double r = e[k] - v.slope * x[k];
        ss_res += r * r;
        ss_tot += (e[k] - e_mean) * (e[k] - e_mean);
    }
    v.residual_rms = std::sqrt(ss_res / n);
    v.r_squared = ss_tot > 0.0 ? 1.0 - ss_res / ss_tot : (ss_res == 0.0 ? 1.0 : 0.0);

    const auto [e_min, e_max] = std::minmax_element(e.begin(), e.end());
    v.excess_relative_range =
        std::abs(e_mean) > 0.0 ? (*e_max - *e_min) / std::abs(e_mean) : 0.0;

    // Free-intercept fit: mean = intercept + slope x.
    const double x_mean = std::accumulate(x.begin(), x.end(), 0.0) / n;
    double cxx = 0.0, cxy = 0.0;
    for (std::size_t k = 0; k < x.size(); ++k) {
        cxx += (x[k] - x_mean) * (x[k] - x_mean);
        cxy += (x[k] - x_mean) * series[k].mean_tax;
    }
    v.free_slope = cxy / cxx;
    double y_mean = 0.0;
    for (const auto& s : series) y_mean += s.mean_tax;
    y_mean /= n;
    v.free_intercept = y_mean - v.free_slope * x_mean;
    double var = 0.0;
    for (std::size_t k = 0; k < x.size(); ++k) {
        const double w = 1.0 / n - x_mean * (x[k] - x_mean) / cxx;
        var += w * w * series[k].std_error * series[k].std_error;
    }
    v.free_intercept_std_error = std::sqrt(var);

    constexpr double kNoExcess = 1e-12;
    const bool no_excess = std::all_of(e.begin(), e.end(), [](double ek) {
        return std::abs(ek) <= kNoExcess;
    });
    bool decreasing = true;
    for (std::size_t k = 1; k < e.size(); ++k) decreasing = decreasing && e[k] < e[k - 1];

    if (no_excess) {
        v.regime = Regime::Fixed;
    } else if (e_mean > 0.0 && v.excess_relative_range < thresholds.linear_max_relative_range) {
        v.regime = Regime::Linear;
    } else if (v.slope > 0.0 && v.r_squared >= thresholds.fixed_min_r_squared) {
        v.regime = Regime::Fixed;
    } else if (decreasing && *e_min > 0.0) {
        v.regime = Regime::Sublinear;
    } else {
        v.regime = Regime::Undetermined;
    }
    return v;
}

ScalingSeries scaling_series(const PackingSpec& spec, std::span<const std::int64_t> d_values,
                             std::int64_t trials, std::uint64_t seed, int threads) {
    ScalingSeries out;
    out.tau0 = irreducible_tax(spec);
    std::vector<SeriesSample> samples;
    for (std::int64_t d : d_values) {
        PackingSpec at_d = spec;
        at_d.d = d;
        const McEstimate est =
            monte_carlo_tax(at_d, trials, stream_seed(seed, static_cast<std::uint64_t>(d)), threads);
        out.points.push_back({d, est});
        samples.push_back({static_cast<double>(d), est.mean, est.std_error});
    }
    out.verdict = regime_classify(samples, out.tau0);
    return out;
}

void AnglePackingSpec::validate(Eigen::Index d) const {
    if (gamma1.size() != gamma2.size()) {
        throw Error(ErrorKind::SpecInfeasible, "gamma1 and gamma2 must have equal length");
    }
    if (!(std::abs(rho0) < 1.0)) throw Error(ErrorKind::SpecInfeasible, "|rho0| must be < 1");
    if (m_prime < 0) throw Error(ErrorKind::SpecInfeasible, "m' must be >= 0");
    if (d < 2 || (!gamma1.empty() && d < 3)) {
        throw Error(ErrorKind::SpecInfeasible, "dimension too small for the prescribed overlaps");
    }
    const double sin0 = std::sqrt(1.0 - rho0 * rho0);
    double t1 = 0.0, t2 = 0.0;
    for (std::size_t i = 0; i < gamma1.size(); ++i) {
        const double x = gamma1[i];
        const double y = (gamma2[i] - rho0 * gamma1[i]) / sin0;
        if (!(x * x + y * y <= 1.0)) {
            throw Error(ErrorKind::SpecInfeasible,
                        "overlaps of capability " + std::to_string(i) + " are not realizable");
        }
        t1 += gamma1[i] * gamma1[i];
        t2 += gamma2[i] * gamma2[i];
    }
    if (!(t1 < 1.0 && t2 < 1.0)) {
        throw Error(ErrorKind::SpecInfeasible, "irreducible tax of a safety direction is >= 1");
    }
}

double irreducible_angle(const AnglePackingSpec& spec) {
    double cross = 0.0, t1 = 0.0, t2 = 0.0;
    for (std::size_t i = 0; i < spec.gamma1.size(); ++i) {
        cross += spec.gamma1[i] * spec.gamma2[i];
        t1 += spec.gamma1[i] * spec.gamma1[i];
        t2 += spec.gamma2[i] * spec.gamma2[i];
    }
    const double c = (spec.rho0 - cross) / std::sqrt((1.0 - t1) * (1.0 - t2));
    return std::acos(std::clamp(c, -1.0, 1.0));
}

AnglePacking build_angle_packing(const AnglePackingSpec& spec, Eigen::Index d, std::uint64_t seed) {
    spec.validate(d);
    Rng rng(seed);
    const Direction v1 = sample_uniform_direction(d, rng);
    const Direction w = sample_orthogonal_direction(Matrix(v1.coords()), rng);
    const double sin0 = std::sqrt(1.0 - spec.rho0 * spec.rho0);
    const Direction v2 = mix(spec.rho0, v1, sin0, w.coords());

    Matrix plane(d, 2);
    plane << v1.coords(), w.coords();
    std::vector<Direction> caps;
    for (std::size_t i = 0; i < spec.gamma1.size(); ++i) {
        const double x = spec.gamma1[i];
        const double y = (spec.gamma2[i] - spec.rho0 * x) / sin0;
        const double z = std::sqrt(std::max(0.0, 1.0 - x * x - y * y));
        const Direction u = sample_orthogonal_direction(plane, rng);
        caps.push_back(Direction::normalize(x * v1.coords() + y * w.coords() + z * u.coords()));
    }
    for (int i = 0; i < spec.m_prime; ++i) caps.push_back(sample_uniform_direction(d, rng));

    AnglePacking out{SafetyPair::of(v1, v2), std::nullopt};
    if (!caps.empty()) out.capabilities = CapabilitySet::build(std::span<const Direction>(caps));
    return out;
}

AngleSeries angle_convergence(const AnglePackingSpec& spec, std::span<const std::int64_t> d_values,
                              std::int64_t trials, std::uint64_t seed, int threads) {
    require_trials(trials);
    AngleSeries out;
    out.theta0 = irreducible_angle(spec);
    for (std::int64_t d : d_values) {
        spec.validate(d);
        const std::uint64_t d_seed = stream_seed(seed, static_cast<std::uint64_t>(d));
        std::vector<double> values(static_cast<std::size_t>(trials));
        detail::parallel_for(trials, threads, [&](std::int64_t t) {
            const AnglePacking p =
                build_angle_packing(spec, d, stream_seed(d_seed, static_cast<std::uint64_t>(t)));
            values[static_cast<std::size_t>(t)] =
                p.capabilities ? effective_angle_multi(p.pair, *p.capabilities).theta
                               : std::acos(std::clamp(p.pair.rho, -1.0, 1.0));
        });
        std::vector<double> deviations(values.size());
        std::transform(values.begin(), values.end(), deviations.begin(),
                       [&](double theta) { return std::abs(theta - out.theta0); });
        out.points.push_back({d, summarize(values), summarize(deviations)});
    }
    return out;
}

RandomProjectionEstimate expected_random_projection(std::int64_t r, std::int64_t d,
                                                    std::int64_t trials, std::uint64_t seed,
                                                    int threads) {
    if (!(r >= 1 && r <= d)) throw Error(ErrorKind::InvalidArgument, "need 1 <= r <= d");
    require_trials(trials);
    RandomProjectionEstimate out;
    out.analytic = static_cast<double>(r) / static_cast<double>(d);
    std::vector<double> values(static_cast<std::size_t>(trials));
    detail::parallel_for(trials, threads, [&](std::int64_t t) {
        Rng rng = Rng::for_stream(seed, static_cast<std::uint64_t>(t));
        Matrix g(d, r);
        for (std::int64_t j = 0; j < r; ++j) g.col(j) = rng.gaussian(d);
        const Eigen::HouseholderQR<Matrix> qr(g);
        const Matrix q = qr.householderQ() * Matrix::Identity(d, r);
        const Direction c = sample_uniform_direction(d, rng);
        values[static_cast<std::size_t>(t)] = (q.transpose() * c.coords()).squaredNorm();
    });
    out.monte_carlo = summarize(values);
    return out;
}

}  // namespace atax
