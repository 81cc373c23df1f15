#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "atax/commands.hpp"
#include "atax/conflict.hpp"
#include "atax/error.hpp"
#include "atax/frontier.hpp"
#include "atax/geometry.hpp"
#include "atax/oracle.hpp"
#include "atax/problem.hpp"
#include "atax/random.hpp"
#include "atax/scaling.hpp"

namespace py = pybind11;
using namespace pybind11::literals;

namespace {

atax::Direction dir(const atax::Vector& v) { return atax::Direction::normalize(v); }

atax::CapabilitySet caps(const std::vector<atax::Vector>& vs, double tol) {
    return atax::CapabilitySet::build(std::span<const atax::Vector>(vs), tol);
}

py::dict mc(const atax::McEstimate& e) {
    return py::dict("mean"_a = e.mean, "std_error"_a = e.std_error, "trials"_a = e.trials);
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Alignment tax geometry: tax rates, frontiers, conflict analysis, scaling lab";

    static py::exception<atax::Error> error(m, "AtaxError", PyExc_ValueError);
    py::register_exception_translator([](std::exception_ptr p) {
        try {
            if (p) std::rethrow_exception(p);
        } catch (const atax::Error& e) {
            py::set_error(error, e.what());
        }
    });

    // geometry
    m.def("normalize_direction", [](const atax::Vector& v) { return dir(v).coords(); }, "v"_a);
    py::class_<atax::CapabilitySet>(m, "CapabilitySet")
        .def(py::init(&caps), "vectors"_a, "rank_tolerance"_a = atax::kDefaultRankTolerance)
        .def_property_readonly("gram", &atax::CapabilitySet::gram)
        .def_property_readonly("basis", &atax::CapabilitySet::basis)
        .def_property_readonly("rank", &atax::CapabilitySet::rank)
        .def_property_readonly("dim", &atax::CapabilitySet::dim)
        .def("__len__", &atax::CapabilitySet::size)
        .def("project", [](const atax::CapabilitySet& s, const atax::Vector& v) { return s.project(v); });
    m.def("principal_angle", [](const atax::Vector& v, const atax::Vector& c) {
        return atax::principal_angle(dir(v), dir(c));
    }, "v"_a, "c"_a);
    m.def("tax_rate", [](const atax::Vector& v, const atax::CapabilitySet& s) {
        const auto t = atax::tax_rate(dir(v), s);
        std::vector<double> per;
        for (const auto& [i, x] : t.per_task) per.push_back(x);
        return py::dict("joint_tax"_a = t.joint_tax, "per_task"_a = per,
                        "free_safety_fraction"_a = t.free_safety_fraction);
    }, "v"_a, "capabilities"_a);

    // frontier
    m.def("frontier_safety", &atax::frontier_safety, "alpha"_a, "budget_radius"_a, "delta_c"_a);
    m.def("frontier_curve", [](double alpha, double b, int n) {
        const auto curve = atax::frontier_curve(alpha, b, n);
        Eigen::MatrixX2d out(static_cast<Eigen::Index>(curve.points.size()), 2);
        for (std::size_t k = 0; k < curve.points.size(); ++k) {
            out(static_cast<Eigen::Index>(k), 0) = curve.points[k].delta_c;
            out(static_cast<Eigen::Index>(k), 1) = curve.points[k].delta_s;
        }
        return out;
    }, "alpha"_a, "budget_radius"_a, "n_samples"_a);
    m.def("optimal_delta_single", [](const atax::Vector& v, const atax::Vector& c, double b, double dc) {
        return atax::optimal_delta_single(dir(v), dir(c), b, dc).delta;
    }, "v"_a, "c"_a, "budget_radius"_a, "delta_c"_a);
    m.def("max_safety_constrained", [](const atax::Vector& v, const atax::CapabilitySet& s,
                                       const atax::Vector& target, double b) {
        const auto r = atax::max_safety_constrained(dir(v), s, target, b);
        return py::dict("delta_s_max"_a = r.delta_s_max, "optimizer"_a = r.optimizer.delta,
                        "residual_budget"_a = r.residual_budget, "subsidy"_a = r.subsidy,
                        "free_fraction"_a = r.free_fraction);
    }, "v"_a, "capabilities"_a, "delta_c_star"_a, "budget_radius"_a);
    m.def("free_safety", &atax::free_safety, "tax"_a, "budget_radius"_a);
    m.def("whiten", [](const atax::Matrix& fisher, double radius, const std::vector<atax::Vector>& us) {
        std::vector<atax::Direction> ds;
        for (const auto& u : us) ds.push_back(dir(u));
        const auto w = atax::whiten(atax::Budget::anisotropic(radius, fisher), ds);
        std::vector<atax::Vector> out;
        for (const auto& d : w.directions) out.push_back(d.coords());
        return py::dict("radius"_a = w.radius, "directions"_a = out, "scales"_a = w.scales,
                        "eigenvalues"_a = w.eigenvalues, "condition_number"_a = w.condition_number);
    }, "fisher"_a, "budget_radius"_a, "directions"_a);

    // conflict
    auto angle_dict = [](const atax::EffectiveAngleResult& r) {
        return py::dict("cos_theta"_a = r.cos_theta, "theta"_a = r.theta, "a"_a = r.a, "b"_a = r.b,
                        "tilde_norms"_a = py::make_tuple(r.tilde_norm1, r.tilde_norm2));
    };
    m.def("effective_angle", [angle_dict](double rho, double a, double b) {
        return angle_dict(atax::effective_angle(rho, a, b));
    }, "rho"_a, "a"_a, "b"_a);
    m.def("effective_angle_multi", [angle_dict](const atax::Vector& v1, const atax::Vector& v2,
                                                const atax::CapabilitySet& s) {
        return angle_dict(atax::effective_angle_multi(atax::SafetyPair::of(dir(v1), dir(v2)), s));
    }, "v1"_a, "v2"_a, "capabilities"_a);
    m.def("safety_safety_frontier", &atax::safety_safety_frontier, "theta"_a, "s2"_a);
    m.def("equal_improvement", &atax::equal_improvement, "theta"_a);
    m.def("classify_capability", [](double rho, double a, double b) {
        const auto k = atax::classify_capability(rho, a, b);
        return py::dict("label"_a = std::string(atax::to_string(k.label)),
                        "effective_corr"_a = k.effective_corr, "raw_corr"_a = k.raw_corr,
                        "improves_tradeoff"_a = k.improves_tradeoff);
    }, "rho"_a, "a"_a, "b"_a);
    m.def("decomposition_bound", &atax::decomposition_bound, "budget_radius"_a,
          "delta_c_star_norm"_a, "theta"_a, "tau1"_a, "tau2"_a);

    // scaling lab
    m.def("sample_uniform_direction", [](Eigen::Index d, std::uint64_t seed) {
        atax::Rng rng(seed);
        return atax::sample_uniform_direction(d, rng).coords();
    }, "d"_a, "seed"_a);
    m.def("welch_bound", &atax::welch_bound, "n_features"_a, "d"_a);
    m.def("irreducible_tax", [](std::vector<double> gamma) {
        atax::PackingSpec spec;
        spec.intrinsic_overlaps = std::move(gamma);
        return atax::irreducible_tax(spec);
    }, "gamma"_a);
    m.def("residual_bound", &atax::residual_bound, "tau0"_a, "m"_a, "m_prime"_a, "mu"_a,
          "gamma_bar"_a, "intrinsic_count"_a);
    m.def("monte_carlo_tax", [](Eigen::Index d, std::vector<double> gamma, int m_prime,
                                std::int64_t trials, std::uint64_t seed, int threads) {
        atax::PackingSpec spec{d, std::move(gamma), m_prime, std::nullopt};
        atax::McEstimate e;
        {
            py::gil_scoped_release release;
            e = atax::monte_carlo_tax(spec, trials, seed, threads);
        }
        return mc(e);
    }, "d"_a, "gamma"_a, "m_prime"_a, "trials"_a, "seed"_a, "threads"_a = 1);
    m.def("expected_random_projection", [](std::int64_t r, std::int64_t d, std::int64_t trials,
                                           std::uint64_t seed) {
        const auto e = atax::expected_random_projection(r, d, trials, seed);
        return py::dict("analytic"_a = e.analytic, "monte_carlo"_a = mc(e.monte_carlo));
    }, "r"_a, "d"_a, "trials"_a, "seed"_a);

    // oracle
    m.def("oracle_max_safety", [](const atax::Vector& v, const atax::Vector& c, double b, double dc,
                                  int grid) {
        atax::OracleConfig cfg;
        cfg.grid_resolution = grid;
        return atax::oracle_max_safety(dir(v), dir(c), b, dc, cfg);
    }, "v"_a, "c"_a, "budget_radius"_a, "delta_c"_a, "grid_resolution"_a = 4096);
    m.def("oracle_equal_improvement", [](double theta) {
        return atax::oracle_equal_improvement(theta);
    }, "theta"_a);

    // cli-io
    m.def("run_command", [](const std::string& command, const std::optional<std::string>& problem_text,
                            const py::dict& options) {
        atax::CommandOptions o;
        o.command = command;
        if (options.contains("alpha_from")) o.alpha_from = options["alpha_from"].cast<std::string>();
        if (options.contains("delta_c")) o.delta_c = options["delta_c"].cast<double>();
        if (options.contains("samples")) o.samples = options["samples"].cast<int>();
        if (options.contains("trials")) o.trials = options["trials"].cast<std::int64_t>();
        if (options.contains("seed")) o.seed = options["seed"].cast<std::uint64_t>();
        if (options.contains("d")) o.d_values = options["d"].cast<std::vector<std::int64_t>>();
        if (options.contains("m_prime")) o.m_prime = options["m_prime"].cast<int>();
        if (options.contains("gamma")) o.gamma = options["gamma"].cast<std::vector<double>>();
        if (options.contains("audit")) o.audit = options["audit"].cast<bool>();
        if (options.contains("grid")) o.grid_resolution = options["grid"].cast<int>();
        if (options.contains("threads")) o.threads = options["threads"].cast<int>();
        std::optional<atax::ProblemFile> p;
        if (problem_text) p = atax::parse_problem_text(*problem_text);
        const auto report = atax::run_command(o, p);
        return py::make_tuple(report.render(), report.csv);
    }, "command"_a, "problem"_a = py::none(), "options"_a = py::dict());
    m.def("canonical_problem", [](const std::string& text) {
        return atax::canonical_text(atax::parse_problem_text(text));
    }, "text"_a);

    m.attr("__version__") = atax::kToolVersion;
}
