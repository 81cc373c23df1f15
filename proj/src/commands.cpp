#include "atax/commands.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <numbers>

#include "atax/conflict.hpp"
#include "atax/error.hpp"
#include "atax/frontier.hpp"
#include "atax/oracle.hpp"
#include "atax/random.hpp"
#include "atax/scaling.hpp"

namespace atax {

namespace {

using ojson = nlohmann::ordered_json;

constexpr std::int64_t kDefaultScalingTrials = 1000;
constexpr std::int64_t kDefaultAuditTrials = 200;

ojson vec_json(const Vector& v) {
    ojson out = ojson::array();
    for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(v[i]);
    return out;
}

void append_row(std::string& csv, std::initializer_list<double> values) {
    bool first = true;
    for (double x : values) {
        if (!first) csv += ',';
        csv += format_double(x);
        first = false;
    }
    csv += '\n';
}

const ProblemFile& require_problem(const std::optional<ProblemFile>& problem,
                                   const std::string& command) {
    if (!problem) throw Error(ErrorKind::InvalidArgument, command + " needs --input");
    return *problem;
}

std::size_t pick_capability(const ProblemFile& p, const CommandOptions& o) {
    if (o.alpha_from) return p.capability_index(*o.alpha_from);
    if (p.capabilities.size() == 1) return 0;
    throw Error(ErrorKind::SchemaError, "several capabilities: choose one with --alpha-from");
}

CapabilitySet capability_set(const ProblemFile& p) {
    const auto dirs = p.capability_directions();
    return CapabilitySet::build(std::span<const Direction>(dirs));
}

Vector target_of(const ProblemFile& p) {
    return p.delta_c_star ? *p.delta_c_star : Vector::Zero(p.dim);
}

void require_pair(const ProblemFile& p, const std::string& command) {
    if (p.safety.size() != 2) {
        throw Error(ErrorKind::SchemaError, command + " needs exactly two safety directions");
    }
}

std::int64_t trials_or(const CommandOptions& o, std::int64_t fallback) {
    return o.trials.value_or(fallback);
}

ojson tax_entry(const NamedDirection& s, const ProblemFile& p, const CapabilitySet& set,
                const Direction& v) {
    const TaxReport tax = tax_rate(v, set);
    ojson entry;
    entry["name"] = s.name;
    entry["joint_tax"] = tax.joint_tax;
    entry["free_safety_fraction"] = tax.free_safety_fraction;
    entry["free_safety"] = free_safety(tax.joint_tax, p.budget_radius);
    double sum = 0.0;
    ojson per = ojson::array();
    for (const auto& [i, t] : tax.per_task) {
        ojson row;
        row["capability"] = p.capabilities[i].name;
        row["tax"] = t;
        row["angle"] = principal_angle(v, set.directions()[i]);
        per.push_back(std::move(row));
        sum += t;
    }
    entry["per_task"] = std::move(per);
    entry["per_task_sum"] = sum;
    return entry;
}

ojson run_tax(const ProblemFile& p) {
    const CapabilitySet set = capability_set(p);
    ojson r;
    r["rank"] = set.rank();
    r["budget_radius"] = p.budget_radius;
    ojson safeties = ojson::array();
    for (const auto& s : p.safety) safeties.push_back(tax_entry(s, p, set, s.direction));
    r["safeties"] = std::move(safeties);
    return r;
}

ojson run_frontier(const ProblemFile& p, const CommandOptions& o, std::string& csv) {
    const std::size_t ci = pick_capability(p, o);
    const Direction& v = p.safety.front().direction;
    const Direction& c = p.capabilities[ci].direction;
    ojson r;
    r["safety"] = p.safety.front().name;
    r["capability"] = p.capabilities[ci].name;
    double alpha = 0.0;
    if (p.fisher) {
        const Direction pair[] = {v, c};
        const WhitenResult w = whiten(Budget::anisotropic(p.budget_radius, *p.fisher), pair);
        alpha = principal_angle(w.directions[0], w.directions[1]);
        r["space"] = "whitened";
        r["raw_scale"] = {{"safety", w.scales[0]}, {"capability", w.scales[1]}};
    } else {
        alpha = principal_angle(v, c);
        r["space"] = "raw";
    }
    const FrontierCurve curve = frontier_curve(alpha, p.budget_radius, o.samples);
    r["alpha"] = alpha;
    r["budget_radius"] = p.budget_radius;
    r["peak"] = {{"delta_c", p.budget_radius * std::cos(alpha)}, {"delta_s", p.budget_radius}};
    ojson pts = ojson::array();
    csv = "delta_c,delta_s\n";
    for (const auto& pt : curve.points) {
        pts.push_back({{"delta_c", pt.delta_c}, {"delta_s", pt.delta_s}});
        append_row(csv, {pt.delta_c, pt.delta_s});
    }
    r["points"] = std::move(pts);
    return r;
}

ojson run_optimal_delta(const ProblemFile& p, const CommandOptions& o) {
    const std::size_t ci = pick_capability(p, o);
    const Direction& v = p.safety.front().direction;
    const Direction& c = p.capabilities[ci].direction;
    ojson r;
    r["safety"] = p.safety.front().name;
    r["capability"] = p.capabilities[ci].name;
    r["delta_c"] = o.delta_c;
    Perturbation delta;
    double frontier = 0.0;
    if (p.fisher) {
        const Direction pair[] = {v, c};
        const WhitenResult w = whiten(Budget::anisotropic(p.budget_radius, *p.fisher), pair);
        const double target = o.delta_c / w.scales[1];
        const Perturbation white = optimal_delta_single(w.directions[0], w.directions[1], w.radius, target);
        frontier = w.scales[0] *
                   frontier_safety(principal_angle(w.directions[0], w.directions[1]), w.radius, target);
        delta = Perturbation::of(unwhiten(w, white.delta));
        r["space"] = "whitened";
        r["fisher_norm"] = std::sqrt(delta.delta.dot(*p.fisher * delta.delta));
    } else {
        delta = optimal_delta_single(v, c, p.budget_radius, o.delta_c);
        frontier = frontier_safety(principal_angle(v, c), p.budget_radius, o.delta_c);
        r["space"] = "raw";
    }
    r["delta"] = vec_json(delta.delta);
    r["norm"] = delta.norm;
    r["delta_c_realized"] = c.coords().dot(delta.delta);
    r["delta_s_realized"] = v.coords().dot(delta.delta);
    r["frontier_value"] = frontier;
    return r;
}

ojson run_max_safety(const ProblemFile& p) {
    if (p.fisher) {
        throw Error(ErrorKind::InvalidArgument,
                    "max-safety uses an isotropic budget; remove fisher or use whiten");
    }
    const CapabilitySet set = capability_set(p);
    const Vector target = target_of(p);
    ojson r;
    r["budget_radius"] = p.budget_radius;
    r["delta_c_star"] = vec_json(target);
    ojson safeties = ojson::array();
    for (const auto& s : p.safety) {
        const ConstrainedMaxResult m = max_safety_constrained(s.direction, set, target, p.budget_radius);
        const double tax = tax_rate(s.direction, set).joint_tax;
        ojson e;
        e["name"] = s.name;
        e["delta_s_max"] = m.delta_s_max;
        e["subsidy"] = m.subsidy;
        e["residual_budget"] = m.residual_budget;
        e["free_fraction"] = m.free_fraction;
        e["joint_tax"] = tax;
        e["free_safety"] = free_safety(tax, p.budget_radius);
        e["negative_tax"] = m.subsidy > 0.0;
        e["optimizer"] = vec_json(m.optimizer.delta);
        e["optimizer_norm"] = m.optimizer.norm;
        safeties.push_back(std::move(e));
    }
    r["safeties"] = std::move(safeties);
    return r;
}

ojson run_conflict(const ProblemFile& p, const CommandOptions& o, std::string& csv) {
    require_pair(p, "conflict");
    const CapabilitySet set = capability_set(p);
    const SafetyPair pair = SafetyPair::of(p.safety[0].direction, p.safety[1].direction);
    const EffectiveAngleResult eff = effective_angle_multi(pair, set);
    const double tau1 = tax_rate(pair.v1, set).joint_tax;
    const double tau2 = tax_rate(pair.v2, set).joint_tax;
    const double target_norm = target_of(p).norm();
    const double residual =
        std::sqrt(std::max(0.0, p.budget_radius * p.budget_radius - target_norm * target_norm));
    const double s_eq = equal_improvement(eff.theta);

    ojson r;
    r["safeties"] = {p.safety[0].name, p.safety[1].name};
    r["rho"] = pair.rho;
    r["cos_theta"] = eff.cos_theta;
    r["theta"] = eff.theta;
    r["tau"] = {tau1, tau2};
    r["tilde_norms"] = {eff.tilde_norm1, eff.tilde_norm2};
    r["residual_budget"] = residual;
    r["equal_improvement"] = s_eq;
    r["equal_gains"] = {denormalize_gain(s_eq, residual, tau1), denormalize_gain(s_eq, residual, tau2)};
    r["decomposition_bound"] =
        decomposition_bound(p.budget_radius, target_norm, eff.theta, tau1, tau2);
    if (o.samples < 2) throw Error(ErrorKind::InvalidSampleCount, "need at least 2 samples");
    ojson pts = ojson::array();
    csv = "s2,s1\n";
    for (int k = 0; k < o.samples; ++k) {
        const double s2 = k + 1 == o.samples ? 1.0 : -1.0 + 2.0 * k / (o.samples - 1);
        const double s1 = safety_safety_frontier(eff.theta, s2);
        pts.push_back({{"s2", s2}, {"s1", s1}});
        append_row(csv, {s2, s1});
    }
    r["frontier"] = std::move(pts);
    return r;
}

ojson run_classify(const ProblemFile& p) {
    require_pair(p, "classify");
    ojson r;
    r["safeties"] = {p.safety[0].name, p.safety[1].name};
    r["rho"] = dot(p.safety[0].direction, p.safety[1].direction);
    ojson rows = ojson::array();
    for (const auto& c : p.capabilities) {
        const ScalarProjections s =
            projections_from_vectors(p.safety[0].direction, p.safety[1].direction, c.direction);
        const ConflictClass k = classify_capability(s.rho, s.a, s.b);
        ojson row;
        row["capability"] = c.name;
        row["a"] = s.a;
        row["b"] = s.b;
        row["label"] = std::string(to_string(k.label));
        row["effective_corr"] = k.effective_corr;
        row["improves_tradeoff"] = k.improves_tradeoff;
        rows.push_back(std::move(row));
    }
    r["capabilities"] = std::move(rows);
    return r;
}

ojson run_scaling(const CommandOptions& o, std::string& csv) {
    if (o.d_values.empty()) throw Error(ErrorKind::InvalidArgument, "scaling-sim needs --d");
    PackingSpec spec;
    spec.intrinsic_overlaps = o.gamma;
    spec.m_prime = o.m_prime;
    const ScalingSeries series =
        scaling_series(spec, o.d_values, trials_or(o, kDefaultScalingTrials), o.seed, o.threads);
    ojson r;
    r["tau0"] = series.tau0;
    ojson pts = ojson::array();
    csv = "d,mean_tax,std_error,trials\n";
    for (const auto& pt : series.points) {
        ojson e;
        e["d"] = pt.d;
        e["mean_tax"] = pt.estimate.mean;
        e["std_error"] = pt.estimate.std_error;
        e["trials"] = pt.estimate.trials;
        e["leading_order"] = series.tau0 + static_cast<double>(o.m_prime) / static_cast<double>(pt.d);
        pts.push_back(std::move(e));
        csv += std::to_string(pt.d) + ',' + format_double(pt.estimate.mean) + ',' +
               format_double(pt.estimate.std_error) + ',' + std::to_string(pt.estimate.trials) + '\n';
    }
    r["points"] = std::move(pts);
    const RegimeVerdict& v = series.verdict;
    r["fit"] = {{"regime", std::string(to_string(v.regime))},
                {"slope", v.slope},
                {"r_squared", v.r_squared},
                {"residual_rms", v.residual_rms},
                {"excess_relative_range", v.excess_relative_range},
                {"free_intercept", v.free_intercept},
                {"free_intercept_std_error", v.free_intercept_std_error},
                {"free_slope", v.free_slope}};
    return r;
}

ojson run_whiten(const ProblemFile& p) {
    if (!p.fisher) throw Error(ErrorKind::InvalidArgument, "whiten needs a fisher matrix");
    std::vector<Direction> all;
    for (const auto& s : p.safety) all.push_back(s.direction);
    for (const auto& c : p.capabilities) all.push_back(c.direction);
    const WhitenResult w = whiten(Budget::anisotropic(p.budget_radius, *p.fisher), all);

    ojson r;
    r["radius"] = w.radius;
    r["eigenvalues"] = vec_json(w.eigenvalues);
    r["condition_number"] = w.condition_number;
    ojson dirs = ojson::array();
    std::size_t k = 0;
    for (const auto* group : {&p.safety, &p.capabilities}) {
        for (const auto& nd : *group) {
            dirs.push_back({{"name", nd.name},
                            {"coords", vec_json(w.directions[k].coords())},
                            {"scale", w.scales[k]}});
            ++k;
        }
    }
    r["directions"] = std::move(dirs);
    const std::span<const Direction> white_caps(w.directions.begin() + static_cast<std::ptrdiff_t>(p.safety.size()),
                                                w.directions.end());
    const CapabilitySet set = CapabilitySet::build(white_caps);
    ojson taxes = ojson::array();
    for (std::size_t i = 0; i < p.safety.size(); ++i) {
        taxes.push_back(tax_entry(p.safety[i], p, set, w.directions[i]));
    }
    r["whitened_tax"] = std::move(taxes);
    return r;
}

ojson audit_block(const ProblemFile& p, const CommandOptions& o) {
    OracleConfig cfg;
    cfg.grid_resolution = o.grid_resolution;
    cfg.seed = o.seed;
    cfg.validate();
    const double tol = cfg.tolerance_bound(p.budget_radius);
    bool passed = true;

    ojson frontier = ojson::array();
    for (const auto& s : p.safety) {
        for (const auto& c : p.capabilities) {
            const double alpha = principal_angle(s.direction, c.direction);
            double gap = 0.0;
            double realize = 0.0;
            for (const auto& pt : frontier_curve(alpha, p.budget_radius, std::max(o.samples, 2)).points) {
                const double oracle =
                    oracle_max_safety(s.direction, c.direction, p.budget_radius, pt.delta_c, cfg);
                gap = std::max(gap, std::abs(pt.delta_s - oracle));
                const Perturbation d =
                    optimal_delta_single(s.direction, c.direction, p.budget_radius, pt.delta_c);
                realize = std::max(realize, std::abs(s.direction.coords().dot(d.delta) - pt.delta_s));
            }
            passed = passed && gap <= tol && realize <= 1e-10;
            frontier.push_back({{"safety", s.name},
                                {"capability", c.name},
                                {"max_gap", gap},
                                {"max_realization_error", realize}});
        }
    }

    const CapabilitySet set = capability_set(p);
    const Vector target = target_of(p);
    ojson constrained = ojson::array();
    for (const auto& s : p.safety) {
        const double closed = max_safety_constrained(s.direction, set, target, p.budget_radius).delta_s_max;
        const double oracle = oracle_max_safety_constrained(s.direction, set, target, p.budget_radius, cfg);
        passed = passed && std::abs(closed - oracle) <= tol;
        constrained.push_back({{"safety", s.name}, {"closed_form", closed}, {"oracle", oracle},
                               {"gap", std::abs(closed - oracle)}});
    }

    ojson out;
    out["grid_resolution"] = cfg.grid_resolution;
    out["tolerance_bound"] = tol;
    out["frontier"] = std::move(frontier);
    out["max_safety"] = std::move(constrained);
    if (p.safety.size() == 2) {
        const SafetyPair pair = SafetyPair::of(p.safety[0].direction, p.safety[1].direction);
        const double theta = effective_angle_multi(pair, set).theta;
        const double closed = equal_improvement(theta);
        const double oracle = oracle_equal_improvement(theta, cfg);
        passed = passed && std::abs(closed - oracle) <= 1e-9;
        out["equal_improvement"] = {{"closed_form", closed}, {"oracle", oracle},
                                    {"gap", std::abs(closed - oracle)}};
    }

    // Random battery in the problem's dimension.
    const std::int64_t trials = trials_or(o, kDefaultAuditTrials);
    const Eigen::Index d = std::max<Eigen::Index>(p.dim, 2);
    double battery_gap = 0.0;
    double battery_ratio = 0.0;
    for (std::int64_t t = 0; t < trials; ++t) {
        Rng rng = Rng::for_stream(o.seed, static_cast<std::uint64_t>(t));
        const Direction v = sample_uniform_direction(d, rng);
        const Direction c = sample_uniform_direction(d, rng);
        const double budget = 4.0 * (1.0 - rng.uniform());
        const double dc = budget * (2.0 * rng.uniform() - 1.0);
        const double closed = frontier_safety(principal_angle(v, c), budget, dc);
        const double gap = std::abs(closed - oracle_max_safety(v, c, budget, dc, cfg));
        battery_gap = std::max(battery_gap, gap);
        battery_ratio = std::max(battery_ratio, gap / cfg.tolerance_bound(budget));
    }
    passed = passed && battery_ratio <= 1.0;
    out["battery"] = {{"trials", trials}, {"max_gap", battery_gap},
                      {"max_gap_over_tolerance", battery_ratio}};
    out["passed"] = passed;
    return out;
}

bool is_stochastic(const CommandOptions& o) {
    return o.command == "scaling-sim" || o.command == "audit" || o.audit;
}

ojson options_echo(const CommandOptions& o) {
    ojson e = ojson::object();
    const std::string& c = o.command;
    if (o.alpha_from && (c == "frontier" || c == "optimal-delta")) e["alpha_from"] = *o.alpha_from;
    if (c == "optimal-delta") e["delta_c"] = o.delta_c;
    if (c == "frontier" || c == "conflict" || c == "audit" || o.audit) e["samples"] = o.samples;
    if (c == "scaling-sim") {
        e["d"] = o.d_values;
        e["m_prime"] = o.m_prime;
        e["gamma"] = o.gamma;
        e["trials"] = trials_or(o, kDefaultScalingTrials);
    }
    if (c == "audit" || o.audit) {
        e["grid_resolution"] = o.grid_resolution;
        e["trials"] = trials_or(o, kDefaultAuditTrials);
    }
    return e;
}

}  // namespace

const std::vector<std::string>& known_commands() {
    static const std::vector<std::string> commands = {"tax",      "frontier", "optimal-delta",
                                                      "max-safety", "conflict", "classify",
                                                      "scaling-sim", "whiten", "audit"};
    return commands;
}

bool needs_problem(const std::string& command) { return command != "scaling-sim"; }

std::string Report::render() const { return document.dump(2) + "\n"; }

std::string format_double(double x) {
    char buf[64];
    const auto [end, ec] = std::to_chars(buf, buf + sizeof buf, x);
    return ec == std::errc{} ? std::string(buf, end) : std::string("nan");
}

Report run_command(const CommandOptions& o, const std::optional<ProblemFile>& problem) {
    const auto& cmds = known_commands();
    if (std::find(cmds.begin(), cmds.end(), o.command) == cmds.end()) {
        throw Error(ErrorKind::InvalidArgument, "unknown command '" + o.command + "'");
    }

    Report report;
    std::string csv;
    ojson results;
    const std::string& c = o.command;
    if (c == "scaling-sim") {
        results = run_scaling(o, csv);
    } else {
        const ProblemFile& p = require_problem(problem, c);
        if (c == "tax") results = run_tax(p);
        else if (c == "frontier") results = run_frontier(p, o, csv);
        else if (c == "optimal-delta") results = run_optimal_delta(p, o);
        else if (c == "max-safety") results = run_max_safety(p);
        else if (c == "conflict") results = run_conflict(p, o, csv);
        else if (c == "classify") results = run_classify(p);
        else if (c == "whiten") results = run_whiten(p);
        else if (c == "audit") results = audit_block(p, o);
        if (o.audit && c != "audit") results["audit"] = audit_block(p, o);
    }

    ojson& doc = report.document;
    doc["tool"] = kToolName;
    doc["version"] = kToolVersion;
    doc["command"] = c;
    doc["options"] = options_echo(o);
    doc["inputs_digest"] = problem && needs_problem(c) ? inputs_digest(*problem)
                                                       : sha256_hex(doc["options"].dump());
    if (is_stochastic(o)) doc["seed"] = o.seed;
    ojson warnings = ojson::array();
    if (problem && needs_problem(c)) {
        for (const auto& w : problem->warnings) warnings.push_back(w);
    }
    doc["warnings"] = std::move(warnings);
    doc["results"] = std::move(results);
    if (!csv.empty()) report.csv = std::move(csv);
    return report;
}

}  // namespace atax
