// atax: command-line front end for the alignment tax toolkit.
//
//   atax tax --input problem.json
//   atax frontier --input problem.json --alpha-from math --samples 5 --csv curve.csv
//   atax scaling-sim --d 64,256,1024 --m-prime 10 --trials 10000 --seed 7

#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "atax/commands.hpp"
#include "atax/error.hpp"
#include "atax/problem.hpp"

namespace {

constexpr int kUsageExit = 2;

void write_file(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw atax::Error(atax::ErrorKind::InvalidArgument, "cannot write '" + path + "'");
    out << text;
}

std::string command_help() {
    std::string s = "one of:";
    for (const auto& c : atax::known_commands()) s += " " + c;
    return s;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Alignment tax geometry: tax rates, Pareto frontiers, conflict analysis and "
                 "scaling simulations"};
    atax::CommandOptions opts;
    std::optional<std::string> input, output, csv;
    std::int64_t trials = 0;

    app.add_option("command", opts.command, command_help())
        ->required()
        ->check(CLI::IsMember(atax::known_commands()));
    app.add_option("--input", input, "problem file (JSON)");
    app.add_option("--output", output, "write the report here instead of stdout");
    app.add_option("--csv", csv, "CSV sidecar for frontier, conflict and scaling-sim");
    app.add_option("--seed", opts.seed, "64-bit seed for stochastic commands");
    auto* trials_opt = app.add_option("--trials", trials, "Monte Carlo or audit trials")
                           ->check(CLI::PositiveNumber);
    app.add_option("--samples", opts.samples, "frontier sample count")->check(CLI::Range(2, 10000000));
    app.add_flag("--audit", opts.audit, "append closed-form vs brute-force oracle comparisons");
    app.add_option("--d", opts.d_values, "comma-separated dimensions for scaling-sim")
        ->delimiter(',');
    app.add_option("--m-prime", opts.m_prime, "incidental capability count")->check(CLI::NonNegativeNumber);
    app.add_option("--gamma", opts.gamma, "comma-separated intrinsic overlaps")->delimiter(',');
    app.add_option("--alpha-from", opts.alpha_from, "capability that defines the frontier angle");
    app.add_option("--delta-c", opts.delta_c, "capability change for optimal-delta");
    app.add_option("--grid", opts.grid_resolution, "oracle grid resolution")->check(CLI::Range(16, 1 << 24));
    app.add_option("--threads", opts.threads, "worker threads (results do not depend on it)")
        ->check(CLI::Range(1, 1024));

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : kUsageExit;
    }
    if (trials_opt->count() > 0) opts.trials = trials;

    try {
        std::optional<atax::ProblemFile> problem;
        if (input) {
            problem = atax::parse_problem(*input);
        } else if (atax::needs_problem(opts.command)) {
            std::cerr << "atax: " << opts.command << " requires --input\n";
            return kUsageExit;
        }
        if (problem && atax::needs_problem(opts.command)) {
            for (const auto& w : problem->warnings) std::cerr << "atax: warning: " << w << "\n";
        }

        const atax::Report report = atax::run_command(opts, problem);
        if (output) {
            write_file(*output, report.render());
        } else {
            std::cout << report.render();
        }
        if (csv) {
            if (report.csv) {
                write_file(*csv, *report.csv);
            } else {
                std::cerr << "atax: warning: " << opts.command << " produces no CSV sidecar\n";
            }
        }
    } catch (const atax::Error& e) {
        std::cerr << "atax: error: " << e.what() << "\n";
        return atax::exit_code(e.kind());
    } catch (const std::exception& e) {
        std::cerr << "atax: internal error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
