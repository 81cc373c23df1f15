#pragma once

// Command dispatch for the atax tool. Each command maps a problem file (or,
// for scaling-sim, only options) to a JSON report and optionally a CSV
// sidecar. Reports depend only on the inputs, the options echoed in them and
// the seed, never on thread count or output paths.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "atax/problem.hpp"

namespace atax {

inline constexpr const char* kToolName = "atax";
inline constexpr const char* kToolVersion = "0.1.0";

struct CommandOptions {
    std::string command;
    std::optional<std::string> alpha_from;
    double delta_c = 0.0;
    int samples = 101;
    std::optional<std::int64_t> trials;
    std::uint64_t seed = 0;
    std::vector<std::int64_t> d_values;
    int m_prime = 0;
    std::vector<double> gamma;
    bool audit = false;
    int grid_resolution = 4096;
    int threads = 1;
};

/// Commands accepted by run_command.
const std::vector<std::string>& known_commands();
bool needs_problem(const std::string& command);

struct Report {
    nlohmann::ordered_json document;
    /// Sidecar rows for frontier, conflict and scaling-sim.
    std::optional<std::string> csv;

    /// Pretty-printed document with a trailing newline.
    std::string render() const;
};

/// Runs `options.command`. `problem` is required for every command except
/// scaling-sim. Module errors propagate as atax::Error.
Report run_command(const CommandOptions& options, const std::optional<ProblemFile>& problem);

/// Shortest decimal that round-trips to the same double.
std::string format_double(double x);

}  // namespace atax
