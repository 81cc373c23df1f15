#pragma once

// Problem files: one JSON document holding the safety direction(s), named
// capability directions, the budget and an optional Fisher matrix.
//
//   {
//     "dim": 3,
//     "safety": [1, 0, 0],                       // or [[...], [...]] or {"name": [...]}
//     "capabilities": {"math": [0, 1, 0], "code": [0, 0, 1]},
//     "budget_radius": 1.0,
//     "fisher": [1, 2, 4],                       // optional: diagonal or dense dim x dim
//     "delta_c_star": [0, 0.3, 0]                // optional: target capability shift
//   }
//
// Key order is irrelevant. Capabilities are ordered by name.

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "atax/geometry.hpp"

namespace atax {

struct NamedDirection {
    std::string name;
    /// Coordinates exactly as written in the file.
    Vector raw;
    Direction direction;
};

struct ProblemFile {
    Eigen::Index dim = 0;
    std::vector<NamedDirection> safety;
    /// True when "safety" was written as a bare vector.
    bool single_unnamed_safety = false;
    std::vector<NamedDirection> capabilities;
    double budget_radius = 0.0;
    std::optional<Matrix> fisher;
    bool fisher_diagonal = false;
    std::optional<Vector> delta_c_star;
    /// Ingest notes, e.g. vectors that were renormalized.
    std::vector<std::string> warnings;

    std::vector<Direction> capability_directions() const;
    /// Index of the capability called `name`; throws SchemaError if absent.
    std::size_t capability_index(std::string_view name) const;
};

/// Input norm deviation from 1 above which normalization is reported.
inline constexpr double kNormWarningThreshold = 1e-6;

ProblemFile parse_problem_text(std::string_view text);
ProblemFile parse_problem(const std::filesystem::path& path);

/// Canonical form: sorted keys, raw coordinates as written. Parsing the
/// canonical form and re-emitting it is the identity.
nlohmann::json canonical_json(const ProblemFile& problem);
std::string canonical_text(const ProblemFile& problem);

/// Lower-case hex SHA-256 of the canonical text.
std::string inputs_digest(const ProblemFile& problem);
std::string sha256_hex(std::string_view data);

}  // namespace atax
