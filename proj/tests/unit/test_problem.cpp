#include <doctest.h>

#include <cmath>
#include <set>
#include <sstream>
#include <string>

#include "atax/commands.hpp"
#include "atax/error.hpp"
#include "atax/problem.hpp"
#include "test_support.hpp"

using namespace atax;
using doctest::Approx;

namespace {

constexpr const char* kMinimal =
    R"({"dim": 2, "safety": [1, 0], "capabilities": {"math": [0, 1]}, "budget_radius": 1})";

ErrorKind kind_of(auto&& fn) {
    try {
        fn();
    } catch (const Error& e) {
        return e.kind();
    }
    FAIL("expected atax::Error");
    return ErrorKind::InvalidArgument;
}

CommandOptions opts(std::string command) {
    CommandOptions o;
    o.command = std::move(command);
    return o;
}

std::vector<std::vector<double>> csv_rows(const std::string& csv, std::string& header) {
    std::istringstream in(csv);
    std::getline(in, header);
    std::vector<std::vector<double>> rows;
    for (std::string line; std::getline(in, line);) {
        std::vector<double> row;
        std::istringstream cells(line);
        for (std::string cell; std::getline(cells, cell, ',');) row.push_back(std::stod(cell));
        rows.push_back(row);
    }
    return rows;
}

}  // namespace

TEST_SUITE("cli-io") {

TEST_CASE("parse_problem examples") {
    const auto p = parse_problem_text(kMinimal);
    CHECK(p.dim == 2);
    CHECK(p.single_unnamed_safety);
    CHECK(p.capabilities.size() == 1);
    CHECK(p.capabilities[0].name == "math");
    CHECK(p.warnings.empty());

    CHECK(kind_of([] {
              parse_problem_text(
                  R"({"dim": 2, "safety": [1, 0], "capabilities": {"math": [0, 1, 0]}, "budget_radius": 1})");
          }) == ErrorKind::DimensionMismatch);
    CHECK(kind_of([] {
              parse_problem_text(
                  R"({"dim": 2, "safety": [0, 0], "capabilities": {"math": [0, 1]}, "budget_radius": 1})");
          }) == ErrorKind::ZeroVector);
}

TEST_CASE("parse_problem rejects malformed files") {
    CHECK(kind_of([] { parse_problem_text("{\"dim\": 2,"); }) == ErrorKind::ParseError);
    CHECK(kind_of([] { parse_problem_text(R"({"dim": 2, "safety": [1, 0], "budget_radius": 1})"); }) ==
          ErrorKind::SchemaError);
    CHECK(kind_of([] {
              parse_problem_text(R"({"dim": 2, "safety": [1, 0], "capabilities": {"math": [0, 1]},
                                     "budget_radius": 1, "colour": 3})");
          }) == ErrorKind::SchemaError);
    CHECK(kind_of([] {
              parse_problem_text(R"({"dim": 2, "safety": [1, 0],
                                     "capabilities": {"math": [0, 1], "math": [1, 1]}, "budget_radius": 1})");
          }) == ErrorKind::SchemaError);
    CHECK(kind_of([] {
              parse_problem_text(
                  R"({"dim": 2, "safety": [1, 0], "capabilities": {"math": [0, 1]}, "budget_radius": -1})");
          }) == ErrorKind::SchemaError);
    CHECK(kind_of([] {
              parse_problem_text(
                  R"({"dim": 2, "safety": [1, 0], "capabilities": {"math": [0, "x"]}, "budget_radius": 1})");
          }) == ErrorKind::SchemaError);
    CHECK(kind_of([] { parse_problem(std::filesystem::path("/nonexistent/problem.json")); }) ==
          ErrorKind::ParseError);
}

TEST_CASE("non-unit vectors are normalized with a warning") {
    const auto p = parse_problem_text(
        R"({"dim": 2, "safety": [3, 4], "capabilities": {"math": [0, 1.0000000001]}, "budget_radius": 1})");
    CHECK(p.warnings.size() == 1);
    CHECK(p.warnings[0].find("safety") != std::string::npos);
    CHECK(p.safety[0].direction[0] == Approx(0.6));
    CHECK(p.safety[0].raw[0] == 3.0);
}

TEST_CASE("safety forms and capability order") {
    const auto pair = parse_problem_text(
        R"({"dim": 3, "safety": [[1, 0, 0], [0, 1, 0]], "capabilities": {"zeta": [0, 0, 1], "alpha": [1, 1, 1]},
            "budget_radius": 2})");
    CHECK(pair.safety.size() == 2);
    CHECK(pair.safety[1].name == "v2");
    CHECK(pair.capabilities[0].name == "alpha");
    CHECK(pair.capability_index("zeta") == 1);
    CHECK(kind_of([&] { pair.capability_index("missing"); }) == ErrorKind::SchemaError);

    const auto named = parse_problem_text(
        R"({"dim": 2, "safety": {"honest": [1, 0], "harmless": [1, 1]}, "capabilities": {"c": [0, 1]},
            "budget_radius": 1, "fisher": [1, 4]})");
    CHECK(named.safety[0].name == "harmless");
    CHECK(named.fisher_diagonal);
    CHECK((*named.fisher)(1, 1) == 4.0);
}

TEST_CASE("canonical form round-trips") {
    const char* texts[] = {
        kMinimal,
        R"({"capabilities": {"b": [0, 2, 0], "a": [1, 0, 0.5]}, "safety": {"x": [1, 0, 0], "y": [0.1, 0.2, 0.3]},
            "budget_radius": 0.75, "fisher": [[2, 0, 0], [0, 1, 0], [0, 0, 3]], "delta_c_star": [0, 0.1, 0], "dim": 3})",
        R"({"dim": 2, "safety": [[1, 0], [0.6, 0.8]], "capabilities": {"m": [0.1, 0.30000000000000004]},
            "budget_radius": 1e-3, "fisher": [1, 2]})",
    };
    for (const char* text : texts) {
        const auto first = canonical_text(parse_problem_text(text));
        const auto second = canonical_text(parse_problem_text(first));
        CHECK(first == second);
        CHECK(inputs_digest(parse_problem_text(text)) == inputs_digest(parse_problem_text(first)));
    }
    // Key order and whitespace do not change the digest.
    const auto reordered = parse_problem_text(
        R"({"budget_radius": 1, "capabilities": {"math": [0, 1]}, "safety": [1, 0], "dim": 2})");
    CHECK(inputs_digest(reordered) == inputs_digest(parse_problem_text(kMinimal)));
    CHECK(sha256_hex("abc") == "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
}

TEST_CASE("tax on the minimal file") {
    const auto report = run_command(opts("tax"), parse_problem_text(kMinimal));
    const auto& s = report.document["results"]["safeties"][0];
    CHECK(s["joint_tax"].get<double>() == 0.0);
    CHECK(s["free_safety"].get<double>() == 1.0);
    CHECK(report.document["tool"] == "atax");
    CHECK_FALSE(report.document.contains("seed"));
    CHECK_FALSE(report.csv.has_value());
}

TEST_CASE("frontier samples a quarter circle") {
    auto o = opts("frontier");
    o.alpha_from = "math";
    o.samples = 5;
    const auto report = run_command(o, parse_problem_text(kMinimal));
    REQUIRE(report.csv.has_value());
    std::string header;
    const auto rows = csv_rows(*report.csv, header);
    CHECK(header == "delta_c,delta_s");
    REQUIRE(rows.size() == 5);
    const double expected[5][2] = {{-1, 0}, {-0.5, std::sqrt(0.75)}, {0, 1}, {0.5, std::sqrt(0.75)}, {1, 0}};
    for (int i = 0; i < 5; ++i) {
        CHECK(std::abs(rows[i][0] - expected[i][0]) < 1e-15);
        CHECK(std::abs(rows[i][1] - expected[i][1]) < 1e-15);
    }
    o.samples = 1;
    CHECK(kind_of([&] { run_command(o, parse_problem_text(kMinimal)); }) == ErrorKind::InvalidSampleCount);
}

TEST_CASE("reports are byte-identical for identical inputs") {
    auto o = opts("scaling-sim");
    o.d_values = {16, 32, 64};
    o.m_prime = 3;
    o.trials = 200;
    o.seed = 7;
    const auto a = run_command(o, std::nullopt).render();
    o.threads = 4;
    const auto b = run_command(o, std::nullopt).render();
    CHECK(a == b);
    o.seed = 8;
    CHECK(run_command(o, std::nullopt).render() != a);

    const auto p = parse_problem_text(kMinimal);
    CHECK(run_command(opts("tax"), p).render() == run_command(opts("tax"), p).render());
}

TEST_CASE("every command runs on a conflict problem") {
    const auto p = parse_problem_text(
        R"({"dim": 4, "safety": [[1, 0, 0, 0], [0.6, 0.8, 0, 0]],
            "capabilities": {"code": [0, 0.6, 0.8, 0], "math": [0.5, -0.5, 0, 0.7071067811865476]},
            "budget_radius": 1.5, "delta_c_star": [0, 0.06, 0.08, 0], "fisher": [1, 2, 3, 4]})");
    for (const auto& command : known_commands()) {
        if (command == "max-safety" || command == "scaling-sim") continue;
        auto o = opts(command);
        o.alpha_from = "code";
        o.delta_c = 0.3;
        o.trials = 5;
        o.grid_resolution = 256;
        CAPTURE(command);
        const auto report = run_command(o, p);
        CHECK(report.document["command"] == command);
    }
    auto ms = opts("max-safety");
    CHECK(kind_of([&] { run_command(ms, p); }) == ErrorKind::InvalidArgument);
}

TEST_CASE("error families have distinct exit codes") {
    const ErrorKind kinds[] = {
        ErrorKind::ZeroVector,        ErrorKind::DimensionMismatch,     ErrorKind::InfeasibleTarget,
        ErrorKind::DegenerateAngle,   ErrorKind::InfeasibleBudget,      ErrorKind::ConstraintNotInSubspace,
        ErrorKind::NotSPD,            ErrorKind::InvalidSampleCount,    ErrorKind::DegenerateProjection,
        ErrorKind::SpecInfeasible,    ErrorKind::EmptyPairSet,          ErrorKind::NotSuperposed,
        ErrorKind::NearOrthogonalityViolated, ErrorKind::InsufficientSeries, ErrorKind::InvalidArgument,
        ErrorKind::ParseError,        ErrorKind::SchemaError,
    };
    std::set<int> codes;
    for (auto k : kinds) {
        const int code = exit_code(k);
        CHECK(code != 0);
        CHECK(code != 1);
        CHECK(code != 2);
        codes.insert(code);
    }
    CHECK(codes.size() == std::size(kinds));
}

TEST_CASE("format_double round-trips") {
    for (double x : {0.1, 1.0 / 3.0, -2.5e-17, 1e300, 0.0}) {
        CHECK(std::stod(format_double(x)) == x);
    }
}

}  // TEST_SUITE
