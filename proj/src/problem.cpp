#include "atax/problem.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <set>
#include <sstream>

#include <openssl/evp.h>

#include "atax/error.hpp"

namespace atax {

namespace {

using nlohmann::json;

const std::set<std::string, std::less<>> kKnownKeys = {
    "dim", "safety", "capabilities", "budget_radius", "fisher", "delta_c_star"};

[[noreturn]] void schema(const std::string& what) { throw Error(ErrorKind::SchemaError, what); }

double number(const json& j, const std::string& where) {
    if (!j.is_number()) schema(where + " must be a number");
    const double x = j.get<double>();
    if (!std::isfinite(x)) schema(where + " must be finite");
    return x;
}

Vector vector_of(const json& j, Eigen::Index dim, const std::string& where) {
    if (!j.is_array()) schema(where + " must be an array of numbers");
    if (static_cast<Eigen::Index>(j.size()) != dim) {
        throw Error(ErrorKind::DimensionMismatch, where + " has length " + std::to_string(j.size()) +
                                                      ", expected dim = " + std::to_string(dim));
    }
    Vector v(dim);
    for (Eigen::Index i = 0; i < dim; ++i) {
        v[i] = number(j[static_cast<std::size_t>(i)], where + "[" + std::to_string(i) + "]");
    }
    return v;
}

NamedDirection named(std::string name, Vector raw, std::vector<std::string>& warnings) {
    const double n = raw.norm();
    Direction dir = [&] {
        try {
            return Direction::normalize(raw);
        } catch (const Error& e) {
            throw Error(e.kind(), "'" + name + "' has norm " + std::to_string(n));
        }
    }();
    if (std::abs(n - 1.0) > kNormWarningThreshold) {
        std::ostringstream msg;
        msg << "normalized '" << name << "' (input norm " << std::setprecision(17) << n << ")";
        warnings.push_back(msg.str());
    }
    return {std::move(name), std::move(raw), std::move(dir)};
}

bool is_numeric_array(const json& j) {
    return j.is_array() && std::all_of(j.begin(), j.end(), [](const json& x) { return x.is_number(); });
}

json to_json(const Vector& v) {
    json out = json::array();
    for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(v[i]);
    return out;
}

}  // namespace

std::vector<Direction> ProblemFile::capability_directions() const {
    std::vector<Direction> out;
    out.reserve(capabilities.size());
    for (const auto& c : capabilities) out.push_back(c.direction);
    return out;
}

std::size_t ProblemFile::capability_index(std::string_view name) const {
    for (std::size_t i = 0; i < capabilities.size(); ++i) {
        if (capabilities[i].name == name) return i;
    }
    schema("no capability named '" + std::string(name) + "'");
}

ProblemFile parse_problem_text(std::string_view text) {
    std::vector<std::set<std::string>> scopes;
    std::string duplicate;
    const json::parser_callback_t track_keys = [&](int, json::parse_event_t event, json& parsed) {
        if (event == json::parse_event_t::object_start) {
            scopes.emplace_back();
        } else if (event == json::parse_event_t::object_end) {
            if (!scopes.empty()) scopes.pop_back();
        } else if (event == json::parse_event_t::key && !scopes.empty()) {
            const auto key = parsed.get<std::string>();
            if (!scopes.back().insert(key).second && duplicate.empty()) duplicate = key;
        }
        return true;
    };

    json doc;
    try {
        doc = json::parse(text.begin(), text.end(), track_keys);
    } catch (const json::parse_error& e) {
        throw Error(ErrorKind::ParseError, e.what());
    }
    if (!duplicate.empty()) schema("duplicate key '" + duplicate + "'");
    if (!doc.is_object()) schema("problem must be a JSON object");
    for (const auto& [key, _] : doc.items()) {
        if (!kKnownKeys.contains(key)) schema("unknown key '" + key + "'");
    }
    for (const char* required : {"dim", "safety", "capabilities", "budget_radius"}) {
        if (!doc.contains(required)) schema(std::string("missing field '") + required + "'");
    }

    ProblemFile p;
    const json& dim = doc["dim"];
    if (!dim.is_number_integer() || dim.get<std::int64_t>() < 1) {
        schema("dim must be a positive integer");
    }
    p.dim = dim.get<Eigen::Index>();

    p.budget_radius = number(doc["budget_radius"], "budget_radius");
    if (!(p.budget_radius > 0.0)) schema("budget_radius must be positive");

    const json& safety = doc["safety"];
    if (is_numeric_array(safety) && !safety.empty()) {
        p.single_unnamed_safety = true;
        p.safety.push_back(named("safety", vector_of(safety, p.dim, "safety"), p.warnings));
    } else if (safety.is_array() && !safety.empty()) {
        if (safety.size() > 2) schema("at most two safety directions are supported");
        for (std::size_t i = 0; i < safety.size(); ++i) {
            const std::string name = "v" + std::to_string(i + 1);
            p.safety.push_back(named(name, vector_of(safety[i], p.dim, "safety[" + std::to_string(i) + "]"),
                                     p.warnings));
        }
    } else if (safety.is_object() && !safety.empty()) {
        if (safety.size() > 2) schema("at most two safety directions are supported");
        for (const auto& [name, v] : safety.items()) {
            p.safety.push_back(named(name, vector_of(v, p.dim, "safety." + name), p.warnings));
        }
    } else {
        schema("safety must be a vector, a list of two vectors or an object of named vectors");
    }

    const json& caps = doc["capabilities"];
    if (!caps.is_object() || caps.empty()) schema("capabilities must be a non-empty object");
    for (const auto& [name, v] : caps.items()) {
        p.capabilities.push_back(named(name, vector_of(v, p.dim, "capabilities." + name), p.warnings));
    }

    if (doc.contains("fisher")) {
        const json& f = doc["fisher"];
        if (is_numeric_array(f)) {
            p.fisher_diagonal = true;
            p.fisher = Matrix(vector_of(f, p.dim, "fisher").asDiagonal());
        } else if (f.is_array()) {
            if (static_cast<Eigen::Index>(f.size()) != p.dim) {
                throw Error(ErrorKind::DimensionMismatch, "fisher must have dim rows");
            }
            Matrix m(p.dim, p.dim);
            for (Eigen::Index i = 0; i < p.dim; ++i) {
                m.row(i) = vector_of(f[static_cast<std::size_t>(i)], p.dim,
                                     "fisher[" + std::to_string(i) + "]")
                               .transpose();
            }
            p.fisher = std::move(m);
        } else {
            schema("fisher must be a diagonal vector or a dense matrix");
        }
    }
    if (doc.contains("delta_c_star")) {
        p.delta_c_star = vector_of(doc["delta_c_star"], p.dim, "delta_c_star");
    }
    return p;
}

ProblemFile parse_problem(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorKind::ParseError, "cannot open '" + path.string() + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_problem_text(buf.str());
}

nlohmann::json canonical_json(const ProblemFile& problem) {
    json out = json::object();
    out["dim"] = problem.dim;
    out["budget_radius"] = problem.budget_radius;
    if (problem.single_unnamed_safety) {
        out["safety"] = to_json(problem.safety.front().raw);
    } else {
        json s = json::object();
        for (const auto& v : problem.safety) s[v.name] = to_json(v.raw);
        out["safety"] = std::move(s);
    }
    json caps = json::object();
    for (const auto& c : problem.capabilities) caps[c.name] = to_json(c.raw);
    out["capabilities"] = std::move(caps);
    if (problem.fisher) {
        if (problem.fisher_diagonal) {
            out["fisher"] = to_json(problem.fisher->diagonal());
        } else {
            json rows = json::array();
            for (Eigen::Index i = 0; i < problem.fisher->rows(); ++i) {
                rows.push_back(to_json(problem.fisher->row(i).transpose()));
            }
            out["fisher"] = std::move(rows);
        }
    }
    if (problem.delta_c_star) out["delta_c_star"] = to_json(*problem.delta_c_star);
    return out;
}

std::string canonical_text(const ProblemFile& problem) {
    return canonical_json(problem).dump(2) + "\n";
}

std::string sha256_hex(std::string_view data) {
    unsigned char digest[EVP_MAX_MD_SIZE];
    unsigned int length = 0;
    if (EVP_Digest(data.data(), data.size(), digest, &length, EVP_sha256(), nullptr) != 1) {
        throw std::runtime_error("SHA-256 digest failed");
    }
    std::ostringstream hex;
    for (unsigned int i = 0; i < length; ++i) {
        hex << std::hex << std::setw(2) << std::setfill('0') << static_cast<int>(digest[i]);
    }
    return hex.str();
}

std::string inputs_digest(const ProblemFile& problem) { return sha256_hex(canonical_text(problem)); }

}  // namespace atax
