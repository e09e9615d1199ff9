#pragma once

// Flat `key = value` run configuration.
//
//   # comment
//   gamma   = 0.4
//   variant = NC_EFFECTIVE          # bare identifier or "quoted string"
//   grid.theta = 0, 0.05, 0.1       # explicit list
//   grid.eta   = linspace(1.5, 4, 10)
//
// Every key is checked; unknown keys and malformed values are reported with
// their line number.

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "dynamics.hpp"
#include "params.hpp"

namespace ncbateman {

class ConfigError : public std::runtime_error {
public:
    ConfigError(int line, const std::string& field, const std::string& message)
        : std::runtime_error(describe(line, field, message)), line_(line), field_(field)
    {
    }

    int line() const noexcept { return line_; }
    const std::string& field() const noexcept { return field_; }

private:
    static std::string describe(int line, const std::string& field, const std::string& message)
    {
        std::string s = "config";
        if (line > 0) s += " line " + std::to_string(line);
        if (!field.empty()) s += ", field '" + field + "'";
        return s + ": " + message;
    }

    int line_;
    std::string field_;
};

struct Tolerances {
    double agreement = 1e-10;   ///< dual-route relative frequency gap
    double companion = 1e-9;    ///< eigen-oracle vs closed form, relative
    double lambda = 1e-10;      ///< diagonalization residuals, relative
    double cross = 1e-10;       ///< transported off-diagonal / ||Q||
    double circulant = 1e-12;   ///< circulant eigenvalues and eigenvectors
    double inverse = 1e-10;     ///< circulant solve residual
    double limit = 1e-10;       ///< eps = eta = 0 identity
    double symplectic = 1e-12;
    double identity = 1e-12;    ///< algebraic identities (Vieta, splits, transport)
    double propagation = 1e-8;  ///< exact propagation vs RK4
    double envelope = 1e-3;     ///< relative error of fitted envelope rates
    double drift = 1e-6;        ///< amplitude drift at the fine-tuned theta
};

struct SweepGrid {
    std::string parameter;
    std::vector<double> values;
};

struct RunConfig {
    SystemParams params{0.4, 1.0, 2.0, 3.0, 0.05, 1.0};
    std::uint64_t seed = 20240917;

    // simulate
    std::string variant = "NC_EFFECTIVE";
    double t_end = 200.0;
    std::size_t samples = 4096;
    double u1 = 1.0, u2 = 0.0, v1 = 0.0, v2 = 0.0;

    // sweep, in the fixed order gamma, omega, epsilon, eta, theta
    std::vector<SweepGrid> grids;

    // verify
    std::size_t verify_samples = 1000;
    std::size_t verify_max_slices = 512;
    std::vector<double> limit_deltas{1e-2, 1e-3, 1e-4};
    bool inject_flip_gamma2 = false;

    Tolerances tol;
};

namespace detail {

inline std::string trim(std::string_view s)
{
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string_view::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return std::string(s.substr(b, e - b + 1));
}

inline bool is_identifier(std::string_view s)
{
    if (s.empty() || !(std::isalpha(static_cast<unsigned char>(s[0])) || s[0] == '_')) return false;
    for (char c : s) {
        if (!(std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '.')) return false;
    }
    return true;
}

inline std::optional<double> parse_number(std::string_view s)
{
    const std::string t = trim(s);
    if (t.empty()) return std::nullopt;
    double v = 0.0;
    const char* first = t.data();
    if (*first == '+') ++first;
    auto [ptr, ec] = std::from_chars(first, t.data() + t.size(), v);
    if (ec != std::errc() || ptr != t.data() + t.size()) return std::nullopt;
    return v;
}

struct RawEntry {
    std::string value;
    int line = 0;
};

} // namespace detail

/// Parse `key = value` text into raw entries (no interpretation yet).
inline std::map<std::string, detail::RawEntry> parse_config_entries(std::istream& in)
{
    std::map<std::string, detail::RawEntry> out;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        // strip comment outside quotes
        bool quoted = false;
        std::size_t cut = line.size();
        for (std::size_t i = 0; i < line.size(); ++i) {
            if (line[i] == '"') quoted = !quoted;
            if (line[i] == '#' && !quoted) {
                cut = i;
                break;
            }
        }
        if (quoted) throw ConfigError(lineno, "", "unterminated string");
        const std::string body = detail::trim(std::string_view(line).substr(0, cut));
        if (body.empty()) continue;
        const auto eq = body.find('=');
        if (eq == std::string::npos) throw ConfigError(lineno, "", "expected 'key = value'");
        const std::string key = detail::trim(std::string_view(body).substr(0, eq));
        std::string value = detail::trim(std::string_view(body).substr(eq + 1));
        if (!detail::is_identifier(key)) throw ConfigError(lineno, key, "invalid key");
        if (value.empty()) throw ConfigError(lineno, key, "missing value");
        if (value.front() == '"') {
            if (value.size() < 2 || value.back() != '"') throw ConfigError(lineno, key, "malformed string");
            value = value.substr(1, value.size() - 2);
        }
        if (out.contains(key)) throw ConfigError(lineno, key, "duplicate key (first set on line " + std::to_string(out[key].line) + ")");
        out[key] = {value, lineno};
    }
    return out;
}

namespace detail {

inline double number_field(const std::string& key, const RawEntry& e)
{
    auto v = parse_number(e.value);
    if (!v) throw ConfigError(e.line, key, "expected a decimal number, got '" + e.value + "'");
    return *v;
}

inline std::uint64_t integer_field(const std::string& key, const RawEntry& e)
{
    std::uint64_t v = 0;
    auto [ptr, ec] = std::from_chars(e.value.data(), e.value.data() + e.value.size(), v);
    if (ec != std::errc() || ptr != e.value.data() + e.value.size())
        throw ConfigError(e.line, key, "expected a non-negative integer, got '" + e.value + "'");
    return v;
}

inline bool bool_field(const std::string& key, const RawEntry& e)
{
    if (e.value == "true" || e.value == "1") return true;
    if (e.value == "false" || e.value == "0") return false;
    throw ConfigError(e.line, key, "expected true or false");
}

inline std::vector<double> list_field(const std::string& key, const RawEntry& e)
{
    const std::string v = e.value;
    std::vector<double> out;
    if (v.rfind("linspace(", 0) == 0) {
        if (v.back() != ')') throw ConfigError(e.line, key, "linspace(...) is missing ')'");
        std::vector<std::string> parts;
        std::stringstream ss(v.substr(9, v.size() - 10));
        for (std::string part; std::getline(ss, part, ',');) parts.push_back(part);
        if (parts.size() != 3) throw ConfigError(e.line, key, "linspace needs (start, stop, count)");
        const auto a = parse_number(parts[0]), b = parse_number(parts[1]), n = parse_number(parts[2]);
        if (!a || !b || !n || *n < 1 || *n != std::floor(*n)) throw ConfigError(e.line, key, "malformed linspace arguments");
        const auto count = static_cast<std::size_t>(*n);
        for (std::size_t i = 0; i < count; ++i)
            out.push_back(count == 1 ? *a : *a + (*b - *a) * static_cast<double>(i) / static_cast<double>(count - 1));
        return out;
    }
    std::stringstream ss(v);
    for (std::string part; std::getline(ss, part, ',');) {
        auto x = parse_number(part);
        if (!x) throw ConfigError(e.line, key, "list element '" + trim(part) + "' is not a number");
        out.push_back(*x);
    }
    if (out.empty()) throw ConfigError(e.line, key, "empty list");
    return out;
}

} // namespace detail

inline RunConfig parse_config(std::istream& in)
{
    auto entries = parse_config_entries(in);
    RunConfig cfg;

    std::map<std::string, double*> numbers{
        {"gamma", &cfg.params.gamma},     {"omega", &cfg.params.omega},   {"epsilon", &cfg.params.epsilon},
        {"eta", &cfg.params.eta},         {"theta", &cfg.params.theta},   {"hbar", &cfg.params.hbar},
        {"t_end", &cfg.t_end},            {"u1", &cfg.u1},                {"u2", &cfg.u2},
        {"v1", &cfg.v1},                  {"v2", &cfg.v2},
        {"tol.agreement", &cfg.tol.agreement}, {"tol.companion", &cfg.tol.companion},
        {"tol.lambda", &cfg.tol.lambda},  {"tol.cross", &cfg.tol.cross},  {"tol.circulant", &cfg.tol.circulant},
        {"tol.inverse", &cfg.tol.inverse}, {"tol.limit", &cfg.tol.limit}, {"tol.symplectic", &cfg.tol.symplectic},
        {"tol.identity", &cfg.tol.identity}, {"tol.propagation", &cfg.tol.propagation},
        {"tol.envelope", &cfg.tol.envelope}, {"tol.drift", &cfg.tol.drift}};
    const char* grid_order[] = {"gamma", "omega", "epsilon", "eta", "theta"};

    for (const auto& [key, entry] : entries) {
        if (auto it = numbers.find(key); it != numbers.end()) {
            const double v = detail::number_field(key, entry);
            if (key.rfind("tol.", 0) == 0 && !(v > 0.0)) throw ConfigError(entry.line, key, "tolerances must be positive");
            *it->second = v;
        } else if (key == "samples") {
            cfg.samples = detail::integer_field(key, entry);
        } else if (key == "seed") {
            cfg.seed = detail::integer_field(key, entry);
        } else if (key == "variant") {
            if (!parse_variant(entry.value))
                throw ConfigError(entry.line, key,
                                  "unknown model variant '" + entry.value +
                                      "' (BATEMAN, AUGMENTED_XY, NC_EFFECTIVE, COMMUTATIVE_LIMIT, NC_XY_PRELIMIT, BATEMAN_RENORMALIZED)");
            cfg.variant = entry.value;
        } else if (key == "verify.samples") {
            cfg.verify_samples = detail::integer_field(key, entry);
        } else if (key == "verify.max_slices") {
            cfg.verify_max_slices = detail::integer_field(key, entry);
        } else if (key == "limit.deltas") {
            cfg.limit_deltas = detail::list_field(key, entry);
        } else if (key == "inject.flip_gamma2") {
            cfg.inject_flip_gamma2 = detail::bool_field(key, entry);
        } else if (key.rfind("grid.", 0) == 0) {
            const std::string name = key.substr(5);
            if (std::find(std::begin(grid_order), std::end(grid_order), name) == std::end(grid_order))
                throw ConfigError(entry.line, key, "sweep grids exist for gamma, omega, epsilon, eta, theta only");
        } else {
            throw ConfigError(entry.line, key, "unknown key");
        }
    }
    for (const char* name : grid_order) {
        const std::string key = std::string("grid.") + name;
        if (auto it = entries.find(key); it != entries.end()) cfg.grids.push_back({name, detail::list_field(key, it->second)});
    }
    return cfg;
}

inline RunConfig parse_config_string(const std::string& text)
{
    std::istringstream in(text);
    return parse_config(in);
}

inline RunConfig load_config(const std::string& path)
{
    std::ifstream in(path);
    if (!in) throw ConfigError(0, "", "cannot open '" + path + "'");
    return parse_config(in);
}

} // namespace ncbateman
