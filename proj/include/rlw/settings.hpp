#pragma once

#include <cctype>
#include <chrono>
#include <ctime>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "rlw/harness.hpp"

namespace rlw {

inline constexpr const char* kVersion = "0.1.0";

/// Every flag of the command-line tool, with defaults.
struct RunSettings {
    std::string problem = "example1";
    int M = 16;
    std::optional<double> k;   // empty: auto rule
    std::optional<double> T;   // empty: the problem's final time
    BoundaryMode boundary = BoundaryMode::exact;
    RhsSign rhs_sign = RhsSign::derived;
    bool leapfrog_alpha = true;
    SourceSplit split = SourceSplit::consistent;
    Coefficients coefficients;
    int level_from = 2;
    int level_to = 4;
    unsigned seed = 1;
    std::string out;
    std::string svg;
    std::optional<double> dump_t;
    std::string dump_path;
};

namespace detail {

inline std::string normalize_key(std::string key)
{
    while (!key.empty() && key.front() == '-') key.erase(key.begin());
    for (char& c : key) {
        if (c == '_') c = '-';
    }
    return key;
}

inline std::string trim(const std::string& s)
{
    std::size_t b = 0, e = s.size();
    while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
    while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
    return s.substr(b, e - b);
}

inline double parse_real(const std::string& key, const std::string& v)
{
    try {
        std::size_t used = 0;
        const double d = std::stod(v, &used);
        if (used != v.size()) throw std::invalid_argument(v);
        return d;
    } catch (const std::exception&) {
        throw ConfigError("--" + key + ": expected a number, got '" + v + "'");
    }
}

inline int parse_int(const std::string& key, const std::string& v)
{
    try {
        std::size_t used = 0;
        const long i = std::stol(v, &used);
        if (used != v.size()) throw std::invalid_argument(v);
        return static_cast<int>(i);
    } catch (const std::exception&) {
        throw ConfigError("--" + key + ": expected an integer, got '" + v + "'");
    }
}

}  // namespace detail

/// Parses "a..b" into (a, b).
inline std::pair<int, int> parse_levels(const std::string& text)
{
    const auto dots = text.find("..");
    if (dots == std::string::npos) throw ConfigError("--levels: expected <a>..<b>, got '" + text + "'");
    return {detail::parse_int("levels", text.substr(0, dots)),
            detail::parse_int("levels", text.substr(dots + 2))};
}

/// Applies one `key = value` pair; keys accept leading dashes and '_' for '-'.
inline void apply_setting(RunSettings& s, const std::string& raw_key, const std::string& value)
{
    using detail::parse_int;
    using detail::parse_real;
    const std::string key = detail::normalize_key(raw_key);
    const auto choice = [&](std::initializer_list<const char*> allowed) {
        for (const char* a : allowed) {
            if (value == a) return;
        }
        throw ConfigError("--" + key + ": invalid value '" + value + "'");
    };
    if (key == "problem") s.problem = value;
    else if (key == "M") s.M = parse_int(key, value);
    else if (key == "k") s.k = value == "auto" ? std::nullopt : std::optional(parse_real(key, value));
    else if (key == "T") s.T = parse_real(key, value);
    else if (key == "boundary") {
        choice({"exact", "paper-copy", "paper_copy"});
        s.boundary = value == "exact" ? BoundaryMode::exact : BoundaryMode::paper_copy;
    } else if (key == "rhs-sign") {
        choice({"derived", "paper"});
        s.rhs_sign = value == "derived" ? RhsSign::derived : RhsSign::paper;
    } else if (key == "leapfrog-alpha") {
        choice({"on", "off"});
        s.leapfrog_alpha = value == "on";
    } else if (key == "split") {
        choice({"consistent", "additive"});
        s.split = value == "consistent" ? SourceSplit::consistent : SourceSplit::additive;
    } else if (key == "alpha") s.coefficients.alpha = parse_real(key, value);
    else if (key == "beta") s.coefficients.beta = parse_real(key, value);
    else if (key == "gamma") s.coefficients.gamma = parse_real(key, value);
    else if (key == "levels") std::tie(s.level_from, s.level_to) = parse_levels(value);
    else if (key == "seed") s.seed = static_cast<unsigned>(parse_int(key, value));
    else if (key == "out") s.out = value;
    else if (key == "svg") s.svg = value;
    else if (key == "dump-t") s.dump_t = parse_real(key, value);
    else if (key == "dump-path") s.dump_path = value;
    else throw ConfigError("unknown setting '" + raw_key + "'");
}

/// Reads a settings file: a JSON object, or `key = value` lines with `#` comments.
inline std::vector<std::pair<std::string, std::string>> parse_config_text(const std::string& text)
{
    std::vector<std::pair<std::string, std::string>> items;
    const std::string body = detail::trim(text);
    if (!body.empty() && body.front() == '{') {
        nlohmann::json j;
        try {
            j = nlohmann::json::parse(body);
        } catch (const nlohmann::json::exception& e) {
            throw ConfigError(std::string("config: invalid JSON: ") + e.what());
        }
        for (const auto& [key, val] : j.items()) {
            if (val.is_string()) items.emplace_back(key, val.get<std::string>());
            else if (val.is_boolean()) items.emplace_back(key, val.get<bool>() ? "on" : "off");
            else if (val.is_number_integer()) items.emplace_back(key, std::to_string(val.get<long>()));
            else if (val.is_number()) items.emplace_back(key, detail::num(val.get<double>()));
            else throw ConfigError("config: unsupported value for '" + key + "'");
        }
        return items;
    }
    std::istringstream in(text);
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        line = detail::trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos) {
            throw ConfigError("config line " + std::to_string(lineno) + ": expected key = value");
        }
        std::string value = detail::trim(line.substr(eq + 1));
        if (value.size() >= 2 && value.front() == '"' && value.back() == '"') {
            value = value.substr(1, value.size() - 2);
        }
        items.emplace_back(detail::trim(line.substr(0, eq)), value);
    }
    return items;
}

inline std::vector<std::pair<std::string, std::string>> load_config_file(const std::string& path)
{
    std::ifstream in(path);
    if (!in) throw IoError("cannot read config file '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_config_text(ss.str());
}

inline SchemeConfig scheme_config(const RunSettings& s)
{
    SchemeConfig cfg;
    cfg.rhs_sign = s.rhs_sign;
    cfg.leapfrog_alpha = s.leapfrog_alpha;
    cfg.boundary = s.boundary;
    cfg.k = s.k;
    return cfg;
}

inline ProblemSpec problem_from(const RunSettings& s)
{
    return problem_by_name(s.problem, s.split, s.coefficients);
}

/// Everything needed to repeat a run.
struct RunManifest {
    std::string command;
    RunSettings settings;
    int M = 0;
    double k = 0.0;
    int N = 0;
    std::string timestamp;
    std::vector<std::string> outputs;
};

inline std::string utc_timestamp()
{
    const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&now, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

inline nlohmann::json to_json(const RunManifest& m)
{
    const RunSettings& s = m.settings;
    nlohmann::json j;
    j["command"] = m.command;
    j["version"] = kVersion;
    j["timestamp"] = m.timestamp;
    j["problem"] = s.problem;
    j["M"] = m.M;
    j["k"] = m.k;
    j["N"] = m.N;
    j["k_rule"] = s.k ? "explicit" : "auto";
    if (s.T) j["T"] = *s.T;
    j["boundary"] = s.boundary == BoundaryMode::exact ? "exact" : "paper-copy";
    j["rhs_sign"] = s.rhs_sign == RhsSign::derived ? "derived" : "paper";
    j["leapfrog_alpha"] = s.leapfrog_alpha ? "on" : "off";
    j["split"] = s.split == SourceSplit::consistent ? "consistent" : "additive";
    j["alpha"] = s.coefficients.alpha;
    j["beta"] = s.coefficients.beta;
    j["gamma"] = s.coefficients.gamma;
    if (m.command == "convergence") {
        j["levels"] = std::to_string(s.level_from) + ".." + std::to_string(s.level_to);
    }
    if (m.command == "verify") j["seed"] = s.seed;
    j["outputs"] = m.outputs;
    return j;
}

inline void write_manifest(const RunManifest& m, const std::string& path)
{
    auto out = detail::open_output(path);
    out << to_json(m).dump(2) << '\n';
    detail::finish(out, path);
}

}  // namespace rlw
