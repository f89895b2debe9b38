// Copyright 2026 The wnrqc Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <charconv>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <functional>
#include <istream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include "wnrqc/wnrqc.hpp"

namespace wnrqc::cli {

/// A configuration problem, reported with the offending source line and key.
struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct Scalar {
    std::variant<bool, double, std::string> v;
    /// Source text, kept so integer fields can reject "1.5" and "1e400".
    std::string text;
};

struct ConfigValue {
    std::vector<Scalar> items;
    bool is_array = false;
    std::string where;
};

/// Keys in file order. Keys inside a [table] are stored as "table.key".
using ConfigTable = std::vector<std::pair<std::string, ConfigValue>>;

namespace detail {

inline std::string trim(std::string_view s) {
    size_t a = s.find_first_not_of(" \t\r");
    if (a == std::string_view::npos) {
        return {};
    }
    size_t b = s.find_last_not_of(" \t\r");
    return std::string(s.substr(a, b - a + 1));
}

inline std::string strip_comment(const std::string &line) {
    bool quoted = false;
    for (size_t k = 0; k < line.size(); k++) {
        if (line[k] == '"') {
            quoted = !quoted;
        } else if (line[k] == '#' && !quoted) {
            return line.substr(0, k);
        }
    }
    return line;
}

inline bool bare_key(const std::string &key) {
    if (key.empty()) {
        return false;
    }
    for (char c : key) {
        if (!(std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '-')) {
            return false;
        }
    }
    return true;
}

/// One TOML scalar: a basic string, true/false, or a number.
inline Scalar parse_scalar(const std::string &raw, const std::string &where) {
    std::string t = trim(raw);
    if (t.empty()) {
        throw ConfigError(where + ": missing value");
    }
    if (t.front() == '"') {
        if (t.size() < 2 || t.back() != '"' || t.find('"', 1) != t.size() - 1) {
            throw ConfigError(where + ": malformed string " + t);
        }
        return {t.substr(1, t.size() - 2), t};
    }
    if (t == "true" || t == "false") {
        return {t == "true", t};
    }
    std::string digits;
    for (char c : t) {
        if (c != '_') {
            digits.push_back(c);
        }
    }
    double x = 0;
    auto [ptr, ec] = std::from_chars(digits.data(), digits.data() + digits.size(), x);
    if (ec != std::errc() || ptr != digits.data() + digits.size()) {
        // Bare words are accepted as strings so flags like --channel rotation work.
        if (bare_key(t)) {
            return {t, t};
        }
        throw ConfigError(where + ": cannot parse value " + t);
    }
    return {x, digits};
}

inline std::vector<std::string> split_top_level(const std::string &body) {
    std::vector<std::string> parts;
    std::string cur;
    bool quoted = false;
    for (char c : body) {
        if (c == '"') {
            quoted = !quoted;
        }
        if (c == ',' && !quoted) {
            parts.push_back(cur);
            cur.clear();
        } else {
            cur.push_back(c);
        }
    }
    if (!trim(cur).empty()) {
        parts.push_back(cur);
    }
    return parts;
}

inline ConfigValue parse_value(const std::string &raw, const std::string &where) {
    std::string t = trim(raw);
    ConfigValue v;
    v.where = where;
    if (!t.empty() && t.front() == '[') {
        if (t.back() != ']') {
            throw ConfigError(where + ": arrays must close on the same line");
        }
        v.is_array = true;
        for (const auto &part : split_top_level(t.substr(1, t.size() - 2))) {
            v.items.push_back(parse_scalar(part, where));
        }
        return v;
    }
    v.items.push_back(parse_scalar(t, where));
    return v;
}

}  // namespace detail

/// Reads the flat TOML subset used for run files: `key = value` lines,
/// `[table]` headers, # comments, strings, numbers, booleans and one-line
/// arrays. Duplicate keys and anything else are errors with a line number.
inline ConfigTable parse_toml(std::istream &in, const std::string &source = "config") {
    ConfigTable table;
    std::set<std::string> seen;
    std::string prefix;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        lineno++;
        std::string where = source + ":" + std::to_string(lineno);
        std::string t = detail::trim(detail::strip_comment(line));
        if (t.empty()) {
            continue;
        }
        if (t.front() == '[') {
            if (t.back() != ']' || !detail::bare_key(detail::trim(t.substr(1, t.size() - 2)))) {
                throw ConfigError(where + ": malformed table header " + t);
            }
            prefix = detail::trim(t.substr(1, t.size() - 2)) + ".";
            continue;
        }
        size_t eq = t.find('=');
        if (eq == std::string::npos) {
            throw ConfigError(where + ": expected key = value");
        }
        std::string key = detail::trim(t.substr(0, eq));
        if (!detail::bare_key(key)) {
            throw ConfigError(where + ": invalid key '" + key + "'");
        }
        std::string full = prefix + key;
        if (!seen.insert(full).second) {
            throw ConfigError(where + ": duplicate key '" + full + "'");
        }
        ConfigValue v = detail::parse_value(t.substr(eq + 1), where + " (" + full + ")");
        table.emplace_back(full, std::move(v));
    }
    return table;
}

inline ConfigTable parse_toml_file(const std::string &path) {
    std::ifstream in(path);
    if (!in) {
        throw ConfigError("cannot open config file " + path);
    }
    return parse_toml(in, path);
}

/// Everything a subcommand needs. Defaults apply unless the config file or a
/// flag sets the field; `given` records which fields were set.
struct RunConfig {
    std::string command;
    uint32_t n = 4;
    int q = 2;
    std::string arch = "complete_graph";
    std::vector<uint32_t> dims;
    std::string channel = "depolarizing";
    double eps = 0;
    double theta = 0;
    double r = 0;
    double u = 1;
    std::optional<double> sigma1;
    std::optional<double> sigma2;
    uint64_t s = 0;
    std::vector<uint64_t> s_list;
    uint64_t s_step = 0;
    uint64_t s_min = 0;
    uint64_t s_max = 0;
    uint32_t depth = 0;
    std::vector<uint32_t> n_list;
    uint64_t samples = 100000;
    uint64_t instances = 1000;
    uint64_t shots = 100;
    uint64_t seed = 1;
    std::string out;
    std::string format = "csv";
    unsigned threads = default_threads();
    std::string placement = "gate_sites";
    double k = 50;
    std::vector<double> f_list;
    double nu = 0;
    double mu = 0;
    bool corrupt_sigma = false;
    std::set<std::string> given;

    bool has(const std::string &key) const { return given.count(key) > 0; }
};

namespace detail {

inline const Scalar &single(const ConfigValue &v, const std::string &key) {
    if (v.is_array || v.items.size() != 1) {
        throw ConfigError(v.where + ": field '" + key + "' expects a single value");
    }
    return v.items.front();
}

inline double as_number(const Scalar &s, const std::string &where, const std::string &key) {
    if (!std::holds_alternative<double>(s.v)) {
        throw ConfigError(where + ": field '" + key + "' expects a number, got " + s.text);
    }
    double x = std::get<double>(s.v);
    if (!std::isfinite(x)) {
        throw ConfigError(where + ": field '" + key + "' must be finite");
    }
    return x;
}

inline uint64_t as_count(const Scalar &s, const std::string &where, const std::string &key) {
    double x = as_number(s, where, key);
    if (x < 0 || x != std::floor(x) || x > 9.0e15) {
        throw ConfigError(where + ": field '" + key + "' expects a non-negative integer, got " + s.text);
    }
    return static_cast<uint64_t>(x);
}

inline std::string as_string(const Scalar &s, const std::string &where, const std::string &key) {
    if (!std::holds_alternative<std::string>(s.v)) {
        throw ConfigError(where + ": field '" + key + "' expects a string, got " + s.text);
    }
    return std::get<std::string>(s.v);
}

inline bool as_bool(const Scalar &s, const std::string &where, const std::string &key) {
    if (!std::holds_alternative<bool>(s.v)) {
        throw ConfigError(where + ": field '" + key + "' expects true or false, got " + s.text);
    }
    return std::get<bool>(s.v);
}

template <typename T, typename Conv>
std::vector<T> as_list(const ConfigValue &v, const std::string &key, Conv conv) {
    std::vector<T> out;
    for (const auto &item : v.items) {
        out.push_back(static_cast<T>(conv(item, v.where, key)));
    }
    return out;
}

using Setter = std::function<void(RunConfig &, const ConfigValue &, const std::string &)>;

inline const std::map<std::string, Setter> &setters() {
    static const std::map<std::string, Setter> table = [] {
        std::map<std::string, Setter> m;
        auto count = [](auto field) {
            return [field](RunConfig &c, const ConfigValue &v, const std::string &key) {
                using T = std::remove_reference_t<decltype(c.*field)>;
                c.*field = static_cast<T>(as_count(single(v, key), v.where, key));
            };
        };
        auto number = [](auto field) {
            return [field](RunConfig &c, const ConfigValue &v, const std::string &key) {
                c.*field = as_number(single(v, key), v.where, key);
            };
        };
        auto string = [](auto field) {
            return [field](RunConfig &c, const ConfigValue &v, const std::string &key) {
                c.*field = as_string(single(v, key), v.where, key);
            };
        };
        m["command"] = string(&RunConfig::command);
        m["n"] = count(&RunConfig::n);
        m["q"] = count(&RunConfig::q);
        m["arch"] = string(&RunConfig::arch);
        m["dims"] = [](RunConfig &c, const ConfigValue &v, const std::string &key) {
            c.dims = as_list<uint32_t>(v, key, as_count);
        };
        m["channel"] = string(&RunConfig::channel);
        m["eps"] = number(&RunConfig::eps);
        m["theta"] = number(&RunConfig::theta);
        m["r"] = number(&RunConfig::r);
        m["u"] = number(&RunConfig::u);
        m["sigma1"] = [](RunConfig &c, const ConfigValue &v, const std::string &key) {
            c.sigma1 = as_number(single(v, key), v.where, key);
        };
        m["sigma2"] = [](RunConfig &c, const ConfigValue &v, const std::string &key) {
            c.sigma2 = as_number(single(v, key), v.where, key);
        };
        m["s"] = count(&RunConfig::s);
        m["s_list"] = [](RunConfig &c, const ConfigValue &v, const std::string &key) {
            c.s_list = as_list<uint64_t>(v, key, as_count);
        };
        m["s_step"] = count(&RunConfig::s_step);
        m["s_min"] = count(&RunConfig::s_min);
        m["s_max"] = count(&RunConfig::s_max);
        m["depth"] = count(&RunConfig::depth);
        m["n_list"] = [](RunConfig &c, const ConfigValue &v, const std::string &key) {
            c.n_list = as_list<uint32_t>(v, key, as_count);
        };
        m["samples"] = count(&RunConfig::samples);
        m["instances"] = count(&RunConfig::instances);
        m["shots"] = count(&RunConfig::shots);
        m["seed"] = count(&RunConfig::seed);
        m["out"] = string(&RunConfig::out);
        m["format"] = string(&RunConfig::format);
        m["threads"] = count(&RunConfig::threads);
        m["placement"] = string(&RunConfig::placement);
        m["k"] = number(&RunConfig::k);
        m["f_list"] = [](RunConfig &c, const ConfigValue &v, const std::string &key) {
            c.f_list = as_list<double>(v, key, as_number);
        };
        m["nu"] = number(&RunConfig::nu);
        m["mu"] = number(&RunConfig::mu);
        m["corrupt_sigma"] = [](RunConfig &c, const ConfigValue &v, const std::string &key) {
            c.corrupt_sigma = as_bool(single(v, key), v.where, key);
        };
        return m;
    }();
    return table;
}

/// [channel] table keys map onto the flat fields.
inline std::string canonical_key(const std::string &key) {
    static const std::map<std::string, std::string> aliases{
        {"channel.kind", "channel"}, {"channel.q", "q"},         {"channel.eps", "eps"},
        {"channel.theta", "theta"},  {"channel.r", "r"},         {"channel.u", "u"},
        {"channel.sigma1", "sigma1"}, {"channel.sigma2", "sigma2"}};
    auto it = aliases.find(key);
    std::string out = it == aliases.end() ? key : it->second;
    for (auto &c : out) {
        if (c == '-') {
            c = '_';
        }
    }
    return out;
}

}  // namespace detail

/// Applies one key; unknown keys are rejected.
inline void apply_value(RunConfig &cfg, const std::string &key, const ConfigValue &value) {
    std::string canon = detail::canonical_key(key);
    const auto &table = detail::setters();
    auto it = table.find(canon);
    if (it == table.end()) {
        throw ConfigError(value.where + ": unknown key '" + key + "'");
    }
    it->second(cfg, value, canon);
    cfg.given.insert(canon);
}

inline void apply_table(RunConfig &cfg, const ConfigTable &table) {
    for (const auto &[key, value] : table) {
        apply_value(cfg, key, value);
    }
}

/// Applies a command-line flag; the text is read like a TOML value, with a
/// bare comma-separated list accepted for list fields.
inline void apply_flag(RunConfig &cfg, const std::string &key, const std::string &text) {
    std::string where = "--" + key;
    std::string t = detail::trim(text);
    std::string canon = detail::canonical_key(key);
    bool list_field = canon == "s_list" || canon == "n_list" || canon == "f_list" || canon == "dims";
    ConfigValue v;
    if (list_field && !t.empty() && t.front() != '[') {
        v = detail::parse_value("[" + t + "]", where);
    } else if (list_field || t.empty() || t.front() == '"') {
        v = detail::parse_value(t, where);
    } else {
        try {
            v = detail::parse_value(t, where);
        } catch (const ConfigError &) {
            // Unquoted flag text such as a file path is taken verbatim.
            v = ConfigValue{{Scalar{t, t}}, false, where};
        }
    }
    if (list_field && !v.is_array) {
        v.is_array = true;
    }
    apply_value(cfg, key, v);
}

/// Names accepted by apply_flag, in the flag spelling.
inline std::vector<std::string> flag_names() {
    std::vector<std::string> out;
    for (const auto &[key, setter] : detail::setters()) {
        if (key == "command") {
            continue;
        }
        std::string flag = key;
        for (auto &c : flag) {
            if (c == '_') {
                c = '-';
            }
        }
        out.push_back(flag);
    }
    return out;
}

/// The noise channel named by the config, with sigma overrides folded into
/// a custom (r, u) channel.
inline NoiseChannel make_channel(const RunConfig &cfg) {
    NoiseChannel ch = make_noiseless(cfg.q);
    ChannelKind kind = parse_channel_kind(cfg.channel);
    switch (kind) {
        case ChannelKind::depolarizing:
            ch = make_depolarizing(cfg.q, cfg.eps);
            break;
        case ChannelKind::dephasing:
            ch = make_dephasing(cfg.q, cfg.eps);
            break;
        case ChannelKind::rotation:
            ch = make_rotation(cfg.q, cfg.theta);
            break;
        case ChannelKind::custom:
            ch = make_custom(cfg.q, cfg.r, cfg.u);
            break;
    }
    if (cfg.sigma1 || cfg.sigma2) {
        double s1 = cfg.sigma1.value_or(ch.sigma1());
        double s2 = cfg.sigma2.value_or(ch.sigma2());
        ch = make_custom(cfg.q, s1 * (cfg.q - 1.0) / cfg.q, 1.0 - s2);
    }
    return ch;
}

/// Checks cross-field constraints before any work starts.
inline void validate(const RunConfig &cfg) {
    auto fail = [](const std::string &msg) { throw ConfigError(msg); };
    if (cfg.q < 2) {
        fail("field 'q' must be >= 2");
    }
    if (cfg.n < 1) {
        fail("field 'n' must be >= 1");
    }
    if (cfg.format != "csv" && cfg.format != "json") {
        fail("field 'format' must be csv or json, got " + cfg.format);
    }
    if (cfg.placement != "gate_sites" && cfg.placement != "all_sites") {
        fail("field 'placement' must be gate_sites or all_sites, got " + cfg.placement);
    }
    try {
        parse_arch_kind(cfg.arch);
        make_channel(cfg);
    } catch (const ParameterError &e) {
        fail(e.what());
    }
    if (cfg.threads < 1) {
        fail("field 'threads' must be >= 1");
    }
}

/// Architecture spec for commands that draw diagrams.
inline ArchitectureSpec make_arch(const RunConfig &cfg) {
    switch (parse_arch_kind(cfg.arch)) {
        case ArchKind::ring1d:
            return ArchitectureSpec::ring1d(cfg.n, cfg.depth);
        case ArchKind::complete_graph:
            return ArchitectureSpec::complete_graph(cfg.n, cfg.s);
        case ArchKind::lattice:
            return ArchitectureSpec::lattice(cfg.dims.empty() ? std::vector<uint32_t>{cfg.n} : cfg.dims, cfg.depth);
        case ArchKind::custom:
            break;
    }
    throw ConfigError("field 'arch' must be ring1d, complete_graph or lattice");
}

/// s values for sweeps: s_list if given, otherwise s_min..s_max by s_step,
/// otherwise the single s.
inline std::vector<uint64_t> sweep_points(const RunConfig &cfg) {
    if (!cfg.s_list.empty()) {
        return cfg.s_list;
    }
    if (cfg.s_step > 0 && cfg.s_max >= cfg.s_min) {
        std::vector<uint64_t> out;
        for (uint64_t s = cfg.s_min; s <= cfg.s_max; s += cfg.s_step) {
            out.push_back(s);
        }
        return out;
    }
    return {cfg.s};
}

}  // namespace wnrqc::cli
