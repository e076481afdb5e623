#pragma once

#include <cctype>
#include <fstream>
#include <map>
#include <memory>
#include <sstream>
#include <string>
#include <variant>
#include <vector>

#include "skewlab/errors.hpp"
#include "skewlab/markov.hpp"
#include "skewlab/skew.hpp"

namespace skewlab {

/// TOML-style config value: number, boolean, string, or (nested) array.
struct ConfigValue {
    std::variant<double, bool, std::string, std::vector<ConfigValue>> v;

    double num() const {
        if (auto* d = std::get_if<double>(&v)) return *d;
        throw config_error("config: expected a number");
    }
    bool boolean() const {
        if (auto* b = std::get_if<bool>(&v)) return *b;
        throw config_error("config: expected a boolean");
    }
    const std::string& str() const {
        if (auto* s = std::get_if<std::string>(&v)) return *s;
        throw config_error("config: expected a string");
    }
    const std::vector<ConfigValue>& array() const {
        if (auto* a = std::get_if<std::vector<ConfigValue>>(&v)) return *a;
        throw config_error("config: expected an array");
    }
    std::vector<double> num_array() const {
        std::vector<double> out;
        for (const auto& e : array()) out.push_back(e.num());
        return out;
    }
};

using ConfigTable = std::map<std::string, ConfigValue>;

struct ConfigDocument {
    ConfigTable root;
    std::map<std::string, ConfigTable> sections;
    std::vector<ConfigTable> maps; // [[map]] blocks, in file order
};

namespace detail {

inline std::string strip_comment(const std::string& line) {
    bool in_str = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
        if (line[i] == '"') in_str = !in_str;
        if (line[i] == '#' && !in_str) return line.substr(0, i);
    }
    return line;
}

inline std::string trim(const std::string& s) {
    std::size_t a = 0, b = s.size();
    while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
    while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
    return s.substr(a, b - a);
}

inline ConfigValue parse_value(const std::string& text, std::size_t& pos);

inline void skip_ws(const std::string& t, std::size_t& pos) {
    while (pos < t.size() && std::isspace(static_cast<unsigned char>(t[pos]))) ++pos;
}

inline ConfigValue parse_value(const std::string& t, std::size_t& pos) {
    skip_ws(t, pos);
    if (pos >= t.size()) throw config_error("config: missing value");
    const char c = t[pos];
    if (c == '[') {
        ++pos;
        std::vector<ConfigValue> arr;
        skip_ws(t, pos);
        if (pos < t.size() && t[pos] == ']') { ++pos; return ConfigValue{arr}; }
        while (true) {
            arr.push_back(parse_value(t, pos));
            skip_ws(t, pos);
            if (pos >= t.size()) throw config_error("config: unterminated array");
            if (t[pos] == ',') { ++pos; continue; }
            if (t[pos] == ']') { ++pos; break; }
            throw config_error("config: expected ',' or ']' in array");
        }
        return ConfigValue{arr};
    }
    if (c == '"') {
        const std::size_t end = t.find('"', pos + 1);
        if (end == std::string::npos) throw config_error("config: unterminated string");
        std::string s = t.substr(pos + 1, end - pos - 1);
        pos = end + 1;
        return ConfigValue{s};
    }
    if (t.compare(pos, 4, "true") == 0) { pos += 4; return ConfigValue{true}; }
    if (t.compare(pos, 5, "false") == 0) { pos += 5; return ConfigValue{false}; }
    std::size_t end = pos;
    while (end < t.size() && t[end] != ',' && t[end] != ']' &&
           !std::isspace(static_cast<unsigned char>(t[end])))
        ++end;
    const std::string tok = t.substr(pos, end - pos);
    try {
        std::size_t used = 0;
        const double d = std::stod(tok, &used);
        if (used != tok.size()) throw config_error("config: bad number '" + tok + "'");
        pos = end;
        return ConfigValue{d};
    } catch (const config_error&) {
        throw;
    } catch (...) {
        throw config_error("config: bad value '" + tok + "'");
    }
}

} // namespace detail

inline ConfigDocument parse_config(const std::string& text) {
    ConfigDocument doc;
    ConfigTable* current = &doc.root;
    std::istringstream in(text);
    std::string raw;
    int lineno = 0;
    while (std::getline(in, raw)) {
        ++lineno;
        const std::string line = detail::trim(detail::strip_comment(raw));
        if (line.empty()) continue;
        if (line.front() == '[') {
            if (line.size() >= 4 && line[1] == '[') {
                if (line.substr(line.size() - 2) != "]]")
                    throw config_error("config line " + std::to_string(lineno) + ": bad table header");
                const std::string name = detail::trim(line.substr(2, line.size() - 4));
                if (name != "map")
                    throw config_error("config line " + std::to_string(lineno) +
                                       ": unknown table array '" + name + "'");
                doc.maps.emplace_back();
                current = &doc.maps.back();
            } else {
                if (line.back() != ']')
                    throw config_error("config line " + std::to_string(lineno) + ": bad section header");
                const std::string name = detail::trim(line.substr(1, line.size() - 2));
                current = &doc.sections[name];
            }
            continue;
        }
        const std::size_t eq = line.find('=');
        if (eq == std::string::npos)
            throw config_error("config line " + std::to_string(lineno) + ": expected key = value");
        const std::string key = detail::trim(line.substr(0, eq));
        if (key.empty())
            throw config_error("config line " + std::to_string(lineno) + ": empty key");
        std::size_t pos = 0;
        const std::string vt = detail::trim(line.substr(eq + 1));
        ConfigValue val = detail::parse_value(vt, pos);
        detail::skip_ws(vt, pos);
        if (pos != vt.size())
            throw config_error("config line " + std::to_string(lineno) + ": trailing characters");
        if (!current->emplace(key, std::move(val)).second)
            throw config_error("config line " + std::to_string(lineno) + ": duplicate key '" + key + "'");
    }
    return doc;
}

/// Numerics block with library defaults.
struct Numerics {
    int n_bins = 2048;
    double tol = 1e-9;
    int max_iter = 100000;
    double eps_strip = 0.0; // 0 = use 2 bin widths
    int depth = 60;
    int n_pasts = 1000;
    int n_orbits = 200;
    int n_steps = 600;
    int burn_in = 100;
    double cluster_tol = 1e-7;
    double delta = 1e-6;
    std::optional<std::uint64_t> seed; // default seed; --seed overrides

    double strip_eps() const { return eps_strip > 0.0 ? eps_strip : 2.0 / n_bins; }
};

struct SystemConfig {
    std::string name;
    StepSkewSystem system;
    MarkovChainSpec chain;
    Numerics numerics;
};

namespace detail {

inline void reject_unknown(const ConfigTable& t, std::initializer_list<const char*> known,
                           const std::string& where) {
    for (const auto& [k, v] : t) {
        bool ok = false;
        for (const char* name : known) ok = ok || k == name;
        if (!ok) throw config_error("config: unknown key '" + k + "' in " + where);
    }
}

inline FiberMap parse_map(const ConfigTable& t, int index) {
    const std::string where = "map " + std::to_string(index + 1);
    auto it = t.find("family");
    if (it == t.end()) throw config_error("config: missing key 'family' in " + where);
    const std::string family = it->second.str();
    if (family == "affine") {
        reject_unknown(t, {"family", "slope", "intercept"}, where);
        if (!t.count("slope") || !t.count("intercept"))
            throw config_error("config: affine map needs 'slope' and 'intercept' in " + where);
        return FiberMap::affine(t.at("slope").num(), t.at("intercept").num());
    }
    if (family == "anchored") {
        reject_unknown(t, {"family", "x", "y", "slopes"}, where);
        if (!t.count("x") || !t.count("y") || !t.count("slopes"))
            throw config_error("config: anchored map needs 'x', 'y', 'slopes' in " + where);
        return FiberMap::anchored(t.at("x").num_array(), t.at("y").num_array(),
                                  t.at("slopes").num_array());
    }
    throw config_error("config: unknown map family '" + family + "' in " + where);
}

} // namespace detail

inline SystemConfig load_config_text(const std::string& text) {
    const ConfigDocument doc = parse_config(text);
    detail::reject_unknown(doc.root, {"name", "n", "absorbing"}, "top level");
    for (const auto& [name, tbl] : doc.sections)
        if (name != "chain" && name != "numerics")
            throw config_error("config: unknown section '" + name + "'");

    SystemConfig cfg;
    if (auto it = doc.root.find("name"); it != doc.root.end()) cfg.name = it->second.str();
    if (doc.maps.empty()) throw config_error("config: no [[map]] blocks");

    std::vector<FiberMap> maps;
    for (std::size_t k = 0; k < doc.maps.size(); ++k)
        maps.push_back(detail::parse_map(doc.maps[k], static_cast<int>(k)));

    bool absorbing = false;
    if (auto it = doc.root.find("absorbing"); it != doc.root.end()) absorbing = it->second.boolean();
    if (auto it = doc.root.find("n"); it != doc.root.end()) {
        if (static_cast<int>(it->second.num()) != static_cast<int>(maps.size()))
            throw config_error("config: declared n does not match the number of [[map]] blocks");
    }
    try {
        cfg.system = StepSkewSystem(std::move(maps), absorbing);
    } catch (const std::exception& e) {
        throw config_error(std::string("config: ") + e.what());
    }

    auto chain_it = doc.sections.find("chain");
    if (chain_it == doc.sections.end()) throw config_error("config: missing [chain] section");
    detail::reject_unknown(chain_it->second, {"p", "P"}, "[chain]");
    if (!chain_it->second.count("p") || !chain_it->second.count("P"))
        throw config_error("config: [chain] needs 'p' and 'P'");
    cfg.chain.p = chain_it->second.at("p").num_array();
    for (const auto& row : chain_it->second.at("P").array()) cfg.chain.P.push_back(row.num_array());
    if (cfg.chain.size() != cfg.system.N)
        throw config_error("config: chain size does not match the alphabet");
    try {
        validate_markov(cfg.chain);
    } catch (const std::exception& e) {
        throw config_error(std::string("config: ") + e.what());
    }

    if (auto it = doc.sections.find("numerics"); it != doc.sections.end()) {
        const ConfigTable& t = it->second;
        detail::reject_unknown(t,
                               {"n_bins", "tol", "max_iter", "eps_strip", "depth", "n_pasts",
                                "n_orbits", "n_steps", "burn_in", "cluster_tol", "delta", "seed"},
                               "[numerics]");
        Numerics& nm = cfg.numerics;
        if (t.count("n_bins")) nm.n_bins = static_cast<int>(t.at("n_bins").num());
        if (t.count("tol")) nm.tol = t.at("tol").num();
        if (t.count("max_iter")) nm.max_iter = static_cast<int>(t.at("max_iter").num());
        if (t.count("eps_strip")) nm.eps_strip = t.at("eps_strip").num();
        if (t.count("depth")) nm.depth = static_cast<int>(t.at("depth").num());
        if (t.count("n_pasts")) nm.n_pasts = static_cast<int>(t.at("n_pasts").num());
        if (t.count("n_orbits")) nm.n_orbits = static_cast<int>(t.at("n_orbits").num());
        if (t.count("n_steps")) nm.n_steps = static_cast<int>(t.at("n_steps").num());
        if (t.count("burn_in")) nm.burn_in = static_cast<int>(t.at("burn_in").num());
        if (t.count("cluster_tol")) nm.cluster_tol = t.at("cluster_tol").num();
        if (t.count("delta")) nm.delta = t.at("delta").num();
        if (t.count("seed")) nm.seed = static_cast<std::uint64_t>(t.at("seed").num());
    }
    return cfg;
}

inline SystemConfig load_config_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw config_error("config: cannot open '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return load_config_text(ss.str());
}

} // namespace skewlab
