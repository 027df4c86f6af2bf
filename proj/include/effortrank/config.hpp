#pragma once

#include <algorithm>
#include <charconv>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "effortrank/dataset.hpp"
#include "effortrank/error.hpp"
#include "effortrank/learners/train.hpp"
#include "effortrank/metrics.hpp"
#include "effortrank/strategies.hpp"
#include "effortrank/text.hpp"

namespace effortrank {

// Flat "key = value" text: '#' starts a comment line, blank lines are skipped,
// repeated keys are an error.
using KeyValues = std::map<std::string, std::string>;

inline KeyValues parse_key_values(const std::vector<std::string>& lines, const std::string& origin) {
    KeyValues kv;
    for (std::size_t i = 0; i < lines.size(); ++i) {
        const auto line = text::trim(lines[i]);
        if (line.empty() || line.front() == '#') continue;
        const auto eq = line.find('=');
        if (eq == std::string_view::npos)
            throw ConfigError(origin + ":" + std::to_string(i + 1) + ": expected 'key = value'");
        const std::string key(text::trim(line.substr(0, eq)));
        const std::string value(text::trim(line.substr(eq + 1)));
        if (key.empty()) throw ConfigError(origin + ":" + std::to_string(i + 1) + ": empty key");
        if (!kv.emplace(key, value).second)
            throw ConfigError(origin + ":" + std::to_string(i + 1) + ": duplicate key '" + key + "'");
    }
    return kv;
}

inline KeyValues load_key_values(const std::string& path) {
    return parse_key_values(text::read_lines(path), path);
}

namespace detail {

inline double kv_double(const std::string& key, const std::string& v) {
    auto d = text::parse_double(v);
    if (!d) throw ConfigError("'" + key + "' expects a number, got '" + v + "'");
    return *d;
}

inline long long kv_integer(const std::string& key, const std::string& v) {
    const double d = kv_double(key, v);
    if (d != static_cast<double>(static_cast<long long>(d)))
        throw ConfigError("'" + key + "' expects an integer, got '" + v + "'");
    return static_cast<long long>(d);
}

inline std::uint64_t kv_seed(const std::string& key, const std::string& v) {
    std::uint64_t out = 0;
    const auto t = text::trim(v);
    const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), out);
    if (ec != std::errc{} || ptr != t.data() + t.size() || t.empty())
        throw ConfigError("'" + key + "' expects an unsigned integer, got '" + v + "'");
    return out;
}

inline bool kv_bool(const std::string& key, const std::string& v) {
    const auto l = text::lower(v);
    if (l == "true" || l == "yes" || l == "1") return true;
    if (l == "false" || l == "no" || l == "0") return false;
    throw ConfigError("'" + key + "' expects true or false, got '" + v + "'");
}

inline char kv_delimiter(const std::string& key, const std::string& v) {
    if (v == "\\t" || v == "tab") return '\t';
    if (v.size() != 1) throw ConfigError("'" + key + "' expects a single character");
    return v[0];
}

} // namespace detail

// ---------------------------------------------------------------- sources

struct SourceProfile {
    DatasetSchema schema;
    bool log_transform = false;
};

using SourceProfiles = std::map<std::string, SourceProfile>;

inline SourceProfiles default_source_profiles() {
    SourceProfiles p;
    const auto add = [&](const std::string& name, std::string effort, std::string label,
                         std::vector<std::string> ignore, bool log_transform) {
        SourceProfile s;
        s.schema.effort = std::move(effort);
        s.schema.label = std::move(label);
        s.schema.ignore = std::move(ignore);
        s.schema.source_tag = name;
        s.log_transform = log_transform;
        p[name] = std::move(s);
    };
    add("PROMISE", "loc", "bug", {"name", "version", "name.1"}, false);
    add("AEEEM", "ck_oo_numberOfLinesOfCode", "bugs", {"classname"}, false);
    add("Kamei", "la+ld", "bug", {"commit_id", "transactionid", "commitdate", "author_date"}, true);
    add("JavaScript", "la+ld", "bug", {"commit_id", "commit_hash", "author_date"}, true);
    p["SYNTH"] = SourceProfile{serialized_schema("SYNTH"), false};
    add("default", "loc", "bug", {}, false);
    return p;
}

// Keys "<source>.<field>" with fields effort, label, id, ignore, delimiter,
// log_transform, format. "format = serialized" reads files written by
// write_dataset. Entries override the built-in profile of the same source.
inline SourceProfiles parse_source_profiles(const KeyValues& kv) {
    auto profiles = default_source_profiles();
    std::map<std::string, KeyValues> by_source;
    for (const auto& [key, value] : kv) {
        const auto dot = key.rfind('.');
        if (dot == std::string::npos || dot == 0)
            throw ConfigError("source profile key '" + key + "' is not <source>.<field>");
        by_source[key.substr(0, dot)][key.substr(dot + 1)] = value;
    }
    for (const auto& [source, fields] : by_source) {
        SourceProfile prof = profiles.contains(source) ? profiles[source] : profiles["default"];
        prof.schema.source_tag = source;
        if (auto it = fields.find("format"); it != fields.end()) {
            if (it->second != "serialized" && it->second != "csv")
                throw ConfigError(source + ".format must be csv or serialized");
            if (it->second == "serialized") prof.schema = serialized_schema(source);
        }
        for (const auto& [field, value] : fields) {
            const std::string key = source + "." + field;
            if (field == "format") continue;
            if (field == "effort") prof.schema.effort = value;
            else if (field == "label") prof.schema.label = value;
            else if (field == "id") {
                if (value.empty()) prof.schema.id.reset();
                else prof.schema.id = value;
            } else if (field == "ignore") prof.schema.ignore = text::split_list(value, ',');
            else if (field == "delimiter") prof.schema.delimiter = detail::kv_delimiter(key, value);
            else if (field == "log_transform") prof.log_transform = detail::kv_bool(key, value);
            else throw ConfigError("unknown source profile field '" + key + "'");
        }
        profiles[source] = std::move(prof);
    }
    return profiles;
}

inline SourceProfiles load_source_profiles(const std::string& path) {
    return parse_source_profiles(load_key_values(path));
}

inline const SourceProfile& profile_for(const SourceProfiles& p, const std::string& source) {
    if (auto it = p.find(source); it != p.end()) return it->second;
    if (auto it = p.find("default"); it != p.end()) return it->second;
    throw ConfigError("no column profile for data source '" + source + "'");
}

// ----------------------------------------------------------------- config

struct RunConfig {
    std::string manifest;
    std::string data_dir = ".";
    std::string sources;  // profile file; empty = built-in profiles
    std::vector<std::string> learners;
    std::vector<Strategy> strategies;
    double zeta = kDefaultZeta;
    std::vector<double> zeta_grid; // EA-Z evaluated at each value; empty = {zeta}
    double threshold = kDefaultThreshold;
    double budget = kDefaultBudget;
    std::uint64_t seed = 1;
    int repetitions = 1;
    int jobs = 1;
    std::string out;
    learners::ZooOptions zoo;

    std::vector<double> effective_zetas() const {
        return zeta_grid.empty() ? std::vector<double>{zeta} : zeta_grid;
    }

    void validate() const {
        if (learners.empty()) throw ConfigError("at least one learner is required");
        if (strategies.empty()) throw ConfigError("at least one strategy is required");
        if (!(zeta > 0.0 && zeta < 1.0)) throw ConfigError("zeta must lie in (0,1)");
        for (std::size_t i = 0; i < zeta_grid.size(); ++i) {
            if (!(zeta_grid[i] > 0.0 && zeta_grid[i] < 1.0))
                throw ConfigError("zeta grid values must lie in (0,1)");
            if (i > 0 && !(zeta_grid[i] > zeta_grid[i - 1]))
                throw ConfigError("zeta grid must be strictly increasing");
        }
        if (!(threshold > 0.0 && threshold < 1.0)) throw ConfigError("threshold must lie in (0,1)");
        if (!(budget > 0.0 && budget <= 1.0)) throw ConfigError("budget must lie in (0,1]");
        if (repetitions < 1) throw ConfigError("repetitions must be >= 1");
        if (jobs < 1) throw ConfigError("jobs must be >= 1");
        if (zoo.k < 1) throw ConfigError("k must be >= 1");
        if (!(zoo.ir >= 1.0)) throw ConfigError("ir must be >= 1");
        if (zoo.rf_trees < 1 || zoo.ensemble_rf_trees < 1) throw ConfigError("tree counts must be >= 1");
        if (zoo.bags < 1 || zoo.rounds < 1) throw ConfigError("bags and rounds must be >= 1");
        std::vector<std::string> seen;
        for (const auto& l : learners) {
            if (std::find(seen.begin(), seen.end(), l) != seen.end())
                throw ConfigError("learner '" + l + "' listed twice");
            seen.push_back(l);
            (void)learners::make_learner_spec(l, zoo);
        }
        for (std::size_t i = 0; i < strategies.size(); ++i)
            for (std::size_t j = 0; j < i; ++j)
                if (strategies[i] == strategies[j])
                    throw ConfigError("strategy '" + std::string(to_string(strategies[i])) + "' listed twice");
    }
};

inline const std::vector<std::string>& run_config_keys() {
    static const std::vector<std::string> keys = {
        "manifest", "data_dir", "sources", "learners", "strategies", "zeta", "zeta_grid",
        "threshold", "budget", "seed", "repetitions", "jobs", "out", "k", "ir", "rf_trees",
        "ensemble_rf_trees", "bags", "rounds", "external_dir"};
    return keys;
}

inline std::vector<double> parse_double_list(const std::string& key, const std::string& v) {
    std::vector<double> out;
    for (const auto& part : text::split_list(v, ',')) out.push_back(detail::kv_double(key, part));
    return out;
}

inline std::vector<Strategy> parse_strategy_list(const std::string& v) {
    std::vector<Strategy> out;
    for (const auto& part : text::split_list(v, ',')) out.push_back(parse_strategy(part));
    return out;
}

// Applies `kv` on top of `cfg`; unknown keys are rejected.
inline void apply_key_values(RunConfig& cfg, const KeyValues& kv) {
    const auto& known = run_config_keys();
    for (const auto& [key, value] : kv) {
        if (std::find(known.begin(), known.end(), key) == known.end())
            throw ConfigError("unknown configuration key '" + key + "'");
        if (key == "manifest") cfg.manifest = value;
        else if (key == "data_dir") cfg.data_dir = value;
        else if (key == "sources") cfg.sources = value;
        else if (key == "learners") cfg.learners = text::split_list(value, ',');
        else if (key == "strategies") cfg.strategies = parse_strategy_list(value);
        else if (key == "zeta") cfg.zeta = detail::kv_double(key, value);
        else if (key == "zeta_grid") cfg.zeta_grid = parse_double_list(key, value);
        else if (key == "threshold") cfg.threshold = detail::kv_double(key, value);
        else if (key == "budget") cfg.budget = detail::kv_double(key, value);
        else if (key == "seed") cfg.seed = detail::kv_seed(key, value);
        else if (key == "repetitions") cfg.repetitions = static_cast<int>(detail::kv_integer(key, value));
        else if (key == "jobs") cfg.jobs = static_cast<int>(detail::kv_integer(key, value));
        else if (key == "out") cfg.out = value;
        else if (key == "k") cfg.zoo.k = static_cast<int>(detail::kv_integer(key, value));
        else if (key == "ir") cfg.zoo.ir = detail::kv_double(key, value);
        else if (key == "rf_trees") cfg.zoo.rf_trees = static_cast<int>(detail::kv_integer(key, value));
        else if (key == "ensemble_rf_trees") cfg.zoo.ensemble_rf_trees = static_cast<int>(detail::kv_integer(key, value));
        else if (key == "bags") cfg.zoo.bags = static_cast<int>(detail::kv_integer(key, value));
        else if (key == "rounds") cfg.zoo.rounds = static_cast<int>(detail::kv_integer(key, value));
        else if (key == "external_dir") cfg.zoo.external_dir = value;
    }
}

inline RunConfig load_run_config(const std::string& path) {
    RunConfig cfg;
    apply_key_values(cfg, load_key_values(path));
    return cfg;
}

// Canonical text form; parsing it back yields an equal configuration. The
// worker count is left out: results do not depend on it.
inline std::string to_text(const RunConfig& cfg) {
    std::vector<std::string> strategies, grid;
    for (auto s : cfg.strategies) strategies.emplace_back(to_string(s));
    for (double z : cfg.zeta_grid) grid.push_back(text::format_double(z));
    std::string out;
    const auto line = [&](const std::string& k, const std::string& v) { out += k + " = " + v + "\n"; };
    line("manifest", cfg.manifest);
    line("data_dir", cfg.data_dir);
    line("sources", cfg.sources);
    line("learners", text::join(cfg.learners, ","));
    line("strategies", text::join(strategies, ","));
    line("zeta", text::format_double(cfg.zeta));
    line("zeta_grid", text::join(grid, ","));
    line("threshold", text::format_double(cfg.threshold));
    line("budget", text::format_double(cfg.budget));
    line("seed", std::to_string(cfg.seed));
    line("repetitions", std::to_string(cfg.repetitions));
    line("k", std::to_string(cfg.zoo.k));
    line("ir", text::format_double(cfg.zoo.ir));
    line("rf_trees", std::to_string(cfg.zoo.rf_trees));
    line("ensemble_rf_trees", std::to_string(cfg.zoo.ensemble_rf_trees));
    line("bags", std::to_string(cfg.zoo.bags));
    line("rounds", std::to_string(cfg.zoo.rounds));
    line("external_dir", cfg.zoo.external_dir);
    line("out", cfg.out);
    return out;
}

} // namespace effortrank
