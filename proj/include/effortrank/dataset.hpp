#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <filesystem>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "effortrank/error.hpp"
#include "effortrank/text.hpp"

namespace effortrank {

// One software module (file, class or commit).
struct ModuleRecord {
    std::string id;
    std::vector<double> features;
    double effort = 0.0; // raw lines of code or churn; never transformed
    bool defective = false;

    bool operator==(const ModuleRecord&) const = default;
};

// Named, immutable collection of records sharing one feature schema. Record
// indices are the join key for every downstream vector (probabilities,
// scores, rankings), so record order is preserved by every operation.
class Dataset {
public:
    Dataset(std::string name, std::vector<std::string> feature_names,
            std::vector<ModuleRecord> records, std::string source_tag = {})
        : name_(std::move(name)),
          feature_names_(std::move(feature_names)),
          records_(std::move(records)),
          source_tag_(std::move(source_tag)) {
        if (feature_names_.empty()) throw DomainError("dataset '" + name_ + "' has no features");
        if (records_.size() < 2)
            throw DomainError("dataset '" + name_ + "' needs at least 2 records, has " +
                              std::to_string(records_.size()));
        for (std::size_t i = 0; i < records_.size(); ++i) {
            const auto& r = records_[i];
            if (r.features.size() != feature_names_.size())
                throw DomainError("record " + std::to_string(i) + " of '" + name_ +
                                  "' has " + std::to_string(r.features.size()) +
                                  " features, schema has " +
                                  std::to_string(feature_names_.size()));
            if (!std::isfinite(r.effort))
                throw DomainError("record " + std::to_string(i) + " has non-finite effort");
            for (double v : r.features)
                if (!std::isfinite(v))
                    throw DomainError("record " + std::to_string(i) + " has a non-finite feature");
        }
    }

    const std::string& name() const noexcept { return name_; }
    const std::string& source_tag() const noexcept { return source_tag_; }
    const std::vector<std::string>& feature_names() const noexcept { return feature_names_; }
    const std::vector<ModuleRecord>& records() const noexcept { return records_; }
    std::size_t size() const noexcept { return records_.size(); }
    std::size_t feature_count() const noexcept { return feature_names_.size(); }
    const ModuleRecord& operator[](std::size_t i) const { return records_[i]; }

    std::vector<double> efforts() const {
        std::vector<double> out;
        out.reserve(records_.size());
        for (const auto& r : records_) out.push_back(r.effort);
        return out;
    }

    std::vector<bool> labels() const {
        std::vector<bool> out;
        out.reserve(records_.size());
        for (const auto& r : records_) out.push_back(r.defective);
        return out;
    }

    std::size_t defective_count() const noexcept {
        return static_cast<std::size_t>(std::count_if(
            records_.begin(), records_.end(), [](const auto& r) { return r.defective; }));
    }

    // Records at `indices`, in that order (duplicates allowed, for bootstraps).
    Dataset subset(std::span<const std::size_t> indices, std::string name = {}) const {
        std::vector<ModuleRecord> picked;
        picked.reserve(indices.size());
        for (std::size_t i : indices) picked.push_back(records_.at(i));
        return Dataset(name.empty() ? name_ : std::move(name), feature_names_, std::move(picked),
                       source_tag_);
    }

private:
    std::string name_;
    std::vector<std::string> feature_names_;
    std::vector<ModuleRecord> records_;
    std::string source_tag_;
};

// Column mapping for delimited dataset files.
//
// `effort` names one column, or several joined by '+' (e.g. "la+ld" for
// commit churn). Every numeric column other than the label, the id and the
// `ignore` list becomes a feature, in file order; effort columns stay
// features unless ignored, so LOC can be both effort and model input.
struct DatasetSchema {
    std::string effort = "loc";
    std::string label = "bug";
    std::optional<std::string> id;
    std::vector<std::string> ignore;
    char delimiter = ',';
    std::vector<std::string> truthy = {"true", "yes", "buggy"};
    std::vector<std::string> falsy = {"false", "no", "clean"};
    std::string source_tag;
};

namespace detail {

inline bool parse_label(const std::string& cell, const DatasetSchema& schema, std::size_t row) {
    if (auto v = text::parse_double(cell)) return *v != 0.0;
    const auto l = text::lower(cell);
    for (const auto& t : schema.truthy)
        if (l == text::lower(t)) return true;
    for (const auto& f : schema.falsy)
        if (l == text::lower(f)) return false;
    throw ParseError("unrecognized label value '" + cell + "' in column '" + schema.label + "'",
                     row);
}

} // namespace detail

// Rows are numbered from 1, counting data rows only (the header is row 0).
inline Dataset load_dataset(const std::string& path, const DatasetSchema& schema) {
    const auto lines = text::read_lines(path);
    std::size_t header_at = 0;
    while (header_at < lines.size() && text::trim(lines[header_at]).empty()) ++header_at;
    if (header_at == lines.size()) throw ParseError("empty dataset file: " + path, 0);

    const auto header = text::split_fields(lines[header_at], schema.delimiter);
    std::unordered_map<std::string, std::size_t> column;
    for (std::size_t c = 0; c < header.size(); ++c) column.emplace(header[c], c);
    const auto require = [&](const std::string& name) {
        auto it = column.find(name);
        if (it == column.end())
            throw SchemaError("column '" + name + "' not found in " + path);
        return it->second;
    };

    std::vector<std::size_t> effort_cols;
    for (const auto& part : text::split_list(schema.effort, '+')) effort_cols.push_back(require(part));
    if (effort_cols.empty()) throw SchemaError("schema names no effort column");
    const std::size_t label_col = require(schema.label);
    std::optional<std::size_t> id_col;
    if (schema.id) id_col = require(*schema.id);
    std::set<std::size_t> excluded{label_col};
    if (id_col) excluded.insert(*id_col);
    // Ignored columns may be absent; every column carrying an ignored name is dropped.
    for (std::size_t c = 0; c < header.size(); ++c)
        if (std::find(schema.ignore.begin(), schema.ignore.end(), header[c]) != schema.ignore.end())
            excluded.insert(c);

    std::vector<std::size_t> feature_cols;
    std::vector<std::string> feature_names;
    for (std::size_t c = 0; c < header.size(); ++c) {
        if (excluded.contains(c)) continue;
        feature_cols.push_back(c);
        feature_names.push_back(header[c]);
    }

    std::vector<ModuleRecord> records;
    std::size_t row = 0;
    for (std::size_t li = header_at + 1; li < lines.size(); ++li) {
        if (text::trim(lines[li]).empty()) continue;
        ++row;
        const auto cells = text::split_fields(lines[li], schema.delimiter);
        if (cells.size() != header.size())
            throw ParseError("expected " + std::to_string(header.size()) + " fields, found " +
                                 std::to_string(cells.size()),
                             row);
        ModuleRecord rec;
        rec.id = id_col ? cells[*id_col] : std::to_string(row - 1);
        rec.features.reserve(feature_cols.size());
        for (std::size_t k = 0; k < feature_cols.size(); ++k) {
            const auto& cell = cells[feature_cols[k]];
            auto v = text::parse_double(cell);
            if (!v || !std::isfinite(*v))
                throw ParseError("non-numeric value '" + cell + "' in feature column '" +
                                     feature_names[k] + "'",
                                 row);
            rec.features.push_back(*v);
        }
        for (std::size_t c : effort_cols) {
            auto v = text::parse_double(cells[c]);
            if (!v || !std::isfinite(*v))
                throw ParseError("non-numeric effort value '" + cells[c] + "'", row);
            rec.effort += *v;
        }
        rec.defective = detail::parse_label(cells[label_col], schema, row);
        records.push_back(std::move(rec));
    }
    if (records.empty()) throw ParseError("dataset file has a header but no rows: " + path, 0);

    return Dataset(std::filesystem::path(path).stem().string(), std::move(feature_names),
                   std::move(records), schema.source_tag);
}

inline constexpr const char* kIdColumn = "__id";
inline constexpr const char* kEffortColumn = "__effort";
inline constexpr const char* kLabelColumn = "__defective";

// Schema that reads back a file produced by write_dataset.
inline DatasetSchema serialized_schema(std::string source_tag = {}) {
    DatasetSchema s;
    s.id = kIdColumn;
    s.effort = kEffortColumn;
    s.label = kLabelColumn;
    s.ignore = {kEffortColumn};
    s.source_tag = std::move(source_tag);
    return s;
}

inline void write_dataset(const Dataset& d, const std::string& path) {
    std::string out = kIdColumn;
    for (const auto& f : d.feature_names()) out += "," + f;
    out += std::string(",") + kEffortColumn + "," + kLabelColumn + "\n";
    for (const auto& r : d.records()) {
        out += r.id;
        for (double v : r.features) out += "," + text::format_double(v);
        out += "," + text::format_double(r.effort) + "," + (r.defective ? "1" : "0") + "\n";
    }
    text::write_file(path, out);
}

struct PreprocessOptions {
    bool log_transform = false;
    bool drop_zero_effort = true;
};

// Features become ln(1 + x) under log_transform. Effort is left in raw lines
// so inspection budgets stay proportional to real cost.
inline Dataset preprocess(const Dataset& d, PreprocessOptions opts) {
    std::vector<ModuleRecord> kept;
    kept.reserve(d.size());
    for (std::size_t i = 0; i < d.size(); ++i) {
        const auto& r = d[i];
        if (opts.drop_zero_effort && !(r.effort > 0.0)) continue;
        ModuleRecord copy = r;
        if (opts.log_transform) {
            for (std::size_t f = 0; f < copy.features.size(); ++f) {
                if (copy.features[f] < 0.0)
                    throw DomainError("negative value in feature '" + d.feature_names()[f] +
                                      "' of record " + std::to_string(i) +
                                      " cannot be log-transformed");
                copy.features[f] = std::log1p(copy.features[f]);
            }
        }
        kept.push_back(std::move(copy));
    }
    return Dataset(d.name(), d.feature_names(), std::move(kept), d.source_tag());
}

// Population skewness: mean cubed deviation over the cubed population sd.
inline double skewness(std::span<const double> values) {
    const std::size_t n = values.size();
    if (n < 3) throw DomainError("skewness needs at least 3 values");
    double mean = 0.0;
    for (double v : values) mean += v;
    mean /= static_cast<double>(n);
    double m2 = 0.0, m3 = 0.0;
    for (double v : values) {
        const double d = v - mean;
        m2 += d * d;
        m3 += d * d * d;
    }
    m2 /= static_cast<double>(n);
    m3 /= static_cast<double>(n);
    // Relative test: values that differ only by rounding noise count as constant.
    if (!(m2 > 1e-24 * std::max(1.0, mean * mean))) throw DomainError("zero variance");
    return m3 / std::pow(m2, 1.5);
}

struct ManifestPair {
    std::string source;
    std::string train;
    std::string test;

    std::string tag() const { return train + "->" + test; }
};

struct ExperimentManifest {
    std::vector<ManifestPair> pairs;
};

// Three columns per row (source, train, test); '#' lines and blank lines are
// skipped; an optional first row "source,train,test" is treated as a header.
inline ExperimentManifest load_manifest(const std::string& path, char delimiter = ',') {
    const auto lines = text::read_lines(path);
    ExperimentManifest m;
    std::set<std::pair<std::string, std::string>> seen;
    std::size_t row = 0;
    bool first = true;
    for (const auto& raw : lines) {
        const auto line = text::trim(raw);
        if (line.empty() || line.front() == '#') continue;
        ++row;
        const auto f = text::split_fields(line, delimiter);
        if (first) {
            first = false;
            if (f.size() == 3 && text::lower(f[0]) == "source" && text::lower(f[1]) == "train" &&
                text::lower(f[2]) == "test")
                continue;
        }
        if (f.size() != 3)
            throw ParseError("manifest rows need 3 columns (source, train, test), found " +
                                 std::to_string(f.size()),
                             row);
        if (f[1].empty() || f[2].empty()) throw ParseError("empty dataset name in manifest", row);
        if (f[1] == f[2])
            throw ConfigError("manifest row " + std::to_string(row) + ": train == test ('" + f[1] +
                              "')");
        if (!seen.emplace(f[1], f[2]).second)
            throw ConfigError("manifest row " + std::to_string(row) + ": duplicate pair " + f[1] +
                              " -> " + f[2]);
        m.pairs.push_back({f[0], f[1], f[2]});
    }
    if (m.pairs.empty()) throw ConfigError("manifest has no pairs: " + path);
    return m;
}

} // namespace effortrank
