#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <utility>

#include "effortrank/config.hpp"
#include "effortrank/dataset.hpp"
#include "effortrank/error.hpp"

namespace effortrank {

// Resolves manifest names to prepared datasets.
class DatasetCatalog {
public:
    virtual ~DatasetCatalog() = default;

    // Human-readable location, or nothing when the dataset cannot be found.
    virtual std::optional<std::string> locate(const std::string& source, const std::string& name) const = 0;
    // Raw dataset as stored; preprocessing is applied by the caller.
    virtual Dataset load(const std::string& source, const std::string& name) const = 0;
    virtual PreprocessOptions preprocessing(const std::string& source) const = 0;

    Dataset prepared(const std::string& source, const std::string& name) const {
        return preprocess(load(source, name), preprocessing(source));
    }
};

// Looks for <root>/<source>/<name>.csv, then <root>/<name>.csv.
class DirectoryCatalog final : public DatasetCatalog {
public:
    DirectoryCatalog(std::string root, SourceProfiles profiles)
        : root_(std::move(root)), profiles_(std::move(profiles)) {}

    std::optional<std::string> locate(const std::string& source, const std::string& name) const override {
        namespace fs = std::filesystem;
        for (const auto& p : {fs::path(root_) / source / (name + ".csv"), fs::path(root_) / (name + ".csv")}) {
            std::error_code ec;
            if (fs::is_regular_file(p, ec)) return p.string();
        }
        return std::nullopt;
    }

    Dataset load(const std::string& source, const std::string& name) const override {
        auto path = locate(source, name);
        if (!path)
            throw ConfigError("dataset '" + name + "' not found under " + root_ + " (expected " +
                              (std::filesystem::path(root_) / source / (name + ".csv")).string() + ")");
        auto schema = profile_for(profiles_, source).schema;
        schema.source_tag = source;
        auto raw = load_dataset(*path, schema);
        return Dataset(name, raw.feature_names(), raw.records(), source);
    }

    PreprocessOptions preprocessing(const std::string& source) const override {
        return {.log_transform = profile_for(profiles_, source).log_transform, .drop_zero_effort = true};
    }

    const std::string& root() const noexcept { return root_; }

private:
    std::string root_;
    SourceProfiles profiles_;
};

class MemoryCatalog final : public DatasetCatalog {
public:
    void add(const std::string& source, Dataset d) {
        const std::string name = d.name();
        if (!data_.emplace(std::pair{source, name}, std::move(d)).second)
            throw ConfigError("dataset '" + name + "' added twice");
    }

    void set_log_transform(const std::string& source, bool on) { log_[source] = on; }

    std::optional<std::string> locate(const std::string& source, const std::string& name) const override {
        if (data_.contains({source, name})) return "memory:" + source + "/" + name;
        return std::nullopt;
    }

    Dataset load(const std::string& source, const std::string& name) const override {
        auto it = data_.find({source, name});
        if (it == data_.end()) throw ConfigError("dataset '" + name + "' not in catalog");
        return it->second;
    }

    PreprocessOptions preprocessing(const std::string& source) const override {
        auto it = log_.find(source);
        return {.log_transform = it != log_.end() && it->second, .drop_zero_effort = true};
    }

private:
    std::map<std::pair<std::string, std::string>, Dataset> data_;
    std::map<std::string, bool> log_;
};

} // namespace effortrank
