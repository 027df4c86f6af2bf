#pragma once

#include <filesystem>
#include <string>
#include <unordered_map>

#include "effortrank/learners/model.hpp"
#include "effortrank/text.hpp"

namespace effortrank::learners {

// Reads a two-column (record id, probability) file and returns one
// probability per record of `d`, in record order. Every record of `d` must
// be present; extra ids (e.g. rows removed by preprocessing) are ignored.
inline std::vector<double> load_external_probabilities(const std::string& path, const Dataset& d,
                                                       char delimiter = ',') {
    const auto lines = text::read_lines(path);
    std::unordered_map<std::string, double> prob;
    std::size_t row = 0;
    for (const auto& line : lines) {
        if (text::trim(line).empty() || text::trim(line).front() == '#') continue;
        ++row;
        const auto f = text::split_fields(line, delimiter);
        if (f.size() != 2) throw ParseError("probability file rows need 2 columns in " + path, row);
        const auto v = text::parse_double(f[1]);
        if (!v) {
            if (row == 1) continue; // header
            throw ParseError("non-numeric probability '" + f[1] + "' in " + path, row);
        }
        if (!(*v >= 0.0 && *v <= 1.0))
            throw ParseError("probability outside [0,1] in " + path, row);
        if (!prob.emplace(f[0], *v).second)
            throw ParseError("duplicate record id '" + f[0] + "' in " + path, row);
    }
    std::vector<double> out;
    out.reserve(d.size());
    for (const auto& r : d.records()) {
        auto it = prob.find(r.id);
        if (it == prob.end())
            throw SchemaError("probability file " + path + " has no entry for record id '" + r.id +
                              "' of dataset '" + d.name() + "'");
        out.push_back(it->second);
    }
    return out;
}

// Stand-in for learners built outside this library (SVM, JRip, ...): the
// probabilities come from a file, so there is nothing to fit.
class ExternalModel final : public detail::ModelImpl {
public:
    explicit ExternalModel(std::string source) : source_(std::move(source)) {}

    double predict_row(std::span<const double>) const override {
        throw Error("external learner predictions are keyed by record id, not features");
    }

    std::vector<double> predict(const Dataset& d) const override {
        namespace fs = std::filesystem;
        const std::string path = fs::is_directory(source_)
                                     ? (fs::path(source_) / (d.name() + ".csv")).string()
                                     : source_;
        if (!fs::exists(path))
            throw ConfigError("external probability file not found: " + path);
        return load_external_probabilities(path, d);
    }

    bool keyed_by_id() const override { return true; }

private:
    std::string source_;
};

} // namespace effortrank::learners
