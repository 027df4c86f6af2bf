#pragma once

#include <algorithm>
#include <numeric>
#include <utility>
#include <vector>

#include "effortrank/learners/model.hpp"

namespace effortrank::learners {

// Euclidean k-nearest neighbours on standardized features. The probability
// is the defective fraction among the k nearest; equal distances are
// resolved in favour of the lower training index.
class KnnModel final : public detail::ModelImpl {
public:
    KnnModel(const LearnerSpec& spec, const Dataset& d)
        : k_(static_cast<std::size_t>(spec.k)), standardizer_(d), train_(standardizer_.transform(d)) {
        if (k_ > d.size())
            throw DomainError("KNN k=" + std::to_string(k_) + " exceeds the " +
                              std::to_string(d.size()) + " training records");
        labels_.reserve(d.size());
        for (const auto& r : d.records()) labels_.push_back(r.defective);
    }

    double predict_row(std::span<const double> raw) const override {
        std::vector<double> z(raw.size());
        standardizer_.apply(raw, z);
        std::vector<std::pair<double, std::size_t>> dist(train_.rows);
        for (std::size_t i = 0; i < train_.rows; ++i) {
            const auto row = train_.row(i);
            double s = 0.0;
            for (std::size_t j = 0; j < z.size(); ++j) {
                const double dv = row[j] - z[j];
                s += dv * dv;
            }
            dist[i] = {s, i};
        }
        std::partial_sort(dist.begin(), dist.begin() + static_cast<std::ptrdiff_t>(k_), dist.end());
        std::size_t positives = 0;
        for (std::size_t i = 0; i < k_; ++i) positives += labels_[dist[i].second] ? 1 : 0;
        return static_cast<double>(positives) / static_cast<double>(k_);
    }

private:
    std::size_t k_;
    Standardizer standardizer_;
    Matrix train_;
    std::vector<bool> labels_;
};

} // namespace effortrank::learners
