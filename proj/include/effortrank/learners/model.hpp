#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "effortrank/dataset.hpp"
#include "effortrank/error.hpp"
#include "effortrank/learners/spec.hpp"

namespace effortrank::learners {

// Row-major feature matrix.
struct Matrix {
    std::size_t rows = 0;
    std::size_t cols = 0;
    std::vector<double> values;

    std::span<const double> row(std::size_t i) const { return {values.data() + i * cols, cols}; }
    double at(std::size_t i, std::size_t j) const { return values[i * cols + j]; }
};

// Per-feature z-scoring fitted on training data. Constant features keep a
// unit scale so they map to zero instead of dividing by zero.
class Standardizer {
public:
    Standardizer() = default;

    explicit Standardizer(const Dataset& d) {
        const std::size_t p = d.feature_count();
        const double n = static_cast<double>(d.size());
        mean_.assign(p, 0.0);
        scale_.assign(p, 0.0);
        for (const auto& r : d.records())
            for (std::size_t j = 0; j < p; ++j) mean_[j] += r.features[j];
        for (double& m : mean_) m /= n;
        for (const auto& r : d.records())
            for (std::size_t j = 0; j < p; ++j) {
                const double dv = r.features[j] - mean_[j];
                scale_[j] += dv * dv;
            }
        for (std::size_t j = 0; j < p; ++j) {
            const double sd = std::sqrt(scale_[j] / n);
            scale_[j] = sd > 1e-12 * std::max(1.0, std::abs(mean_[j])) ? sd : 1.0;
        }
    }

    const std::vector<double>& mean() const noexcept { return mean_; }
    const std::vector<double>& scale() const noexcept { return scale_; }

    void apply(std::span<const double> raw, std::span<double> out) const {
        for (std::size_t j = 0; j < raw.size(); ++j) out[j] = (raw[j] - mean_[j]) / scale_[j];
    }

    Matrix transform(const Dataset& d) const {
        Matrix m{d.size(), d.feature_count(), std::vector<double>(d.size() * d.feature_count())};
        for (std::size_t i = 0; i < d.size(); ++i)
            apply(d[i].features, std::span<double>(m.values.data() + i * m.cols, m.cols));
        return m;
    }

private:
    std::vector<double> mean_;
    std::vector<double> scale_;
};

class TrainedModel;

namespace detail {

class ModelImpl {
public:
    virtual ~ModelImpl() = default;

    // Probability for one raw (unstandardized) feature row.
    virtual double predict_row(std::span<const double> raw) const = 0;

    virtual std::vector<double> predict(const Dataset& d) const {
        std::vector<double> out;
        out.reserve(d.size());
        for (const auto& r : d.records()) out.push_back(predict_row(r.features));
        return out;
    }

    virtual bool keyed_by_id() const { return false; }
    virtual std::span<const TrainedModel> members() const { return {}; }
    virtual std::span<const double> member_weights() const { return {}; }
};

} // namespace detail

// Immutable, shareable probability predictor.
class TrainedModel {
public:
    TrainedModel(LearnerKind kind, std::vector<std::string> feature_names, std::uint64_t seed,
                 std::shared_ptr<const detail::ModelImpl> impl)
        : kind_(kind),
          feature_names_(std::move(feature_names)),
          seed_(seed),
          impl_(std::move(impl)) {}

    LearnerKind kind() const noexcept { return kind_; }
    std::uint64_t seed() const noexcept { return seed_; }
    const std::vector<std::string>& feature_names() const noexcept { return feature_names_; }

    // Ensemble members in training order; empty for single learners.
    std::span<const TrainedModel> members() const { return impl_->members(); }
    std::span<const double> member_weights() const { return impl_->member_weights(); }

    std::vector<double> predict_proba(const Dataset& d) const {
        if (!impl_->keyed_by_id() && d.feature_names() != feature_names_)
            throw SchemaError("dataset '" + d.name() +
                              "' feature schema does not match the trained model");
        auto p = impl_->predict(d);
        for (double& v : p) {
            if (!std::isfinite(v))
                throw Error(std::string(to_string(kind_)) + " produced a non-finite probability");
            v = std::clamp(v, 0.0, 1.0);
        }
        return p;
    }

private:
    LearnerKind kind_;
    std::vector<std::string> feature_names_;
    std::uint64_t seed_;
    std::shared_ptr<const detail::ModelImpl> impl_;
};

inline double sigmoid(double z) {
    if (z >= 0) return 1.0 / (1.0 + std::exp(-z));
    const double e = std::exp(z);
    return e / (1.0 + e);
}

} // namespace effortrank::learners
