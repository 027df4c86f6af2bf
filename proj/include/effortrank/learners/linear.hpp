#pragma once

#include <vector>

#include "effortrank/learners/model.hpp"

namespace effortrank::learners {

class LogisticModel final : public detail::ModelImpl {
public:
    LogisticModel(const LearnerSpec& spec, const Dataset& d) : standardizer_(d) {
        const Matrix x = standardizer_.transform(d);
        const std::size_t n = x.rows, p = x.cols;
        weights_.assign(p, 0.0);
        std::vector<double> grad(p);
        const double inv_n = 1.0 / static_cast<double>(n);
        for (int it = 0; it < spec.iterations; ++it) {
            std::fill(grad.begin(), grad.end(), 0.0);
            double grad_bias = 0.0;
            for (std::size_t i = 0; i < n; ++i) {
                const auto row = x.row(i);
                const double err = sigmoid(linear(row)) - (d[i].defective ? 1.0 : 0.0);
                grad_bias += err;
                for (std::size_t j = 0; j < p; ++j) grad[j] += err * row[j];
            }
            bias_ -= spec.learning_rate * grad_bias * inv_n;
            for (std::size_t j = 0; j < p; ++j)
                weights_[j] -= spec.learning_rate * (grad[j] * inv_n + spec.l2 * weights_[j]);
        }
    }

    double predict_row(std::span<const double> raw) const override {
        std::vector<double> z(raw.size());
        standardizer_.apply(raw, z);
        return sigmoid(linear(z));
    }

    const std::vector<double>& weights() const noexcept { return weights_; }
    double bias() const noexcept { return bias_; }

private:
    double linear(std::span<const double> z) const {
        double s = bias_;
        for (std::size_t j = 0; j < z.size(); ++j) s += weights_[j] * z[j];
        return s;
    }

    Standardizer standardizer_;
    std::vector<double> weights_;
    double bias_ = 0.0;
};

} // namespace effortrank::learners
