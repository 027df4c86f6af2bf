#pragma once

#include <array>
#include <cmath>
#include <numbers>
#include <vector>

#include "effortrank/learners/model.hpp"

namespace effortrank::learners {

// Gaussian naive Bayes on standardized features.
class NaiveBayesModel final : public detail::ModelImpl {
public:
    NaiveBayesModel(const LearnerSpec& spec, const Dataset& d) : standardizer_(d) {
        const Matrix x = standardizer_.transform(d);
        const std::size_t p = x.cols;
        std::array<double, 2> count{0.0, 0.0};
        for (auto& c : classes_) {
            c.mean.assign(p, 0.0);
            c.var.assign(p, 0.0);
        }
        for (std::size_t i = 0; i < x.rows; ++i) {
            auto& c = classes_[d[i].defective ? 1 : 0];
            count[d[i].defective ? 1 : 0] += 1.0;
            for (std::size_t j = 0; j < p; ++j) c.mean[j] += x.at(i, j);
        }
        for (int k = 0; k < 2; ++k)
            for (double& m : classes_[k].mean) m /= count[k];
        for (std::size_t i = 0; i < x.rows; ++i) {
            auto& c = classes_[d[i].defective ? 1 : 0];
            for (std::size_t j = 0; j < p; ++j) {
                const double dv = x.at(i, j) - c.mean[j];
                c.var[j] += dv * dv;
            }
        }
        const double n = count[0] + count[1];
        for (int k = 0; k < 2; ++k) {
            auto& c = classes_[k];
            c.log_prior = std::log(count[k] / n);
            for (double& v : c.var) v = std::max(v / count[k], spec.variance_floor);
        }
    }

    double predict_row(std::span<const double> raw) const override {
        std::vector<double> z(raw.size());
        standardizer_.apply(raw, z);
        const double l0 = log_joint(classes_[0], z);
        const double l1 = log_joint(classes_[1], z);
        return sigmoid(l1 - l0);
    }

private:
    struct ClassStats {
        std::vector<double> mean;
        std::vector<double> var;
        double log_prior = 0.0;
    };

    static double log_joint(const ClassStats& c, std::span<const double> z) {
        double s = c.log_prior;
        for (std::size_t j = 0; j < z.size(); ++j) {
            const double dv = z[j] - c.mean[j];
            s -= 0.5 * std::log(2.0 * std::numbers::pi * c.var[j]) + dv * dv / (2.0 * c.var[j]);
        }
        return s;
    }

    Standardizer standardizer_;
    std::array<ClassStats, 2> classes_;
};

} // namespace effortrank::learners
