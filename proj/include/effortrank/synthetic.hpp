#pragma once

#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "effortrank/dataset.hpp"
#include "effortrank/error.hpp"
#include "effortrank/random.hpp"

namespace effortrank {

// Desk-scale stand-in for a cross-project pair of defect datasets.
//
// Module size is log-normal with a shape chosen so the population skewness
// equals `loc_skew`. Defect odds grow sub-linearly with size and with a
// latent "risk" factor, so defect density falls with size the way it does in
// real corpora. Features are noisy views of size and risk; `noise` is the
// standard deviation of the measurement noise on the risk metrics.
struct SyntheticSpec {
    std::size_t n = 200;
    double defect_rate = 0.1;
    double loc_skew = 10.0;
    double noise = 1.0;
    std::uint64_t seed = 1;
    double median_loc = 60.0;
    // Change in defect log-odds per unit of log size; below 1 means small
    // modules carry the higher defect density.
    double size_elasticity = 0.2;
    double risk_weight = 1.5;
    std::string name = "synth";
};

struct SyntheticPair {
    Dataset train;
    Dataset test;
};

// Shape parameter of a log-normal with the given skewness (bisection on the
// closed form (e^s2 + 2) sqrt(e^s2 - 1)).
inline double lognormal_sigma_for_skew(double skew) {
    if (!(skew > 0.0)) throw ConfigError("loc_skew must be > 0");
    const auto skew_of = [](double sigma) {
        const double e = std::exp(sigma * sigma);
        return (e + 2.0) * std::sqrt(e - 1.0);
    };
    double lo = 1e-6, hi = 4.0;
    for (int i = 0; i < 200; ++i) {
        const double mid = 0.5 * (lo + hi);
        (skew_of(mid) < skew ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
}

namespace detail {

inline Dataset synthesize(const SyntheticSpec& spec, const std::string& name, std::uint64_t seed) {
    Rng rng(seed);
    const std::size_t n = spec.n;
    const double sigma = lognormal_sigma_for_skew(spec.loc_skew);
    const double log_median = std::log(spec.median_loc);

    std::vector<double> loc(n), size_z(n), risk(n);
    for (std::size_t i = 0; i < n; ++i) {
        size_z[i] = rng.normal();
        risk[i] = rng.normal();
        loc[i] = std::max(1.0, std::round(std::exp(log_median + sigma * size_z[i])));
    }

    // Intercept that makes the mean defect probability equal defect_rate.
    std::vector<double> shape(n);
    for (std::size_t i = 0; i < n; ++i)
        shape[i] = spec.size_elasticity * (std::log(loc[i]) - log_median) + spec.risk_weight * risk[i];
    const auto mean_p = [&](double c) {
        double s = 0.0;
        for (double v : shape) s += 1.0 / (1.0 + std::exp(-(c + v)));
        return s / static_cast<double>(n);
    };
    double lo = -40.0, hi = 40.0;
    for (int it = 0; it < 200; ++it) {
        const double mid = 0.5 * (lo + hi);
        (mean_p(mid) < spec.defect_rate ? lo : hi) = mid;
    }
    const double intercept = 0.5 * (lo + hi);

    std::vector<ModuleRecord> records(n);
    for (std::size_t i = 0; i < n; ++i) {
        auto& r = records[i];
        r.id = name + "-" + std::to_string(i);
        r.effort = loc[i];
        r.defective = rng.bernoulli(1.0 / (1.0 + std::exp(-(intercept + shape[i]))));
        const double churn = std::max(0.0, std::round(loc[i] * std::exp(0.5 * rng.normal() - 1.0)));
        const double complexity = std::max(0.0, std::round(std::exp(0.8 * std::log(loc[i]) + 0.3 * rng.normal() - 1.0)));
        const double changes = std::max(0.0, std::round(std::exp(0.5 * (risk[i] + spec.noise * rng.normal()) + 1.0)));
        const double authors = std::max(1.0, std::round(std::exp(0.4 * (risk[i] + spec.noise * rng.normal()) + 0.5)));
        const double age = std::max(0.0, std::round(std::exp(-0.5 * (risk[i] + spec.noise * rng.normal()) + 3.0)));
        r.features = {loc[i], churn, complexity, changes, authors, age};
    }
    return Dataset(name, {"loc", "churn", "complexity", "changes", "authors", "age"},
                   std::move(records), "SYNTH");
}

} // namespace detail

// Train and test share the generating process but not the random draws.
inline SyntheticPair generate_synthetic_pair(const SyntheticSpec& spec) {
    if (spec.n < 20) throw ConfigError("synthetic datasets need n >= 20");
    if (!(spec.defect_rate > 0.0 && spec.defect_rate <= 0.5))
        throw ConfigError("defect_rate must lie in (0, 0.5]");
    if (!(spec.noise >= 0.0)) throw ConfigError("noise must be >= 0");
    auto train = detail::synthesize(spec, spec.name + "-train", child_seed(spec.seed, 0));
    auto test = detail::synthesize(spec, spec.name + "-test", child_seed(spec.seed, 1));
    return {std::move(train), std::move(test)};
}

// Several pairs whose effort skewness is spread geometrically over
// [skew_min, skew_max].
struct SyntheticBenchmarkSpec {
    std::size_t pairs = 30;
    double skew_min = 2.0;
    double skew_max = 50.0;
    SyntheticSpec base;
};

inline std::vector<SyntheticSpec> benchmark_specs(const SyntheticBenchmarkSpec& b) {
    if (b.pairs < 1) throw ConfigError("benchmark needs at least one pair");
    if (!(b.skew_min > 0.0 && b.skew_max >= b.skew_min)) throw ConfigError("need 0 < skew_min <= skew_max");
    std::vector<SyntheticSpec> out;
    for (std::size_t i = 0; i < b.pairs; ++i) {
        SyntheticSpec s = b.base;
        const double t = b.pairs == 1 ? 0.0 : static_cast<double>(i) / static_cast<double>(b.pairs - 1);
        s.loc_skew = b.skew_min * std::pow(b.skew_max / b.skew_min, t);
        s.seed = child_seed(b.base.seed, i);
        std::string idx = std::to_string(i + 1);
        if (idx.size() < 2) idx = "0" + idx;
        s.name = b.base.name + "-" + idx;
        out.push_back(std::move(s));
    }
    return out;
}

} // namespace effortrank
