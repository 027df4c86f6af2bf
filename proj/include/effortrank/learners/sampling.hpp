#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <optional>
#include <span>
#include <vector>

#include "effortrank/dataset.hpp"
#include "effortrank/random.hpp"

namespace effortrank::learners {

// Indices (ascending) of an under-sampled bag: every minority-class record
// plus ceil(minority / ir) majority records (capped at the majority size),
// drawn without replacement. With `weights`, majority records are drawn
// with probability proportional to their weight (Efraimidis-Spirakis keys);
// with no weights, or all-equal weights, the draw is uniform and identical
// to the unweighted one for the same seed.
inline std::vector<std::size_t> under_bag_indices(const std::vector<bool>& labels, double ir,
                                                  std::uint64_t seed,
                                                  std::span<const double> weights = {}) {
    std::vector<std::size_t> pos, neg;
    for (std::size_t i = 0; i < labels.size(); ++i) (labels[i] ? pos : neg).push_back(i);
    const bool pos_is_minority = pos.size() <= neg.size();
    const auto& minority = pos_is_minority ? pos : neg;
    const auto& majority = pos_is_minority ? neg : pos;

    const auto wanted = static_cast<std::size_t>(
        std::ceil(static_cast<double>(minority.size()) / ir - 1e-12));
    const std::size_t take = std::min(wanted, majority.size());

    bool uniform = weights.empty();
    if (!uniform)
        uniform = std::all_of(majority.begin(), majority.end(),
                              [&](std::size_t i) { return weights[i] == weights[majority.front()]; });

    Rng rng(seed);
    std::vector<std::pair<double, std::size_t>> keyed;
    keyed.reserve(majority.size());
    for (std::size_t i : majority) {
        const double u = rng.uniform_open();
        const double key = uniform ? u : (weights[i] > 0.0 ? std::log(u) / weights[i] : -INFINITY);
        keyed.emplace_back(key, i);
    }
    std::partial_sort(keyed.begin(), keyed.begin() + static_cast<std::ptrdiff_t>(take), keyed.end(),
                      [](const auto& a, const auto& b) {
                          return a.first > b.first || (a.first == b.first && a.second < b.second);
                      });

    std::vector<std::size_t> out(minority);
    for (std::size_t k = 0; k < take; ++k) out.push_back(keyed[k].second);
    std::sort(out.begin(), out.end());
    return out;
}

inline Dataset make_under_bag_sample(const Dataset& d, double ir, std::uint64_t seed) {
    const auto idx = under_bag_indices(d.labels(), ir, seed);
    return d.subset(idx);
}

} // namespace effortrank::learners
