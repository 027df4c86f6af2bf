#pragma once

#include <algorithm>
#include <cmath>
#include <numeric>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "effortrank/error.hpp"

namespace effortrank {

enum class Strategy { Prob, LabelLoc, CbsPlus, ProbLoc, EaZ, ManualUp };

inline constexpr Strategy kAllStrategies[] = {Strategy::Prob,    Strategy::LabelLoc,
                                              Strategy::CbsPlus, Strategy::ProbLoc,
                                              Strategy::EaZ,     Strategy::ManualUp};

inline constexpr double kDefaultZeta = 0.05;
inline constexpr double kDefaultThreshold = 0.5;

inline std::string_view to_string(Strategy s) {
    switch (s) {
    case Strategy::Prob: return "prob";
    case Strategy::LabelLoc: return "label_loc";
    case Strategy::CbsPlus: return "cbs_plus";
    case Strategy::ProbLoc: return "prob_loc";
    case Strategy::EaZ: return "ea_z";
    case Strategy::ManualUp: return "manual_up";
    }
    return "?";
}

inline Strategy parse_strategy(std::string_view name) {
    for (auto s : kAllStrategies)
        if (to_string(s) == name) return s;
    throw ConfigError("unknown strategy '" + std::string(name) +
                      "' (expected prob, label_loc, cbs_plus, prob_loc, ea_z or manual_up)");
}

// Ranking scores, higher means inspect earlier.
struct ScoredModules {
    std::vector<double> scores;
    std::vector<double> efforts;
    Strategy strategy = Strategy::Prob;
    std::optional<double> zeta;
};

// Total inspection order over record indices.
struct RankedList {
    std::vector<std::size_t> order;

    std::size_t size() const noexcept { return order.size(); }
};

namespace detail {

inline void check_lengths(std::size_t a, std::size_t b) {
    if (a != b)
        throw DomainError("length mismatch: " + std::to_string(a) + " scores vs " +
                          std::to_string(b) + " efforts");
}

inline void check_efforts(std::span<const double> efforts) {
    for (std::size_t i = 0; i < efforts.size(); ++i)
        if (!(efforts[i] > 0.0) || !std::isfinite(efforts[i]))
            throw DomainError("effort of module " + std::to_string(i) + " must be positive");
}

inline void check_probs(std::span<const double> probs) {
    for (std::size_t i = 0; i < probs.size(); ++i)
        if (!(probs[i] >= 0.0 && probs[i] <= 1.0))
            throw DomainError("probability of module " + std::to_string(i) + " outside [0,1]");
}

inline ScoredModules make(std::span<const double> efforts, Strategy s) {
    ScoredModules out;
    out.efforts.assign(efforts.begin(), efforts.end());
    out.strategy = s;
    out.scores.reserve(efforts.size());
    return out;
}

} // namespace detail

inline ScoredModules score_prob(std::span<const double> probs, std::span<const double> efforts) {
    detail::check_lengths(probs.size(), efforts.size());
    detail::check_probs(probs);
    detail::check_efforts(efforts);
    auto out = detail::make(efforts, Strategy::Prob);
    out.scores.assign(probs.begin(), probs.end());
    return out;
}

inline ScoredModules score_label_loc(const std::vector<bool>& labels,
                                     std::span<const double> efforts) {
    detail::check_lengths(labels.size(), efforts.size());
    detail::check_efforts(efforts);
    auto out = detail::make(efforts, Strategy::LabelLoc);
    for (std::size_t i = 0; i < labels.size(); ++i)
        out.scores.push_back((labels[i] ? 1.0 : 0.0) / efforts[i]);
    return out;
}

inline ScoredModules score_prob_loc(std::span<const double> probs, std::span<const double> efforts) {
    detail::check_lengths(probs.size(), efforts.size());
    detail::check_probs(probs);
    detail::check_efforts(efforts);
    auto out = detail::make(efforts, Strategy::ProbLoc);
    for (std::size_t i = 0; i < probs.size(); ++i) out.scores.push_back(probs[i] / efforts[i]);
    return out;
}

// Two tiers: probability >= threshold first, each tier by prob/effort.
// The lower tier's prob/effort values are scaled by a power of two small
// enough to sit strictly below the smallest upper-tier score. Power-of-two
// scaling is exact, so within-tier order matches prob_loc bit for bit.
// When that scaling would leave the normal range, the lower tier is encoded
// by dense rank instead, which keeps the same order and the same ties.
inline ScoredModules score_cbs_plus(std::span<const double> probs, std::span<const double> efforts,
                                    double threshold = kDefaultThreshold) {
    if (!(threshold > 0.0 && threshold < 1.0))
        throw ConfigError("CBS+ threshold must lie in (0,1)");
    auto out = score_prob_loc(probs, efforts);
    out.strategy = Strategy::CbsPlus;
    double upper_min = INFINITY, lower_max = 0.0;
    bool has_upper = false, has_lower = false;
    std::vector<double> lower;
    for (std::size_t i = 0; i < probs.size(); ++i) {
        if (probs[i] >= threshold) {
            has_upper = true;
            upper_min = std::min(upper_min, out.scores[i]);
        } else {
            has_lower = true;
            lower_max = std::max(lower_max, out.scores[i]);
            if (out.scores[i] > 0.0) lower.push_back(out.scores[i]);
        }
    }
    if (!has_upper || !has_lower || lower_max == 0.0) return out;
    int exponent = 0;
    while (std::ldexp(lower_max, -exponent) >= upper_min) ++exponent;
    const bool fits = std::all_of(lower.begin(), lower.end(),
                                  [&](double v) { return std::isnormal(std::ldexp(v, -exponent)); });
    std::sort(lower.begin(), lower.end());
    lower.erase(std::unique(lower.begin(), lower.end()), lower.end());
    const double slots = static_cast<double>(lower.size() + 1);
    for (std::size_t i = 0; i < probs.size(); ++i) {
        if (probs[i] >= threshold || out.scores[i] == 0.0) continue;
        if (fits) {
            out.scores[i] = std::ldexp(out.scores[i], -exponent);
        } else {
            const auto rank = std::lower_bound(lower.begin(), lower.end(), out.scores[i]) - lower.begin();
            out.scores[i] = upper_min * (static_cast<double>(rank + 1) / slots);
        }
    }
    return out;
}

// EA-Z: probabilities are lifted into [zeta, 1] by p' = p(1 - zeta) + zeta
// before dividing by effort, so no module's score collapses toward zero.
inline ScoredModules score_ea_z(std::span<const double> probs, std::span<const double> efforts,
                                double zeta = kDefaultZeta) {
    if (!(zeta > 0.0 && zeta < 1.0)) throw ConfigError("zeta must lie in (0,1)");
    detail::check_lengths(probs.size(), efforts.size());
    detail::check_probs(probs);
    detail::check_efforts(efforts);
    auto out = detail::make(efforts, Strategy::EaZ);
    out.zeta = zeta;
    for (std::size_t i = 0; i < probs.size(); ++i) {
        const double lifted = std::clamp(probs[i] * (1.0 - zeta) + zeta, zeta, 1.0);
        out.scores.push_back(lifted / efforts[i]);
    }
    return out;
}

inline ScoredModules score_manual_up(std::span<const double> efforts) {
    detail::check_efforts(efforts);
    auto out = detail::make(efforts, Strategy::ManualUp);
    for (double e : efforts) out.scores.push_back(1.0 / e);
    return out;
}

struct StrategyOptions {
    double threshold = kDefaultThreshold;
    double zeta = kDefaultZeta;
};

// Labels for label_loc come from thresholding `probs`.
inline ScoredModules score(Strategy s, std::span<const double> probs,
                           std::span<const double> efforts, StrategyOptions opts = {}) {
    switch (s) {
    case Strategy::Prob: return score_prob(probs, efforts);
    case Strategy::LabelLoc: {
        if (!(opts.threshold > 0.0 && opts.threshold < 1.0))
            throw ConfigError("classification threshold must lie in (0,1)");
        detail::check_probs(probs);
        std::vector<bool> labels;
        labels.reserve(probs.size());
        for (double p : probs) labels.push_back(p >= opts.threshold);
        return score_label_loc(labels, efforts);
    }
    case Strategy::CbsPlus: return score_cbs_plus(probs, efforts, opts.threshold);
    case Strategy::ProbLoc: return score_prob_loc(probs, efforts);
    case Strategy::EaZ: return score_ea_z(probs, efforts, opts.zeta);
    case Strategy::ManualUp: return score_manual_up(efforts);
    }
    throw ConfigError("unknown strategy");
}

// Score descending, then effort ascending, then index ascending.
inline RankedList rank(const ScoredModules& s) {
    detail::check_lengths(s.scores.size(), s.efforts.size());
    for (std::size_t i = 0; i < s.scores.size(); ++i)
        if (std::isnan(s.scores[i]))
            throw DomainError("NaN ranking score at module " + std::to_string(i));
    RankedList r;
    r.order.resize(s.scores.size());
    std::iota(r.order.begin(), r.order.end(), std::size_t{0});
    std::sort(r.order.begin(), r.order.end(), [&](std::size_t a, std::size_t b) {
        if (s.scores[a] != s.scores[b]) return s.scores[a] > s.scores[b];
        if (s.efforts[a] != s.efforts[b]) return s.efforts[a] < s.efforts[b];
        return a < b;
    });
    return r;
}

} // namespace effortrank
