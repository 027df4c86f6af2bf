#pragma once

#include <algorithm>
#include <cstddef>
#include <numeric>
#include <span>
#include <vector>

#include "effortrank/error.hpp"
#include "effortrank/strategies.hpp"

namespace effortrank {

struct CEPoint {
    double effort = 0.0; // cumulative effort fraction
    double recall = 0.0; // cumulative fraction of defective modules found
};

// Cost-effectiveness curve: piecewise linear through its points.
struct CECurve {
    std::vector<CEPoint> points;

    // Trapezoidal area over effort fraction in [0, 1].
    double area() const {
        double a = 0.0;
        for (std::size_t i = 1; i < points.size(); ++i)
            a += (points[i].effort - points[i - 1].effort) *
                 (points[i].recall + points[i - 1].recall) / 2.0;
        return a;
    }

    double recall_at(double effort_fraction) const {
        if (effort_fraction <= 0.0) return 0.0;
        for (std::size_t i = 1; i < points.size(); ++i) {
            if (effort_fraction <= points[i].effort) {
                const auto& a = points[i - 1];
                const auto& b = points[i];
                if (b.effort == a.effort) return b.recall;
                return a.recall + (b.recall - a.recall) * (effort_fraction - a.effort) /
                                      (b.effort - a.effort);
            }
        }
        return points.back().recall;
    }
};

inline constexpr double kDefaultBudget = 0.2;

namespace detail {

inline void check_ranking(const RankedList& r, const std::vector<bool>& actuals,
                          std::span<const double> efforts) {
    const std::size_t n = r.order.size();
    if (actuals.size() != n || efforts.size() != n)
        throw DomainError("ranking, labels and efforts must have the same length");
    std::vector<bool> seen(n, false);
    for (std::size_t i : r.order) {
        if (i >= n || seen[i]) throw DomainError("ranking is not a permutation");
        seen[i] = true;
    }
    for (double e : efforts)
        if (!(e > 0.0)) throw DomainError("efforts must be positive");
}

inline std::size_t defective_total(const std::vector<bool>& actuals) {
    const auto k = static_cast<std::size_t>(std::count(actuals.begin(), actuals.end(), true));
    if (k == 0) throw DomainError("undefined recall denominator: no defective module");
    return k;
}

} // namespace detail

inline CECurve ce_curve(const RankedList& r, const std::vector<bool>& actuals,
                        std::span<const double> efforts) {
    detail::check_ranking(r, actuals, efforts);
    const double K = static_cast<double>(detail::defective_total(actuals));
    // Summed in ranked order so the running total ends exactly at `total`.
    double total = 0.0;
    for (std::size_t i : r.order) total += efforts[i];
    CECurve c;
    c.points.reserve(r.size() + 1);
    c.points.push_back({0.0, 0.0});
    double cum = 0.0, found = 0.0;
    for (std::size_t i : r.order) {
        cum += efforts[i];
        if (actuals[i]) found += 1.0;
        c.points.push_back({cum / total, found / K});
    }
    return c;
}

// Fraction of defective modules inspected within `budget` of total effort.
// A module counts only if its whole effort fits inside the budget.
inline double recall_at(const RankedList& r, const std::vector<bool>& actuals,
                        std::span<const double> efforts, double budget = kDefaultBudget) {
    if (!(budget > 0.0 && budget <= 1.0)) throw ConfigError("budget must lie in (0,1]");
    detail::check_ranking(r, actuals, efforts);
    const double K = static_cast<double>(detail::defective_total(actuals));
    double total = 0.0;
    for (std::size_t i : r.order) total += efforts[i];
    const double limit = (budget + 1e-12) * total;
    double cum = 0.0, found = 0.0;
    for (std::size_t i : r.order) {
        cum += efforts[i];
        if (cum > limit) break;
        if (actuals[i]) found += 1.0;
    }
    return found / K;
}

// Defective modules first by ascending effort, then clean ones.
inline RankedList optimal_ranking(const std::vector<bool>& actuals, std::span<const double> efforts) {
    RankedList r;
    r.order.resize(actuals.size());
    std::iota(r.order.begin(), r.order.end(), std::size_t{0});
    std::sort(r.order.begin(), r.order.end(), [&](std::size_t a, std::size_t b) {
        if (actuals[a] != actuals[b]) return static_cast<bool>(actuals[a]);
        if (efforts[a] != efforts[b]) return efforts[a] < efforts[b];
        return a < b;
    });
    return r;
}

// Clean modules first, then defective ones by descending effort.
inline RankedList worst_ranking(const std::vector<bool>& actuals, std::span<const double> efforts) {
    RankedList r;
    r.order.resize(actuals.size());
    std::iota(r.order.begin(), r.order.end(), std::size_t{0});
    std::sort(r.order.begin(), r.order.end(), [&](std::size_t a, std::size_t b) {
        if (actuals[a] != actuals[b]) return static_cast<bool>(actuals[b]);
        if (actuals[a] && efforts[a] != efforts[b]) return efforts[a] > efforts[b];
        if (!actuals[a] && efforts[a] != efforts[b]) return efforts[a] < efforts[b];
        return a < b;
    });
    return r;
}

inline double popt(const RankedList& r, const std::vector<bool>& actuals,
                   std::span<const double> efforts) {
    const double model = ce_curve(r, actuals, efforts).area();
    const double best = ce_curve(optimal_ranking(actuals, efforts), actuals, efforts).area();
    const double worst = ce_curve(worst_ranking(actuals, efforts), actuals, efforts).area();
    const double span = best - worst;
    if (!(span > 1e-15)) throw DomainError("degenerate normalization: optimal and worst areas coincide");
    return 1.0 - (best - model) / span;
}

// Clean modules inspected before the first defective one. Without any
// defective module the whole list is false alarms: returns the module count.
inline std::size_t ifa(const RankedList& r, const std::vector<bool>& actuals) {
    std::size_t count = 0;
    for (std::size_t i : r.order) {
        if (i >= actuals.size()) throw DomainError("ranking index out of range");
        if (actuals[i]) return count;
        ++count;
    }
    return count;
}

} // namespace effortrank
