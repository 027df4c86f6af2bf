#pragma once

// Slow, obviously-correct reference implementations used to check the
// library. Nothing here shares code with include/effortrank.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <vector>

namespace oracle {

// Recall of a CE curve at effort fraction x, by walking the ranking.
inline double curve_at(const std::vector<std::size_t>& order, const std::vector<bool>& defective,
                       const std::vector<double>& effort, double x) {
    double total = 0.0, k = 0.0;
    for (std::size_t i = 0; i < effort.size(); ++i) {
        total += effort[i];
        if (defective[i]) k += 1.0;
    }
    double left = 0.0, found = 0.0;
    for (std::size_t i : order) {
        const double right = left + effort[i] / total;
        const double after = found + (defective[i] ? 1.0 : 0.0);
        if (x <= right) return (found + (after - found) * (x - left) / (right - left)) / k;
        left = right;
        found = after;
    }
    return found / k;
}

// Midpoint rectangle sum over each segment, refined until two successive
// refinements agree.
inline double curve_area(const std::vector<std::size_t>& order, const std::vector<bool>& defective,
                         const std::vector<double>& effort) {
    double total = 0.0;
    for (double e : effort) total += e;
    double area = 0.0, left = 0.0;
    for (std::size_t i : order) {
        const double width = effort[i] / total;
        double previous = -1.0;
        for (int m = 1; m <= 1 << 12; m *= 2) {
            double s = 0.0;
            for (int j = 0; j < m; ++j)
                s += curve_at(order, defective, effort, left + width * (j + 0.5) / m) * width / m;
            if (std::abs(s - previous) < 1e-13) {
                previous = s;
                break;
            }
            previous = s;
        }
        area += previous;
        left += width;
    }
    return area;
}

// Popt from an explicit scan over every permutation for the optimal and
// worst areas.
inline double popt(const std::vector<std::size_t>& order, const std::vector<bool>& defective,
                   const std::vector<double>& effort) {
    std::vector<std::size_t> perm(effort.size());
    std::iota(perm.begin(), perm.end(), std::size_t{0});
    double best = -1.0, worst = 2.0;
    do {
        const double a = curve_area(perm, defective, effort);
        best = std::max(best, a);
        worst = std::min(worst, a);
    } while (std::next_permutation(perm.begin(), perm.end()));
    return 1.0 - (best - curve_area(order, defective, effort)) / (best - worst);
}

// Largest prefix of the ranking whose effort stays within the budget.
inline double recall(const std::vector<std::size_t>& order, const std::vector<bool>& defective,
                     const std::vector<double>& effort, double budget) {
    double total = 0.0, k = 0.0;
    for (std::size_t i = 0; i < effort.size(); ++i) {
        total += effort[i];
        if (defective[i]) k += 1.0;
    }
    double best = 0.0;
    for (std::size_t len = 0; len <= order.size(); ++len) {
        double spent = 0.0, found = 0.0;
        for (std::size_t j = 0; j < len; ++j) {
            spent += effort[order[j]];
            if (defective[order[j]]) found += 1.0;
        }
        if (spent <= budget * total * (1.0 + 1e-12)) best = found / k;
    }
    return best;
}

// Two-sided Wilcoxon signed-rank p-value by enumerating all 2^n sign
// assignments of the non-zero differences.
inline double wilcoxon_p(const std::vector<double>& a, const std::vector<double>& b) {
    std::vector<double> d;
    for (std::size_t i = 0; i < a.size(); ++i)
        if (a[i] - b[i] != 0.0) d.push_back(a[i] - b[i]);
    const std::size_t n = d.size();
    std::vector<double> rank(n);
    for (std::size_t i = 0; i < n; ++i) {
        double below = 0.0, equal = 0.0;
        for (std::size_t j = 0; j < n; ++j) {
            if (std::abs(d[j]) < std::abs(d[i])) below += 1.0;
            else if (std::abs(d[j]) == std::abs(d[i])) equal += 1.0;
        }
        rank[i] = below + (equal + 1.0) / 2.0;
    }
    double total = 0.0, observed = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        total += rank[i];
        if (d[i] > 0) observed += rank[i];
    }
    const double dev = std::abs(2.0 * observed - total);
    std::uint64_t extreme = 0;
    for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << n); ++mask) {
        double w = 0.0;
        for (std::size_t i = 0; i < n; ++i)
            if (mask >> i & 1) w += rank[i];
        if (std::abs(2.0 * w - total) >= dev - 1e-9) ++extreme;
    }
    return static_cast<double>(extreme) / static_cast<double>(std::uint64_t{1} << n);
}

inline double cliffs_delta(const std::vector<double>& x, const std::vector<double>& y) {
    double s = 0.0;
    for (double a : x)
        for (double b : y) s += a > b ? 1.0 : a < b ? -1.0 : 0.0;
    return s / static_cast<double>(x.size() * y.size());
}

// Benjamini-Hochberg by definition: min over j >= rank(i) of p_(j) m / j.
inline std::vector<double> bh(const std::vector<double>& p) {
    const std::size_t m = p.size();
    std::vector<double> out(m);
    for (std::size_t i = 0; i < m; ++i) {
        double best = 1.0;
        for (std::size_t j = 0; j < m; ++j) {
            if (p[j] < p[i]) continue;
            std::size_t rank = 0;
            for (std::size_t k = 0; k < m; ++k)
                if (p[k] < p[j] || (p[k] == p[j] && k <= j)) ++rank;
            best = std::min(best, p[j] * static_cast<double>(m) / static_cast<double>(rank));
        }
        out[i] = best;
    }
    return out;
}

} // namespace oracle
