#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <numeric>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "effortrank/error.hpp"

namespace effortrank::stats {

enum class Alternative { TwoSided, Greater, Less };

struct WilcoxonOptions {
    Alternative alternative = Alternative::TwoSided;
    // Exact null distribution up to this many non-zero differences, normal
    // approximation (tie and continuity corrected) above it.
    std::size_t exact_limit = 12;
};

struct WilcoxonResult {
    double w = 0.0;        // sum of ranks of positive differences (a - b > 0)
    double z = 0.0;        // continuity-corrected normal score, sign follows a - b
    double p = 1.0;
    std::size_t n = 0;     // non-zero differences used
    bool exact = false;
};

inline constexpr std::size_t kMinWilcoxonPairs = 5;
inline constexpr std::size_t kMaxExactPairs = 50;

inline double normal_cdf(double z) { return 0.5 * std::erfc(-z / std::sqrt(2.0)); }

// Average ranks of |d|, doubled so ties stay integral.
inline std::vector<std::int64_t> doubled_ranks(std::span<const double> abs_diffs) {
    const std::size_t n = abs_diffs.size();
    std::vector<std::size_t> idx(n);
    std::iota(idx.begin(), idx.end(), std::size_t{0});
    std::sort(idx.begin(), idx.end(),
              [&](std::size_t a, std::size_t b) { return abs_diffs[a] < abs_diffs[b]; });
    std::vector<std::int64_t> r2(n);
    for (std::size_t i = 0; i < n;) {
        std::size_t j = i;
        while (j + 1 < n && abs_diffs[idx[j + 1]] == abs_diffs[idx[i]]) ++j;
        // positions i..j (0-based) share rank ((i+1)+(j+1))/2
        const auto twice = static_cast<std::int64_t>(i + j + 2);
        for (std::size_t k = i; k <= j; ++k) r2[idx[k]] = twice;
        i = j + 1;
    }
    return r2;
}

// Wilcoxon signed-rank test of a against b (paired). Zero differences are
// dropped. When every difference is zero the result is p = 1, z = 0.
inline WilcoxonResult wilcoxon_signed_rank(std::span<const double> a, std::span<const double> b,
                                           WilcoxonOptions opts = {}) {
    if (a.size() != b.size()) throw DomainError("wilcoxon: samples differ in length");
    std::vector<double> diffs;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double d = a[i] - b[i];
        if (std::isnan(d)) throw DomainError("wilcoxon: NaN in sample");
        if (d != 0.0) diffs.push_back(d);
    }
    WilcoxonResult res;
    res.n = diffs.size();
    if (diffs.empty()) return res;
    if (diffs.size() < kMinWilcoxonPairs)
        throw DomainError("insufficient pairs: " + std::to_string(diffs.size()) +
                          " non-zero differences, need " + std::to_string(kMinWilcoxonPairs));

    std::vector<double> absd(diffs.size());
    for (std::size_t i = 0; i < diffs.size(); ++i) absd[i] = std::abs(diffs[i]);
    const auto r2 = doubled_ranks(absd);
    std::int64_t w2 = 0, total2 = 0;
    for (std::size_t i = 0; i < diffs.size(); ++i) {
        total2 += r2[i];
        if (diffs[i] > 0) w2 += r2[i];
    }
    res.w = static_cast<double>(w2) / 2.0;

    const double n = static_cast<double>(res.n);
    const double mean = n * (n + 1.0) / 4.0;
    double tie_term = 0.0;
    {
        std::vector<double> sorted(absd);
        std::sort(sorted.begin(), sorted.end());
        for (std::size_t i = 0; i < sorted.size();) {
            std::size_t j = i;
            while (j + 1 < sorted.size() && sorted[j + 1] == sorted[i]) ++j;
            const double t = static_cast<double>(j - i + 1);
            tie_term += t * t * t - t;
            i = j + 1;
        }
    }
    const double sd = std::sqrt(n * (n + 1.0) * (2.0 * n + 1.0) / 24.0 - tie_term / 48.0);
    const double dev = res.w - mean;
    const double correction = dev > 0 ? 0.5 : (dev < 0 ? -0.5 : 0.0);
    res.z = sd > 0.0 ? (dev - correction) / sd : 0.0;

    if (res.n <= std::min(opts.exact_limit, kMaxExactPairs)) {
        // Null distribution of the doubled W+ by dynamic programming over
        // the 2^n equally likely sign assignments; every probability is a
        // multiple of 2^-n and exact in double precision.
        std::vector<double> dist(static_cast<std::size_t>(total2) + 1, 0.0);
        dist[0] = 1.0;
        std::int64_t reach = 0;
        for (auto r : r2) {
            reach += r;
            for (std::int64_t s = reach; s >= 0; --s) {
                const double keep = dist[static_cast<std::size_t>(s)];
                const double add = s >= r ? dist[static_cast<std::size_t>(s - r)] : 0.0;
                dist[static_cast<std::size_t>(s)] = 0.5 * (keep + add);
            }
        }
        double p = 0.0;
        for (std::int64_t s = 0; s <= total2; ++s) {
            const double prob = dist[static_cast<std::size_t>(s)];
            bool extreme = false;
            switch (opts.alternative) {
            case Alternative::TwoSided:
                extreme = std::llabs(2 * s - total2) >= std::llabs(2 * w2 - total2);
                break;
            case Alternative::Greater: extreme = s >= w2; break;
            case Alternative::Less: extreme = s <= w2; break;
            }
            if (extreme) p += prob;
        }
        res.p = std::min(1.0, p);
        res.exact = true;
        return res;
    }

    switch (opts.alternative) {
    case Alternative::TwoSided: res.p = std::min(1.0, std::erfc(std::abs(res.z) / std::sqrt(2.0))); break;
    case Alternative::Greater: res.p = 1.0 - normal_cdf((dev - 0.5) / sd); break;
    case Alternative::Less: res.p = normal_cdf((dev + 0.5) / sd); break;
    }
    return res;
}

enum class FdrMethod { BenjaminiHochberg, BenjaminiYekutieli };

// Step-up adjusted p-values in input order, clipped at 1.
inline std::vector<double> fdr_adjust(std::span<const double> pvals,
                                      FdrMethod method = FdrMethod::BenjaminiHochberg) {
    const std::size_t m = pvals.size();
    for (double p : pvals)
        if (!(p >= 0.0 && p <= 1.0)) throw DomainError("p-values must lie in [0,1]");
    std::vector<double> out(m);
    if (m == 0) return out;
    double c = 1.0;
    if (method == FdrMethod::BenjaminiYekutieli) {
        c = 0.0;
        for (std::size_t i = 1; i <= m; ++i) c += 1.0 / static_cast<double>(i);
    }
    std::vector<std::size_t> idx(m);
    std::iota(idx.begin(), idx.end(), std::size_t{0});
    std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return pvals[a] < pvals[b]; });
    double running = 1.0;
    for (std::size_t k = m; k-- > 0;) {
        const double adj = pvals[idx[k]] * c * static_cast<double>(m) / static_cast<double>(k + 1);
        running = std::min(running, adj);
        out[idx[k]] = std::min(1.0, std::max(running, pvals[idx[k]]));
    }
    return out;
}

enum class Magnitude { Trivial, Small, Moderate, Large };

inline std::string_view to_string(Magnitude m) {
    switch (m) {
    case Magnitude::Trivial: return "trivial";
    case Magnitude::Small: return "small";
    case Magnitude::Moderate: return "moderate";
    case Magnitude::Large: return "large";
    }
    return "?";
}

struct EffectSize {
    double r = 0.0;
    Magnitude magnitude = Magnitude::Trivial;
};

// r = |z| / sqrt(n); 0.1, 0.3 and 0.5 open the small, moderate and large bands.
inline EffectSize effect_size_r(double z, std::size_t n) {
    if (n == 0) throw DomainError("effect size needs n >= 1");
    EffectSize e;
    e.r = std::abs(z) / std::sqrt(static_cast<double>(n));
    e.magnitude = e.r >= 0.5   ? Magnitude::Large
                  : e.r >= 0.3 ? Magnitude::Moderate
                  : e.r >= 0.1 ? Magnitude::Small
                               : Magnitude::Trivial;
    return e;
}

struct WinDrawLoss {
    std::size_t wins = 0;
    std::size_t draws = 0;
    std::size_t losses = 0;

    std::size_t total() const noexcept { return wins + draws + losses; }
    bool operator==(const WinDrawLoss&) const = default;
};

inline WinDrawLoss wdl(std::span<const double> a, std::span<const double> b, double epsilon = 0.0) {
    if (a.size() != b.size()) throw DomainError("wdl: samples differ in length");
    WinDrawLoss r;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double d = a[i] - b[i];
        if (d > epsilon) ++r.wins;
        else if (std::abs(d) <= epsilon) ++r.draws;
        else ++r.losses;
    }
    return r;
}

// Cliff's delta: (#{x > y} - #{x < y}) / (|x| |y|) over all cross pairs.
inline double cliffs_delta(std::span<const double> x, std::span<const double> y) {
    if (x.empty() || y.empty()) throw DomainError("cliffs_delta needs non-empty samples");
    std::vector<double> ys(y.begin(), y.end());
    std::sort(ys.begin(), ys.end());
    double greater = 0.0, less = 0.0;
    for (double v : x) {
        const auto lo = std::lower_bound(ys.begin(), ys.end(), v);
        const auto hi = std::upper_bound(ys.begin(), ys.end(), v);
        less += static_cast<double>(ys.end() - hi);
        greater += static_cast<double>(lo - ys.begin());
    }
    return (greater - less) / (static_cast<double>(x.size()) * static_cast<double>(y.size()));
}

inline constexpr double kNegligibleDelta = 0.147;

struct SKGrouping {
    std::vector<std::string> methods; // sorted by mean, descending
    std::vector<double> means;
    std::vector<int> groups;          // 1 = best; contiguous along `methods`

    int group_of(std::string_view method) const {
        for (std::size_t i = 0; i < methods.size(); ++i)
            if (methods[i] == method) return groups[i];
        throw DomainError("method '" + std::string(method) + "' not in grouping");
    }

    int group_count() const { return groups.empty() ? 0 : groups.back(); }
};

// Scott-Knott clustering of method means with an effect-size merge rule:
// each block is split where the between-group sum of squares of method
// means is largest, and the split is kept only when Cliff's delta between
// the pooled scores of the two sides is non-negligible.
inline SKGrouping scott_knott_esd(const std::map<std::string, std::vector<double>>& samples,
                                  double negligible = kNegligibleDelta) {
    if (samples.empty()) throw DomainError("scott_knott_esd needs at least one method");
    const std::size_t len = samples.begin()->second.size();
    for (const auto& [name, v] : samples) {
        if (v.size() != len) throw DomainError("scott_knott_esd: unequal sample lengths");
        if (v.empty()) throw DomainError("scott_knott_esd: empty sample for " + name);
    }

    struct Entry {
        const std::string* name;
        const std::vector<double>* scores;
        double mean;
    };
    std::vector<Entry> e;
    for (const auto& [name, v] : samples)
        e.push_back({&name, &v, std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(len)});
    // Equal means are ordered by their score vectors before their names, so
    // renaming methods cannot change the grouping.
    std::sort(e.begin(), e.end(), [](const Entry& a, const Entry& b) {
        if (a.mean != b.mean) return a.mean > b.mean;
        if (*a.scores != *b.scores) return *a.scores > *b.scores;
        return *a.name < *b.name;
    });

    SKGrouping g;
    for (const auto& x : e) {
        g.methods.push_back(*x.name);
        g.means.push_back(x.mean);
    }
    g.groups.assign(e.size(), 0);

    int next_group = 1;
    const auto pooled = [&](std::size_t lo, std::size_t hi) {
        std::vector<double> v;
        for (std::size_t i = lo; i < hi; ++i) v.insert(v.end(), e[i].scores->begin(), e[i].scores->end());
        return v;
    };
    const auto partition = [&](auto&& self, std::size_t lo, std::size_t hi) -> void {
        const auto assign = [&] {
            for (std::size_t i = lo; i < hi; ++i) g.groups[i] = next_group;
            ++next_group;
        };
        if (hi - lo < 2) return assign();
        double grand = 0.0;
        for (std::size_t i = lo; i < hi; ++i) grand += e[i].mean;
        grand /= static_cast<double>(hi - lo);
        double best = -1.0;
        std::size_t cut = lo + 1;
        for (std::size_t k = lo + 1; k < hi; ++k) {
            double left_sum = 0.0, right_sum = 0.0;
            for (std::size_t i = lo; i < k; ++i) left_sum += e[i].mean;
            for (std::size_t i = k; i < hi; ++i) right_sum += e[i].mean;
            const double n1 = static_cast<double>(k - lo), n2 = static_cast<double>(hi - k);
            const double m1 = left_sum / n1, m2 = right_sum / n2;
            const double between = n1 * (m1 - grand) * (m1 - grand) + n2 * (m2 - grand) * (m2 - grand);
            if (between > best + 1e-15) {
                best = between;
                cut = k;
            }
        }
        const double delta = cliffs_delta(pooled(lo, cut), pooled(cut, hi));
        if (std::abs(delta) < negligible) return assign();
        self(self, lo, cut);
        self(self, cut, hi);
    };
    partition(partition, 0, e.size());
    return g;
}

} // namespace effortrank::stats
