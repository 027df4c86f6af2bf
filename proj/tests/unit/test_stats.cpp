#include <catch_amalgamated.hpp>

#include <cmath>
#include <map>
#include <string>
#include <vector>

#include "effortrank/random.hpp"
#include "effortrank/stats.hpp"
#include "oracles.hpp"

using namespace effortrank;
using namespace effortrank::stats;
using Catch::Approx;

namespace {

// Differences drawn from a small grid so ties and zeros are common.
void random_pair(Rng& rng, std::size_t n, std::vector<double>& a, std::vector<double>& b) {
    a.clear();
    b.clear();
    for (std::size_t i = 0; i < n; ++i) {
        const double base = rng.uniform();
        const double d = rng.bernoulli(0.5) ? static_cast<double>(static_cast<int>(rng.index(7)) - 3) * 0.25
                                            : rng.normal();
        a.push_back(base + d);
        b.push_back(base);
    }
}

} // namespace

TEST_CASE("wilcoxon documented cases", "[stats]") {
    const std::vector<double> same = {1, 2, 3, 4, 5, 6};
    const auto none = wilcoxon_signed_rank(same, same);
    CHECK(none.p == 1.0);
    CHECK(none.z == 0.0);

    const std::vector<double> a = {1, 2, 3, 4, 5, 6}, zero(6, 0.0);
    const auto r = wilcoxon_signed_rank(a, zero);
    CHECK(r.p == 0.03125);
    CHECK(r.exact);
    CHECK(r.w == 21.0);
    CHECK(r.n == 6);

    const std::vector<double> four = {1, 2, 3, 4}, four0(4, 0.0);
    CHECK_THROWS_WITH(wilcoxon_signed_rank(four, four0), Catch::Matchers::ContainsSubstring("insufficient pairs"));
    const std::vector<double> shorter = {1, 2};
    CHECK_THROWS_AS(wilcoxon_signed_rank(a, shorter), DomainError);
}

TEST_CASE("exact wilcoxon matches sign enumeration", "[stats][oracle]") {
    Rng rng(8);
    std::vector<double> a, b;
    int tested = 0;
    for (int trial = 0; trial < 500; ++trial) {
        random_pair(rng, 5 + rng.index(8), a, b);
        std::size_t nonzero = 0;
        for (std::size_t i = 0; i < a.size(); ++i) nonzero += a[i] != b[i];
        if (nonzero < kMinWilcoxonPairs) continue;
        ++tested;
        const auto r = wilcoxon_signed_rank(a, b);
        REQUIRE(r.exact);
        CHECK(std::abs(r.p - oracle::wilcoxon_p(a, b)) <= 1e-12);
    }
    CHECK(tested > 300);
}

TEST_CASE("wilcoxon is symmetric in its arguments", "[stats][property]") {
    Rng rng(9);
    std::vector<double> a, b;
    for (int trial = 0; trial < 200; ++trial) {
        random_pair(rng, 8 + rng.index(40), a, b);
        std::size_t nonzero = 0;
        for (std::size_t i = 0; i < a.size(); ++i) nonzero += a[i] != b[i];
        if (nonzero < kMinWilcoxonPairs) continue;
        const auto ab = wilcoxon_signed_rank(a, b), ba = wilcoxon_signed_rank(b, a);
        CHECK(ab.p == Approx(ba.p).margin(1e-15));
        CHECK(ab.z == Approx(-ba.z).margin(1e-12));
        CHECK(ab.p > 0.0);
        CHECK(ab.p <= 1.0);
    }
}

TEST_CASE("normal approximation tracks the exact test for moderate n", "[stats]") {
    std::vector<double> a, zero(20, 0.0);
    for (int i = 1; i <= 20; ++i) a.push_back(i % 4 == 0 ? -i : i);
    const auto exact = wilcoxon_signed_rank(a, zero, {.exact_limit = 20});
    const auto approx = wilcoxon_signed_rank(a, zero, {.exact_limit = 12});
    CHECK(exact.exact);
    CHECK_FALSE(approx.exact);
    CHECK(approx.p == Approx(exact.p).margin(0.01));
}

TEST_CASE("one-sided alternatives split the two-sided p", "[stats]") {
    const std::vector<double> a = {1, 2, 3, 4, 5, 6}, zero(6, 0.0);
    CHECK(wilcoxon_signed_rank(a, zero, {.alternative = Alternative::Greater}).p == 1.0 / 64.0);
    CHECK(wilcoxon_signed_rank(a, zero, {.alternative = Alternative::Less}).p == 1.0);
}

TEST_CASE("fdr_adjust documented cases", "[stats]") {
    const std::vector<double> one = {0.04};
    CHECK(fdr_adjust(one) == std::vector<double>{0.04});
    const std::vector<double> three = {0.01, 0.02, 0.03};
    const auto adj = fdr_adjust(three);
    for (double v : adj) CHECK(v == Approx(0.03).epsilon(1e-15));
    const std::vector<double> ones(4, 1.0);
    CHECK(fdr_adjust(ones) == ones);
    const std::vector<double> bad = {0.1, 1.2};
    CHECK_THROWS_AS(fdr_adjust(bad), DomainError);
    CHECK(fdr_adjust(std::vector<double>{}).empty());

    const auto by = fdr_adjust(three, FdrMethod::BenjaminiYekutieli);
    for (double v : by) CHECK(v == Approx(0.03 * (1.0 + 0.5 + 1.0 / 3.0)).epsilon(1e-12));
}

TEST_CASE("fdr_adjust matches its definition and never lowers p", "[stats][property]") {
    Rng rng(10);
    for (int trial = 0; trial < 300; ++trial) {
        std::vector<double> p(1 + rng.index(25));
        for (double& v : p) v = rng.bernoulli(0.2) ? 0.05 : rng.uniform() * rng.uniform();
        const auto adj = fdr_adjust(p);
        const auto ref = oracle::bh(p);
        for (std::size_t i = 0; i < p.size(); ++i) {
            CHECK(adj[i] >= p[i]);
            CHECK(adj[i] <= 1.0);
            CHECK(adj[i] == Approx(ref[i]).margin(1e-15));
            for (std::size_t j = 0; j < p.size(); ++j)
                if (p[i] < p[j]) CHECK(adj[i] <= adj[j]);
        }
        const auto by = fdr_adjust(p, FdrMethod::BenjaminiYekutieli);
        for (std::size_t i = 0; i < p.size(); ++i) CHECK(by[i] >= adj[i]);
    }
}

TEST_CASE("effect size r and its bands", "[stats]") {
    CHECK(effect_size_r(0.0, 10).r == 0.0);
    CHECK(effect_size_r(0.0, 10).magnitude == Magnitude::Trivial);
    const auto e = effect_size_r(1.96, 100);
    CHECK(e.r == Approx(0.196).epsilon(1e-12));
    CHECK(e.magnitude == Magnitude::Small);
    CHECK(effect_size_r(-5.0, 25).r == 1.0);
    CHECK(effect_size_r(5.0, 25).magnitude == Magnitude::Large);
    CHECK(effect_size_r(3.0, 100).magnitude == Magnitude::Moderate);
    CHECK(effect_size_r(1.0, 100).magnitude == Magnitude::Small);
    CHECK(to_string(Magnitude::Moderate) == "moderate");
    CHECK_THROWS_AS(effect_size_r(1.0, 0), DomainError);
}

TEST_CASE("win/draw/loss counts", "[stats]") {
    const std::vector<double> a = {1, 2, 3}, b = {1, 1, 4};
    CHECK(wdl(a, b) == WinDrawLoss{1, 1, 1});
    CHECK(wdl(a, a) == WinDrawLoss{0, 3, 0});
    std::vector<double> hi(976, 1.0), lo(976, 0.5);
    CHECK(wdl(hi, lo) == WinDrawLoss{976, 0, 0});
    const std::vector<double> c = {1.0, 1.05, 0.9};
    CHECK(wdl(c, std::vector<double>{1.0, 1.0, 1.0}, 0.06) == WinDrawLoss{0, 2, 1});
}

TEST_CASE("win/draw/loss mirrors when arguments swap", "[stats][property]") {
    Rng rng(11);
    for (int trial = 0; trial < 100; ++trial) {
        std::vector<double> a, b;
        for (std::size_t i = 0, n = rng.index(30); i < n; ++i) {
            a.push_back(static_cast<double>(rng.index(4)));
            b.push_back(static_cast<double>(rng.index(4)));
        }
        const auto ab = wdl(a, b), ba = wdl(b, a);
        CHECK(ab.wins == ba.losses);
        CHECK(ab.losses == ba.wins);
        CHECK(ab.draws == ba.draws);
        CHECK(ab.total() == a.size());
    }
}

TEST_CASE("cliffs_delta agrees with pair counting", "[stats][oracle]") {
    Rng rng(12);
    for (int trial = 0; trial < 100; ++trial) {
        std::vector<double> x(1 + rng.index(20)), y(1 + rng.index(20));
        for (double& v : x) v = static_cast<double>(rng.index(6));
        for (double& v : y) v = static_cast<double>(rng.index(6));
        CHECK(cliffs_delta(x, y) == Approx(oracle::cliffs_delta(x, y)).margin(1e-15));
    }
}

TEST_CASE("scott_knott_esd grouping", "[stats]") {
    SECTION("identical scores form one group") {
        const std::vector<double> v = {0.1, 0.5, 0.9, 0.3};
        const auto g = scott_knott_esd({{"a", v}, {"b", v}, {"c", v}});
        CHECK(g.group_count() == 1);
    }
    SECTION("disjoint supports split in two") {
        Rng rng(13);
        std::vector<double> high, low;
        for (int i = 0; i < 30; ++i) {
            high.push_back(0.9 + 0.05 * rng.uniform());
            low.push_back(0.1 + 0.05 * rng.uniform());
        }
        CHECK(oracle::cliffs_delta(high, low) == 1.0);
        const auto g = scott_knott_esd({{"high", high}, {"low", low}});
        CHECK(g.group_count() == 2);
        CHECK(g.group_of("high") == 1);
        CHECK(g.group_of("low") == 2);
        CHECK(g.methods.front() == "high");
    }
    SECTION("single method") {
        const auto g = scott_knott_esd({{"only", {1.0, 2.0}}});
        CHECK(g.groups == std::vector<int>{1});
        CHECK_THROWS_AS(g.group_of("other"), DomainError);
    }
    SECTION("bad input") {
        CHECK_THROWS_AS(scott_knott_esd({}), DomainError);
        CHECK_THROWS_AS(scott_knott_esd({{"a", {1.0}}, {"b", {1.0, 2.0}}}), DomainError);
    }
}

TEST_CASE("scott_knott_esd groups are contiguous and label-free", "[stats][property]") {
    Rng rng(14);
    for (int trial = 0; trial < 50; ++trial) {
        std::map<std::string, std::vector<double>> samples, renamed;
        const std::size_t methods = 2 + rng.index(6), n = 5 + rng.index(20);
        std::map<std::string, std::string> alias;
        for (std::size_t m = 0; m < methods; ++m) {
            const double centre = static_cast<double>(rng.index(4));
            std::vector<double> v(n);
            for (double& x : v) x = centre + rng.normal() * 0.7;
            samples["m" + std::to_string(m)] = v;
            const std::string other = "z" + std::to_string(methods - m);
            renamed[other] = v;
            alias["m" + std::to_string(m)] = other;
        }
        const auto g = scott_knott_esd(samples);
        const auto h = scott_knott_esd(renamed);
        CHECK(g.groups.front() == 1);
        for (std::size_t i = 1; i < g.groups.size(); ++i) {
            CHECK(g.means[i] <= g.means[i - 1]);
            CHECK((g.groups[i] == g.groups[i - 1] || g.groups[i] == g.groups[i - 1] + 1));
        }
        for (const auto& [name, other] : alias) CHECK(g.group_of(name) == h.group_of(other));
    }
}
