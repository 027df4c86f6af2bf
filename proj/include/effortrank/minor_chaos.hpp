#pragma once

// Worked example of the ranking instability of prob/effort scores: one
// defective module's predicted probability moves from 0.02 to 0.01, its
// prob/effort ratio halves from 0.0025 to 0.00125 and it drops behind a large
// clean module (ratio 0.002). Recall at 20% effort falls from 1 to 2/3 under
// prob_loc, while the zeta-lifted ea_z score keeps the module in front.

#include <string>
#include <vector>

#include "effortrank/metrics.hpp"
#include "effortrank/strategies.hpp"

namespace effortrank::minor_chaos {

struct Fixture {
    std::vector<std::string> names;
    std::vector<double> efforts;
    std::vector<bool> defective;
    std::vector<double> probs_before; // candidate at p = 0.02
    std::vector<double> probs_after;  // candidate at p = 0.01
    std::size_t candidate = 2;
    std::size_t big_module = 3;
};

inline Fixture fixture() {
    Fixture f;
    f.names = {"A", "B", "candidate", "big", "C1", "C2", "C3", "C4"};
    f.efforts = {10, 8, 8, 100, 100, 100, 100, 100};
    f.defective = {true, true, true, false, false, false, false, false};
    f.probs_before = {0.9, 0.8, 0.02, 0.2, 0.04, 0.04, 0.04, 0.04};
    f.probs_after = f.probs_before;
    f.probs_after[f.candidate] = 0.01;
    return f;
}

struct Walkthrough {
    Strategy strategy;
    std::string variant; // "before" or "after"
    std::vector<double> scores;
    RankedList ranking;
    double recall20 = 0.0;
    double popt = 0.0;
};

inline std::vector<Walkthrough> walkthrough(double zeta = kDefaultZeta) {
    const auto f = fixture();
    std::vector<Walkthrough> out;
    for (Strategy s : {Strategy::ProbLoc, Strategy::EaZ}) {
        for (const auto& [variant, probs] :
             {std::pair{std::string("before"), &f.probs_before},
              std::pair{std::string("after"), &f.probs_after}}) {
            const auto scored = score(s, *probs, f.efforts, {.threshold = kDefaultThreshold, .zeta = zeta});
            Walkthrough w{s, variant, scored.scores, rank(scored)};
            w.recall20 = recall_at(w.ranking, f.defective, f.efforts, kDefaultBudget);
            w.popt = popt(w.ranking, f.defective, f.efforts);
            out.push_back(std::move(w));
        }
    }
    return out;
}

} // namespace effortrank::minor_chaos
