#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <optional>
#include <vector>

#include "effortrank/learners/model.hpp"
#include "effortrank/random.hpp"

namespace effortrank::learners {

struct TreeParams {
    SplitCriterion criterion = SplitCriterion::Entropy;
    std::optional<int> max_depth;
    std::size_t min_samples_split = 2;
    std::size_t min_samples_leaf = 1;
    double leaf_smoothing = 2.0;
    std::size_t features_per_split = 0; // 0 = all features
};

namespace detail {

inline double impurity(SplitCriterion c, double pos, double n) {
    if (n <= 0.0) return 0.0;
    const double p = pos / n;
    if (c == SplitCriterion::Gini) return 2.0 * p * (1.0 - p);
    double h = 0.0;
    if (p > 0.0) h -= p * std::log2(p);
    if (p < 1.0) h -= (1.0 - p) * std::log2(1.0 - p);
    return h;
}

} // namespace detail

// Binary classification tree over a standardized feature matrix. Samples may
// repeat (bootstrap draws) and are counted with multiplicity.
class Tree {
public:
    static Tree grow(const Matrix& x, const std::vector<bool>& y, std::vector<std::size_t> sample,
                     const TreeParams& params, Rng* rng = nullptr) {
        Tree t;
        std::size_t root_pos = 0;
        for (auto i : sample) root_pos += y[i] ? 1 : 0;
        t.prior_ = static_cast<double>(root_pos) / static_cast<double>(sample.size());

        struct Work {
            std::vector<std::size_t> sample;
            int depth;
            std::size_t node;
        };
        std::vector<Work> stack;
        t.nodes_.push_back({});
        stack.push_back({std::move(sample), 0, 0});

        std::vector<std::size_t> feature_pool(x.cols);
        while (!stack.empty()) {
            Work w = std::move(stack.back());
            stack.pop_back();
            const double n = static_cast<double>(w.sample.size());
            std::size_t pos = 0;
            for (auto i : w.sample) pos += y[i] ? 1 : 0;
            t.nodes_[w.node].prob =
                (static_cast<double>(pos) + params.leaf_smoothing * t.prior_) /
                (n + params.leaf_smoothing);

            const bool pure = pos == 0 || pos == w.sample.size();
            const bool depth_limited = params.max_depth && w.depth >= *params.max_depth;
            if (pure || depth_limited || w.sample.size() < params.min_samples_split) continue;

            std::iota(feature_pool.begin(), feature_pool.end(), std::size_t{0});
            std::size_t candidates = x.cols;
            if (params.features_per_split > 0 && params.features_per_split < x.cols && rng) {
                candidates = params.features_per_split;
                for (std::size_t j = 0; j < candidates; ++j)
                    std::swap(feature_pool[j], feature_pool[j + rng->index(x.cols - j)]);
                std::sort(feature_pool.begin(), feature_pool.begin() + static_cast<std::ptrdiff_t>(candidates));
            }

            const auto split = best_split(x, y, w.sample, pos,
                                          std::span(feature_pool.data(), candidates), params);
            if (!split) continue;

            std::vector<std::size_t> left, right;
            for (auto i : w.sample) (x.at(i, split->feature) <= split->threshold ? left : right).push_back(i);
            const std::size_t li = t.nodes_.size();
            t.nodes_.push_back({});
            t.nodes_.push_back({});
            auto& node = t.nodes_[w.node];
            node.feature = static_cast<int>(split->feature);
            node.threshold = split->threshold;
            node.left = li;
            node.right = li + 1;
            stack.push_back({std::move(right), w.depth + 1, li + 1});
            stack.push_back({std::move(left), w.depth + 1, li});
        }
        return t;
    }

    double predict(std::span<const double> z) const {
        std::size_t i = 0;
        while (nodes_[i].feature >= 0)
            i = z[static_cast<std::size_t>(nodes_[i].feature)] <= nodes_[i].threshold ? nodes_[i].left
                                                                                        : nodes_[i].right;
        return nodes_[i].prob;
    }

    std::size_t node_count() const noexcept { return nodes_.size(); }

private:
    struct Node {
        int feature = -1;
        double threshold = 0.0;
        std::size_t left = 0;
        std::size_t right = 0;
        double prob = 0.0;
    };

    struct Split {
        std::size_t feature;
        double threshold;
    };

    static std::optional<Split> best_split(const Matrix& x, const std::vector<bool>& y,
                                           const std::vector<std::size_t>& sample, std::size_t pos,
                                           std::span<const std::size_t> features,
                                           const TreeParams& params) {
        const double n = static_cast<double>(sample.size());
        const double parent = detail::impurity(params.criterion, static_cast<double>(pos), n);
        double best_gain = 1e-12;
        std::optional<Split> best;
        std::vector<std::size_t> order(sample);
        for (std::size_t f : features) {
            std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
                const double va = x.at(a, f), vb = x.at(b, f);
                return va < vb || (va == vb && a < b);
            });
            double left_pos = 0.0;
            for (std::size_t t = 0; t + 1 < order.size(); ++t) {
                left_pos += y[order[t]] ? 1.0 : 0.0;
                const double a = x.at(order[t], f), b = x.at(order[t + 1], f);
                if (!(a < b)) continue;
                const std::size_t nl = t + 1, nr = order.size() - nl;
                if (nl < params.min_samples_leaf || nr < params.min_samples_leaf) continue;
                const double dl = static_cast<double>(nl), dr = static_cast<double>(nr);
                const double child =
                    (dl * detail::impurity(params.criterion, left_pos, dl) +
                     dr * detail::impurity(params.criterion, static_cast<double>(pos) - left_pos, dr)) /
                    n;
                const double gain = parent - child;
                if (gain > best_gain) {
                    best_gain = gain;
                    double thr = a + (b - a) / 2.0;
                    if (!(thr < b)) thr = a;
                    best = Split{f, thr};
                }
            }
        }
        return best;
    }

    std::vector<Node> nodes_;
    double prior_ = 0.0;
};

inline TreeParams tree_params(const LearnerSpec& spec) {
    TreeParams p;
    p.criterion = spec.split_criterion;
    p.max_depth = spec.max_depth;
    p.min_samples_split = static_cast<std::size_t>(spec.min_samples_split);
    p.min_samples_leaf = static_cast<std::size_t>(spec.min_samples_leaf);
    p.leaf_smoothing = spec.leaf_smoothing;
    return p;
}

class DecisionTreeModel final : public detail::ModelImpl {
public:
    DecisionTreeModel(const LearnerSpec& spec, const Dataset& d) : standardizer_(d) {
        const Matrix x = standardizer_.transform(d);
        std::vector<std::size_t> all(d.size());
        std::iota(all.begin(), all.end(), std::size_t{0});
        tree_ = Tree::grow(x, d.labels(), std::move(all), tree_params(spec));
    }

    double predict_row(std::span<const double> raw) const override {
        std::vector<double> z(raw.size());
        standardizer_.apply(raw, z);
        return tree_.predict(z);
    }

private:
    Standardizer standardizer_;
    Tree tree_;
};

// Forest of trees grown on class-stratified bootstrap samples (each class is
// resampled to its own size, so every tree sees the training prior) with
// ceil(sqrt(p)) candidate features per split. Leaf probabilities are averaged.
class RandomForestModel final : public detail::ModelImpl {
public:
    RandomForestModel(const LearnerSpec& spec, const Dataset& d, std::uint64_t seed)
        : standardizer_(d) {
        const Matrix x = standardizer_.transform(d);
        const auto y = d.labels();
        std::vector<std::size_t> pos, neg;
        for (std::size_t i = 0; i < y.size(); ++i) (y[i] ? pos : neg).push_back(i);

        TreeParams params = tree_params(spec);
        params.features_per_split =
            static_cast<std::size_t>(std::ceil(std::sqrt(static_cast<double>(x.cols))));
        trees_.reserve(static_cast<std::size_t>(spec.tree_count));
        for (int t = 0; t < spec.tree_count; ++t) {
            Rng rng(child_seed(seed, static_cast<std::uint64_t>(t)));
            std::vector<std::size_t> sample;
            sample.reserve(y.size());
            for (const auto* cls : {&pos, &neg})
                for (std::size_t k = 0; k < cls->size(); ++k)
                    sample.push_back((*cls)[rng.index(cls->size())]);
            trees_.push_back(Tree::grow(x, y, std::move(sample), params, &rng));
        }
    }

    double predict_row(std::span<const double> raw) const override {
        std::vector<double> z(raw.size());
        standardizer_.apply(raw, z);
        double s = 0.0;
        for (const auto& t : trees_) s += t.predict(z);
        return s / static_cast<double>(trees_.size());
    }

private:
    Standardizer standardizer_;
    std::vector<Tree> trees_;
};

} // namespace effortrank::learners
