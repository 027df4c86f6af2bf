#pragma once

#include <cmath>
#include <cstdint>
#include <map>
#include <memory>
#include <string>
#include <vector>

#include "effortrank/learners/bayes.hpp"
#include "effortrank/learners/external.hpp"
#include "effortrank/learners/knn.hpp"
#include "effortrank/learners/linear.hpp"
#include "effortrank/learners/model.hpp"
#include "effortrank/learners/sampling.hpp"
#include "effortrank/learners/spec.hpp"
#include "effortrank/learners/tree.hpp"

namespace effortrank::learners {

inline TrainedModel train(const LearnerSpec& spec, const Dataset& d, std::uint64_t seed);

namespace detail {

// Weighted soft vote over member probabilities; UnderBagging uses unit
// weights (plain mean), RUSBoost the AdaBoost.M1 member weights.
class VotingModel final : public ModelImpl {
public:
    VotingModel(std::vector<TrainedModel> members, std::vector<double> weights)
        : members_(std::move(members)), weights_(std::move(weights)) {}

    double predict_row(std::span<const double>) const override {
        throw Error("ensemble predictions go through predict()");
    }

    std::vector<double> predict(const Dataset& d) const override {
        std::vector<double> acc(d.size(), 0.0);
        double total = 0.0;
        for (std::size_t m = 0; m < members_.size(); ++m) {
            const auto p = members_[m].predict_proba(d);
            for (std::size_t i = 0; i < p.size(); ++i) acc[i] += weights_[m] * p[i];
            total += weights_[m];
        }
        for (double& v : acc) v /= total;
        return acc;
    }

    std::span<const TrainedModel> members() const override { return members_; }
    std::span<const double> member_weights() const override { return weights_; }

private:
    std::vector<TrainedModel> members_;
    std::vector<double> weights_;
};

inline std::uint64_t bag_seed(std::uint64_t seed, int member) {
    return child_seed(seed, 2 * static_cast<std::uint64_t>(member));
}

inline std::uint64_t member_seed(std::uint64_t seed, int member) {
    return child_seed(seed, 2 * static_cast<std::uint64_t>(member) + 1);
}

inline std::shared_ptr<const ModelImpl> train_under_bagging(const LearnerSpec& spec,
                                                            const Dataset& d, std::uint64_t seed) {
    std::vector<TrainedModel> members;
    members.reserve(static_cast<std::size_t>(spec.members));
    for (int b = 0; b < spec.members; ++b) {
        const auto bag = make_under_bag_sample(d, spec.ir, bag_seed(seed, b));
        members.push_back(train(*spec.base, bag, member_seed(seed, b)));
    }
    std::vector<double> weights(members.size(), 1.0);
    return std::make_shared<VotingModel>(std::move(members), std::move(weights));
}

// RUSBoost: AdaBoost.M1 where every round fits the base learner on an
// under-sampled bag whose majority part is drawn in proportion to the
// current boosting weights. Errors are measured on the full training set
// with the 0.5 decision threshold. A round with error >= 0.5 ends boosting
// (it is kept, with unit weight, only if it is the first round).
inline std::shared_ptr<const ModelImpl> train_rus_boost(const LearnerSpec& spec, const Dataset& d,
                                                        std::uint64_t seed) {
    constexpr double kMinError = 1e-10;
    const auto labels = d.labels();
    const std::size_t n = d.size();
    std::vector<double> w(n, 1.0 / static_cast<double>(n));
    std::vector<TrainedModel> members;
    std::vector<double> alphas;
    for (int t = 0; t < spec.members; ++t) {
        const auto idx = under_bag_indices(labels, spec.ir, bag_seed(seed, t), w);
        auto model = train(*spec.base, d.subset(idx), member_seed(seed, t));
        const auto p = model.predict_proba(d);
        double err = 0.0;
        for (std::size_t i = 0; i < n; ++i)
            if ((p[i] >= 0.5) != labels[i]) err += w[i];
        if (err >= 0.5) {
            if (members.empty()) {
                members.push_back(std::move(model));
                alphas.push_back(1.0);
            }
            break;
        }
        const double e = std::max(err, kMinError);
        const double beta = e / (1.0 - e);
        members.push_back(std::move(model));
        alphas.push_back(std::log(1.0 / beta));
        if (err < kMinError) break;
        double total = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            if ((p[i] >= 0.5) == labels[i]) w[i] *= beta;
            total += w[i];
        }
        for (double& v : w) v /= total;
    }
    return std::make_shared<VotingModel>(std::move(members), std::move(alphas));
}

} // namespace detail

// Deterministic in (spec, d, seed).
inline TrainedModel train(const LearnerSpec& spec, const Dataset& d, std::uint64_t seed) {
    spec.validate();
    if (spec.kind != LearnerKind::External) {
        const auto pos = d.defective_count();
        if (pos == 0 || pos == d.size())
            throw DomainError("training data '" + d.name() +
                              "' has a single class; need defective and clean records");
    }
    std::shared_ptr<const detail::ModelImpl> impl;
    switch (spec.kind) {
    case LearnerKind::LogisticRegression: impl = std::make_shared<LogisticModel>(spec, d); break;
    case LearnerKind::NaiveBayes: impl = std::make_shared<NaiveBayesModel>(spec, d); break;
    case LearnerKind::KNN: impl = std::make_shared<KnnModel>(spec, d); break;
    case LearnerKind::DecisionTree: impl = std::make_shared<DecisionTreeModel>(spec, d); break;
    case LearnerKind::RandomForest:
        impl = std::make_shared<RandomForestModel>(spec, d, seed);
        break;
    case LearnerKind::UnderBagging: impl = detail::train_under_bagging(spec, d, seed); break;
    case LearnerKind::RUSBoost: impl = detail::train_rus_boost(spec, d, seed); break;
    case LearnerKind::External:
        impl = std::make_shared<ExternalModel>(spec.external_source);
        break;
    }
    return TrainedModel(spec.kind, d.feature_names(), seed, std::move(impl));
}

inline std::vector<double> predict_proba(const TrainedModel& m, const Dataset& d) {
    return m.predict_proba(d);
}

// Label is defective when probability >= threshold (boundary inclusive).
inline std::vector<bool> labels_from(std::span<const double> probs, double threshold) {
    if (!(threshold > 0.0 && threshold < 1.0))
        throw ConfigError("classification threshold must lie in (0,1)");
    std::vector<bool> out;
    out.reserve(probs.size());
    for (double p : probs) out.push_back(p >= threshold);
    return out;
}

inline std::vector<bool> predict_label(const TrainedModel& m, const Dataset& d,
                                       double threshold = 0.5) {
    return labels_from(m.predict_proba(d), threshold);
}

// Defaults for the learner zoo; each is overridable from the command line.
struct ZooOptions {
    int k = 8;
    double ir = 1.0;
    int rf_trees = 200;
    int ensemble_rf_trees = 50;
    int bags = 10;
    int rounds = 10;
    std::string external_dir = "external";
};

namespace detail {

inline std::optional<LearnerSpec> plain_learner(const std::string& tag, const ZooOptions& o,
                                                bool nested) {
    if (tag == "lr") return LearnerSpec::logistic();
    if (tag == "nb") return LearnerSpec::naive_bayes();
    if (tag == "knn" || tag == "ibk") return LearnerSpec::knn(o.k);
    if (tag == "c50") {
        auto s = LearnerSpec::tree(SplitCriterion::Entropy);
        s.min_samples_leaf = 2;
        return s;
    }
    if (tag == "cart") {
        auto s = LearnerSpec::tree(SplitCriterion::Gini);
        s.min_samples_split = 20;
        s.min_samples_leaf = 7;
        return s;
    }
    if (tag == "rf") return LearnerSpec::random_forest(nested ? o.ensemble_rf_trees : o.rf_trees);
    return std::nullopt;
}

} // namespace detail

// Learner tags: lr, nb, knn (ibk), c50, cart, rf, ubag_<base>, ubst_<base>
// with <base> one of the plain tags. svm, jrip, ubag_svm, ubst_svm and any
// "ext:<name>" tag read precomputed probabilities from
// <external_dir>/<tag>/<test dataset>.csv.
inline LearnerSpec make_learner_spec(const std::string& tag, const ZooOptions& o = {}) {
    const auto external = [&](const std::string& name) {
        return LearnerSpec::external((std::filesystem::path(o.external_dir) / name).string());
    };
    if (tag.starts_with("ext:")) return external(tag.substr(4));
    if (tag == "svm" || tag == "jrip" || tag == "ubag_svm" || tag == "ubst_svm") return external(tag);
    if (auto s = detail::plain_learner(tag, o, false)) return *s;
    for (const auto& [prefix, boosting] : {std::pair{"ubag_", false}, std::pair{"ubst_", true}}) {
        if (!tag.starts_with(prefix)) continue;
        auto base = detail::plain_learner(tag.substr(std::string(prefix).size()), o, true);
        if (!base) break;
        return boosting ? LearnerSpec::rus_boost(*base, o.rounds, o.ir)
                        : LearnerSpec::under_bagging(*base, o.bags, o.ir);
    }
    throw ConfigError("unknown learner tag '" + tag + "'");
}

} // namespace effortrank::learners
