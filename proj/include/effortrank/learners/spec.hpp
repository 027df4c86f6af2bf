#pragma once

#include <memory>
#include <optional>
#include <string>

#include "effortrank/error.hpp"

namespace effortrank::learners {

enum class LearnerKind {
    LogisticRegression,
    NaiveBayes,
    KNN,
    DecisionTree,
    RandomForest,
    UnderBagging,
    RUSBoost,
    External,
};

enum class SplitCriterion { Entropy, Gini };

inline const char* to_string(LearnerKind k) {
    switch (k) {
    case LearnerKind::LogisticRegression: return "LogisticRegression";
    case LearnerKind::NaiveBayes: return "NaiveBayes";
    case LearnerKind::KNN: return "KNN";
    case LearnerKind::DecisionTree: return "DecisionTree";
    case LearnerKind::RandomForest: return "RandomForest";
    case LearnerKind::UnderBagging: return "UnderBagging";
    case LearnerKind::RUSBoost: return "RUSBoost";
    case LearnerKind::External: return "External";
    }
    return "?";
}

inline bool is_ensemble(LearnerKind k) {
    return k == LearnerKind::UnderBagging || k == LearnerKind::RUSBoost;
}

struct LearnerSpec {
    LearnerKind kind = LearnerKind::LogisticRegression;

    // KNN
    int k = 8;

    // Trees and forests. No max_depth means grow until pure or too small.
    SplitCriterion split_criterion = SplitCriterion::Entropy;
    std::optional<int> max_depth;
    int min_samples_split = 2;
    int min_samples_leaf = 1;
    // Leaf estimate is (pos + m * prior) / (n + m) with prior the tree's
    // root positive fraction; m = 2 on a balanced sample is Laplace.
    double leaf_smoothing = 2.0;
    int tree_count = 200;

    // Logistic regression (batch gradient descent on standardized inputs).
    int iterations = 500;
    double learning_rate = 0.1;
    double l2 = 1e-4;

    // Naive Bayes
    double variance_floor = 1e-9;

    // Ensembles: base learner, imbalance ratio of the under-sampled bags and
    // the number of bags (UnderBagging) or boosting rounds (RUSBoost).
    std::shared_ptr<const LearnerSpec> base;
    double ir = 1.0;
    int members = 10;

    // External: probability file, or directory holding <dataset>.csv files.
    std::string external_source;

    void validate() const {
        switch (kind) {
        case LearnerKind::KNN:
            if (k < 1) throw ConfigError("KNN needs k >= 1");
            break;
        case LearnerKind::DecisionTree:
        case LearnerKind::RandomForest:
            if (tree_count < 1) throw ConfigError("random forest needs tree_count >= 1");
            if (max_depth && *max_depth < 0) throw ConfigError("max_depth must be >= 0");
            if (min_samples_leaf < 1 || min_samples_split < 2)
                throw ConfigError("tree needs min_samples_leaf >= 1 and min_samples_split >= 2");
            if (!(leaf_smoothing >= 0.0)) throw ConfigError("leaf_smoothing must be >= 0");
            break;
        case LearnerKind::LogisticRegression:
            if (iterations < 1 || !(learning_rate > 0.0) || !(l2 >= 0.0))
                throw ConfigError("logistic regression needs iterations >= 1, rate > 0, l2 >= 0");
            break;
        case LearnerKind::UnderBagging:
        case LearnerKind::RUSBoost:
            if (!base) throw ConfigError("ensemble learner needs a base learner");
            if (is_ensemble(base->kind) || base->kind == LearnerKind::External)
                throw ConfigError("ensemble base learner must be a plain in-repo learner");
            if (!(ir > 0.0)) throw ConfigError("ir must be > 0");
            if (members < 1) throw ConfigError("ensemble needs at least one member");
            base->validate();
            break;
        case LearnerKind::External:
            if (external_source.empty()) throw ConfigError("external learner needs a source path");
            break;
        case LearnerKind::NaiveBayes:
            if (!(variance_floor > 0.0)) throw ConfigError("variance_floor must be > 0");
            break;
        }
    }

    static LearnerSpec logistic() { return {}; }

    static LearnerSpec naive_bayes() {
        LearnerSpec s;
        s.kind = LearnerKind::NaiveBayes;
        return s;
    }

    static LearnerSpec knn(int k = 8) {
        LearnerSpec s;
        s.kind = LearnerKind::KNN;
        s.k = k;
        return s;
    }

    static LearnerSpec tree(SplitCriterion criterion = SplitCriterion::Entropy) {
        LearnerSpec s;
        s.kind = LearnerKind::DecisionTree;
        s.split_criterion = criterion;
        return s;
    }

    static LearnerSpec random_forest(int trees = 200) {
        LearnerSpec s;
        s.kind = LearnerKind::RandomForest;
        s.split_criterion = SplitCriterion::Gini;
        s.tree_count = trees;
        return s;
    }

    static LearnerSpec under_bagging(LearnerSpec base, int bags = 10, double ir = 1.0) {
        LearnerSpec s;
        s.kind = LearnerKind::UnderBagging;
        s.base = std::make_shared<const LearnerSpec>(std::move(base));
        s.members = bags;
        s.ir = ir;
        return s;
    }

    static LearnerSpec rus_boost(LearnerSpec base, int rounds = 10, double ir = 1.0) {
        LearnerSpec s = under_bagging(std::move(base), rounds, ir);
        s.kind = LearnerKind::RUSBoost;
        return s;
    }

    static LearnerSpec external(std::string source) {
        LearnerSpec s;
        s.kind = LearnerKind::External;
        s.external_source = std::move(source);
        return s;
    }
};

} // namespace effortrank::learners
