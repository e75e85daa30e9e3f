#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "ehrvec/features.hpp"

namespace ehr {

enum class ClassifierKind { logistic_regression, linear_svm, mlp, knn };

std::string_view to_string(ClassifierKind k);

struct ClassifierSpec {
    ClassifierKind kind = ClassifierKind::logistic_regression;
    double l2 = 0.0;
    size_t hidden_size = 15;   // mlp
    size_t k_neighbors = 15;   // knn
    int max_epoch = 100;       // gradient-trained kinds
    uint64_t seed = 0;
    double rho = 0.95;
    double eps = 1e-6;
};

// Table-driven defaults per (classifier, feature-kind) cell.
ClassifierSpec default_spec(ClassifierKind kind, FeatureKind features);

using Rows = std::vector<std::vector<double>>;

// Rank-based (Mann-Whitney) AUC with mid-rank tie handling. Throws unless
// both classes are present.
double auc(const std::vector<double>& scores, const std::vector<int>& labels);

// 7-chunk / 6-fold scheme: each class is shuffled by seed and dealt
// round-robin into 7 chunks; fold i uses chunk i for validation, chunk i+1
// for test, and the remaining 5 for training.
struct FoldPlan {
    std::vector<std::vector<size_t>> chunks;  // 7 disjoint index sets

    std::vector<size_t> train_indices(size_t fold) const;
    const std::vector<size_t>& validation_indices(size_t fold) const {
        return chunks[fold];
    }
    const std::vector<size_t>& test_indices(size_t fold) const {
        return chunks[fold + 1];
    }
    static constexpr size_t n_folds = 6;
};

FoldPlan make_folds(const std::vector<int>& labels, uint64_t seed);

struct LinearModel {
    std::vector<double> w;
    double b = 0.0;

    double decision(const std::vector<double>& x) const;
    double probability(const std::vector<double>& x) const;  // sigmoid
};

struct MlpModel {
    size_t in = 0, hidden = 0;
    std::vector<double> params;  // [W1 (H*F), b1 (H), W2 (H), b2]

    double probability(const std::vector<double>& x) const;
    double loss(const Rows& rows, const std::vector<int>& labels,
                double l2) const;
};

// Epoch callbacks see the model after each optimizer step; run_experiment
// uses them for validation-based epoch selection.
using LinearEpochFn = std::function<void(int epoch, const LinearModel&)>;
using MlpEpochFn = std::function<void(int epoch, const MlpModel&)>;

// Mean cross-entropy + (l2/2)|w|^2, full-batch Adadelta, weights start at
// zero. Score is the positive-class probability.
LinearModel train_logreg(const Rows& rows, const std::vector<int>& labels,
                         const ClassifierSpec& spec,
                         const LinearEpochFn& on_epoch = nullptr);

// Mean squared hinge + (l2/2)|w|^2 in the primal on labels mapped to +-1.
// Score is the raw decision value.
LinearModel train_svm(const Rows& rows, const std::vector<int>& labels,
                      const ClassifierSpec& spec,
                      const LinearEpochFn& on_epoch = nullptr);

// One tanh hidden layer, sigmoid output, cross-entropy + (l2/2) * sum of
// squared weights; weights initialized uniform [-0.05, 0.05] from spec.seed.
MlpModel train_mlp(const Rows& rows, const std::vector<int>& labels,
                   const ClassifierSpec& spec,
                   const MlpEpochFn& on_epoch = nullptr);

// Fraction of positive labels among the k Euclidean-nearest training rows,
// distance ties broken by ascending row index.
double knn_score(const Rows& train_rows, const std::vector<int>& train_labels,
                 const std::vector<double>& query, size_t k);

struct EvalReport {
    ClassifierSpec classifier;
    FeatureKind feature_kind;
    std::vector<double> per_fold_auc;        // 6
    std::vector<double> train_seconds_per_fold;
    double mean_auc = 0.0;
    double std_auc = 0.0;
};

// Runs the 6-fold experiment: per fold the standardizer is fitted on the
// training rows only, gradient-trained kinds keep the epoch with the best
// validation AUC, and the test-chunk AUC is reported.
EvalReport run_experiment(const FeatureMatrix& features,
                          const ClassifierSpec& spec, uint64_t seed);

}  // namespace ehr
