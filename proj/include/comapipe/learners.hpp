#pragma once

#include <cstdint>
#include <vector>

#include "comapipe/ingest.hpp"

namespace comapipe::learners {

// The regularization grid searched by ridge_fit: 10 log-evenly spaced
// values from 1e-3 to 1e3 inclusive.
std::vector<double> ridge_alpha_grid();

/// Linear classifier on standardized features, Poor encoded +1, Good -1.
/// The decision value (not a probability) is what downstream models
/// consume; positive means Poor.
struct RidgeModel {
    std::vector<double> weights;   // original feature space; 0 at dropped columns
    double intercept = 0.0;
    double alpha_chosen = 1.0;
    std::vector<double> alpha_grid;
    std::vector<double> loocv_errors;       // mean squared LOOCV residual per alpha
    std::vector<double> mean, sd;           // standardizer (sd forced to 1 at dropped columns)
    std::vector<std::size_t> dropped_features; // zero-variance columns, excluded from the fit

    std::size_t n_features() const { return mean.size(); }
};

// Fit with closed-form leave-one-out CV over the alpha grid: residuals via
// e_i = (y_i - yhat_i) / (1 - h_ii) on the full-data standardized design
// with an unpenalized intercept — no per-fold refits. alpha_chosen
// minimizes the mean squared LOOCV residual, ties to the smallest alpha;
// weights are then refit on all rows at alpha_chosen. Works for p >> n via
// the Gram-matrix (dual) form.
RidgeModel ridge_fit(const std::vector<std::vector<double>>& X, const std::vector<ingest::Outcome>& y);

// Same model at one fixed alpha, no grid search (loocv_errors left empty).
RidgeModel ridge_fit_fixed(const std::vector<std::vector<double>>& X,
                           const std::vector<ingest::Outcome>& y, double alpha);

// w . standardize(x) + intercept. Throws ContractError on dimension mismatch.
double ridge_decision(const RidgeModel& model, const std::vector<double>& x);

struct ForestConfig {
    std::size_t n_trees = 300;
    std::size_t mtry = 0;     // 0 = floor(sqrt(p))
    std::size_t min_leaf = 1;
    std::uint64_t seed = 0;
};

/// One CART node; leaf iff feature < 0, then poor_fraction is the class
/// estimate. Internal nodes route x[feature] <= threshold to `left`.
struct TreeNode {
    int feature = -1;
    double threshold = 0.0;
    int left = -1;
    int right = -1;
    double poor_fraction = 0.0;
};

struct Tree {
    std::vector<TreeNode> nodes; // nodes[0] is the root
};

struct ForestModel {
    std::vector<Tree> trees;
    ForestConfig config;
    std::size_t n_features = 0;
    // normalized total Gini decrease per feature; sums to 1 unless no split
    // ever happened (then all zero)
    std::vector<double> importances;
};

// Bagged CART with Gini splits: each tree sees a seeded bootstrap sample of
// size n and draws mtry candidate features per node. Equal-gain splits tie
// to the lowest threshold (an index-free rule, so importances follow column
// permutations). Throws TrainingError when only one class is present.
ForestModel forest_fit(const std::vector<std::vector<double>>& X,
                       const std::vector<ingest::Outcome>& y, const ForestConfig& config = {});

// Mean over trees of the reached leaf's Poor fraction, in [0, 1].
double forest_predict_proba(const ForestModel& model, const std::vector<double>& x);

} // namespace comapipe::learners
