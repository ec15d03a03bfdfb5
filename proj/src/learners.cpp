#include "comapipe/learners.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>

#include "comapipe/errors.hpp"
#include "comapipe/rng.hpp"

namespace comapipe::learners {

std::vector<double> ridge_alpha_grid() {
    std::vector<double> grid(10);
    for (int i = 0; i < 10; ++i) grid[std::size_t(i)] = std::pow(10.0, -3.0 + 6.0 * double(i) / 9.0);
    return grid;
}

namespace {

void check_matrix(const std::vector<std::vector<double>>& X, const std::vector<ingest::Outcome>& y,
                  std::size_t min_rows, const char* who) {
    if (X.size() != y.size())
        throw ArgumentError(std::string(who) + ": X and y row counts differ");
    if (X.size() < min_rows)
        throw ArgumentError(std::string(who) + ": need at least " + std::to_string(min_rows) +
                            " rows, got " + std::to_string(X.size()));
    const std::size_t p = X.front().size();
    if (p == 0) throw ArgumentError(std::string(who) + ": rows have no features");
    for (const auto& row : X)
        if (row.size() != p) throw ArgumentError(std::string(who) + ": ragged feature matrix");
    bool poor = false, good = false;
    for (auto v : y) (v == ingest::Outcome::Poor ? poor : good) = true;
    if (!poor || !good)
        throw TrainingError(std::string(who) + ": training labels contain only one class");
}

// Standardizer + reduced design (dropped zero-variance columns removed).
struct Standardized {
    std::vector<double> mean, sd;              // original space
    std::vector<std::size_t> kept, dropped;    // column indices
    Eigen::MatrixXd Z;                         // [n x kept], centered/scaled
};

Standardized standardize(const std::vector<std::vector<double>>& X) {
    const std::size_t n = X.size(), p = X.front().size();
    Standardized s;
    s.mean.assign(p, 0.0);
    s.sd.assign(p, 1.0);
    for (std::size_t j = 0; j < p; ++j) {
        double m = 0.0;
        for (std::size_t i = 0; i < n; ++i) m += X[i][j];
        m /= double(n);
        double var = 0.0;
        for (std::size_t i = 0; i < n; ++i) var += (X[i][j] - m) * (X[i][j] - m);
        var /= double(n);
        s.mean[j] = m;
        if (var > 0.0) {
            s.sd[j] = std::sqrt(var);
            s.kept.push_back(j);
        } else {
            s.dropped.push_back(j); // sd stays 1 so inference math is a no-op
        }
    }
    s.Z.resize(long(n), long(s.kept.size()));
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t jj = 0; jj < s.kept.size(); ++jj) {
            const std::size_t j = s.kept[jj];
            s.Z(long(i), long(jj)) = (X[i][j] - s.mean[j]) / s.sd[j];
        }
    return s;
}

Eigen::VectorXd targets(const std::vector<ingest::Outcome>& y) {
    Eigen::VectorXd t(long(y.size()));
    for (std::size_t i = 0; i < y.size(); ++i)
        t[long(i)] = (y[i] == ingest::Outcome::Poor) ? 1.0 : -1.0;
    return t;
}

RidgeModel assemble(const Standardized& s, const Eigen::VectorXd& w_kept, double intercept) {
    RidgeModel m;
    m.mean = s.mean;
    m.sd = s.sd;
    m.dropped_features = s.dropped;
    m.weights.assign(s.mean.size(), 0.0);
    for (std::size_t jj = 0; jj < s.kept.size(); ++jj) m.weights[s.kept[jj]] = w_kept[long(jj)];
    m.intercept = intercept;
    return m;
}

} // namespace

RidgeModel ridge_fit_fixed(const std::vector<std::vector<double>>& X,
                           const std::vector<ingest::Outcome>& y, double alpha) {
    check_matrix(X, y, 3, "ridge_fit");
    if (!(alpha > 0.0)) throw ArgumentError("ridge_fit: alpha must be positive");
    const auto s = standardize(X);
    if (s.kept.empty()) throw TrainingError("ridge_fit: no features left after zero-variance drop");

    const Eigen::VectorXd t = targets(y);
    const double ybar = t.mean();
    const Eigen::VectorXd yc = t.array() - ybar;

    const long n = s.Z.rows(), k = s.Z.cols();
    Eigen::VectorXd w;
    if (k <= n) {
        Eigen::MatrixXd G = s.Z.transpose() * s.Z;
        G.diagonal().array() += alpha;
        w = G.ldlt().solve(s.Z.transpose() * yc);
    } else {
        Eigen::MatrixXd K = s.Z * s.Z.transpose();
        K.diagonal().array() += alpha;
        w = s.Z.transpose() * K.ldlt().solve(yc);
    }

    RidgeModel m = assemble(s, w, ybar);
    m.alpha_chosen = alpha;
    m.alpha_grid = {alpha};
    return m;
}

RidgeModel ridge_fit(const std::vector<std::vector<double>>& X, const std::vector<ingest::Outcome>& y) {
    check_matrix(X, y, 3, "ridge_fit");
    const auto s = standardize(X);
    if (s.kept.empty()) throw TrainingError("ridge_fit: no features left after zero-variance drop");

    const Eigen::VectorXd t = targets(y);
    const double ybar = t.mean();
    const Eigen::VectorXd yc = t.array() - ybar;
    const long n = s.Z.rows(), k = s.Z.cols();
    const auto grid = ridge_alpha_grid();

    // One symmetric eigendecomposition serves every alpha: primal (Z'Z)
    // when p <= n, dual/Gram (ZZ') otherwise. In both forms
    //   h_ii = 1/n + sum_j A_ij^2 * f(lambda_j),  yhat_i = ybar + sum_j A_ij g_j
    // with A the projected design and f the per-eigenvalue shrinkage.
    const bool primal = k <= n;
    Eigen::MatrixXd A;     // primal: Z*V [n x k]; dual: U [n x n]
    Eigen::VectorXd lam;   // eigenvalues (clamped at 0)
    Eigen::VectorXd proj;  // primal: V'Z'yc; dual: U'yc
    if (primal) {
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(s.Z.transpose() * s.Z);
        lam = eig.eigenvalues().cwiseMax(0.0);
        A = s.Z * eig.eigenvectors();
        proj = eig.eigenvectors().transpose() * (s.Z.transpose() * yc);
    } else {
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(s.Z * s.Z.transpose());
        lam = eig.eigenvalues().cwiseMax(0.0);
        A = eig.eigenvectors();
        proj = A.transpose() * yc;
    }

    std::vector<double> errors(grid.size(), 0.0);
    for (std::size_t a = 0; a < grid.size(); ++a) {
        const double alpha = grid[a];
        // per-eigencomponent factors
        Eigen::VectorXd shrink(lam.size());
        for (long j = 0; j < lam.size(); ++j)
            shrink[j] = primal ? 1.0 / (lam[j] + alpha) : lam[j] / (lam[j] + alpha);
        // yhat and leverage per row; columns of A with lam_j = 0 are zero
        // vectors in the primal case, so both forms stay exact
        double sse = 0.0;
        for (long i = 0; i < n; ++i) {
            double fit = 0.0, lev = 1.0 / double(n);
            for (long j = 0; j < lam.size(); ++j) {
                const double aij = A(i, j);
                fit += aij * shrink[j] * proj[j];
                lev += aij * aij * shrink[j];
            }
            const double resid = (yc[i] - fit) / (1.0 - lev);
            sse += resid * resid;
        }
        errors[a] = sse / double(n);
    }

    std::size_t best = 0;
    for (std::size_t a = 1; a < grid.size(); ++a)
        if (errors[a] < errors[best]) best = a; // strict: ties keep the smaller alpha

    RidgeModel m = ridge_fit_fixed(X, y, grid[best]);
    m.alpha_grid = grid;
    m.loocv_errors = errors;
    return m;
}

double ridge_decision(const RidgeModel& model, const std::vector<double>& x) {
    if (x.size() != model.n_features())
        throw ContractError("ridge_decision: expected " + std::to_string(model.n_features()) +
                            " features, got " + std::to_string(x.size()));
    double acc = model.intercept;
    for (std::size_t j = 0; j < x.size(); ++j)
        if (model.weights[j] != 0.0) acc += model.weights[j] * (x[j] - model.mean[j]) / model.sd[j];
    return acc;
}

namespace {

double gini(std::size_t n_poor, std::size_t n_total) {
    if (n_total == 0) return 0.0;
    const double p = double(n_poor) / double(n_total);
    return 1.0 - p * p - (1.0 - p) * (1.0 - p);
}

struct TreeBuilder {
    const std::vector<std::vector<double>>& X;
    const std::vector<char>& poor; // per original row
    std::size_t mtry, min_leaf, n_root;
    SplitMix64& gen;
    Tree& tree;
    std::vector<double>& importance; // accumulated, unnormalized

    // Grow the subtree over `rows` (bootstrap indices); returns node index.
    int grow(std::vector<std::size_t>& rows) {
        const std::size_t n = rows.size();
        std::size_t n_poor = 0;
        for (auto r : rows) n_poor += std::size_t(poor[r]);

        const int node = int(tree.nodes.size());
        tree.nodes.push_back({});
        tree.nodes[std::size_t(node)].poor_fraction = double(n_poor) / double(n);

        if (n_poor == 0 || n_poor == n || n < 2 * min_leaf) return node;

        // Best split over an mtry-sized feature draw. Exact gain ties are
        // routine (gains are functions of small integer counts), and two
        // invariance guarantees constrain how they may break: importances
        // must follow column permutations (no feature-index keys) and
        // predictions must survive monotone feature transforms (no raw-value
        // keys). So ties resolve by left-child size, then by the actual row
        // partition — both invariant under either change — with feature
        // index as the final fallback for partition-identical splits.
        const double imp = gini(n_poor, n);
        int best_f = -1;
        double best_thr = 0.0, best_gain = 0.0;
        std::size_t best_left_n = 0;
        std::vector<std::size_t> best_left_set;

        auto left_set_of = [&](std::size_t f, double thr) {
            std::vector<std::size_t> out;
            for (auto r : rows)
                if (X[r][f] <= thr) out.push_back(r);
            std::sort(out.begin(), out.end());
            return out;
        };

        auto feats = gen.sample_indices(X.front().size(), mtry);
        std::vector<std::pair<double, char>> vals(n);
        for (std::size_t f : feats) {
            for (std::size_t i = 0; i < n; ++i) vals[i] = {X[rows[i]][f], poor[rows[i]]};
            std::sort(vals.begin(), vals.end(),
                      [](const auto& a, const auto& b) { return a.first < b.first; });
            std::size_t left_n = 0, left_poor = 0;
            for (std::size_t i = 0; i + 1 < n; ++i) {
                ++left_n;
                left_poor += std::size_t(vals[i].second);
                if (vals[i].first == vals[i + 1].first) continue; // no boundary here
                if (left_n < min_leaf || n - left_n < min_leaf) continue;
                const double gain = imp - (double(left_n) * gini(left_poor, left_n) +
                                           double(n - left_n) * gini(n_poor - left_poor, n - left_n)) /
                                              double(n);
                if (gain <= 1e-15) continue;
                double thr = 0.5 * (vals[i].first + vals[i + 1].first);
                if (!(thr < vals[i + 1].first)) thr = vals[i].first; // midpoint collapse guard

                bool take = false;
                if (best_f < 0 || gain > best_gain) {
                    take = true;
                } else if (gain == best_gain) {
                    if (left_n != best_left_n) {
                        take = left_n < best_left_n;
                    } else {
                        if (best_left_set.empty()) best_left_set = left_set_of(std::size_t(best_f), best_thr);
                        auto cand = left_set_of(f, thr);
                        if (cand != best_left_set) {
                            take = cand < best_left_set;
                            if (take) best_left_set = std::move(cand);
                        } else if (f != std::size_t(best_f)) {
                            // identical partitions on different features:
                            // routing is the same either way, so compare the
                            // columns' node-restricted values — still free of
                            // feature indices
                            for (auto r : rows) {
                                const double a = X[r][f], b = X[r][std::size_t(best_f)];
                                if (a != b) {
                                    take = a < b;
                                    break;
                                }
                            }
                        }
                    }
                }
                if (take) {
                    if (gain != best_gain || left_n != best_left_n) best_left_set.clear();
                    best_gain = gain;
                    best_f = int(f);
                    best_thr = thr;
                    best_left_n = left_n;
                }
            }
        }
        if (best_f < 0) return node; // no admissible split among the drawn features

        std::vector<std::size_t> left, right;
        for (auto r : rows) (X[r][std::size_t(best_f)] <= best_thr ? left : right).push_back(r);
        rows.clear();
        rows.shrink_to_fit();

        importance[std::size_t(best_f)] += (double(n) / double(n_root)) * best_gain;
        tree.nodes[std::size_t(node)].feature = best_f;
        tree.nodes[std::size_t(node)].threshold = best_thr;
        const int l = grow(left);
        tree.nodes[std::size_t(node)].left = l;
        const int r = grow(right);
        tree.nodes[std::size_t(node)].right = r;
        return node;
    }
};

} // namespace

ForestModel forest_fit(const std::vector<std::vector<double>>& X,
                       const std::vector<ingest::Outcome>& y, const ForestConfig& config) {
    check_matrix(X, y, 5, "forest_fit");
    if (config.n_trees == 0) throw ArgumentError("forest_fit: n_trees must be nonzero");
    if (config.min_leaf == 0) throw ArgumentError("forest_fit: min_leaf must be nonzero");

    const std::size_t n = X.size(), p = X.front().size();
    ForestModel model;
    model.config = config;
    if (model.config.mtry == 0)
        model.config.mtry = std::max<std::size_t>(1, std::size_t(std::sqrt(double(p))));
    model.config.mtry = std::min(model.config.mtry, p);
    model.n_features = p;
    model.importances.assign(p, 0.0);

    std::vector<char> poor(n);
    for (std::size_t i = 0; i < n; ++i) poor[i] = (y[i] == ingest::Outcome::Poor) ? 1 : 0;

    for (std::size_t t = 0; t < config.n_trees; ++t) {
        SplitMix64 gen(derive_seed(config.seed, "tree", t));
        std::vector<std::size_t> rows(n);
        for (auto& r : rows) r = gen.below(n);

        Tree tree;
        TreeBuilder builder{X, poor, model.config.mtry, model.config.min_leaf, n, gen, tree,
                            model.importances};
        builder.grow(rows);
        model.trees.push_back(std::move(tree));
    }

    double total = 0.0;
    for (double v : model.importances) total += v;
    if (total > 0.0)
        for (double& v : model.importances) v /= total;
    return model;
}

double forest_predict_proba(const ForestModel& model, const std::vector<double>& x) {
    if (x.size() != model.n_features)
        throw ContractError("forest_predict_proba: expected " + std::to_string(model.n_features) +
                            " features, got " + std::to_string(x.size()));
    double acc = 0.0;
    for (const auto& tree : model.trees) {
        int node = 0;
        while (tree.nodes[std::size_t(node)].feature >= 0) {
            const auto& nd = tree.nodes[std::size_t(node)];
            node = (x[std::size_t(nd.feature)] <= nd.threshold) ? nd.left : nd.right;
        }
        acc += tree.nodes[std::size_t(node)].poor_fraction;
    }
    return acc / double(model.trees.size());
}

} // namespace comapipe::learners
