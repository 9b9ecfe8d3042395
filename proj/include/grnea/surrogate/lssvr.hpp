#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <iostream>
#include <numeric>
#include <vector>

#include "grnea/core/rng.hpp"
#include "grnea/metrics/regression.hpp"

namespace grnea::svr {

/// Least-squares SVR with an RBF kernel. Training solves the dual system
///   [[0, 1^T], [1, Omega + I/gamma_r]] [b; alpha] = [0; y]
/// with Omega_ij = exp(-|fi - fj|^2 / (2 sigma_k^2)) over z-scored features.
struct LssvrModel {
    Eigen::MatrixXd support;  // n x d, standardized
    Eigen::VectorXd alpha;    // n dual coefficients
    double bias = 0.0;
    double sigma_k = 1.0;
    double gamma_r = 1.0;
    Eigen::VectorXd feat_mean, feat_scale;  // stored z-score transform
};

inline double rbf_kernel(const Eigen::VectorXd& a, const Eigen::VectorXd& b, double sigma_k) {
    return std::exp(-(a - b).squaredNorm() / (2.0 * sigma_k * sigma_k));
}

inline LssvrModel fit(const Eigen::MatrixXd& features, const Eigen::VectorXd& targets,
                      double sigma_k, double gamma_r) {
    const int n = static_cast<int>(features.rows());
    if (n < 2) throw std::invalid_argument("lssvr: need at least 2 samples");
    if (targets.size() != n) throw std::invalid_argument("lssvr: feature/target count mismatch");
    if (!(sigma_k > 0.0) || !(gamma_r > 0.0))
        throw std::invalid_argument("lssvr: hyperparameters must be positive");

    LssvrModel m;
    m.sigma_k = sigma_k;
    m.gamma_r = gamma_r;
    m.feat_mean = features.colwise().mean();
    Eigen::MatrixXd centered = features.rowwise() - m.feat_mean.transpose();
    m.feat_scale = (centered.array().square().colwise().mean()).sqrt();
    for (int j = 0; j < m.feat_scale.size(); ++j)
        if (m.feat_scale(j) <= 0.0) m.feat_scale(j) = 1.0;
    m.support = centered.array().rowwise() / m.feat_scale.transpose().array();

    Eigen::MatrixXd A = Eigen::MatrixXd::Zero(n + 1, n + 1);
    A.block(0, 1, 1, n).setOnes();
    A.block(1, 0, n, 1).setOnes();
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            A(i + 1, j + 1) = rbf_kernel(m.support.row(i), m.support.row(j), sigma_k);
    A.block(1, 1, n, n).diagonal().array() += 1.0 / gamma_r;
    Eigen::VectorXd rhs = Eigen::VectorXd::Zero(n + 1);
    rhs.tail(n) = targets;

    Eigen::PartialPivLU<Eigen::MatrixXd> lu(A);
    Eigen::VectorXd sol = lu.solve(rhs);
    const double residual = (A * sol - rhs).norm();
    const double scale = std::max(1.0, rhs.norm());
    if (!sol.allFinite() || residual / scale > 1e-6)
        throw std::runtime_error(
            "lssvr: dual system is numerically singular (relative residual " +
            std::to_string(residual / scale) +
            "); duplicate samples with a large gamma_r are the usual cause");
    m.bias = sol(0);
    m.alpha = sol.tail(n);
    return m;
}

inline double predict(const LssvrModel& m, const Eigen::VectorXd& f) {
    if (f.size() != m.support.cols())
        throw std::invalid_argument("lssvr predict: feature dimension mismatch, got " +
                                    std::to_string(f.size()) + " expected " +
                                    std::to_string(m.support.cols()));
    Eigen::VectorXd z = (f - m.feat_mean).array() / m.feat_scale.array();
    double acc = m.bias;
    for (int i = 0; i < m.alpha.size(); ++i)
        acc += m.alpha(i) * rbf_kernel(z, m.support.row(i), m.sigma_k);
    return acc;
}

/// Independent per-column fits sharing one hyperparameter pair.
inline std::vector<LssvrModel> fit_multi(const Eigen::MatrixXd& features,
                                         const Eigen::MatrixXd& target_matrix, double sigma_k,
                                         double gamma_r) {
    std::vector<LssvrModel> models;
    models.reserve(target_matrix.cols());
    for (int j = 0; j < target_matrix.cols(); ++j)
        models.push_back(fit(features, target_matrix.col(j), sigma_k, gamma_r));
    return models;
}

struct EvalReport {
    double r_squared = 0.0;
    double raae = 0.0;
    double rmae = 0.0;
    std::vector<double> residuals;
};

inline EvalReport evaluate(const LssvrModel& m, const Eigen::MatrixXd& features,
                           const Eigen::VectorXd& targets) {
    std::vector<double> actual(targets.data(), targets.data() + targets.size());
    std::vector<double> predicted(targets.size());
    for (int i = 0; i < features.rows(); ++i)
        predicted[i] = predict(m, features.row(i).transpose());
    EvalReport r;
    r.r_squared = metrics::r_squared(actual, predicted);
    r.raae = metrics::raae(actual, predicted);
    r.rmae = metrics::rmae(actual, predicted);
    r.residuals.resize(actual.size());
    for (std::size_t i = 0; i < actual.size(); ++i) r.residuals[i] = actual[i] - predicted[i];
    return r;
}

namespace detail {

/// Content-based fold assignment: samples are ranked lexicographically by
/// (feature row, target), then dealt round-robin with a seed-derived offset.
/// Reordering the input rows therefore never changes the fold composition.
inline std::vector<int> fold_of(const Eigen::MatrixXd& features, const Eigen::VectorXd& targets,
                                int k_folds, std::uint64_t seed) {
    const int n = static_cast<int>(features.rows());
    std::vector<int> order(n);
    std::iota(order.begin(), order.end(), 0);
    auto less = [&](int a, int b) {
        for (int j = 0; j < features.cols(); ++j) {
            if (features(a, j) != features(b, j)) return features(a, j) < features(b, j);
        }
        return targets(a) < targets(b);
    };
    std::sort(order.begin(), order.end(), less);
    const int offset = static_cast<int>(mix_seed(seed, 0xF01D) % k_folds);
    std::vector<int> fold(n);
    for (int rank = 0; rank < n; ++rank) fold[order[rank]] = (rank + offset) % k_folds;
    return fold;
}

}  // namespace detail

/// k-fold grid search maximizing mean validation R^2. Degenerate folds
/// (constant targets) score -inf with a warning. Ties resolve to the first
/// grid cell in (sigma, gamma) order.
inline std::pair<double, double> grid_search(const Eigen::MatrixXd& features,
                                             const Eigen::VectorXd& targets,
                                             const std::vector<double>& sigma_grid,
                                             const std::vector<double>& gamma_grid, int k_folds,
                                             std::uint64_t seed) {
    if (k_folds < 2) throw std::invalid_argument("lssvr grid_search: k_folds must be >= 2");
    if (sigma_grid.empty() || gamma_grid.empty())
        throw std::invalid_argument("lssvr grid_search: empty grid");
    const int n = static_cast<int>(features.rows());
    if (n < 2 * k_folds) throw std::invalid_argument("lssvr grid_search: too few samples");

    const std::vector<int> fold = detail::fold_of(features, targets, k_folds, seed);
    double best_score = -std::numeric_limits<double>::infinity();
    std::pair<double, double> best{sigma_grid.front(), gamma_grid.front()};
    for (double sigma : sigma_grid) {
        for (double gamma : gamma_grid) {
            double score = 0.0;
            int valid = 0;
            for (int f = 0; f < k_folds; ++f) {
                std::vector<int> tr, va;
                for (int i = 0; i < n; ++i) (fold[i] == f ? va : tr).push_back(i);
                if (va.empty() || static_cast<int>(tr.size()) < 2) continue;
                Eigen::MatrixXd ftr(tr.size(), features.cols()), fva(va.size(), features.cols());
                Eigen::VectorXd ytr(tr.size()), yva(va.size());
                for (std::size_t i = 0; i < tr.size(); ++i) {
                    ftr.row(i) = features.row(tr[i]);
                    ytr(i) = targets(tr[i]);
                }
                for (std::size_t i = 0; i < va.size(); ++i) {
                    fva.row(i) = features.row(va[i]);
                    yva(i) = targets(va[i]);
                }
                try {
                    LssvrModel m = fit(ftr, ytr, sigma, gamma);
                    std::vector<double> actual(yva.data(), yva.data() + yva.size());
                    std::vector<double> pred(va.size());
                    for (std::size_t i = 0; i < va.size(); ++i)
                        pred[i] = predict(m, fva.row(i).transpose());
                    score += metrics::r_squared(actual, pred);
                    ++valid;
                } catch (const std::exception& e) {
                    std::cerr << "lssvr grid_search: fold " << f << " degenerate (" << e.what()
                              << "), scored -inf\n";
                    score = -std::numeric_limits<double>::infinity();
                    valid = k_folds;
                    break;
                }
            }
            if (valid > 0) score /= valid;
            if (score > best_score) {
                best_score = score;
                best = {sigma, gamma};
            }
        }
    }
    return best;
}

/// Log-spaced kernel-width grid around the median pairwise distance of the
/// standardized features, the default search range.
inline std::vector<double> default_sigma_grid(const Eigen::MatrixXd& features, int points = 7) {
    Eigen::VectorXd mean = features.colwise().mean();
    Eigen::MatrixXd centered = features.rowwise() - mean.transpose();
    Eigen::VectorXd scale = (centered.array().square().colwise().mean()).sqrt();
    for (int j = 0; j < scale.size(); ++j)
        if (scale(j) <= 0.0) scale(j) = 1.0;
    Eigen::MatrixXd z = centered.array().rowwise() / scale.transpose().array();
    std::vector<double> dists;
    const int n = static_cast<int>(z.rows());
    const int cap = std::min(n, 200);  // median over a bounded sample of pairs
    for (int i = 0; i < cap; ++i)
        for (int j = i + 1; j < cap; ++j) dists.push_back((z.row(i) - z.row(j)).norm());
    std::sort(dists.begin(), dists.end());
    double med = dists.empty() ? 1.0 : dists[dists.size() / 2];
    if (med <= 0.0) med = 1.0;
    std::vector<double> grid;
    for (int i = 0; i < points; ++i) {
        const double t = points == 1 ? 0.0 : -1.0 + 2.0 * i / (points - 1);  // 10^[-1, 1]
        grid.push_back(med * std::pow(10.0, t));
    }
    return grid;
}

inline std::vector<double> default_gamma_grid() {
    return {1.0, 1e1, 1e2, 1e3, 1e4, 1e5, 1e6};
}

}  // namespace grnea::svr
