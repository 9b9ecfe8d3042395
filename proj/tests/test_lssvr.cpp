#include <catch2/catch_amalgamated.hpp>

#include "grnea/core/rng.hpp"
#include "grnea/surrogate/lssvr.hpp"

using grnea::Rng;
namespace svr = grnea::svr;

namespace {

Eigen::MatrixXd random_features(int n, int d, Rng& rng, double lo = -2.0, double hi = 2.0) {
    Eigen::MatrixXd f(n, d);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < d; ++j) f(i, j) = grnea::uniform(rng, lo, hi);
    return f;
}

/// Independent dense solve of the same dual system by Gauss-Jordan
/// elimination with partial pivoting, written against the raw formulation.
struct OracleModel {
    Eigen::MatrixXd z;
    std::vector<double> alpha;
    double bias;
    double sigma;
};

OracleModel oracle_fit(const Eigen::MatrixXd& features, const Eigen::VectorXd& y, double sigma,
                       double gamma) {
    const int n = static_cast<int>(features.rows());
    // replicate the z-score transform by hand
    Eigen::MatrixXd z = features;
    for (int j = 0; j < z.cols(); ++j) {
        double mean = 0.0;
        for (int i = 0; i < n; ++i) mean += z(i, j);
        mean /= n;
        double var = 0.0;
        for (int i = 0; i < n; ++i) var += (z(i, j) - mean) * (z(i, j) - mean);
        double sd = std::sqrt(var / n);
        if (sd <= 0.0) sd = 1.0;
        for (int i = 0; i < n; ++i) z(i, j) = (z(i, j) - mean) / sd;
    }
    std::vector<std::vector<double>> a(n + 1, std::vector<double>(n + 2, 0.0));
    for (int j = 1; j <= n; ++j) a[0][j] = 1.0;
    for (int i = 1; i <= n; ++i) a[i][0] = 1.0;
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            double d2 = (z.row(i) - z.row(j)).squaredNorm();
            a[i + 1][j + 1] = std::exp(-d2 / (2.0 * sigma * sigma)) + (i == j ? 1.0 / gamma : 0.0);
        }
    for (int i = 0; i < n; ++i) a[i + 1][n + 1] = y(i);
    // Gauss-Jordan
    for (int col = 0; col <= n; ++col) {
        int piv = col;
        for (int r = col + 1; r <= n; ++r)
            if (std::abs(a[r][col]) > std::abs(a[piv][col])) piv = r;
        std::swap(a[col], a[piv]);
        const double p = a[col][col];
        for (int c = col; c <= n + 1; ++c) a[col][c] /= p;
        for (int r = 0; r <= n; ++r) {
            if (r == col) continue;
            const double f = a[r][col];
            for (int c = col; c <= n + 1; ++c) a[r][c] -= f * a[col][c];
        }
    }
    OracleModel m;
    m.z = z;
    m.bias = a[0][n + 1];
    m.alpha.resize(n);
    for (int i = 0; i < n; ++i) m.alpha[i] = a[i + 1][n + 1];
    m.sigma = sigma;
    return m;
}

double oracle_predict(const OracleModel& m, const Eigen::MatrixXd& features, int row_of_transform,
                      const Eigen::VectorXd& f_raw) {
    (void)row_of_transform;
    // recompute the transform from the training features
    const int n = static_cast<int>(features.rows());
    Eigen::VectorXd zq(f_raw.size());
    for (int j = 0; j < f_raw.size(); ++j) {
        double mean = 0.0;
        for (int i = 0; i < n; ++i) mean += features(i, j);
        mean /= n;
        double var = 0.0;
        for (int i = 0; i < n; ++i) var += (features(i, j) - mean) * (features(i, j) - mean);
        double sd = std::sqrt(var / n);
        if (sd <= 0.0) sd = 1.0;
        zq(j) = (f_raw(j) - mean) / sd;
    }
    double acc = m.bias;
    for (int i = 0; i < n; ++i)
        acc += m.alpha[i] *
               std::exp(-(zq - m.z.row(i).transpose()).squaredNorm() / (2.0 * m.sigma * m.sigma));
    return acc;
}

}  // namespace

TEST_CASE("lssvr near-interpolation with huge regularization") {
    Eigen::MatrixXd f(3, 1);
    f << -1.0, 0.2, 1.4;
    Eigen::VectorXd y(3);
    y << 2.0, -0.5, 1.0;
    auto m = svr::fit(f, y, 1.0, 1e8);
    for (int i = 0; i < 3; ++i)
        REQUIRE(svr::predict(m, f.row(i).transpose()) == Catch::Approx(y(i)).margin(1e-4));
}

TEST_CASE("lssvr dual constraint sum alpha = 0") {
    Rng rng = grnea::make_rng(10);
    for (int rep = 0; rep < 5; ++rep) {
        const int n = 5 + rep * 3;
        Eigen::MatrixXd f = random_features(n, 4, rng);
        Eigen::VectorXd y(n);
        for (int i = 0; i < n; ++i) y(i) = grnea::uniform(rng, -1, 1);
        auto m = svr::fit(f, y, 1.2, 100.0);
        REQUIRE(std::abs(m.alpha.sum()) < 1e-8);
    }
}

TEST_CASE("lssvr matches the independent dense-solve oracle") {
    Rng rng = grnea::make_rng(17);
    for (int rep = 0; rep < 4; ++rep) {
        const int n = 10;
        Eigen::MatrixXd f = random_features(n, 3, rng);
        Eigen::VectorXd y(n);
        for (int i = 0; i < n; ++i) y(i) = std::sin(f(i, 0)) + 0.3 * f(i, 1) * f(i, 2);
        const double sigma = 0.8 + 0.3 * rep, gamma = 50.0 * (rep + 1);
        auto m = svr::fit(f, y, sigma, gamma);
        auto om = oracle_fit(f, y, sigma, gamma);
        for (int q = 0; q < 8; ++q) {
            Eigen::VectorXd probe(3);
            for (int j = 0; j < 3; ++j) probe(j) = grnea::uniform(rng, -2, 2);
            REQUIRE(svr::predict(m, probe) ==
                    Catch::Approx(oracle_predict(om, f, 0, probe)).margin(1e-8));
        }
    }
}

TEST_CASE("lssvr kernel symmetry and self-similarity") {
    Rng rng = grnea::make_rng(23);
    for (int rep = 0; rep < 20; ++rep) {
        Eigen::VectorXd a(4), b(4);
        for (int j = 0; j < 4; ++j) {
            a(j) = grnea::uniform(rng, -3, 3);
            b(j) = grnea::uniform(rng, -3, 3);
        }
        const double s = grnea::uniform(rng, 0.2, 3.0);
        REQUIRE(svr::rbf_kernel(a, b, s) == Catch::Approx(svr::rbf_kernel(b, a, s)).margin(0));
        REQUIRE(svr::rbf_kernel(a, a, s) == 1.0);
    }
}

TEST_CASE("lssvr far query decays to the bias") {
    Eigen::MatrixXd f(4, 1);
    f << 0.0, 0.5, 1.0, 1.5;
    Eigen::VectorXd y(4);
    y << 1.0, 2.0, 3.0, 2.5;
    auto m = svr::fit(f, y, 0.5, 1e6);
    Eigen::VectorXd far(1);
    far << 1e6;
    REQUIRE(svr::predict(m, far) == Catch::Approx(m.bias).margin(1e-9));
}

TEST_CASE("lssvr interpolation limit improves with gamma") {
    Rng rng = grnea::make_rng(29);
    const int n = 12;
    Eigen::MatrixXd f = random_features(n, 2, rng);
    Eigen::VectorXd y(n);
    for (int i = 0; i < n; ++i) y(i) = f(i, 0) * f(i, 0) - f(i, 1);
    double prev = std::numeric_limits<double>::max();
    for (double gamma = 1e2; gamma <= 1e8; gamma *= 10.0) {
        auto m = svr::fit(f, y, 1.0, gamma);
        double worst = 0.0;
        for (int i = 0; i < n; ++i)
            worst = std::max(worst, std::abs(svr::predict(m, f.row(i).transpose()) - y(i)));
        REQUIRE(worst <= prev + 1e-12);
        prev = worst;
    }
}

TEST_CASE("lssvr rejects invalid input") {
    Eigen::MatrixXd f(1, 2);
    Eigen::VectorXd y(1);
    REQUIRE_THROWS_AS(svr::fit(f, y, 1.0, 1.0), std::invalid_argument);

    Eigen::MatrixXd f2(3, 2);
    f2.setRandom();
    Eigen::VectorXd y2(3);
    y2.setRandom();
    REQUIRE_THROWS_AS(svr::fit(f2, y2, -1.0, 1.0), std::invalid_argument);
    REQUIRE_THROWS_AS(svr::fit(f2, y2, 1.0, 0.0), std::invalid_argument);

    auto m = svr::fit(f2, y2, 1.0, 10.0);
    Eigen::VectorXd wrong(3);
    REQUIRE_THROWS_AS(svr::predict(m, wrong), std::invalid_argument);
}

TEST_CASE("lssvr duplicate rows with huge gamma are rejected as singular") {
    Eigen::MatrixXd f(4, 1);
    f << 1.0, 1.0, 2.0, 3.0;  // exact duplicate pair
    Eigen::VectorXd y(4);
    y << 0.0, 1.0, 2.0, 3.0;  // contradictory targets on the duplicates
    bool threw = false;
    try {
        auto m = svr::fit(f, y, 1.0, 1e18);
        // if the solve squeaked through, the residual check must have passed;
        // predictions then cannot be trusted to interpolate both duplicates
        threw = std::abs(svr::predict(m, f.row(0).transpose()) - y(0)) > 0.4;
    } catch (const std::runtime_error&) {
        threw = true;
    }
    REQUIRE(threw);
}

TEST_CASE("fit_multi reduces to fit and is column-independent") {
    Rng rng = grnea::make_rng(31);
    const int n = 10;
    Eigen::MatrixXd f = random_features(n, 3, rng);
    Eigen::MatrixXd t(n, 2);
    for (int i = 0; i < n; ++i) {
        t(i, 0) = f(i, 0) + 0.2 * f(i, 1);
        t(i, 1) = f(i, 2) * f(i, 2);
    }
    auto models = svr::fit_multi(f, t, 1.0, 100.0);
    REQUIRE(models.size() == 2);
    auto single = svr::fit(f, t.col(0), 1.0, 100.0);
    Eigen::VectorXd probe = f.row(3).transpose();
    REQUIRE(svr::predict(models[0], probe) == Catch::Approx(svr::predict(single, probe)).margin(0));

    // permuting target columns permutes the models identically
    Eigen::MatrixXd swapped(n, 2);
    swapped.col(0) = t.col(1);
    swapped.col(1) = t.col(0);
    auto perm = svr::fit_multi(f, swapped, 1.0, 100.0);
    REQUIRE(svr::predict(perm[1], probe) == Catch::Approx(svr::predict(models[0], probe)).margin(0));
    REQUIRE(svr::predict(perm[0], probe) == Catch::Approx(svr::predict(models[1], probe)).margin(0));
}

TEST_CASE("grid search basics") {
    Rng rng = grnea::make_rng(37);
    const int n = 40;
    Eigen::MatrixXd f = random_features(n, 2, rng);
    Eigen::VectorXd y(n);
    for (int i = 0; i < n; ++i) y(i) = std::sin(1.5 * f(i, 0)) + 0.5 * f(i, 1);

    // single cell returns that cell
    auto only = svr::grid_search(f, y, {0.7}, {50.0}, 5, 1);
    REQUIRE(only.first == 0.7);
    REQUIRE(only.second == 50.0);

    REQUIRE_THROWS_AS(svr::grid_search(f, y, {}, {1.0}, 5, 1), std::invalid_argument);
    REQUIRE_THROWS_AS(svr::grid_search(f, y, {1.0}, {1.0}, 1, 1), std::invalid_argument);
}

TEST_CASE("grid search recovers a generating model's neighborhood") {
    Rng rng = grnea::make_rng(41);
    const int n = 80;
    Eigen::MatrixXd f = random_features(n, 1, rng, -3.0, 3.0);
    // targets generated by a known smooth RBF mixture of width ~0.8
    Eigen::VectorXd y(n);
    for (int i = 0; i < n; ++i)
        y(i) = 2.0 * std::exp(-f(i, 0) * f(i, 0) / (2 * 0.8 * 0.8)) -
               1.2 * std::exp(-(f(i, 0) - 1.5) * (f(i, 0) - 1.5) / (2 * 0.8 * 0.8));
    const std::vector<double> sigmas{0.05, 0.2, 0.6, 1.0, 4.0, 20.0};
    auto [sigma, gamma] = svr::grid_search(f, y, sigmas, {1.0, 100.0, 1e4}, 5, 7);
    REQUIRE(sigma >= 0.2);
    REQUIRE(sigma <= 4.0);
    (void)gamma;
}

TEST_CASE("grid search selection is invariant to sample order") {
    Rng rng = grnea::make_rng(47);
    const int n = 60;
    Eigen::MatrixXd f = random_features(n, 2, rng);
    Eigen::VectorXd y(n);
    for (int i = 0; i < n; ++i) y(i) = f(i, 0) * f(i, 1) + 0.3 * f(i, 0);
    const std::vector<double> sig{0.3, 1.0, 3.0};
    const std::vector<double> gam{10.0, 1e3};
    auto base = svr::grid_search(f, y, sig, gam, 4, 99);

    std::vector<int> perm(n);
    std::iota(perm.begin(), perm.end(), 0);
    std::shuffle(perm.begin(), perm.end(), rng);
    Eigen::MatrixXd f2(n, 2);
    Eigen::VectorXd y2(n);
    for (int i = 0; i < n; ++i) {
        f2.row(i) = f.row(perm[i]);
        y2(i) = y(perm[i]);
    }
    auto shuffled = svr::grid_search(f2, y2, sig, gam, 4, 99);
    REQUIRE(base == shuffled);
}
