#include <doctest.h>

#include <cmath>

#include "lvkit/autoencoders.hpp"
#include "support/oracles.hpp"

using namespace lvkit;
using namespace lvkit::autoencoders;

namespace {

Eigen::MatrixXd random_orthonormal(oracle::Gen& g, Eigen::Index d, Eigen::Index m) {
    return Eigen::HouseholderQR<Eigen::MatrixXd>(g.matrix(d, m)).householderQ() * Eigen::MatrixXd::Identity(d, m);
}

double lasso(double x, double w, double z, double lambda) { return (x - w * z) * (x - w * z) + lambda * std::abs(z); }

}  // namespace

TEST_CASE("PCA on a line") {
    oracle::Gen g(91);
    Eigen::MatrixXd data(50, 2);
    for (int i = 0; i < 50; ++i) {
        const double t = g.normal();
        data.row(i) << t, 2 * t;
    }
    const auto r = pca_fit(data, 1);
    CHECK((r.W.col(0) - Eigen::Vector2d(1, 2) / std::sqrt(5.0)).norm() < 1e-12);
    CHECK(r.eigenvalues[1] == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(pca_objective(data, r.W, r.mean) < 1e-20 * 50);
}

TEST_CASE("PCA with M = D reconstructs exactly") {
    oracle::Gen g(92);
    const Eigen::MatrixXd data = g.matrix(30, 4);
    const auto r = pca_fit(data, 4);
    CHECK((r.W.transpose() * r.W - Eigen::MatrixXd::Identity(4, 4)).norm() < 1e-10);
    CHECK(pca_objective(data, r.W, r.mean) < 1e-20 * data.squaredNorm() + 1e-24);
}

TEST_CASE("isotropic sample has near-equal eigenvalues") {
    Rng rng(93);
    Eigen::MatrixXd data(10000, 2);
    for (Eigen::Index i = 0; i < data.size(); ++i) {
        data.data()[i] = rng.normal();
    }
    const auto r = pca_fit(data, 2);
    CHECK(r.eigenvalues[0] >= r.eigenvalues[1]);
    CHECK(r.eigenvalues[0] / r.eigenvalues[1] < 1.1);
}

TEST_CASE("PCA matches an eigendecomposition of the sample covariance") {
    oracle::Gen g(94);
    for (int t = 0; t < 30; ++t) {
        const int d = g.integer(2, 6);
        const int m = g.integer(1, d);
        const Eigen::MatrixXd data = g.matrix(40, d) * g.matrix(d, d);
        const auto r = pca_fit(data, m);
        const Eigen::MatrixXd c = data.rowwise() - data.colwise().mean();
        const Eigen::MatrixXd s = c.transpose() * c / 40.0;
        const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(s);
        CHECK((r.W.transpose() * r.W - Eigen::MatrixXd::Identity(m, m)).norm() < 1e-10);
        for (int k = 0; k < m; ++k) {
            const Eigen::VectorXd v = es.eigenvectors().col(d - 1 - k);
            CHECK(std::abs(std::abs(r.W.col(k).dot(v)) - 1.0) < 1e-8);
            Eigen::Index big = 0;
            r.W.col(k).cwiseAbs().maxCoeff(&big);
            CHECK(r.W(big, k) > 0);
            CHECK(r.eigenvalues[k] == doctest::Approx(es.eigenvalues()[d - 1 - k]).epsilon(1e-10));
        }
        const double tail = es.eigenvalues().head(d - m).sum();
        CHECK(pca_objective(data, r.W, r.mean) == doctest::Approx(40.0 * tail).epsilon(1e-8));
        for (int trial = 0; trial < 100; ++trial) {
            CHECK(pca_objective(data, random_orthonormal(g, d, m), r.mean) >= pca_objective(data, r.W, r.mean) - 1e-9);
        }
    }
}

TEST_CASE("PCA edge cases") {
    const Eigen::MatrixXd constant = Eigen::MatrixXd::Constant(10, 3, 2.5);
    const auto r = pca_fit(constant, 2);
    CHECK(pca_objective(constant, r.W, r.mean) == 0.0);
    oracle::Gen g(95);
    CHECK_THROWS_AS(pca_fit(g.matrix(10, 3), 4), ConfigError);
    CHECK_THROWS_AS(pca_fit(g.matrix(10, 3), 0), ConfigError);
    CHECK_THROWS_AS(pca_objective(g.matrix(10, 3), g.matrix(2, 1), Eigen::VectorXd::Zero(3)), DomainError);
}

TEST_CASE("soft threshold") {
    CHECK(soft_threshold(3.0, 1.0) == 2.0);
    CHECK(soft_threshold(-3.0, 1.0) == -2.0);
    CHECK(soft_threshold(0.5, 1.0) == 0.0);
    CHECK(soft_threshold(-1.0, 1.0) == 0.0);
}

TEST_CASE("scalar sparse code equals the closed-form prox") {
    oracle::Gen g(96);
    for (int t = 0; t < 200; ++t) {
        const double x = g.uniform(-5, 5);
        const double w = g.uniform(-2, 2);
        const double lambda = g.uniform(0, 4);
        const double expected = (w * x > 0 ? 1.0 : -1.0) * std::max(0.0, (std::abs(w * x) - lambda / 2) / (w * w));
        const double z = sparse_code(Eigen::MatrixXd::Constant(1, 1, x), Eigen::MatrixXd::Constant(1, 1, w), lambda,
                                     Eigen::MatrixXd::Zero(1, 1))(0, 0);
        CHECK(std::abs(z - expected) < 1e-8 * std::max(1.0, std::abs(expected)));
        CHECK(lasso(x, w, z, lambda) <= lasso(x, w, z + 1e-4, lambda));
        CHECK(lasso(x, w, z, lambda) <= lasso(x, w, z - 1e-4, lambda));
    }
}

TEST_CASE("diagonal dictionary decouples into scalar proxes") {
    const Eigen::Vector3d wdiag(0.5, 1.0, 0.8);
    const Eigen::MatrixXd w = wdiag.asDiagonal();
    oracle::Gen g(97);
    const Eigen::MatrixXd data = g.matrix(20, 3, 2.0);
    const double lambda = 0.7;
    const Eigen::MatrixXd z = sparse_code(data, w, lambda, Eigen::MatrixXd::Zero(20, 3));
    for (int n = 0; n < 20; ++n) {
        for (int k = 0; k < 3; ++k) {
            const double wx = wdiag[k] * data(n, k);
            const double expected = (wx > 0 ? 1.0 : -1.0) * std::max(0.0, (std::abs(wx) - lambda / 2) / (wdiag[k] * wdiag[k]));
            CHECK(std::abs(z(n, k) - expected) < 1e-7);
        }
    }
}

TEST_CASE("large penalty kills every code") {
    oracle::Gen g(98);
    const Eigen::MatrixXd data = g.matrix(30, 4);
    const double lambda = 2.0 * data.rowwise().norm().maxCoeff();
    const auto r = dict_learn(data, 3, lambda, {.seed = 1});
    CHECK(r.dict.codes.isZero(0));
    const double mean_sq = data.rowwise().squaredNorm().mean();
    CHECK(dictionary_objective(data, r.dict, lambda) == doctest::Approx(mean_sq).epsilon(1e-14));
    for (int s : r.dict.sparsity()) {
        CHECK(s == 0);
    }
}

TEST_CASE("unpenalized complete dictionary reconstructs the data") {
    oracle::Gen g(99);
    const Eigen::MatrixXd data = g.matrix(50, 3) * Eigen::Matrix3d{{2, 0.3, 0}, {0, 1, 0.2}, {0.1, 0, 1.5}};
    const auto r = dict_learn(data, 3, 0.0, {.max_outer = 200, .tol = 1e-12, .inner_tol = 1e-12, .seed = 2});
    CHECK(dictionary_objective(data, r.dict, 0.0) < 1e-8 * data.rowwise().squaredNorm().mean());
    CHECK((r.dict.W.colwise().norm().array() <= 1.0 + 1e-12).all());
}

TEST_CASE("each half step never increases the penalized objective") {
    oracle::Gen g(100);
    for (std::uint64_t seed = 0; seed < 8; ++seed) {
        const Eigen::MatrixXd data = g.matrix(40, 5);
        const double lambda = g.uniform(0.01, 1.0);
        const auto r = dict_learn(data, 4, lambda, {.max_outer = 30, .seed = seed});
        const auto codes = r.trace.column("after_codes");
        const auto dict = r.trace.column("after_dictionary");
        for (std::size_t i = 1; i < codes.size(); ++i) {
            CHECK(codes[i] <= dict[i - 1] + 1e-10);
            CHECK(dict[i] <= codes[i] + 1e-10);
        }
        CHECK(dict.back() == doctest::Approx(dictionary_objective(data, r.dict, lambda)).epsilon(1e-12));
        CHECK((r.dict.W.colwise().norm().array() <= 1.0 + 1e-12).all());
    }
}

TEST_CASE("dictionary update is optimal for fixed codes") {
    oracle::Gen g(101);
    const Eigen::MatrixXd data = g.matrix(30, 3);
    const Eigen::MatrixXd codes = g.matrix(30, 2, 0.3);
    const Eigen::MatrixXd w = update_dictionary(data, codes, g.matrix(3, 2, 0.3), 200);
    auto err = [&](const Eigen::MatrixXd& cand) { return (data - codes * cand.transpose()).squaredNorm(); };
    for (int t = 0; t < 200; ++t) {
        Eigen::MatrixXd moved = w + g.matrix(3, 2, 1e-3);
        for (Eigen::Index c = 0; c < 2; ++c) {
            if (moved.col(c).norm() > 1) {
                moved.col(c).normalize();
            }
        }
        CHECK(err(moved) >= err(w) - 1e-9);
    }
}

TEST_CASE("dictionary configuration errors") {
    oracle::Gen g(102);
    const Eigen::MatrixXd data = g.matrix(5, 2);
    CHECK_THROWS_AS(dict_learn(data, 2, -0.1), ConfigError);
    CHECK_THROWS_AS(dict_learn(data, 0, 0.1), ConfigError);
    CHECK_THROWS_AS(dict_learn(data, 6, 0.1), ConfigError);
}
