#include <doctest.h>

#include <cmath>

#include "lvkit/sgd.hpp"

using namespace lvkit;
using namespace lvkit::inference;

namespace {

const Eigen::Vector2d kTarget(1.5, -2.0);

GradientFn quadratic(double noise = 0.0) {
    return [noise](const Eigen::VectorXd& phi, Rng& rng) -> Eigen::VectorXd {
        Eigen::VectorXd g = phi - kTarget;
        if (noise > 0) {
            for (Eigen::Index i = 0; i < g.size(); ++i) {
                g[i] += noise * rng.normal();
            }
        }
        return g;
    };
}

}  // namespace

TEST_CASE("step size schedules") {
    CHECK(step_size({.schedule = Schedule::Constant, .gamma = 0.3}, 7) == 0.3);
    CHECK(step_size({.schedule = Schedule::InverseIter, .gamma = 0.3}, 3) == doctest::Approx(0.1));
    CHECK(step_size({.schedule = Schedule::InverseSqrt, .gamma = 0.3}, 4) == doctest::Approx(0.15));
    CHECK_THROWS_AS(validate(SgdConfig{.gamma = -1}), ConfigError);
    CHECK_THROWS_AS(validate(SgdConfig{.gamma = NAN}), ConfigError);
    CHECK_THROWS_AS(validate(SgdConfig{.minibatch = 0}), ConfigError);
    CHECK_NOTHROW(validate(SgdConfig{.gamma = 0}));
}

TEST_CASE("zero gradient leaves phi unchanged") {
    const Eigen::Vector3d phi0(0.1, 0.2, 0.3);
    const auto r = sgd([](const Eigen::VectorXd& p, Rng&) -> Eigen::VectorXd { return Eigen::VectorXd::Zero(p.size()); },
                       phi0, {.max_iters = 50});
    CHECK(r.phi == phi0);
    CHECK(r.iterations <= 50);
}

TEST_CASE("constant step on the quadratic contracts geometrically") {
    const auto r = sgd(quadratic(), Eigen::Vector2d(0, 0), {.gamma = 0.5, .max_iters = 30});
    const auto norms = r.trace.column("grad_norm");
    for (std::size_t i = 1; i < norms.size(); ++i) {
        CHECK(norms[i] == doctest::Approx(0.5 * norms[i - 1]).epsilon(1e-12));
    }
    CHECK((r.phi - kTarget).norm() == doctest::Approx(std::pow(0.5, 30) * kTarget.norm()).epsilon(1e-9));
}

TEST_CASE("exact-gradient convergence within the iteration budgets") {
    for (double gamma : {0.01, 0.1, 0.5, 1.0}) {
        const auto r = sgd(quadratic(), Eigen::Vector2d(10, 10), {.gamma = gamma, .max_iters = 10000});
        CHECK((r.phi - kTarget).norm() < 1e-6);
    }
    const auto inv = sgd(quadratic(), Eigen::Vector2d(10, 10),
                         {.schedule = Schedule::InverseIter, .gamma = 1.0, .max_iters = 100000});
    CHECK((inv.phi - kTarget).norm() < 1e-6);
    const auto sq = sgd(quadratic(), Eigen::Vector2d(10, 10),
                        {.schedule = Schedule::InverseSqrt, .gamma = 1.0, .max_iters = 100000});
    CHECK((sq.phi - kTarget).norm() < 1e-6);
}

TEST_CASE("InverseIter with gamma below one decays only polynomially") {
    const auto r = sgd(quadratic(), Eigen::Vector2d(10, 10),
                       {.schedule = Schedule::InverseIter, .gamma = 0.5, .max_iters = 100000});
    const double err = (r.phi - kTarget).norm();
    CHECK(err > 1e-6);
    CHECK(err < 1e-1);
}

TEST_CASE("InverseIter averages out gradient noise") {
    double total = 0.0;
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        const auto r = sgd(quadratic(1.0), Eigen::Vector2d(5, 5),
                           {.schedule = Schedule::InverseIter, .gamma = 1.0, .max_iters = 10000, .seed = seed});
        total += (r.phi - kTarget).norm();
    }
    CHECK(total / 20 < 0.05);
}

TEST_CASE("runs are reproducible per seed") {
    const SgdConfig c{.schedule = Schedule::InverseSqrt, .gamma = 0.5, .max_iters = 200, .seed = 4};
    CHECK(sgd(quadratic(1.0), Eigen::Vector2d(1, 1), c).phi == sgd(quadratic(1.0), Eigen::Vector2d(1, 1), c).phi);
}

TEST_CASE("gradient tolerance stops early and the objective is traced") {
    const auto r = sgd(quadratic(), Eigen::Vector2d(0, 0), {.gamma = 0.5, .max_iters = 1000, .grad_tol = 1e-3},
                       [](const Eigen::VectorXd& p) { return 0.5 * (p - kTarget).squaredNorm(); });
    CHECK(r.iterations < 1000);
    CHECK(r.trace.columns() == std::vector<std::string>{"step", "grad_norm", "objective"});
    const auto obj = r.trace.column("objective");
    for (std::size_t i = 1; i < obj.size(); ++i) {
        CHECK(obj[i] <= obj[i - 1]);
    }
}

TEST_CASE("non-finite gradients abort with the iterate") {
    int calls = 0;
    GradientFn bad = [&](const Eigen::VectorXd& p, Rng&) -> Eigen::VectorXd {
        ++calls;
        return calls == 3 ? Eigen::VectorXd::Constant(p.size(), NAN) : Eigen::VectorXd(p - kTarget);
    };
    CHECK_THROWS_WITH_AS(sgd(bad, Eigen::Vector2d(0, 0), {.gamma = 0.5}), doctest::Contains("iteration 3"), NumericError);
    GradientFn wrong = [](const Eigen::VectorXd&, Rng&) -> Eigen::VectorXd { return Eigen::VectorXd::Zero(5); };
    CHECK_THROWS_AS(sgd(wrong, Eigen::Vector2d(0, 0), {}), NumericError);
}
