#pragma once

// Stochastic gradient descent with Robbins-Monro style step-size schedules.

#include <cstdint>
#include <functional>
#include <optional>

#include <Eigen/Dense>

#include "lvkit/common.hpp"

namespace lvkit::inference {

enum class Schedule {
    Constant,     // gamma
    InverseIter,  // gamma / i
    InverseSqrt,  // gamma / sqrt(i)
};

struct SgdConfig {
    Schedule schedule = Schedule::Constant;
    double gamma = 0.1;
    int minibatch = 1;
    int max_iters = 1000;
    std::uint64_t seed = 0;
    /// Stop early once the gradient norm is at most this value.
    double grad_tol = 0.0;
};

/// gamma (must be >= 0 and finite) and minibatch (>= 1); ConfigError otherwise.
void validate(const SgdConfig& config);

/// Step size at iteration i >= 1.
double step_size(const SgdConfig& config, int iteration);

/// Gradient oracle: returns a (possibly noisy) gradient at phi using rng for any sampling.
using GradientFn = std::function<Eigen::VectorXd(const Eigen::VectorXd& phi, Rng& rng)>;

struct SgdResult {
    Eigen::VectorXd phi;
    Trace trace;  // columns: step, grad_norm[, objective]
    int iterations = 0;
};

/// phi <- phi - gamma_i grad(phi). A non-finite gradient raises NumericError
/// whose message lists the iteration and the current iterate.
SgdResult sgd(const GradientFn& grad, const Eigen::VectorXd& phi0, const SgdConfig& config,
              const std::function<double(const Eigen::VectorXd&)>& objective = {});

}  // namespace lvkit::inference
