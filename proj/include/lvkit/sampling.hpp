#pragma once

// Monte Carlo estimation of marginals over a finite latent variable.

#include <Eigen/Dense>

#include "lvkit/common.hpp"
#include "lvkit/divergences.hpp"

namespace lvkit::inference {

struct MonteCarloEstimate {
    double mean = 0.0;
    double std_error = 0.0;
};

/// (1/M) sum_m p(z_m) p(x|z_m) / q(z_m) with z_m ~ q. likelihood is a K x |X|
/// table of p(x|z); x indexes its columns. A proposal that is zero where the
/// prior is positive raises DomainError.
MonteCarloEstimate importance_marginal(const divergences::FinitePmf& prior, const Eigen::MatrixXd& likelihood,
                                       Eigen::Index x, const divergences::FinitePmf& proposal, int samples, Rng& rng);

/// Exact sum_z p(z) p(x|z).
double exact_marginal(const divergences::FinitePmf& prior, const Eigen::MatrixXd& likelihood, Eigen::Index x);

}  // namespace lvkit::inference
