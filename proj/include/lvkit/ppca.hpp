#pragma once

// Probabilistic PCA: x = W z + mu + noise, z ~ N(0, I_M), noise ~ N(0, sigma2 I_D).

#include <cstdint>
#include <optional>
#include <variant>

#include <Eigen/Dense>

#include "lvkit/common.hpp"

namespace lvkit::latent {

struct PpcaParams {
    Eigen::MatrixXd W;   // D x M loadings
    Eigen::VectorXd mu;  // D
    double sigma2 = 1.0;

    Eigen::Index dim() const { return W.rows(); }
    Eigen::Index latent_dim() const { return W.cols(); }
};

void validate(const PpcaParams& params);

struct GaussianPosterior {
    Eigen::VectorXd mean;
    Eigen::MatrixXd cov;
};

/// z | x ~ N(sigma^-2 J^-1 W'(x - mu), J^-1) with J = sigma^-2 W'W + I.
GaussianPosterior ppca_posterior(const PpcaParams& params, const Eigen::VectorXd& x);

/// Exact marginal log-likelihood sum_n ln N(x_n | mu, W W' + sigma2 I).
double ppca_log_likelihood(const PpcaParams& params, const Eigen::MatrixXd& data);

/// Random loadings (entries N(0,1) scaled by the data spread) from a seed.
struct PpcaRandomStart {
    std::uint64_t seed = 0;
    double sigma2 = 1.0;
};
struct PpcaGivenStart {
    PpcaParams params;
};
using PpcaInit = std::variant<PpcaRandomStart, PpcaGivenStart>;

struct PpcaConfig {
    int max_iters = 500;
    /// Relative log-likelihood gain below which EM stops.
    double tol = 1e-8;
    /// Hold sigma2 at this value and update only W (the small-noise PCA limit).
    std::optional<double> fixed_sigma2;
};

struct PpcaResult {
    PpcaParams params;
    Trace trace;  // columns: loglik, sigma2
    int iterations = 0;
    bool converged = false;
};

/// EM with the closed-form expected-statistics updates; mu is the sample mean.
/// Requires M <= D and N > M; a data covariance of rank below M is an EstimationError.
PpcaResult ppca_fit(const Eigen::MatrixXd& data, int latent_dim, const PpcaInit& init, const PpcaConfig& config = {});

/// Posterior-mean reconstructions W E[z|x] + mu, one row per sample.
Eigen::MatrixXd ppca_reconstruct(const PpcaParams& params, const Eigen::MatrixXd& data);

}  // namespace lvkit::latent
