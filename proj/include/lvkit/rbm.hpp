#pragma once

// Binary restricted Boltzmann machine with energy
//   E(x, z) = -a'z - b'x - x'W z,   x in {0,1}^D, z in {0,1}^M.

#include <cstdint>

#include <Eigen/Dense>

#include "lvkit/common.hpp"
#include "lvkit/sgd.hpp"

namespace lvkit::rbm {

struct RbmParams {
    Eigen::VectorXd a;  // M hidden biases
    Eigen::VectorXd b;  // D visible biases
    Eigen::MatrixXd W;  // D x M

    Eigen::Index visible() const { return W.rows(); }
    Eigen::Index hidden() const { return W.cols(); }

    static RbmParams zeros(Eigen::Index d, Eigen::Index m);
};

/// Sizes consistent and entries finite; DomainError otherwise.
void validate(const RbmParams& params);

/// Largest D + M handled by the enumeration routines.
inline constexpr int kMaxEnumeratedUnits = 24;

/// Biases 0, weights uniform on (-0.01, 0.01).
RbmParams initialize(Eigen::Index d, Eigen::Index m, std::uint64_t seed);

double energy(const RbmParams& params, const Eigen::VectorXd& x, const Eigen::VectorXd& z);

/// p(z_j = 1 | x) = sigma(w_j'x + a_j).
Eigen::VectorXd cond_hidden(const RbmParams& params, const Eigen::VectorXd& x);
/// p(x_i = 1 | z) = sigma(w~_i'z + b_i).
Eigen::VectorXd cond_visible(const RbmParams& params, const Eigen::VectorXd& z);

/// ln Z by enumeration over the smaller layer; ConfigError if D + M > 24.
double log_partition(const RbmParams& params);
/// ln p(x) = b'x + sum_j softplus(a_j + w_j'x) - ln Z.
double log_marginal(const RbmParams& params, const Eigen::VectorXd& x);
/// Sum of ln p(x_n) over the rows of data.
double log_likelihood(const RbmParams& params, const Eigen::MatrixXd& data);

/// Gradient (ascent direction) of ln p(x) or of the average over data rows.
struct RbmGradient {
    Eigen::VectorXd a;
    Eigen::VectorXd b;
    Eigen::MatrixXd W;

    Eigen::VectorXd flatten() const;
};

/// Positive phase E_{z|x} minus negative phase E_{x,z}, the latter by enumeration.
RbmGradient exact_gradient(const RbmParams& params, const Eigen::VectorXd& x);
RbmGradient exact_gradient_mean(const RbmParams& params, const Eigen::MatrixXd& data);

/// CD-k estimate from the chain x -> z(0) -> x(1) -> z(1) -> ... -> z(k), all
/// units sampled: x z(0)' - x(k) z(k)', z(0) - z(k), x - x(k).
RbmGradient cd_k_gradient(const RbmParams& params, const Eigen::VectorXd& x, int k, Rng& rng);

struct TrainResult {
    RbmParams params;
    /// loglik (mean exact ln p per sample) when D + M <= 24, else reconstruction_error.
    Trace trace;
};

/// sgd.max_iters epochs; each epoch visits the rows in a fresh random order in
/// minibatches of sgd.minibatch, ascending the averaged CD-k estimate with step
/// step_size(sgd, epoch).
TrainResult train(const RbmParams& params0, const Eigen::MatrixXd& data, int k, const inference::SgdConfig& sgd,
                  Rng& rng);

}  // namespace lvkit::rbm
