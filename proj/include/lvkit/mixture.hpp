#pragma once

// EM for finite mixtures with exact (enumerated) E steps.
//
// Gaussian mixtures: the M step is the responsibility-weighted version of the
// supervised QDA fit (weighted class frequencies, means and covariances).
// Bernoulli mixtures: the same with per-dimension success probabilities.

#include <cstdint>
#include <optional>
#include <variant>
#include <vector>

#include <Eigen/Dense>

#include "lvkit/common.hpp"

namespace lvkit::latent {

struct GaussianMixture {
    Eigen::VectorXd weights;                 // K, sums to 1
    std::vector<Eigen::VectorXd> means;      // K of length D
    std::vector<Eigen::MatrixXd> covariances;  // K of D x D, SPD

    Eigen::Index num_components() const { return weights.size(); }
    Eigen::Index dim() const { return means.empty() ? 0 : means.front().size(); }
};

struct BernoulliMixture {
    Eigen::VectorXd weights;           // K, sums to 1
    std::vector<Eigen::VectorXd> probs;  // K of length W, entries in [1e-6, 1-1e-6]

    Eigen::Index num_components() const { return weights.size(); }
};

inline constexpr double kBernoulliMixtureClamp = 1e-6;

void validate(const GaussianMixture& params);
void validate(const BernoulliMixture& params);

/// N x K matrix of ln(pi_k p(x_n | k)).
Eigen::MatrixXd component_log_joint(const GaussianMixture& params, const Eigen::MatrixXd& data);
Eigen::MatrixXd component_log_joint(const BernoulliMixture& params, const Eigen::MatrixXd& data);

/// sum_n ln p(x_n).
double log_likelihood(const GaussianMixture& params, const Eigen::MatrixXd& data);
double log_likelihood(const BernoulliMixture& params, const Eigen::MatrixXd& data);

/// Responsibilities r_nk = pi_k p(x_n|k) / sum_j pi_j p(x_n|j). Rows with zero
/// total density raise NumericError naming the row.
Eigen::MatrixXd gmm_e_step(const GaussianMixture& params, const Eigen::MatrixXd& data);
Eigen::MatrixXd bernoulli_e_step(const BernoulliMixture& params, const Eigen::MatrixXd& data);

/// Weighted moment matching. Each covariance gets eps*I added with
/// eps = 1e-8 * trace(S)/D for the pooled data covariance S (1e-8 when S = 0).
/// A component whose responsibilities sum below 1e-12 raises EstimationError.
GaussianMixture gmm_m_step(const Eigen::MatrixXd& responsibilities, const Eigen::MatrixXd& data);
BernoulliMixture bernoulli_m_step(const Eigen::MatrixXd& responsibilities, const Eigen::MatrixXd& data);

/// Initialization from k-means prototypes (seeded random data points), uniform
/// weights and the pooled data covariance (Gaussian) or clamped prototypes (Bernoulli).
struct KMeansStart {
    std::uint64_t seed = 0;
};
template <class Params>
struct GivenStart {
    Params params;
};

struct EmConfig {
    int max_iters = 500;
    /// Stop once the relative log-likelihood gain falls below tol.
    double tol = 1e-8;
    /// Gaussian only: hold every covariance at this multiple of I (and skip its update).
    std::optional<double> fixed_isotropic_variance;
};

template <class Params>
struct EmResult {
    Params params;
    Trace trace;  // columns: loglik, elbo
    int iterations = 0;
    bool converged = false;
    Eigen::MatrixXd responsibilities;
};

using GmmInit = std::variant<KMeansStart, GivenStart<GaussianMixture>>;
using BernoulliInit = std::variant<KMeansStart, GivenStart<BernoulliMixture>>;

EmResult<GaussianMixture> gmm_fit(const Eigen::MatrixXd& data, int k, const GmmInit& init, const EmConfig& config = {});
EmResult<BernoulliMixture> bernoulli_mixture_fit(const Eigen::MatrixXd& data, int k, const BernoulliInit& init,
                                                 const EmConfig& config = {});

/// Hard assignments argmax_k r_nk (ties to the lowest index).
std::vector<int> hard_assignments(const Eigen::MatrixXd& responsibilities);

/// Weighted draw from a Gaussian mixture: N x D samples and their component labels.
std::pair<Eigen::MatrixXd, std::vector<int>> sample(const GaussianMixture& params, int n, Rng& rng);

}  // namespace lvkit::latent
