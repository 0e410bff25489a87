#pragma once

// Exponential-family core in minimal parameterization.
//
//   ln p(x|eta) = eta' u(x) - A(eta) + ln m(x)
//
// Supported families and their sufficient statistics u(x):
//   Bernoulli       x in {0,1}           u = [x]                     K = 1
//   Categorical(C)  x in {0..C-1}        u_k = 1[x = k], k < C-1     K = C-1
//   Gaussian(D)     x in R^D             u = [x, vec(x x')]          K = D + D*D
//
// For the Gaussian the natural parameter is [Lambda*mean, vec(-Lambda/2)] with
// Lambda the precision; for D = 1 that is [nu/sigma^2, -1/(2 sigma^2)]. The
// matrix block is symmetrized before use, so A depends only on its symmetric
// part. The base measure m(x) is 1 for every family (the Gaussian's 2*pi
// normalizer lives in A).

#include <cstddef>
#include <span>
#include <string>

#include <Eigen/Dense>

#include "lvkit/common.hpp"

namespace lvkit::expfam {

enum class Family { Bernoulli, Categorical, Gaussian };

class ExpFamModel {
   public:
    static ExpFamModel bernoulli() { return ExpFamModel(Family::Bernoulli, 1); }
    /// Requires classes >= 2.
    static ExpFamModel categorical(int classes);
    /// Requires dim >= 1.
    static ExpFamModel gaussian(int dim);

    Family family() const { return family_; }
    /// Number of classes (Categorical) or dimension (Gaussian); 1 for Bernoulli.
    int size() const { return size_; }
    /// Length of the sufficient-statistic vector.
    Eigen::Index num_stats() const;
    std::string name() const;

    bool operator==(const ExpFamModel&) const = default;

   private:
    ExpFamModel(Family f, int size) : family_(f), size_(size) {}
    Family family_;
    int size_;
};

struct NaturalParams {
    Eigen::VectorXd eta;
};

struct MeanParams {
    Eigen::VectorXd mu;
};

/// Observation: a 1-vector holding the outcome for Bernoulli/Categorical, a D-vector for Gaussian.
using Observation = Eigen::VectorXd;

// ----- constructors for common parameterizations -----

/// Natural parameters of N(mean, variance) in one dimension.
NaturalParams gaussian_natural(double mean, double variance);
/// Natural parameters of N(mean, cov); cov must be SPD.
NaturalParams gaussian_natural(const Eigen::VectorXd& mean, const Eigen::MatrixXd& cov);
/// Mean vector and covariance of a Gaussian given its natural parameters.
std::pair<Eigen::VectorXd, Eigen::MatrixXd> gaussian_moments(const ExpFamModel& model, const NaturalParams& eta);

Observation scalar_observation(double x);

// ----- core operations -----

/// Throws DomainError unless eta is a valid natural parameter of the model.
void validate(const ExpFamModel& model, const NaturalParams& eta);
void validate(const ExpFamModel& model, const MeanParams& mu);

double log_partition(const ExpFamModel& model, const NaturalParams& eta);
MeanParams nat_to_mean(const ExpFamModel& model, const NaturalParams& eta);
/// Inverse of nat_to_mean. Bernoulli/Categorical probabilities strictly inside
/// (0,1) are clamped to [1e-12, 1-1e-12] before the logit; exact 0 or 1 is a DomainError.
NaturalParams mean_to_nat(const ExpFamModel& model, const MeanParams& mu);

Eigen::VectorXd sufficient_stats(const ExpFamModel& model, const Observation& x);
double log_prob(const ExpFamModel& model, const NaturalParams& eta, const Observation& x);
Observation sample(const ExpFamModel& model, const NaturalParams& eta, Rng& rng);

/// Moment matching: the empirical mean of u(x). Discrete probabilities are
/// clamped into [1e-12, 1-1e-12]; a singular Gaussian sample covariance is an
/// EstimationError.
MeanParams ml_fit(const ExpFamModel& model, std::span<const Observation> data);

/// KL(p(.|eta1) || p(.|eta2)) in nats as the Bregman divergence of the log-partition:
///   A(eta2) - A(eta1) - (eta2 - eta1)' mu1.
double kl_exponential(const ExpFamModel& model, const NaturalParams& eta1, const NaturalParams& eta2);

inline constexpr double kProbabilityClamp = 1e-12;

}  // namespace lvkit::expfam
