#pragma once

// ELBO machinery for models with a finite latent variable z in {0..K-1}:
//
//   p(x|theta) = sum_z p(z|theta) p(x|z,theta)
//
// Everything here is computed by enumeration of z, which makes the exact
// posterior and ln p(x) available as oracles for the bound.

#include <cstddef>
#include <vector>

#include "lvkit/common.hpp"
#include "lvkit/divergences.hpp"
#include "lvkit/expfam.hpp"

namespace lvkit::latent {

using divergences::FinitePmf;

/// Prior over z plus one exponential-family conditional p(x|z) per latent value.
class DiscreteLatentJoint {
   public:
    struct Component {
        expfam::ExpFamModel model;
        expfam::NaturalParams eta;
    };

    /// All components must share the same family; prior size must equal the component count.
    DiscreteLatentJoint(FinitePmf prior, std::vector<Component> components);

    const FinitePmf& prior() const { return prior_; }
    const std::vector<Component>& components() const { return components_; }
    Eigen::Index num_latent() const { return prior_.size(); }

    /// ln p(x|z); the prior is not included.
    double log_likelihood(Eigen::Index z, const expfam::Observation& x) const;
    /// ln p(x, z) = ln p(z) + ln p(x|z); -inf where the prior is zero.
    double log_joint(Eigen::Index z, const expfam::Observation& x) const;
    /// Vector of ln p(x, z) over z.
    Eigen::VectorXd log_joint(const expfam::Observation& x) const;
    /// ln p(x) = ln sum_z p(x, z).
    double log_marginal(const expfam::Observation& x) const;

   private:
    FinitePmf prior_;
    std::vector<Component> components_;
};

/// z ~ Bern(0.5); x|z=0 ~ N(2,1); x|z=1 ~ N(theta,1).
DiscreteLatentJoint bernoulli_gaussian_model(double theta);

/// q(z) proportional to p(z) p(x|z). NumericError when every joint term is zero.
FinitePmf exact_posterior(const DiscreteLatentJoint& model, const expfam::Observation& x);

/// The five algebraically equivalent ELBO expressions.
enum class ElboForm {
    LearningSignal,  // E_q[ln p(x,z) - ln q(z)]
    EnergyEntropy,   // E_q[ln p(x,z)] + H(q)
    CrossEntropyKL,  // E_q[ln p(x|z)] - KL(q || p(z))
    CompactKL,       // -KL(q || p(x, .)) against the unnormalized joint
    LLminusKL,       // ln p(x) - KL(q || p(z|x))
};

/// ELBO L(q, theta) <= ln p(x|theta). Flagged -inf when q puts mass where p(x,z) = 0.
ExtendedValue elbo(const DiscreteLatentJoint& model, const FinitePmf& q, const expfam::Observation& x,
                   ElboForm form = ElboForm::LearningSignal);

struct MultiSampleElboEstimate {
    double mean = 0.0;
    double std_error = 0.0;
    std::vector<double> runs;
};

/// M_runs independent draws of ln (1/K sum_k p(x,z_k)/q(z_k)) with z_k ~ q i.i.d.
MultiSampleElboEstimate multi_sample_elbo(const DiscreteLatentJoint& model, const FinitePmf& q,
                                          const expfam::Observation& x, int k_samples, int m_runs, Rng& rng);

}  // namespace lvkit::latent
