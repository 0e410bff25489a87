#pragma once

// Monte Carlo gradients of the variational free energy KL(q(.|phi) || p(x, .)).

#include <Eigen/Dense>

#include "lvkit/common.hpp"
#include "lvkit/elbo.hpp"

namespace lvkit::inference {

struct GradientEstimate {
    Eigen::VectorXd mean;
    Eigen::VectorXd variance;   // per-coordinate sample variance of the single-draw estimates
    Eigen::VectorXd std_error;  // sqrt(variance / M)
};

/// q(z=1|phi) = sigma(phi) over a two-state latent.
/// Single-draw estimate (ln q(z|phi) - ln p(x, z)) (z - sigma(phi)).
GradientEstimate reinforce_gradient(const latent::DiscreteLatentJoint& joint, const expfam::Observation& x, double phi,
                                    int samples, Rng& rng);

/// The score d/dphi ln q(z|phi) = z - sigma(phi) alone (mean zero).
GradientEstimate bernoulli_score(double phi, int samples, Rng& rng);

/// Exact free energy KL(q(.|phi) || p(x, .)) by enumeration of z in {0, 1}.
double bernoulli_free_energy(const latent::DiscreteLatentJoint& joint, const expfam::Observation& x, double phi);
/// Its derivative sigma'(phi) (phi - ln p(x, 1) + ln p(x, 0)).
double bernoulli_free_energy_gradient(const latent::DiscreteLatentJoint& joint, const expfam::Observation& x,
                                      double phi);

// Gaussian setup: prior N(0, 1), likelihood N(x | z, 1), q = N(b, e^{2s}).
// The exact posterior is N(x/2, 1/2).

/// Exact gradient (2b - x, 2e^{2s} - 1) of KL(q || p(x, .)) with respect to (b, s).
Eigen::Vector2d gaussian_free_energy_gradient(double x, double b, double s);

/// Reparametrized estimate with z = b + e^s w, w ~ N(0, 1): single-draw
/// gradient of -ln p(x|z) plus the exact gradient (b, e^{2s} - 1) of KL(q || prior).
GradientEstimate reparam_gradient(double x, double b, double s, int samples, Rng& rng);

/// REINFORCE on the same setup: (ln q(z) - ln p(x, z)) times the score
/// ((z - b)/gamma^2, (z - b)^2/gamma^2 - 1).
GradientEstimate reinforce_gaussian_gradient(double x, double b, double s, int samples, Rng& rng);

/// Both Gaussian estimators evaluated on one shared set of noise draws w.
struct PairedGradientRun {
    GradientEstimate reparam;
    GradientEstimate reinforce;
};
PairedGradientRun paired_gaussian_gradients(double x, double b, double s, int samples, Rng& rng);

}  // namespace lvkit::inference
