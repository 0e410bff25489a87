#pragma once

// Gaussian approximations of a one-dimensional mixture of Gaussians:
// the M-projection argmin_q KL(p||q) (moment matching) and the
// I-projection argmin_q KL(q||p) (found numerically).

#include <cstddef>

#include <Eigen/Dense>

#include "lvkit/common.hpp"

namespace lvkit::inference {

struct MixtureOfGaussians1D {
    Eigen::VectorXd weights;    // sum to 1
    Eigen::VectorXd means;
    Eigen::VectorXd variances;  // > 0

    double log_density(double z) const;
    double mean() const;
    double variance() const;
};

void validate(const MixtureOfGaussians1D& target);

struct GaussianQ {
    double m = 0.0;
    double gamma2 = 1.0;

    double log_density(double z) const;
};

void validate(const GaussianQ& q);

inline constexpr std::size_t kProjectionNodes = 10000;

/// KL(q||p) by Gauss-Legendre quadrature on [m - 10 gamma, m + 10 gamma].
double kl_gaussian_to_mixture(const GaussianQ& q, const MixtureOfGaussians1D& target,
                              std::size_t nodes = kProjectionNodes);
/// KL(p||q) by Gauss-Legendre quadrature over [min mu_k - 10 sigma_k, max mu_k + 10 sigma_k].
double kl_mixture_to_gaussian(const MixtureOfGaussians1D& target, const GaussianQ& q,
                              std::size_t nodes = kProjectionNodes);

/// m = E[z], gamma2 = var[z] under the mixture.
GaussianQ m_projection_gaussian(const MixtureOfGaussians1D& target);

struct IProjectionConfig {
    enum class Strategy {
        GlobalScan,     // coarse grid over (m, ln gamma2), then local refinement from the best cell
        LocalFromInit,  // local refinement from `init`
    };
    Strategy strategy = Strategy::GlobalScan;
    GaussianQ init;
    int grid_m = 41;
    int grid_log_var = 21;
    /// Bracket width at which each golden-section search stops; also the
    /// per-cycle movement below which the alternation stops.
    double tol = 1e-7;
    std::size_t nodes = kProjectionNodes;
};

struct IProjectionResult {
    GaussianQ q;
    double kl = 0.0;
    int evaluations = 0;
};

/// Minimizes KL(q||p) by alternating golden-section searches over m and ln gamma2,
/// each bracketed downhill from the current point.
IProjectionResult i_projection_gaussian(const MixtureOfGaussians1D& target, const IProjectionConfig& config = {});

}  // namespace lvkit::inference
