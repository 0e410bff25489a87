#include "lvkit/sampling.hpp"

#include <cmath>
#include <string>

namespace lvkit::inference {

namespace {

void require_table(const divergences::FinitePmf& prior, const Eigen::MatrixXd& likelihood, Eigen::Index x) {
    if (likelihood.rows() != prior.size()) {
        throw DomainError("likelihood table needs one row per latent value");
    }
    if (x < 0 || x >= likelihood.cols()) {
        throw DomainError("observation index " + std::to_string(x) + " outside the likelihood table");
    }
    if (!likelihood.allFinite() || (likelihood.array() < 0).any()) {
        throw DomainError("likelihood table entries must be finite and >= 0");
    }
}

}  // namespace

double exact_marginal(const divergences::FinitePmf& prior, const Eigen::MatrixXd& likelihood, Eigen::Index x) {
    require_table(prior, likelihood, x);
    return prior.probs().dot(likelihood.col(x));
}

MonteCarloEstimate importance_marginal(const divergences::FinitePmf& prior, const Eigen::MatrixXd& likelihood,
                                       Eigen::Index x, const divergences::FinitePmf& proposal, int samples, Rng& rng) {
    require_table(prior, likelihood, x);
    if (proposal.size() != prior.size()) {
        throw DomainError("proposal and prior must share the latent alphabet");
    }
    for (Eigen::Index z = 0; z < prior.size(); ++z) {
        if (prior[z] > 0 && proposal[z] == 0) {
            throw DomainError("proposal is zero at latent value " + std::to_string(z) + " where the prior is positive");
        }
    }
    if (samples < 1) {
        throw ConfigError("importance sampling needs at least one sample");
    }
    double sum = 0.0;
    double sum_sq = 0.0;
    for (int m = 0; m < samples; ++m) {
        const auto z = static_cast<Eigen::Index>(rng.categorical(proposal.probs()));
        const double w = prior[z] * likelihood(z, x) / proposal[z];
        sum += w;
        sum_sq += w * w;
    }
    MonteCarloEstimate est;
    est.mean = sum / samples;
    if (samples > 1) {
        const double var = std::max(0.0, (sum_sq - samples * est.mean * est.mean) / (samples - 1));
        est.std_error = std::sqrt(var / samples);
    }
    return est;
}

}  // namespace lvkit::inference
