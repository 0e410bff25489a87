#include "lvkit/elbo.hpp"

#include <cmath>
#include <string>

namespace lvkit::latent {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

void require_compatible(const DiscreteLatentJoint& model, const FinitePmf& q) {
    if (q.size() != model.num_latent()) {
        throw DomainError("variational pmf has " + std::to_string(q.size()) + " states, model has " +
                          std::to_string(model.num_latent()));
    }
}

}  // namespace

DiscreteLatentJoint::DiscreteLatentJoint(FinitePmf prior, std::vector<Component> components)
    : prior_(std::move(prior)), components_(std::move(components)) {
    if (static_cast<Eigen::Index>(components_.size()) != prior_.size()) {
        throw DomainError("one conditional per latent value is required");
    }
    for (const auto& c : components_) {
        if (c.model.family() != components_.front().model.family() || c.model.size() != components_.front().model.size()) {
            throw DomainError("all latent components must share one exponential family");
        }
        expfam::validate(c.model, c.eta);
    }
}

double DiscreteLatentJoint::log_likelihood(Eigen::Index z, const expfam::Observation& x) const {
    const auto& c = components_.at(static_cast<std::size_t>(z));
    return expfam::log_prob(c.model, c.eta, x);
}

double DiscreteLatentJoint::log_joint(Eigen::Index z, const expfam::Observation& x) const {
    const double pz = prior_[z];
    if (pz == 0) {
        return kNegInf;
    }
    return std::log(pz) + log_likelihood(z, x);
}

Eigen::VectorXd DiscreteLatentJoint::log_joint(const expfam::Observation& x) const {
    Eigen::VectorXd out(num_latent());
    for (Eigen::Index z = 0; z < num_latent(); ++z) {
        out[z] = log_joint(z, x);
    }
    return out;
}

double DiscreteLatentJoint::log_marginal(const expfam::Observation& x) const { return log_sum_exp(log_joint(x)); }

DiscreteLatentJoint bernoulli_gaussian_model(double theta) {
    const auto gauss = expfam::ExpFamModel::gaussian(1);
    return DiscreteLatentJoint(FinitePmf(Eigen::Vector2d(0.5, 0.5)),
                               {{gauss, expfam::gaussian_natural(2.0, 1.0)}, {gauss, expfam::gaussian_natural(theta, 1.0)}});
}

FinitePmf exact_posterior(const DiscreteLatentJoint& model, const expfam::Observation& x) {
    const Eigen::VectorXd lj = model.log_joint(x);
    const double lse = log_sum_exp(lj);
    if (!std::isfinite(lse)) {
        throw NumericError("exact_posterior: joint density p(x, z) is zero for every z");
    }
    Eigen::VectorXd post = (lj.array() - lse).exp();
    post /= post.sum();
    return FinitePmf(post);
}

ExtendedValue elbo(const DiscreteLatentJoint& model, const FinitePmf& q, const expfam::Observation& x, ElboForm form) {
    require_compatible(model, q);
    const Eigen::Index k = model.num_latent();
    const Eigen::VectorXd lj = model.log_joint(x);
    for (Eigen::Index z = 0; z < k; ++z) {
        if (q[z] > 0 && !std::isfinite(lj[z])) {
            return ExtendedValue::minus_infinity();
        }
    }

    double value = 0.0;
    switch (form) {
        case ElboForm::LearningSignal:
            for (Eigen::Index z = 0; z < k; ++z) {
                if (q[z] > 0) {
                    value += q[z] * (lj[z] - std::log(q[z]));
                }
            }
            break;
        case ElboForm::EnergyEntropy: {
            double energy = 0.0;
            for (Eigen::Index z = 0; z < k; ++z) {
                if (q[z] > 0) {
                    energy += q[z] * lj[z];
                }
            }
            value = energy + divergences::generalized_entropy(q, divergences::LogLoss{});
            break;
        }
        case ElboForm::CrossEntropyKL: {
            double fit = 0.0;
            for (Eigen::Index z = 0; z < k; ++z) {
                if (q[z] > 0) {
                    fit += q[z] * model.log_likelihood(z, x);
                }
            }
            value = fit - divergences::kl(q, model.prior()).value;
            break;
        }
        case ElboForm::CompactKL: {
            // KL against the unnormalized measure p(x, .).
            double kl_unnormalized = 0.0;
            for (Eigen::Index z = 0; z < k; ++z) {
                if (q[z] > 0) {
                    kl_unnormalized += q[z] * (std::log(q[z]) - lj[z]);
                }
            }
            value = -kl_unnormalized;
            break;
        }
        case ElboForm::LLminusKL: {
            const FinitePmf post = exact_posterior(model, x);
            const auto gap = divergences::kl(q, post);
            if (gap.infinite) {
                return ExtendedValue::minus_infinity();
            }
            value = model.log_marginal(x) - gap.value;
            break;
        }
    }
    return ExtendedValue::finite(value);
}

MultiSampleElboEstimate multi_sample_elbo(const DiscreteLatentJoint& model, const FinitePmf& q,
                                          const expfam::Observation& x, int k_samples, int m_runs, Rng& rng) {
    require_compatible(model, q);
    if (k_samples < 1 || m_runs < 1) {
        throw ConfigError("multi-sample ELBO needs K >= 1 samples and M >= 1 runs");
    }
    const Eigen::VectorXd lj = model.log_joint(x);
    const Eigen::VectorXd log_weight = lj.array() - q.probs().array().log();

    MultiSampleElboEstimate est;
    est.runs.reserve(static_cast<std::size_t>(m_runs));
    std::vector<double> draws(static_cast<std::size_t>(k_samples));
    for (int m = 0; m < m_runs; ++m) {
        for (auto& d : draws) {
            d = log_weight[static_cast<Eigen::Index>(rng.categorical(q.probs()))];
        }
        est.runs.push_back(log_sum_exp(draws) - std::log(static_cast<double>(k_samples)));
    }
    double sum = 0.0;
    for (double r : est.runs) {
        sum += r;
    }
    est.mean = sum / m_runs;
    double ss = 0.0;
    for (double r : est.runs) {
        ss += (r - est.mean) * (r - est.mean);
    }
    est.std_error = m_runs > 1 ? std::sqrt(ss / (m_runs - 1) / m_runs) : 0.0;
    return est;
}

}  // namespace lvkit::latent
