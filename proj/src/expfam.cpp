#include "lvkit/expfam.hpp"

#include <algorithm>
#include <cmath>

namespace lvkit::expfam {

namespace {

struct GaussianNatural {
    Eigen::VectorXd h;               // precision * mean
    Eigen::MatrixXd precision;       // SPD
    Eigen::LLT<Eigen::MatrixXd> llt;  // of precision
};

void require_length(const ExpFamModel& model, Eigen::Index length, const char* what) {
    if (length != model.num_stats()) {
        throw DomainError(std::string(what) + " of length " + std::to_string(length) + " does not belong to family " +
                          model.name() + " (expects " + std::to_string(model.num_stats()) + ")");
    }
}

GaussianNatural decode_gaussian(const ExpFamModel& model, const NaturalParams& eta) {
    const Eigen::Index d = model.size();
    require_length(model, eta.eta.size(), "natural parameter");
    if (!eta.eta.allFinite()) {
        throw DomainError("Gaussian natural parameters must be finite");
    }
    GaussianNatural g;
    g.h = eta.eta.head(d);
    const Eigen::Map<const Eigen::MatrixXd> second(eta.eta.data() + d, d, d);
    g.precision = -(second + second.transpose());  // -2 * sym(second)
    g.llt.compute(g.precision);
    if (g.llt.info() != Eigen::Success) {
        throw DomainError("Gaussian natural parameters: precision (-2 x second-order block) is not positive definite");
    }
    return g;
}

Eigen::VectorXd encode_gaussian(const Eigen::VectorXd& h, const Eigen::MatrixXd& precision) {
    const Eigen::Index d = h.size();
    Eigen::VectorXd eta(d + d * d);
    eta.head(d) = h;
    Eigen::Map<Eigen::MatrixXd>(eta.data() + d, d, d) = -0.5 * precision;
    return eta;
}

int discrete_outcome(const ExpFamModel& model, const Observation& x) {
    if (x.size() != 1 || !std::isfinite(x[0]) || x[0] != std::round(x[0])) {
        throw DomainError(model.name() + ": observation must be a single integer outcome");
    }
    const int k = static_cast<int>(x[0]);
    const int support = model.family() == Family::Bernoulli ? 2 : model.size();
    if (k < 0 || k >= support) {
        throw DomainError(model.name() + ": outcome " + std::to_string(k) + " outside support");
    }
    return k;
}

/// Clamp probabilities into [c, 1-c] and keep the implied reference mass >= c.
Eigen::VectorXd clamp_probabilities(Eigen::VectorXd p) {
    for (auto& v : p) {
        v = std::clamp(v, kProbabilityClamp, 1.0 - kProbabilityClamp);
    }
    const double total = p.sum();
    if (total > 1.0 - kProbabilityClamp) {
        p *= (1.0 - kProbabilityClamp) / total;
    }
    return p;
}

}  // namespace

ExpFamModel ExpFamModel::categorical(int classes) {
    if (classes < 2) {
        throw DomainError("Categorical family requires at least 2 classes");
    }
    return ExpFamModel(Family::Categorical, classes);
}

ExpFamModel ExpFamModel::gaussian(int dim) {
    if (dim < 1) {
        throw DomainError("Gaussian family requires dimension >= 1");
    }
    return ExpFamModel(Family::Gaussian, dim);
}

Eigen::Index ExpFamModel::num_stats() const {
    switch (family_) {
        case Family::Bernoulli:
            return 1;
        case Family::Categorical:
            return size_ - 1;
        case Family::Gaussian:
            return size_ + static_cast<Eigen::Index>(size_) * size_;
    }
    return 0;
}

std::string ExpFamModel::name() const {
    switch (family_) {
        case Family::Bernoulli:
            return "Bernoulli";
        case Family::Categorical:
            return "Categorical(" + std::to_string(size_) + ")";
        case Family::Gaussian:
            return "Gaussian(" + std::to_string(size_) + ")";
    }
    return "?";
}

NaturalParams gaussian_natural(double mean, double variance) {
    if (!(variance > 0) || !std::isfinite(mean) || !std::isfinite(variance)) {
        throw DomainError("Gaussian requires finite mean and positive variance");
    }
    Eigen::VectorXd eta(2);
    eta << mean / variance, -0.5 / variance;
    return {eta};
}

NaturalParams gaussian_natural(const Eigen::VectorXd& mean, const Eigen::MatrixXd& cov) {
    if (cov.rows() != mean.size() || cov.cols() != mean.size()) {
        throw DomainError("Gaussian: covariance shape does not match mean");
    }
    Eigen::LLT<Eigen::MatrixXd> llt(cov);
    if (llt.info() != Eigen::Success || !cov.allFinite() || !mean.allFinite()) {
        throw DomainError("Gaussian: covariance is not symmetric positive definite");
    }
    const Eigen::MatrixXd precision = llt.solve(Eigen::MatrixXd::Identity(cov.rows(), cov.cols()));
    return {encode_gaussian(precision * mean, 0.5 * (precision + precision.transpose()))};
}

std::pair<Eigen::VectorXd, Eigen::MatrixXd> gaussian_moments(const ExpFamModel& model, const NaturalParams& eta) {
    if (model.family() != Family::Gaussian) {
        throw DomainError("gaussian_moments: model is " + model.name());
    }
    const auto g = decode_gaussian(model, eta);
    const Eigen::Index d = model.size();
    Eigen::MatrixXd cov = g.llt.solve(Eigen::MatrixXd::Identity(d, d));
    return {g.llt.solve(g.h), cov};
}

Observation scalar_observation(double x) { return Observation::Constant(1, x); }

void validate(const ExpFamModel& model, const NaturalParams& eta) {
    require_length(model, eta.eta.size(), "natural parameter");
    if (model.family() == Family::Gaussian) {
        decode_gaussian(model, eta);
    } else if (!eta.eta.allFinite()) {
        throw DomainError(model.name() + ": natural parameters must be finite");
    }
}

void validate(const ExpFamModel& model, const MeanParams& mu) {
    require_length(model, mu.mu.size(), "mean parameter");
    if (!mu.mu.allFinite()) {
        throw DomainError(model.name() + ": mean parameters must be finite");
    }
    switch (model.family()) {
        case Family::Bernoulli:
        case Family::Categorical:
            if ((mu.mu.array() <= 0).any() || (mu.mu.array() >= 1).any() || !(mu.mu.sum() < 1 || model.family() == Family::Bernoulli)) {
                throw DomainError(model.name() + ": mean parameters must be probabilities strictly inside (0,1) with sum < 1");
            }
            break;
        case Family::Gaussian: {
            const Eigen::Index d = model.size();
            const Eigen::VectorXd m = mu.mu.head(d);
            const Eigen::Map<const Eigen::MatrixXd> second(mu.mu.data() + d, d, d);
            const Eigen::MatrixXd cov = 0.5 * (second + second.transpose()) - m * m.transpose();
            if (Eigen::LLT<Eigen::MatrixXd>(cov).info() != Eigen::Success) {
                throw DomainError("Gaussian mean parameters: E[xx'] - E[x]E[x]' is not positive definite");
            }
            break;
        }
    }
}

double log_partition(const ExpFamModel& model, const NaturalParams& eta) {
    validate(model, eta);
    switch (model.family()) {
        case Family::Bernoulli:
            return softplus(eta.eta[0]);
        case Family::Categorical: {
            Eigen::VectorXd full(eta.eta.size() + 1);
            full << eta.eta, 0.0;
            return log_sum_exp(full);
        }
        case Family::Gaussian: {
            const auto g = decode_gaussian(model, eta);
            const double log_det = 2.0 * g.llt.matrixL().toDenseMatrix().diagonal().array().log().sum();
            return 0.5 * g.h.dot(g.llt.solve(g.h)) + 0.5 * model.size() * kLog2Pi - 0.5 * log_det;
        }
    }
    return 0.0;
}

MeanParams nat_to_mean(const ExpFamModel& model, const NaturalParams& eta) {
    validate(model, eta);
    switch (model.family()) {
        case Family::Bernoulli:
            return {Eigen::VectorXd::Constant(1, sigmoid(eta.eta[0]))};
        case Family::Categorical: {
            Eigen::VectorXd full(eta.eta.size() + 1);
            full << eta.eta, 0.0;
            const double lse = log_sum_exp(full);
            return {(eta.eta.array() - lse).exp().matrix()};
        }
        case Family::Gaussian: {
            const auto [mean, cov] = gaussian_moments(model, eta);
            const Eigen::Index d = model.size();
            Eigen::VectorXd mu(d + d * d);
            mu.head(d) = mean;
            Eigen::Map<Eigen::MatrixXd>(mu.data() + d, d, d) = cov + mean * mean.transpose();
            return {mu};
        }
    }
    return {};
}

NaturalParams mean_to_nat(const ExpFamModel& model, const MeanParams& mu) {
    validate(model, mu);
    switch (model.family()) {
        case Family::Bernoulli:
        case Family::Categorical: {
            const Eigen::VectorXd p = clamp_probabilities(mu.mu);
            const double reference = 1.0 - p.sum();
            if (model.family() == Family::Bernoulli) {
                return {Eigen::VectorXd::Constant(1, logit(p[0]))};
            }
            return {(p.array().log() - std::log(reference)).matrix()};
        }
        case Family::Gaussian: {
            const Eigen::Index d = model.size();
            const Eigen::VectorXd m = mu.mu.head(d);
            const Eigen::Map<const Eigen::MatrixXd> second(mu.mu.data() + d, d, d);
            const Eigen::MatrixXd cov = 0.5 * (second + second.transpose()) - m * m.transpose();
            Eigen::LLT<Eigen::MatrixXd> llt(cov);
            Eigen::MatrixXd precision = llt.solve(Eigen::MatrixXd::Identity(d, d));
            precision = 0.5 * (precision + precision.transpose());
            return {encode_gaussian(precision * m, precision)};
        }
    }
    return {};
}

Eigen::VectorXd sufficient_stats(const ExpFamModel& model, const Observation& x) {
    switch (model.family()) {
        case Family::Bernoulli:
            return Eigen::VectorXd::Constant(1, discrete_outcome(model, x));
        case Family::Categorical: {
            const int k = discrete_outcome(model, x);
            Eigen::VectorXd u = Eigen::VectorXd::Zero(model.size() - 1);
            if (k < model.size() - 1) {
                u[k] = 1.0;
            }
            return u;
        }
        case Family::Gaussian: {
            const Eigen::Index d = model.size();
            if (x.size() != d || !x.allFinite()) {
                throw DomainError(model.name() + ": observation must be a finite vector of length " + std::to_string(d));
            }
            Eigen::VectorXd u(d + d * d);
            u.head(d) = x;
            Eigen::Map<Eigen::MatrixXd>(u.data() + d, d, d) = x * x.transpose();
            return u;
        }
    }
    return {};
}

double log_prob(const ExpFamModel& model, const NaturalParams& eta, const Observation& x) {
    const Eigen::VectorXd u = sufficient_stats(model, x);
    return eta.eta.dot(u) - log_partition(model, eta);
}

Observation sample(const ExpFamModel& model, const NaturalParams& eta, Rng& rng) {
    validate(model, eta);
    switch (model.family()) {
        case Family::Bernoulli:
            return scalar_observation(rng.bernoulli(sigmoid(eta.eta[0])) ? 1.0 : 0.0);
        case Family::Categorical: {
            Eigen::VectorXd full(eta.eta.size() + 1);
            full << eta.eta, 0.0;
            const Eigen::VectorXd probs = (full.array() - log_sum_exp(full)).exp();
            return scalar_observation(static_cast<double>(rng.categorical(probs)));
        }
        case Family::Gaussian: {
            const auto [mean, cov] = gaussian_moments(model, eta);
            const Eigen::MatrixXd chol = Eigen::LLT<Eigen::MatrixXd>(cov).matrixL();
            Eigen::VectorXd w(mean.size());
            for (auto& v : w) {
                v = rng.normal();
            }
            return mean + chol * w;
        }
    }
    return {};
}

MeanParams ml_fit(const ExpFamModel& model, std::span<const Observation> data) {
    if (data.empty()) {
        throw EstimationError("ml_fit: empty data set");
    }
    Eigen::VectorXd acc = Eigen::VectorXd::Zero(model.num_stats());
    for (const auto& x : data) {
        acc += sufficient_stats(model, x);
    }
    acc /= static_cast<double>(data.size());

    if (model.family() == Family::Gaussian) {
        const Eigen::Index d = model.size();
        const Eigen::VectorXd m = acc.head(d);
        const Eigen::Map<const Eigen::MatrixXd> second(acc.data() + d, d, d);
        const Eigen::MatrixXd cov = second - m * m.transpose();
        const Eigen::VectorXd eig = Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(cov).eigenvalues();
        if (!(eig.minCoeff() > 1e-12 * std::max(1.0, eig.maxCoeff()))) {
            throw EstimationError("ml_fit: sample covariance is singular");
        }
        return {acc};
    }
    return {clamp_probabilities(acc)};
}

double kl_exponential(const ExpFamModel& model, const NaturalParams& eta1, const NaturalParams& eta2) {
    validate(model, eta1);
    validate(model, eta2);
    const MeanParams mu1 = nat_to_mean(model, eta1);
    const double kl = log_partition(model, eta2) - log_partition(model, eta1) - (eta2.eta - eta1.eta).dot(mu1.mu);
    // Cancellation can leave a tiny negative residue when the parameters coincide.
    return std::max(kl, 0.0);
}

}  // namespace lvkit::expfam
