#include "lvkit/mixture.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "lvkit/clustering.hpp"

namespace lvkit::latent {

namespace {

Eigen::MatrixXd pooled_covariance(const Eigen::MatrixXd& data) {
    const Eigen::RowVectorXd mean = data.colwise().mean();
    const Eigen::MatrixXd centered = data.rowwise() - mean;
    return centered.transpose() * centered / static_cast<double>(data.rows());
}

double covariance_floor(const Eigen::MatrixXd& data) {
    const double scale = pooled_covariance(data).trace() / static_cast<double>(data.cols());
    return scale > 0 ? 1e-8 * scale : 1e-8;
}

/// Normalizes each row of a log-joint matrix in place and returns sum of row log-normalizers.
double normalize_rows(Eigen::MatrixXd& log_joint) {
    double total = 0.0;
    for (Eigen::Index n = 0; n < log_joint.rows(); ++n) {
        const Eigen::VectorXd row = log_joint.row(n).transpose();
        const double lse = log_sum_exp(row);
        if (!std::isfinite(lse)) {
            throw NumericError("mixture E step: zero total density at row " + std::to_string(n));
        }
        log_joint.row(n) = (row.array() - lse).exp().matrix().transpose();
        total += lse;
    }
    return total;
}

double row_log_likelihood(const Eigen::MatrixXd& log_joint) {
    double total = 0.0;
    for (Eigen::Index n = 0; n < log_joint.rows(); ++n) {
        total += log_sum_exp(Eigen::VectorXd(log_joint.row(n).transpose()));
    }
    return total;
}

/// sum_nk r_nk (ln p(x_n, k) - ln r_nk).
double elbo_of(const Eigen::MatrixXd& resp, const Eigen::MatrixXd& log_joint) {
    double total = 0.0;
    for (Eigen::Index n = 0; n < resp.rows(); ++n) {
        for (Eigen::Index k = 0; k < resp.cols(); ++k) {
            const double r = resp(n, k);
            if (r > 0) {
                total += r * (log_joint(n, k) - std::log(r));
            }
        }
    }
    return total;
}

Eigen::VectorXd component_totals(const Eigen::MatrixXd& resp, const Eigen::MatrixXd& data) {
    if (resp.rows() != data.rows()) {
        throw ConfigError("responsibilities must have one row per sample");
    }
    Eigen::VectorXd totals = resp.colwise().sum().transpose();
    for (Eigen::Index k = 0; k < totals.size(); ++k) {
        if (!(totals[k] >= 1e-12)) {
            throw EstimationError("mixture M step: component " + std::to_string(k) +
                                  " collapsed (total responsibility " + std::to_string(totals[k]) + ")");
        }
    }
    return totals;
}

void check_weights(const Eigen::VectorXd& w) {
    if (w.size() < 1 || !w.allFinite() || (w.array() < 0).any() || std::abs(w.sum() - 1.0) > 1e-9) {
        throw DomainError("mixture weights must be nonnegative and sum to 1");
    }
}

template <class Params, class EStep, class MStep>
EmResult<Params> run_em(Params params, const EmConfig& config, EStep log_joint_of,
                        MStep m_step) {
    if (config.max_iters < 0 || !(config.tol >= 0)) {
        throw ConfigError("EM needs max_iters >= 0 and tol >= 0");
    }
    EmResult<Params> result;
    result.trace = Trace({"loglik", "elbo"});

    Eigen::MatrixXd resp = log_joint_of(params);
    double ll = normalize_rows(resp);
    result.trace.append(0, {ll, ll});

    for (int it = 1; it <= config.max_iters; ++it) {
        Params next = m_step(resp);
        Eigen::MatrixXd lj = log_joint_of(next);
        const double bound = elbo_of(resp, lj);
        const double ll_new = row_log_likelihood(lj);
        normalize_rows(lj);
        resp = std::move(lj);
        params = std::move(next);
        result.trace.append(static_cast<std::size_t>(it), {ll_new, bound});
        result.iterations = it;
        const double gain = ll_new - ll;
        ll = ll_new;
        if (gain <= config.tol * std::max(1.0, std::abs(ll))) {
            result.converged = true;
            break;
        }
    }
    result.params = std::move(params);
    result.responsibilities = std::move(resp);
    return result;
}

}  // namespace

void validate(const GaussianMixture& params) {
    check_weights(params.weights);
    const auto k = static_cast<std::size_t>(params.weights.size());
    if (params.means.size() != k || params.covariances.size() != k) {
        throw DomainError("Gaussian mixture needs one mean and covariance per weight");
    }
    for (std::size_t c = 0; c < k; ++c) {
        const auto& s = params.covariances[c];
        if (params.means[c].size() != params.dim() || s.rows() != params.dim() || s.cols() != params.dim()) {
            throw DomainError("Gaussian mixture component shapes disagree");
        }
        if (Eigen::LLT<Eigen::MatrixXd>(s).info() != Eigen::Success || !s.isApprox(s.transpose())) {
            throw DomainError("Gaussian mixture covariance " + std::to_string(c) + " is not SPD");
        }
    }
}

void validate(const BernoulliMixture& params) {
    check_weights(params.weights);
    if (params.probs.size() != static_cast<std::size_t>(params.weights.size())) {
        throw DomainError("Bernoulli mixture needs one probability vector per weight");
    }
    for (const auto& p : params.probs) {
        if (p.size() != params.probs.front().size() || (p.array() <= 0).any() || (p.array() >= 1).any()) {
            throw DomainError("Bernoulli mixture probabilities must lie strictly inside (0,1)");
        }
    }
}

Eigen::MatrixXd component_log_joint(const GaussianMixture& params, const Eigen::MatrixXd& data) {
    validate(params);
    if (data.cols() != params.dim()) {
        throw ConfigError("data dimension does not match the mixture");
    }
    const Eigen::Index k = params.num_components();
    const double d = static_cast<double>(params.dim());
    Eigen::MatrixXd out(data.rows(), k);
    for (Eigen::Index c = 0; c < k; ++c) {
        const Eigen::LLT<Eigen::MatrixXd> llt(params.covariances[static_cast<std::size_t>(c)]);
        const Eigen::MatrixXd lower = llt.matrixL();
        const double log_det = 2.0 * lower.diagonal().array().log().sum();
        const double log_w = params.weights[c] > 0 ? std::log(params.weights[c]) : -std::numeric_limits<double>::infinity();
        const Eigen::MatrixXd centered =
            (data.rowwise() - params.means[static_cast<std::size_t>(c)].transpose()).transpose();  // D x N
        const Eigen::MatrixXd whitened = lower.triangularView<Eigen::Lower>().solve(centered);
        const Eigen::VectorXd mahal = whitened.colwise().squaredNorm().transpose();
        out.col(c) = (log_w - 0.5 * (d * kLog2Pi + log_det) - 0.5 * mahal.array()).matrix();
    }
    return out;
}

Eigen::MatrixXd component_log_joint(const BernoulliMixture& params, const Eigen::MatrixXd& data) {
    validate(params);
    const Eigen::Index k = params.num_components();
    if (data.cols() != params.probs.front().size()) {
        throw ConfigError("data dimension does not match the mixture");
    }
    if (((data.array() != 0) && (data.array() != 1)).any()) {
        throw DomainError("Bernoulli mixture data must be binary");
    }
    Eigen::MatrixXd out(data.rows(), k);
    for (Eigen::Index c = 0; c < k; ++c) {
        const auto& p = params.probs[static_cast<std::size_t>(c)];
        const Eigen::VectorXd log_p = p.array().log();
        const Eigen::VectorXd log_q = (1.0 - p.array()).log();
        const double log_w = params.weights[c] > 0 ? std::log(params.weights[c]) : -std::numeric_limits<double>::infinity();
        out.col(c) = (log_w + (data * log_p).array() + ((1.0 - data.array()).matrix() * log_q).array()).matrix();
    }
    return out;
}

double log_likelihood(const GaussianMixture& params, const Eigen::MatrixXd& data) {
    return row_log_likelihood(component_log_joint(params, data));
}

double log_likelihood(const BernoulliMixture& params, const Eigen::MatrixXd& data) {
    return row_log_likelihood(component_log_joint(params, data));
}

Eigen::MatrixXd gmm_e_step(const GaussianMixture& params, const Eigen::MatrixXd& data) {
    Eigen::MatrixXd r = component_log_joint(params, data);
    normalize_rows(r);
    return r;
}

Eigen::MatrixXd bernoulli_e_step(const BernoulliMixture& params, const Eigen::MatrixXd& data) {
    Eigen::MatrixXd r = component_log_joint(params, data);
    normalize_rows(r);
    return r;
}

GaussianMixture gmm_m_step(const Eigen::MatrixXd& responsibilities, const Eigen::MatrixXd& data) {
    const Eigen::VectorXd totals = component_totals(responsibilities, data);
    const Eigen::Index k = responsibilities.cols();
    const double eps = covariance_floor(data);

    GaussianMixture out;
    out.weights = totals / static_cast<double>(data.rows());
    for (Eigen::Index c = 0; c < k; ++c) {
        const Eigen::VectorXd r = responsibilities.col(c);
        const Eigen::VectorXd mean = data.transpose() * r / totals[c];
        const Eigen::MatrixXd centered = data.rowwise() - mean.transpose();
        Eigen::MatrixXd cov = centered.transpose() * r.asDiagonal() * centered / totals[c];
        cov = 0.5 * (cov + cov.transpose());
        cov.diagonal().array() += eps;
        out.means.push_back(mean);
        out.covariances.push_back(cov);
    }
    return out;
}

BernoulliMixture bernoulli_m_step(const Eigen::MatrixXd& responsibilities, const Eigen::MatrixXd& data) {
    const Eigen::VectorXd totals = component_totals(responsibilities, data);
    BernoulliMixture out;
    out.weights = totals / static_cast<double>(data.rows());
    for (Eigen::Index c = 0; c < responsibilities.cols(); ++c) {
        Eigen::VectorXd p = data.transpose() * responsibilities.col(c) / totals[c];
        p = p.cwiseMax(kBernoulliMixtureClamp).cwiseMin(1.0 - kBernoulliMixtureClamp);
        out.probs.push_back(p);
    }
    return out;
}

EmResult<GaussianMixture> gmm_fit(const Eigen::MatrixXd& data, int k, const GmmInit& init, const EmConfig& config) {
    if (k < 1 || k > data.rows()) {
        throw ConfigError("GMM requires 1 <= K <= N");
    }
    if (config.fixed_isotropic_variance && !(*config.fixed_isotropic_variance > 0)) {
        throw ConfigError("fixed isotropic variance must be positive");
    }
    const Eigen::Index d = data.cols();
    GaussianMixture start;
    if (const auto* km = std::get_if<KMeansStart>(&init)) {
        const auto protos = clustering::fit(data, k, clustering::RandomPoints{km->seed}).state.prototypes;
        Eigen::MatrixXd shared = pooled_covariance(data);
        shared.diagonal().array() += covariance_floor(data);
        start.weights = Eigen::VectorXd::Constant(k, 1.0 / k);
        for (int c = 0; c < k; ++c) {
            start.means.push_back(protos.row(c).transpose());
            start.covariances.push_back(shared);
        }
    } else {
        start = std::get<GivenStart<GaussianMixture>>(init).params;
        if (start.num_components() != k) {
            throw ConfigError("given mixture has the wrong number of components");
        }
    }
    auto freeze = [&](GaussianMixture& p) {
        if (config.fixed_isotropic_variance) {
            for (auto& s : p.covariances) {
                s = *config.fixed_isotropic_variance * Eigen::MatrixXd::Identity(d, d);
            }
        }
    };
    freeze(start);
    return run_em(
        std::move(start), config, [&](const GaussianMixture& p) { return component_log_joint(p, data); },
        [&](const Eigen::MatrixXd& r) {
            GaussianMixture next = gmm_m_step(r, data);
            freeze(next);
            return next;
        });
}

EmResult<BernoulliMixture> bernoulli_mixture_fit(const Eigen::MatrixXd& data, int k, const BernoulliInit& init,
                                                 const EmConfig& config) {
    if (k < 1 || k > data.rows()) {
        throw ConfigError("Bernoulli mixture requires 1 <= K <= N");
    }
    BernoulliMixture start;
    if (const auto* km = std::get_if<KMeansStart>(&init)) {
        const auto protos = clustering::fit(data, k, clustering::RandomPoints{km->seed}).state.prototypes;
        start.weights = Eigen::VectorXd::Constant(k, 1.0 / k);
        for (int c = 0; c < k; ++c) {
            start.probs.push_back(protos.row(c).transpose().cwiseMax(kBernoulliMixtureClamp).cwiseMin(1.0 - kBernoulliMixtureClamp));
        }
    } else {
        start = std::get<GivenStart<BernoulliMixture>>(init).params;
        if (start.num_components() != k) {
            throw ConfigError("given mixture has the wrong number of components");
        }
    }
    return run_em(
        std::move(start), config, [&](const BernoulliMixture& p) { return component_log_joint(p, data); },
        [&](const Eigen::MatrixXd& r) { return bernoulli_m_step(r, data); });
}

std::vector<int> hard_assignments(const Eigen::MatrixXd& responsibilities) {
    std::vector<int> z(static_cast<std::size_t>(responsibilities.rows()));
    for (Eigen::Index n = 0; n < responsibilities.rows(); ++n) {
        Eigen::Index best = 0;
        responsibilities.row(n).maxCoeff(&best);
        z[static_cast<std::size_t>(n)] = static_cast<int>(best);
    }
    return z;
}

std::pair<Eigen::MatrixXd, std::vector<int>> sample(const GaussianMixture& params, int n, Rng& rng) {
    validate(params);
    const Eigen::Index d = params.dim();
    std::vector<Eigen::MatrixXd> chol;
    for (const auto& s : params.covariances) {
        chol.emplace_back(Eigen::LLT<Eigen::MatrixXd>(s).matrixL());
    }
    Eigen::MatrixXd x(n, d);
    std::vector<int> labels(static_cast<std::size_t>(n));
    Eigen::VectorXd w(d);
    for (int i = 0; i < n; ++i) {
        const auto c = rng.categorical(params.weights);
        for (auto& v : w) {
            v = rng.normal();
        }
        x.row(i) = (params.means[c] + chol[c] * w).transpose();
        labels[static_cast<std::size_t>(i)] = static_cast<int>(c);
    }
    return {x, labels};
}

}  // namespace lvkit::latent
