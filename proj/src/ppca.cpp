#include "lvkit/ppca.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace lvkit::latent {

namespace {

Eigen::MatrixXd sample_covariance(const Eigen::MatrixXd& data, const Eigen::VectorXd& mean) {
    const Eigen::MatrixXd centered = data.rowwise() - mean.transpose();
    return centered.transpose() * centered / static_cast<double>(data.rows());
}

double log_likelihood_from_moments(const PpcaParams& p, const Eigen::MatrixXd& s, double n) {
    const Eigen::Index d = p.dim();
    Eigen::MatrixXd c = p.W * p.W.transpose();
    c.diagonal().array() += p.sigma2;
    const Eigen::LLT<Eigen::MatrixXd> llt(c);
    if (llt.info() != Eigen::Success) {
        throw NumericError("PPCA: model covariance W W' + sigma2 I is not positive definite");
    }
    const Eigen::MatrixXd lower = llt.matrixL();
    const double log_det = 2.0 * lower.diagonal().array().log().sum();
    const double trace_term = llt.solve(s).trace();
    return -0.5 * n * (static_cast<double>(d) * kLog2Pi + log_det + trace_term);
}

}  // namespace

void validate(const PpcaParams& params) {
    if (!(params.sigma2 > 0) || !std::isfinite(params.sigma2)) {
        throw DomainError("PPCA noise variance must be positive and finite");
    }
    if (params.W.cols() > params.W.rows() || params.W.cols() < 1) {
        throw DomainError("PPCA requires 1 <= M <= D");
    }
    if (params.mu.size() != params.W.rows() || !params.W.allFinite() || !params.mu.allFinite()) {
        throw DomainError("PPCA mean length must equal D and parameters must be finite");
    }
}

GaussianPosterior ppca_posterior(const PpcaParams& params, const Eigen::VectorXd& x) {
    validate(params);
    if (x.size() != params.dim()) {
        throw DomainError("PPCA observation has wrong dimension");
    }
    const Eigen::Index m = params.latent_dim();
    const double inv_s2 = 1.0 / params.sigma2;
    Eigen::MatrixXd j = inv_s2 * params.W.transpose() * params.W;
    j.diagonal().array() += 1.0;
    const Eigen::LLT<Eigen::MatrixXd> llt(j);
    GaussianPosterior post;
    post.cov = llt.solve(Eigen::MatrixXd::Identity(m, m));
    post.cov = 0.5 * (post.cov + post.cov.transpose());
    post.mean = inv_s2 * llt.solve(params.W.transpose() * (x - params.mu));
    return post;
}

double ppca_log_likelihood(const PpcaParams& params, const Eigen::MatrixXd& data) {
    validate(params);
    if (data.cols() != params.dim()) {
        throw DomainError("PPCA data has wrong dimension");
    }
    const Eigen::MatrixXd centered = data.rowwise() - params.mu.transpose();
    const Eigen::MatrixXd s = centered.transpose() * centered / static_cast<double>(data.rows());
    return log_likelihood_from_moments(params, s, static_cast<double>(data.rows()));
}

PpcaResult ppca_fit(const Eigen::MatrixXd& data, int latent_dim, const PpcaInit& init, const PpcaConfig& config) {
    const Eigen::Index d = data.cols();
    const Eigen::Index m = latent_dim;
    const double n = static_cast<double>(data.rows());
    if (m < 1 || m > d) {
        throw ConfigError("PPCA requires 1 <= M <= D (M = " + std::to_string(m) + ", D = " + std::to_string(d) + ")");
    }
    if (data.rows() <= m) {
        throw ConfigError("PPCA requires N > M");
    }
    if (config.fixed_sigma2 && !(*config.fixed_sigma2 > 0)) {
        throw ConfigError("fixed sigma2 must be positive");
    }

    const Eigen::VectorXd mean = data.colwise().mean().transpose();
    const Eigen::MatrixXd s = sample_covariance(data, mean);
    const Eigen::VectorXd spectrum = Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(s).eigenvalues();
    const double top = spectrum.maxCoeff();
    const auto rank = (spectrum.array() > 1e-12 * std::max(top, 1e-300)).count();
    if (!(top > 0) || rank < m) {
        throw EstimationError("PPCA: data covariance has rank " + std::to_string(rank) + " < M = " + std::to_string(m));
    }
    const double scale = s.trace() / static_cast<double>(d);
    const double sigma2_floor = 1e-10 * scale;

    PpcaParams p;
    if (const auto* r = std::get_if<PpcaRandomStart>(&init)) {
        Rng rng(r->seed, 0x7070);
        p.W.resize(d, m);
        for (Eigen::Index i = 0; i < p.W.size(); ++i) {
            p.W.data()[i] = rng.normal() * std::sqrt(scale);
        }
        p.sigma2 = r->sigma2;
    } else {
        p = std::get<PpcaGivenStart>(init).params;
        if (p.dim() != d || p.latent_dim() != m) {
            throw ConfigError("given PPCA parameters have the wrong shape");
        }
    }
    p.mu = mean;
    if (config.fixed_sigma2) {
        p.sigma2 = *config.fixed_sigma2;
    }
    validate(p);

    PpcaResult result;
    result.trace = Trace({"loglik", "sigma2"});
    double ll = log_likelihood_from_moments(p, s, n);
    result.trace.append(0, {ll, p.sigma2});

    for (int it = 1; it <= config.max_iters; ++it) {
        // E step statistics folded into the M step through S.
        Eigen::MatrixXd mmat = p.W.transpose() * p.W;
        mmat.diagonal().array() += p.sigma2;
        const Eigen::LLT<Eigen::MatrixXd> mllt(mmat);
        const Eigen::MatrixXd sw = s * p.W;                      // D x M
        const Eigen::MatrixXd minv_wtsw = mllt.solve(p.W.transpose() * sw);  // M x M
        Eigen::MatrixXd inner = minv_wtsw;
        inner.diagonal().array() += p.sigma2;
        const Eigen::MatrixXd w_new = inner.transpose().partialPivLu().solve(sw.transpose()).transpose();

        double sigma2_new = 0.0;
        if (config.fixed_sigma2) {
            sigma2_new = *config.fixed_sigma2;
        } else {
            const Eigen::MatrixXd minv_wts = mllt.solve(sw.transpose());  // M x D
            sigma2_new = (s.trace() - (w_new * minv_wts).trace()) / static_cast<double>(d);
            sigma2_new = std::max(sigma2_new, sigma2_floor);
        }
        p.W = w_new;
        p.sigma2 = sigma2_new;

        const double ll_new = log_likelihood_from_moments(p, s, n);
        result.trace.append(static_cast<std::size_t>(it), {ll_new, p.sigma2});
        result.iterations = it;
        const double gain = ll_new - ll;
        ll = ll_new;
        if (gain <= config.tol * std::max(1.0, std::abs(ll))) {
            result.converged = true;
            break;
        }
    }
    result.params = std::move(p);
    return result;
}

Eigen::MatrixXd ppca_reconstruct(const PpcaParams& params, const Eigen::MatrixXd& data) {
    validate(params);
    Eigen::MatrixXd mmat = params.W.transpose() * params.W;
    mmat.diagonal().array() += params.sigma2;
    const Eigen::MatrixXd centered = (data.rowwise() - params.mu.transpose()).transpose();  // D x N
    const Eigen::MatrixXd codes = mmat.llt().solve(params.W.transpose() * centered);    // M x N
    return (params.W * codes).transpose().rowwise() + params.mu.transpose();
}

}  // namespace lvkit::latent
