#include "lvkit/autoencoders.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

namespace lvkit::autoencoders {

PcaResult pca_fit(const Eigen::MatrixXd& data, int m) {
    const Eigen::Index d = data.cols();
    if (m < 1 || m > d) {
        throw ConfigError("PCA needs 1 <= M <= D (M = " + std::to_string(m) + ", D = " + std::to_string(d) + ")");
    }
    if (data.rows() < 1) {
        throw EstimationError("PCA needs at least one sample");
    }
    PcaResult out;
    out.mean = data.colwise().mean().transpose();
    const Eigen::MatrixXd centered = data.rowwise() - out.mean.transpose();
    const Eigen::MatrixXd cov = centered.transpose() * centered / static_cast<double>(data.rows());
    const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(cov);
    out.eigenvalues = eig.eigenvalues().reverse();
    out.W = eig.eigenvectors().rowwise().reverse().leftCols(m);
    for (Eigen::Index j = 0; j < m; ++j) {
        Eigen::Index arg = 0;
        out.W.col(j).cwiseAbs().maxCoeff(&arg);
        if (out.W(arg, j) < 0) {
            out.W.col(j) = -out.W.col(j);
        }
    }
    return out;
}

double pca_objective(const Eigen::MatrixXd& data, const Eigen::MatrixXd& W, const Eigen::VectorXd& mean) {
    if (W.rows() != data.cols() || mean.size() != data.cols()) {
        throw DomainError("PCA objective: dimension mismatch");
    }
    const Eigen::MatrixXd centered = data.rowwise() - mean.transpose();
    const Eigen::MatrixXd resid = centered - centered * W * W.transpose();
    return resid.squaredNorm();
}

std::vector<int> Dictionary::sparsity() const {
    std::vector<int> out(static_cast<std::size_t>(codes.rows()));
    for (Eigen::Index n = 0; n < codes.rows(); ++n) {
        out[static_cast<std::size_t>(n)] = static_cast<int>((codes.row(n).array() != 0).count());
    }
    return out;
}

double dictionary_objective(const Eigen::MatrixXd& data, const Dictionary& dict, double lambda) {
    if (dict.W.rows() != data.cols() || dict.codes.rows() != data.rows() || dict.codes.cols() != dict.W.cols()) {
        throw DomainError("dictionary objective: dimension mismatch");
    }
    const double n = static_cast<double>(data.rows());
    const Eigen::MatrixXd resid = data - dict.codes * dict.W.transpose();
    return (resid.squaredNorm() + lambda * dict.codes.cwiseAbs().sum()) / n;
}

double soft_threshold(double v, double tau) {
    if (v > tau) {
        return v - tau;
    }
    if (v < -tau) {
        return v + tau;
    }
    return 0.0;
}

Eigen::MatrixXd sparse_code(const Eigen::MatrixXd& data, const Eigen::MatrixXd& W, double lambda,
                            const Eigen::MatrixXd& codes, double tol, int max_iters) {
    if (lambda < 0) {
        throw ConfigError("sparsity weight lambda must be >= 0");
    }
    const Eigen::MatrixXd gram = W.transpose() * W;
    const double lmax = Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(gram, Eigen::EigenvaluesOnly).eigenvalues().maxCoeff();
    Eigen::MatrixXd z = codes.transpose();  // M x N
    if (!(lmax > 0)) {
        z.setZero();
        return z.transpose();
    }
    const double lip = 2.0 * lmax;
    const double tau = lambda / lip;
    const Eigen::MatrixXd wtx = W.transpose() * data.transpose();  // M x N
    Eigen::MatrixXd next(z.rows(), z.cols());
    for (int it = 0; it < max_iters; ++it) {
        const Eigen::MatrixXd step = z - (2.0 / lip) * (gram * z - wtx);
        next = step.unaryExpr([tau](double v) { return soft_threshold(v, tau); });
        const double moved = (next - z).cwiseAbs().maxCoeff();
        z.swap(next);
        if (moved <= tol) {
            break;
        }
    }
    return z.transpose();
}

Eigen::MatrixXd update_dictionary(const Eigen::MatrixXd& data, const Eigen::MatrixXd& codes, const Eigen::MatrixXd& W,
                                  int passes) {
    Eigen::MatrixXd out = W;
    // residual R = X' - W Z', D x N
    Eigen::MatrixXd resid = data.transpose() - out * codes.transpose();
    for (int pass = 0; pass < passes; ++pass) {
        double moved = 0.0;
        for (Eigen::Index m = 0; m < out.cols(); ++m) {
            const double energy = codes.col(m).squaredNorm();
            if (energy == 0) {
                continue;
            }
            resid += out.col(m) * codes.col(m).transpose();
            Eigen::VectorXd w = resid * codes.col(m) / energy;
            const double norm = w.norm();
            if (norm > 1.0) {
                w /= norm;
            }
            moved = std::max(moved, (w - out.col(m)).cwiseAbs().maxCoeff());
            out.col(m) = w;
            resid -= out.col(m) * codes.col(m).transpose();
        }
        if (moved <= 1e-12) {
            break;
        }
    }
    return out;
}

DictResult dict_learn(const Eigen::MatrixXd& data, int m, double lambda, const DictConfig& config) {
    if (lambda < 0) {
        throw ConfigError("sparsity weight lambda must be >= 0");
    }
    if (m < 1 || m > data.rows()) {
        throw ConfigError("dictionary size must satisfy 1 <= M <= N");
    }
    Rng rng(config.seed, 0xD1C7);
    std::vector<std::size_t> order(static_cast<std::size_t>(data.rows()));
    std::iota(order.begin(), order.end(), std::size_t{0});
    for (std::size_t i = 0; i < static_cast<std::size_t>(m); ++i) {
        std::swap(order[i], order[i + rng.uniform_index(order.size() - i)]);
    }

    DictResult result;
    Dictionary& dict = result.dict;
    dict.W.resize(data.cols(), m);
    for (Eigen::Index j = 0; j < m; ++j) {
        Eigen::VectorXd w = data.row(static_cast<Eigen::Index>(order[static_cast<std::size_t>(j)])).transpose();
        const double norm = w.norm();
        if (norm > 1.0) {
            w /= norm;
        }
        dict.W.col(j) = w;
    }
    dict.codes = Eigen::MatrixXd::Zero(data.rows(), m);

    auto mean_nonzeros = [&] {
        return static_cast<double>((dict.codes.array() != 0).count()) / static_cast<double>(data.rows());
    };

    result.trace = Trace({"after_codes", "after_dictionary", "mean_nonzeros"});
    double obj = dictionary_objective(data, dict, lambda);
    result.trace.append(0, {obj, obj, 0.0});
    for (int it = 1; it <= config.max_outer; ++it) {
        dict.codes = sparse_code(data, dict.W, lambda, dict.codes, config.inner_tol);
        const double after_codes = dictionary_objective(data, dict, lambda);
        dict.W = update_dictionary(data, dict.codes, dict.W);
        const double after_dict = dictionary_objective(data, dict, lambda);
        result.trace.append(static_cast<std::size_t>(it), {after_codes, after_dict, mean_nonzeros()});
        result.iterations = it;
        const double drop = obj - after_dict;
        obj = after_dict;
        if (drop <= config.tol * std::max(1.0, std::abs(obj))) {
            result.converged = true;
            break;
        }
    }
    return result;
}

}  // namespace lvkit::autoencoders
