#include "lvkit/clustering.hpp"

#include <limits>
#include <numeric>
#include <string>

namespace lvkit::clustering {

Eigen::MatrixXd KMeansState::one_hot() const {
    Eigen::MatrixXd z = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(assignments.size()), prototypes.rows());
    for (std::size_t n = 0; n < assignments.size(); ++n) {
        z(static_cast<Eigen::Index>(n), assignments[n]) = 1.0;
    }
    return z;
}

std::vector<int> e_step(const Eigen::MatrixXd& data, const Eigen::MatrixXd& prototypes) {
    if (prototypes.rows() < 1) {
        throw ConfigError("k-means needs at least one prototype");
    }
    if (prototypes.cols() != data.cols()) {
        throw ConfigError("prototype dimension does not match data");
    }
    std::vector<int> z(static_cast<std::size_t>(data.rows()));
    for (Eigen::Index n = 0; n < data.rows(); ++n) {
        double best = std::numeric_limits<double>::infinity();
        int best_k = 0;
        for (Eigen::Index k = 0; k < prototypes.rows(); ++k) {
            const double d = (data.row(n) - prototypes.row(k)).squaredNorm();
            if (d < best) {  // strict: ties keep the lower index
                best = d;
                best_k = static_cast<int>(k);
            }
        }
        z[static_cast<std::size_t>(n)] = best_k;
    }
    return z;
}

MStepResult m_step(const Eigen::MatrixXd& data, const std::vector<int>& assignments,
                   const Eigen::MatrixXd& previous_prototypes) {
    const Eigen::Index k = previous_prototypes.rows();
    if (static_cast<Eigen::Index>(assignments.size()) != data.rows()) {
        throw ConfigError("one assignment per sample is required");
    }
    Eigen::MatrixXd sums = Eigen::MatrixXd::Zero(k, data.cols());
    Eigen::VectorXd counts = Eigen::VectorXd::Zero(k);
    for (Eigen::Index n = 0; n < data.rows(); ++n) {
        const int c = assignments[static_cast<std::size_t>(n)];
        if (c < 0 || c >= k) {
            throw ConfigError("assignment " + std::to_string(c) + " out of range");
        }
        sums.row(c) += data.row(n);
        counts[c] += 1.0;
    }
    MStepResult out{previous_prototypes, {}};
    for (Eigen::Index c = 0; c < k; ++c) {
        if (counts[c] > 0) {
            out.prototypes.row(c) = sums.row(c) / counts[c];
        } else {
            out.empty_clusters.push_back(static_cast<int>(c));
        }
    }
    return out;
}

double objective(const Eigen::MatrixXd& data, const std::vector<int>& assignments,
                 const Eigen::MatrixXd& prototypes) {
    double total = 0.0;
    for (Eigen::Index n = 0; n < data.rows(); ++n) {
        total += (data.row(n) - prototypes.row(assignments[static_cast<std::size_t>(n)])).squaredNorm();
    }
    return total;
}

Eigen::MatrixXd initial_prototypes(const Eigen::MatrixXd& data, int k, const KMeansInit& init) {
    if (k < 1) {
        throw ConfigError("k-means requires K >= 1");
    }
    if (k > data.rows()) {
        throw ConfigError("k-means requires K <= N (K = " + std::to_string(k) + ", N = " +
                          std::to_string(data.rows()) + ")");
    }
    if (const auto* given = std::get_if<GivenPrototypes>(&init)) {
        if (given->prototypes.rows() != k || given->prototypes.cols() != data.cols()) {
            throw ConfigError("given prototypes must be K x D");
        }
        return given->prototypes;
    }
    Rng rng(std::get<RandomPoints>(init).seed, 0x6B6D);
    // Partial Fisher-Yates over row indices.
    std::vector<Eigen::Index> idx(static_cast<std::size_t>(data.rows()));
    std::iota(idx.begin(), idx.end(), Eigen::Index{0});
    Eigen::MatrixXd protos(k, data.cols());
    for (int c = 0; c < k; ++c) {
        const std::size_t j = static_cast<std::size_t>(c) + rng.uniform_index(idx.size() - static_cast<std::size_t>(c));
        std::swap(idx[static_cast<std::size_t>(c)], idx[j]);
        protos.row(c) = data.row(idx[static_cast<std::size_t>(c)]);
    }
    return protos;
}

KMeansResult fit(const Eigen::MatrixXd& data, int k, const KMeansInit& init, int max_iters, double tol) {
    if (data.rows() == 0) {
        throw ConfigError("k-means: empty data set");
    }
    KMeansResult result;
    result.trace = Trace({"objective"});
    Eigen::MatrixXd protos = initial_prototypes(data, k, init);
    std::vector<int> z = e_step(data, protos);
    double obj = objective(data, z, protos);
    result.trace.append(0, {obj});

    for (int it = 1; it <= max_iters; ++it) {
        auto m = m_step(data, z, protos);
        protos = std::move(m.prototypes);
        result.empty_clusters = std::move(m.empty_clusters);
        std::vector<int> z_new = e_step(data, protos);
        const double obj_new = objective(data, z_new, protos);
        result.trace.append(static_cast<std::size_t>(it), {obj_new});
        result.iterations = it;
        const bool fixed_point = z_new == z;
        const double decrease = obj - obj_new;
        z = std::move(z_new);
        obj = obj_new;
        if (fixed_point || decrease < tol) {
            result.converged = true;
            break;
        }
    }
    result.state = KMeansState{protos, z, obj};
    return result;
}

}  // namespace lvkit::clustering
