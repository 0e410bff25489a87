#pragma once

// K-means by alternating nearest-prototype assignment (E step) and
// per-cluster averaging (M step). Data matrices hold one sample per row.

#include <cstdint>
#include <variant>
#include <vector>

#include <Eigen/Dense>

#include "lvkit/common.hpp"

namespace lvkit::clustering {

struct KMeansState {
    Eigen::MatrixXd prototypes;    // K x D
    std::vector<int> assignments;  // cluster index per sample
    double objective = 0.0;        // sum_n ||x_n - mu_{z_n}||^2

    /// N x K one-hot matrix of the assignments.
    Eigen::MatrixXd one_hot() const;
};

/// Nearest prototype per row of `data`; ties go to the lowest index.
std::vector<int> e_step(const Eigen::MatrixXd& data, const Eigen::MatrixXd& prototypes);

struct MStepResult {
    Eigen::MatrixXd prototypes;
    /// Clusters that received no points; their prototype is carried over unchanged.
    std::vector<int> empty_clusters;
};

MStepResult m_step(const Eigen::MatrixXd& data, const std::vector<int>& assignments,
                   const Eigen::MatrixXd& previous_prototypes);

double objective(const Eigen::MatrixXd& data, const std::vector<int>& assignments,
                 const Eigen::MatrixXd& prototypes);

/// K distinct data rows drawn without replacement.
struct RandomPoints {
    std::uint64_t seed = 0;
};
struct GivenPrototypes {
    Eigen::MatrixXd prototypes;
};
using KMeansInit = std::variant<RandomPoints, GivenPrototypes>;

struct KMeansResult {
    KMeansState state;
    Trace trace;  // columns: objective
    int iterations = 0;
    bool converged = false;
    /// Clusters left empty by the final M step.
    std::vector<int> empty_clusters;
};

/// Runs E/M steps until the assignments repeat, the objective decrease drops
/// below `tol`, or `max_iters` M steps have been taken. K > N is a ConfigError.
KMeansResult fit(const Eigen::MatrixXd& data, int k, const KMeansInit& init, int max_iters = 300, double tol = 0.0);

/// Initial prototypes selected by `init` (validated against data and K).
Eigen::MatrixXd initial_prototypes(const Eigen::MatrixXd& data, int k, const KMeansInit& init);

}  // namespace lvkit::clustering
