#pragma once

// Deterministic linear autoencoders: PCA in closed form and l1-regularized
// dictionary learning by alternating minimization.

#include <cstdint>
#include <vector>

#include <Eigen/Dense>

#include "lvkit/common.hpp"

namespace lvkit::autoencoders {

struct PcaResult {
    Eigen::MatrixXd W;            // D x M, orthonormal columns
    Eigen::VectorXd mean;         // D
    Eigen::VectorXd eigenvalues;  // all D eigenvalues of the sample covariance, descending
};

/// Top-M eigenvectors of (1/N) sum (x - xbar)(x - xbar)', largest first. Each
/// column is signed so that its largest-magnitude entry is positive.
PcaResult pca_fit(const Eigen::MatrixXd& data, int m);

/// sum_n ||(x_n - mean) - W W'(x_n - mean)||^2.
double pca_objective(const Eigen::MatrixXd& data, const Eigen::MatrixXd& W, const Eigen::VectorXd& mean);

struct Dictionary {
    Eigen::MatrixXd W;      // D x M, columns with norm <= 1
    Eigen::MatrixXd codes;  // N x M, one code per sample

    /// Number of nonzero entries in each code.
    std::vector<int> sparsity() const;
};

/// (1/N) sum ||x_n - W z_n||^2 + lambda sum ||z_n||_1 / N.
double dictionary_objective(const Eigen::MatrixXd& data, const Dictionary& dict, double lambda);

/// Soft threshold sign(v) max(|v| - tau, 0).
double soft_threshold(double v, double tau);

/// Proximal gradient (ISTA) for min_z ||x - W z||^2 + lambda ||z||_1 per sample,
/// warm-started from `codes` (N x M), step 1/L with L = 2 lambda_max(W'W).
/// Stops when no code entry moves by more than tol.
Eigen::MatrixXd sparse_code(const Eigen::MatrixXd& data, const Eigen::MatrixXd& W, double lambda,
                            const Eigen::MatrixXd& codes, double tol = 1e-8, int max_iters = 20000);

/// Column-by-column exact minimization of the reconstruction error with
/// ||w_m|| <= 1, codes fixed. Columns whose codes are all zero are kept.
Eigen::MatrixXd update_dictionary(const Eigen::MatrixXd& data, const Eigen::MatrixXd& codes, const Eigen::MatrixXd& W,
                                  int passes = 10);

struct DictConfig {
    int max_outer = 100;
    /// Relative objective decrease below which the outer loop stops.
    double tol = 1e-8;
    double inner_tol = 1e-8;
    std::uint64_t seed = 0;
};

struct DictResult {
    Dictionary dict;
    Trace trace;  // columns: after_codes, after_dictionary, mean_nonzeros
    int iterations = 0;
    bool converged = false;
};

/// Codes start at 0 and the dictionary at M distinct random data points scaled
/// into the unit ball. lambda < 0, M < 1 or M > N is a ConfigError.
DictResult dict_learn(const Eigen::MatrixXd& data, int m, double lambda, const DictConfig& config = {});

}  // namespace lvkit::autoencoders
