#pragma once

// Variational lower bound on the mutual information I(x; z) between a data
// distribution pD(x) and a stochastic encoder p(z|x), using a decoder q(x|z).

#include <Eigen/Dense>

#include "lvkit/common.hpp"
#include "lvkit/divergences.hpp"

namespace lvkit::latent {

struct InfomaxResult {
    /// H(pD) + E[ln q(x|z)]; flagged -inf when the decoder misses observed pairs.
    ExtendedValue bound;
    double exact_mi = 0.0;
};

/// encoder is |X| x |Z| with rows p(.|x); decoder is |Z| x |X| with rows q(.|z).
/// Rows must be nonnegative and sum to 1 within 1e-9 (DomainError otherwise).
InfomaxResult infomax_bound(const divergences::FinitePmf& p_data, const Eigen::MatrixXd& encoder,
                            const Eigen::MatrixXd& decoder);

/// Bayes decoder p(x|z) = pD(x) p(z|x) / p(z); rows with p(z) = 0 are uniform.
Eigen::MatrixXd exact_decoder(const divergences::FinitePmf& p_data, const Eigen::MatrixXd& encoder);

}  // namespace lvkit::latent
