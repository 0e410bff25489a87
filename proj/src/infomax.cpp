#include "lvkit/infomax.hpp"

#include <cmath>
#include <string>

namespace lvkit::latent {

namespace {

void require_row_stochastic(const Eigen::MatrixXd& table, const char* name) {
    if (!table.allFinite() || (table.array() < 0).any()) {
        throw DomainError(std::string(name) + " has negative or non-finite entries");
    }
    for (Eigen::Index r = 0; r < table.rows(); ++r) {
        if (std::abs(table.row(r).sum() - 1.0) > 1e-9) {
            throw DomainError(std::string(name) + " row " + std::to_string(r) + " does not sum to 1");
        }
    }
}

void require_shapes(const divergences::FinitePmf& p_data, const Eigen::MatrixXd& encoder) {
    if (encoder.rows() != p_data.size() || encoder.cols() < 1) {
        throw DomainError("encoder must have one row per data symbol");
    }
    require_row_stochastic(encoder, "encoder");
}

}  // namespace

Eigen::MatrixXd exact_decoder(const divergences::FinitePmf& p_data, const Eigen::MatrixXd& encoder) {
    require_shapes(p_data, encoder);
    const Eigen::MatrixXd joint = p_data.probs().asDiagonal() * encoder;  // X x Z
    Eigen::MatrixXd dec(encoder.cols(), encoder.rows());
    for (Eigen::Index z = 0; z < encoder.cols(); ++z) {
        const double pz = joint.col(z).sum();
        if (pz > 0) {
            dec.row(z) = joint.col(z).transpose() / pz;
        } else {
            dec.row(z).setConstant(1.0 / static_cast<double>(encoder.rows()));
        }
    }
    return dec;
}

InfomaxResult infomax_bound(const divergences::FinitePmf& p_data, const Eigen::MatrixXd& encoder,
                            const Eigen::MatrixXd& decoder) {
    require_shapes(p_data, encoder);
    if (decoder.rows() != encoder.cols() || decoder.cols() != encoder.rows()) {
        throw DomainError("decoder must be |Z| x |X|");
    }
    require_row_stochastic(decoder, "decoder");

    const Eigen::MatrixXd joint = p_data.probs().asDiagonal() * encoder;
    const Eigen::VectorXd pz = joint.colwise().sum().transpose();

    InfomaxResult out;
    double mi = 0.0;
    double fit = 0.0;
    bool missing = false;
    for (Eigen::Index x = 0; x < joint.rows(); ++x) {
        for (Eigen::Index z = 0; z < joint.cols(); ++z) {
            const double pxz = joint(x, z);
            if (pxz <= 0) {
                continue;
            }
            mi += pxz * std::log(encoder(x, z) / pz[z]);
            if (decoder(z, x) > 0) {
                fit += pxz * std::log(decoder(z, x));
            } else {
                missing = true;
            }
        }
    }
    out.exact_mi = std::max(mi, 0.0);
    if (missing) {
        out.bound = ExtendedValue::minus_infinity();
    } else {
        out.bound = ExtendedValue::finite(divergences::generalized_entropy(p_data, divergences::LogLoss{}) + fit);
    }
    return out;
}

}  // namespace lvkit::latent
