#include "lvkit/projections.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <span>
#include <vector>

#include "lvkit/quadrature.hpp"

namespace lvkit::inference {

namespace {

constexpr double kGolden = 0.6180339887498948482;
constexpr int kMaxCycles = 500;

double normal_log_density(double z, double mean, double var) {
    const double d = z - mean;
    return -0.5 * (kLog2Pi + std::log(var) + d * d / var);
}

struct Minimum {
    double x = 0.0;
    double f = 0.0;
};

// Expand from x0 downhill until a bracket a < b < c with f(b) <= f(a), f(c) is found.
std::pair<double, double> bracket(const std::function<double(double)>& f, double x0, double step) {
    double a = x0;
    double fa = f(a);
    double b = x0 + step;
    double fb = f(b);
    if (fb > fa) {
        std::swap(a, b);
        std::swap(fa, fb);
        step = -step;
    }
    double c = b + step;
    double fc = f(c);
    for (int it = 0; it < 200 && fc < fb; ++it) {
        step *= 2.0;
        a = b;
        fa = fb;
        b = c;
        fb = fc;
        c = b + step;
        fc = f(c);
    }
    if (fc < fb) {
        throw NumericError("I-projection: no bracketing interval for the minimum");
    }
    return {std::min(a, c), std::max(a, c)};
}

Minimum golden_section(const std::function<double(double)>& f, double lo, double hi, double tol) {
    double x1 = hi - kGolden * (hi - lo);
    double x2 = lo + kGolden * (hi - lo);
    double f1 = f(x1);
    double f2 = f(x2);
    while (hi - lo > tol) {
        if (f1 <= f2) {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - kGolden * (hi - lo);
            f1 = f(x1);
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + kGolden * (hi - lo);
            f2 = f(x2);
        }
    }
    return f1 <= f2 ? Minimum{x1, f1} : Minimum{x2, f2};
}

}  // namespace

double MixtureOfGaussians1D::log_density(double z) const {
    constexpr int kStack = 8;
    double stack[kStack];
    std::vector<double> heap;
    double* terms = stack;
    if (weights.size() > kStack) {
        heap.resize(static_cast<std::size_t>(weights.size()));
        terms = heap.data();
    }
    for (Eigen::Index k = 0; k < weights.size(); ++k) {
        terms[k] = weights[k] > 0 ? std::log(weights[k]) + normal_log_density(z, means[k], variances[k])
                                  : -std::numeric_limits<double>::infinity();
    }
    return log_sum_exp(std::span<const double>(terms, static_cast<std::size_t>(weights.size())));
}

double MixtureOfGaussians1D::mean() const { return weights.dot(means); }

double MixtureOfGaussians1D::variance() const {
    const double m = mean();
    return weights.dot((variances.array() + (means.array() - m).square()).matrix());
}

double GaussianQ::log_density(double z) const { return normal_log_density(z, m, gamma2); }

void validate(const MixtureOfGaussians1D& target) {
    const Eigen::Index k = target.weights.size();
    if (k < 1 || target.means.size() != k || target.variances.size() != k) {
        throw DomainError("mixture needs matching, non-empty weight/mean/variance vectors");
    }
    if (!target.weights.allFinite() || (target.weights.array() < 0).any() ||
        std::abs(target.weights.sum() - 1.0) > 1e-12) {
        throw DomainError("mixture weights must be nonnegative and sum to 1");
    }
    if (!target.means.allFinite() || !target.variances.allFinite() || (target.variances.array() <= 0).any()) {
        throw DomainError("mixture means must be finite and variances positive");
    }
}

void validate(const GaussianQ& q) {
    if (!std::isfinite(q.m) || !(q.gamma2 > 0) || !std::isfinite(q.gamma2)) {
        throw DomainError("Gaussian q needs a finite mean and a positive finite variance");
    }
}

double kl_gaussian_to_mixture(const GaussianQ& q, const MixtureOfGaussians1D& target, std::size_t nodes) {
    validate(q);
    const double gamma = std::sqrt(q.gamma2);
    const double value = integrate(
        [&](double z) {
            const double lq = q.log_density(z);
            return std::exp(lq) * (lq - target.log_density(z));
        },
        q.m - 10.0 * gamma, q.m + 10.0 * gamma, nodes);
    if (!std::isfinite(value)) {
        throw NumericError("KL(q||p) quadrature overflowed");
    }
    return value;
}

double kl_mixture_to_gaussian(const MixtureOfGaussians1D& target, const GaussianQ& q, std::size_t nodes) {
    validate(target);
    validate(q);
    const Eigen::ArrayXd sd = target.variances.array().sqrt();
    const double lo = (target.means.array() - 10.0 * sd).minCoeff();
    const double hi = (target.means.array() + 10.0 * sd).maxCoeff();
    const double value = integrate(
        [&](double z) {
            const double lp = target.log_density(z);
            return std::exp(lp) * (lp - q.log_density(z));
        },
        lo, hi, nodes);
    if (!std::isfinite(value)) {
        throw NumericError("KL(p||q) quadrature overflowed");
    }
    return value;
}

GaussianQ m_projection_gaussian(const MixtureOfGaussians1D& target) {
    validate(target);
    return {target.mean(), target.variance()};
}

IProjectionResult i_projection_gaussian(const MixtureOfGaussians1D& target, const IProjectionConfig& config) {
    validate(target);
    if (config.grid_m < 2 || config.grid_log_var < 2 || !(config.tol > 0)) {
        throw ConfigError("I-projection grid needs at least 2 points per axis and tol > 0");
    }
    IProjectionResult out;
    auto kl = [&](double m, double s) {
        ++out.evaluations;
        return kl_gaussian_to_mixture({m, std::exp(s)}, target, config.nodes);
    };

    double m0 = config.init.m;
    double s0 = std::log(config.init.gamma2);
    double m_step = 0.1;
    double s_step = 0.25;
    if (config.strategy == IProjectionConfig::Strategy::GlobalScan) {
        const double sd_max = target.variances.array().sqrt().maxCoeff();
        const double m_lo = target.means.minCoeff() - 3.0 * sd_max;
        const double m_hi = target.means.maxCoeff() + 3.0 * sd_max;
        const double s_lo = std::log(target.variances.minCoeff()) - 3.0;
        const double s_hi = std::log(target.variance()) + 1.0;
        m_step = (m_hi - m_lo) / (config.grid_m - 1);
        s_step = (s_hi - s_lo) / (config.grid_log_var - 1);
        double best = std::numeric_limits<double>::infinity();
        for (int i = 0; i < config.grid_m; ++i) {
            for (int j = 0; j < config.grid_log_var; ++j) {
                const double m = m_lo + i * m_step;
                const double s = s_lo + j * s_step;
                const double v = kl(m, s);
                if (v < best) {
                    best = v;
                    m0 = m;
                    s0 = s;
                }
            }
        }
    } else {
        validate(config.init);
    }

    double m = m0;
    double s = s0;
    double value = kl(m, s);
    for (int cycle = 0; cycle < kMaxCycles; ++cycle) {
        auto along_m = [&](double v) { return kl(v, s); };
        const auto [ml, mh] = bracket(along_m, m, m_step);
        const Minimum bm = golden_section(along_m, ml, mh, config.tol);
        auto along_s = [&](double v) { return kl(bm.x, v); };
        const auto [sl, sh] = bracket(along_s, s, s_step);
        const Minimum bs = golden_section(along_s, sl, sh, config.tol);
        const double moved = std::max(std::abs(bm.x - m), std::abs(bs.x - s));
        if (bs.f <= value) {
            m = bm.x;
            s = bs.x;
            value = bs.f;
        }
        m_step = std::max(std::min(m_step, 4.0 * moved), 16.0 * config.tol);
        s_step = std::max(std::min(s_step, 4.0 * moved), 16.0 * config.tol);
        if (moved <= config.tol) {
            break;
        }
    }
    out.q = {m, std::exp(s)};
    out.kl = value;
    return out;
}

}  // namespace lvkit::inference
