#include "lvkit/gradient_estimators.hpp"

#include <cmath>
#include <vector>

namespace lvkit::inference {

namespace {

// Running per-coordinate mean and variance, Welford style.
class Accumulator {
   public:
    explicit Accumulator(Eigen::Index dim) : mean_(Eigen::VectorXd::Zero(dim)), m2_(Eigen::VectorXd::Zero(dim)) {}

    void add(const Eigen::VectorXd& v) {
        ++count_;
        const Eigen::VectorXd delta = v - mean_;
        mean_ += delta / static_cast<double>(count_);
        m2_ += delta.cwiseProduct(v - mean_);
    }

    GradientEstimate finish() const {
        GradientEstimate out;
        out.mean = mean_;
        out.variance = count_ > 1 ? Eigen::VectorXd(m2_ / static_cast<double>(count_ - 1))
                                  : Eigen::VectorXd::Zero(mean_.size());
        out.std_error = (out.variance / static_cast<double>(count_)).cwiseSqrt();
        return out;
    }

   private:
    long long count_ = 0;
    Eigen::VectorXd mean_;
    Eigen::VectorXd m2_;
};

void require_samples(int samples) {
    if (samples < 1) {
        throw ConfigError("gradient estimators need at least one sample");
    }
}

void require_binary_latent(const latent::DiscreteLatentJoint& joint) {
    if (joint.num_latent() != 2) {
        throw DomainError("Bernoulli-logit variational family needs a two-state latent");
    }
}

double log_bernoulli(int z, double phi) { return z == 1 ? -softplus(-phi) : -softplus(phi); }

// ln q(z) - ln p(x, z) for the Gaussian setup, dropping nothing.
double gaussian_signal(double x, double b, double s, double z) {
    const double var = std::exp(2.0 * s);
    const double log_q = -0.5 * (kLog2Pi + 2.0 * s + (z - b) * (z - b) / var);
    const double log_joint = -0.5 * (kLog2Pi + z * z) - 0.5 * (kLog2Pi + (x - z) * (x - z));
    return log_q - log_joint;
}

Eigen::VectorXd reparam_draw(double x, double b, double s, double w) {
    const double gamma = std::exp(s);
    const double z = b + gamma * w;
    Eigen::VectorXd g(2);
    g << (z - x) + b, (z - x) * gamma * w + (gamma * gamma - 1.0);
    return g;
}

Eigen::VectorXd reinforce_gaussian_draw(double x, double b, double s, double w) {
    const double gamma = std::exp(s);
    const double z = b + gamma * w;
    const double signal = gaussian_signal(x, b, s, z);
    Eigen::VectorXd g(2);
    g << signal * (z - b) / (gamma * gamma), signal * (w * w - 1.0);
    return g;
}

}  // namespace

GradientEstimate reinforce_gradient(const latent::DiscreteLatentJoint& joint, const expfam::Observation& x, double phi,
                                    int samples, Rng& rng) {
    require_binary_latent(joint);
    require_samples(samples);
    const Eigen::VectorXd lj = joint.log_joint(x);
    const double p1 = sigmoid(phi);
    Accumulator acc(1);
    Eigen::VectorXd g(1);
    for (int m = 0; m < samples; ++m) {
        const int z = rng.bernoulli(p1) ? 1 : 0;
        g[0] = (log_bernoulli(z, phi) - lj[z]) * (z - p1);
        acc.add(g);
    }
    return acc.finish();
}

GradientEstimate bernoulli_score(double phi, int samples, Rng& rng) {
    require_samples(samples);
    const double p1 = sigmoid(phi);
    Accumulator acc(1);
    Eigen::VectorXd g(1);
    for (int m = 0; m < samples; ++m) {
        g[0] = (rng.bernoulli(p1) ? 1.0 : 0.0) - p1;
        acc.add(g);
    }
    return acc.finish();
}

double bernoulli_free_energy(const latent::DiscreteLatentJoint& joint, const expfam::Observation& x, double phi) {
    require_binary_latent(joint);
    const Eigen::VectorXd lj = joint.log_joint(x);
    const double p1 = sigmoid(phi);
    return (1.0 - p1) * (log_bernoulli(0, phi) - lj[0]) + p1 * (log_bernoulli(1, phi) - lj[1]);
}

double bernoulli_free_energy_gradient(const latent::DiscreteLatentJoint& joint, const expfam::Observation& x,
                                      double phi) {
    require_binary_latent(joint);
    const Eigen::VectorXd lj = joint.log_joint(x);
    const double p1 = sigmoid(phi);
    return p1 * (1.0 - p1) * (phi - lj[1] + lj[0]);
}

Eigen::Vector2d gaussian_free_energy_gradient(double x, double b, double s) {
    return {2.0 * b - x, 2.0 * std::exp(2.0 * s) - 1.0};
}

GradientEstimate reparam_gradient(double x, double b, double s, int samples, Rng& rng) {
    require_samples(samples);
    Accumulator acc(2);
    for (int m = 0; m < samples; ++m) {
        acc.add(reparam_draw(x, b, s, rng.normal()));
    }
    return acc.finish();
}

GradientEstimate reinforce_gaussian_gradient(double x, double b, double s, int samples, Rng& rng) {
    require_samples(samples);
    Accumulator acc(2);
    for (int m = 0; m < samples; ++m) {
        acc.add(reinforce_gaussian_draw(x, b, s, rng.normal()));
    }
    return acc.finish();
}

PairedGradientRun paired_gaussian_gradients(double x, double b, double s, int samples, Rng& rng) {
    require_samples(samples);
    Accumulator rep(2);
    Accumulator rf(2);
    for (int m = 0; m < samples; ++m) {
        const double w = rng.normal();
        rep.add(reparam_draw(x, b, s, w));
        rf.add(reinforce_gaussian_draw(x, b, s, w));
    }
    return {rep.finish(), rf.finish()};
}

}  // namespace lvkit::inference
