#include "lvkit/sgd.hpp"

#include <cmath>
#include <sstream>

namespace lvkit::inference {

void validate(const SgdConfig& config) {
    if (!(config.gamma >= 0) || !std::isfinite(config.gamma)) {
        throw ConfigError("SGD step size gamma must be finite and >= 0");
    }
    if (config.minibatch < 1) {
        throw ConfigError("SGD minibatch size must be >= 1");
    }
    if (config.max_iters < 0) {
        throw ConfigError("SGD max_iters must be >= 0");
    }
}

double step_size(const SgdConfig& config, int iteration) {
    const double i = static_cast<double>(iteration);
    switch (config.schedule) {
        case Schedule::Constant:
            return config.gamma;
        case Schedule::InverseIter:
            return config.gamma / i;
        case Schedule::InverseSqrt:
            return config.gamma / std::sqrt(i);
    }
    return config.gamma;
}

SgdResult sgd(const GradientFn& grad, const Eigen::VectorXd& phi0, const SgdConfig& config,
              const std::function<double(const Eigen::VectorXd&)>& objective) {
    validate(config);
    Rng rng(config.seed, 0x56D);
    SgdResult out;
    out.phi = phi0;
    out.trace = objective ? Trace({"step", "grad_norm", "objective"}) : Trace({"step", "grad_norm"});
    for (int it = 1; it <= config.max_iters; ++it) {
        const Eigen::VectorXd g = grad(out.phi, rng);
        if (g.size() != out.phi.size() || !g.allFinite()) {
            std::ostringstream msg;
            msg.precision(17);
            msg << "SGD: non-finite or mis-sized gradient at iteration " << it << "; iterate = [";
            for (Eigen::Index i = 0; i < out.phi.size(); ++i) {
                msg << (i ? ", " : "") << out.phi[i];
            }
            msg << "]";
            throw NumericError(msg.str());
        }
        const double step = step_size(config, it);
        out.phi -= step * g;
        out.iterations = it;
        const double gnorm = g.norm();
        if (objective) {
            out.trace.append(static_cast<std::size_t>(it), {step, gnorm, objective(out.phi)});
        } else {
            out.trace.append(static_cast<std::size_t>(it), {step, gnorm});
        }
        if (gnorm <= config.grad_tol) {
            break;
        }
    }
    return out;
}

}  // namespace lvkit::inference
