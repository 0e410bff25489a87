#include "lvkit/rbm.hpp"

#include <algorithm>
#include <numeric>
#include <string>
#include <vector>

namespace lvkit::rbm {

namespace {

void require_binary(const Eigen::VectorXd& v, Eigen::Index size, const char* what) {
    if (v.size() != size) {
        throw DomainError(std::string(what) + " has length " + std::to_string(v.size()) + ", expected " +
                          std::to_string(size));
    }
    for (Eigen::Index i = 0; i < v.size(); ++i) {
        if (v[i] != 0.0 && v[i] != 1.0) {
            throw DomainError(std::string(what) + " entries must be 0 or 1");
        }
    }
}

void require_enumerable(const RbmParams& params) {
    if (params.visible() + params.hidden() > kMaxEnumeratedUnits) {
        throw ConfigError("RBM enumeration needs D + M <= " + std::to_string(kMaxEnumeratedUnits));
    }
}

Eigen::VectorXd bits(std::uint64_t code, Eigen::Index n) {
    Eigen::VectorXd v(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        v[i] = static_cast<double>((code >> i) & 1U);
    }
    return v;
}

Eigen::VectorXd sigmoid(const Eigen::VectorXd& t) { return t.unaryExpr([](double v) { return lvkit::sigmoid(v); }); }

double softplus_sum(const Eigen::VectorXd& t) {
    double s = 0.0;
    for (Eigen::Index i = 0; i < t.size(); ++i) {
        s += softplus(t[i]);
    }
    return s;
}

Eigen::VectorXd sample_bits(const Eigen::VectorXd& probs, Rng& rng) {
    Eigen::VectorXd out(probs.size());
    for (Eigen::Index i = 0; i < probs.size(); ++i) {
        out[i] = rng.bernoulli(probs[i]) ? 1.0 : 0.0;
    }
    return out;
}

// Model expectations E[x], E[z], E[x z'] by enumerating one layer and summing
// the other analytically.
struct Moments {
    Eigen::VectorXd ex;
    Eigen::VectorXd ez;
    Eigen::MatrixXd exz;
    double log_z = 0.0;
};

Moments model_moments(const RbmParams& p) {
    require_enumerable(p);
    const Eigen::Index d = p.visible();
    const Eigen::Index m = p.hidden();
    const bool over_visible = d <= m;
    const Eigen::Index n = over_visible ? d : m;
    const std::uint64_t states = std::uint64_t{1} << n;

    std::vector<double> logw(states);
    for (std::uint64_t c = 0; c < states; ++c) {
        const Eigen::VectorXd s = bits(c, n);
        logw[c] = over_visible ? p.b.dot(s) + softplus_sum(p.W.transpose() * s + p.a)
                               : p.a.dot(s) + softplus_sum(p.W * s + p.b);
    }
    Moments mo;
    mo.log_z = log_sum_exp(logw);
    mo.ex = Eigen::VectorXd::Zero(d);
    mo.ez = Eigen::VectorXd::Zero(m);
    mo.exz = Eigen::MatrixXd::Zero(d, m);
    for (std::uint64_t c = 0; c < states; ++c) {
        const double w = std::exp(logw[c] - mo.log_z);
        const Eigen::VectorXd s = bits(c, n);
        if (over_visible) {
            const Eigen::VectorXd h = sigmoid(p.W.transpose() * s + p.a);
            mo.ex += w * s;
            mo.ez += w * h;
            mo.exz += w * s * h.transpose();
        } else {
            const Eigen::VectorXd v = sigmoid(p.W * s + p.b);
            mo.ex += w * v;
            mo.ez += w * s;
            mo.exz += w * v * s.transpose();
        }
    }
    return mo;
}

}  // namespace

RbmParams RbmParams::zeros(Eigen::Index d, Eigen::Index m) {
    return {Eigen::VectorXd::Zero(m), Eigen::VectorXd::Zero(d), Eigen::MatrixXd::Zero(d, m)};
}

void validate(const RbmParams& params) {
    if (params.a.size() != params.hidden() || params.b.size() != params.visible()) {
        throw DomainError("RBM bias lengths must match the weight matrix (a: M, b: D)");
    }
    if (!params.a.allFinite() || !params.b.allFinite() || !params.W.allFinite()) {
        throw DomainError("RBM parameters must be finite");
    }
}

RbmParams initialize(Eigen::Index d, Eigen::Index m, std::uint64_t seed) {
    if (d < 1 || m < 1) {
        throw ConfigError("RBM needs D >= 1 and M >= 1");
    }
    RbmParams p = RbmParams::zeros(d, m);
    Rng rng(seed, 0x4B3);
    for (Eigen::Index j = 0; j < m; ++j) {
        for (Eigen::Index i = 0; i < d; ++i) {
            p.W(i, j) = 0.02 * rng.uniform() - 0.01;
        }
    }
    return p;
}

double energy(const RbmParams& params, const Eigen::VectorXd& x, const Eigen::VectorXd& z) {
    validate(params);
    require_binary(x, params.visible(), "visible vector");
    require_binary(z, params.hidden(), "hidden vector");
    return -params.a.dot(z) - params.b.dot(x) - x.dot(params.W * z);
}

Eigen::VectorXd cond_hidden(const RbmParams& params, const Eigen::VectorXd& x) {
    validate(params);
    require_binary(x, params.visible(), "visible vector");
    return sigmoid(params.W.transpose() * x + params.a);
}

Eigen::VectorXd cond_visible(const RbmParams& params, const Eigen::VectorXd& z) {
    validate(params);
    require_binary(z, params.hidden(), "hidden vector");
    return sigmoid(params.W * z + params.b);
}

double log_partition(const RbmParams& params) {
    validate(params);
    return model_moments(params).log_z;
}

double log_marginal(const RbmParams& params, const Eigen::VectorXd& x) {
    validate(params);
    require_binary(x, params.visible(), "visible vector");
    return params.b.dot(x) + softplus_sum(params.W.transpose() * x + params.a) - log_partition(params);
}

double log_likelihood(const RbmParams& params, const Eigen::MatrixXd& data) {
    validate(params);
    const double log_z = log_partition(params);
    double total = 0.0;
    for (Eigen::Index n = 0; n < data.rows(); ++n) {
        const Eigen::VectorXd x = data.row(n).transpose();
        require_binary(x, params.visible(), "data row");
        total += params.b.dot(x) + softplus_sum(params.W.transpose() * x + params.a) - log_z;
    }
    return total;
}

Eigen::VectorXd RbmGradient::flatten() const {
    Eigen::VectorXd out(a.size() + b.size() + W.size());
    out << a, b, W.reshaped();
    return out;
}

RbmGradient exact_gradient_mean(const RbmParams& params, const Eigen::MatrixXd& data) {
    validate(params);
    if (data.rows() < 1) {
        throw EstimationError("RBM gradient needs at least one sample");
    }
    const Moments mo = model_moments(params);
    RbmGradient g{Eigen::VectorXd::Zero(params.hidden()), Eigen::VectorXd::Zero(params.visible()),
                  Eigen::MatrixXd::Zero(params.visible(), params.hidden())};
    for (Eigen::Index n = 0; n < data.rows(); ++n) {
        const Eigen::VectorXd x = data.row(n).transpose();
        require_binary(x, params.visible(), "data row");
        const Eigen::VectorXd h = sigmoid(params.W.transpose() * x + params.a);
        g.a += h;
        g.b += x;
        g.W += x * h.transpose();
    }
    const double inv_n = 1.0 / static_cast<double>(data.rows());
    g.a = g.a * inv_n - mo.ez;
    g.b = g.b * inv_n - mo.ex;
    g.W = g.W * inv_n - mo.exz;
    return g;
}

RbmGradient exact_gradient(const RbmParams& params, const Eigen::VectorXd& x) {
    return exact_gradient_mean(params, Eigen::MatrixXd(x.transpose()));
}

RbmGradient cd_k_gradient(const RbmParams& params, const Eigen::VectorXd& x, int k, Rng& rng) {
    validate(params);
    require_binary(x, params.visible(), "visible vector");
    if (k < 1) {
        throw ConfigError("CD-k needs k >= 1");
    }
    const Eigen::VectorXd z0 = sample_bits(sigmoid(params.W.transpose() * x + params.a), rng);
    Eigen::VectorXd xk = x;
    Eigen::VectorXd zk = z0;
    for (int step = 0; step < k; ++step) {
        xk = sample_bits(sigmoid(params.W * zk + params.b), rng);
        zk = sample_bits(sigmoid(params.W.transpose() * xk + params.a), rng);
    }
    return {z0 - zk, x - xk, x * z0.transpose() - xk * zk.transpose()};
}

TrainResult train(const RbmParams& params0, const Eigen::MatrixXd& data, int k, const inference::SgdConfig& sgd,
                  Rng& rng) {
    validate(params0);
    inference::validate(sgd);
    if (data.rows() < 1 || data.cols() != params0.visible()) {
        throw ConfigError("RBM training data must be non-empty with D columns");
    }
    for (Eigen::Index n = 0; n < data.rows(); ++n) {
        require_binary(data.row(n).transpose(), params0.visible(), "data row");
    }
    const bool exact = params0.visible() + params0.hidden() <= kMaxEnumeratedUnits;
    const double n_rows = static_cast<double>(data.rows());

    TrainResult out;
    out.params = params0;
    RbmParams& p = out.params;
    auto record = [&](int epoch) {
        if (exact) {
            out.trace.append(static_cast<std::size_t>(epoch), {log_likelihood(p, data) / n_rows});
        } else {
            const Eigen::MatrixXd h = ((data * p.W).rowwise() + p.a.transpose()).unaryExpr([](double t) {
                return lvkit::sigmoid(t);
            });
            const Eigen::MatrixXd recon = ((h * p.W.transpose()).rowwise() + p.b.transpose()).unaryExpr([](double t) {
                return lvkit::sigmoid(t);
            });
            out.trace.append(static_cast<std::size_t>(epoch), {(data - recon).squaredNorm() / n_rows});
        }
    };
    out.trace = Trace({exact ? "loglik" : "reconstruction_error"});
    record(0);

    std::vector<Eigen::Index> order(static_cast<std::size_t>(data.rows()));
    std::iota(order.begin(), order.end(), Eigen::Index{0});
    const auto batch = static_cast<std::size_t>(sgd.minibatch);
    for (int epoch = 1; epoch <= sgd.max_iters; ++epoch) {
        for (std::size_t i = order.size(); i > 1; --i) {
            std::swap(order[i - 1], order[rng.uniform_index(i)]);
        }
        const double step = inference::step_size(sgd, epoch);
        for (std::size_t start = 0; start < order.size(); start += batch) {
            const std::size_t stop = std::min(order.size(), start + batch);
            RbmGradient acc = {Eigen::VectorXd::Zero(p.hidden()), Eigen::VectorXd::Zero(p.visible()),
                               Eigen::MatrixXd::Zero(p.visible(), p.hidden())};
            for (std::size_t s = start; s < stop; ++s) {
                const RbmGradient g = cd_k_gradient(p, data.row(order[s]).transpose(), k, rng);
                acc.a += g.a;
                acc.b += g.b;
                acc.W += g.W;
            }
            const double scale = step / static_cast<double>(stop - start);
            p.a += scale * acc.a;
            p.b += scale * acc.b;
            p.W += scale * acc.W;
        }
        record(epoch);
    }
    return out;
}

}  // namespace lvkit::rbm
