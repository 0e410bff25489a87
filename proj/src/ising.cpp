#include "lvkit/ising.hpp"

#include <cmath>
#include <string>

namespace lvkit::inference {

namespace {

int spin(std::uint32_t state, int i) { return ((state >> i) & 1U) != 0 ? 1 : -1; }

double coupling_energy(const std::vector<std::pair<int, int>>& edges, std::uint32_t state) {
    double s = 0.0;
    for (const auto& [i, j] : edges) {
        s += spin(state, i) * spin(state, j);
    }
    return s;
}

void require_exact(const IsingInstance& instance) {
    if (instance.sites() > kMaxExactIsingSites) {
        throw ConfigError("exact Ising enumeration supports at most " + std::to_string(kMaxExactIsingSites) +
                          " sites, got " + std::to_string(instance.sites()));
    }
}

}  // namespace

std::vector<int> IsingInstance::neighbors(int i) const {
    std::vector<int> out;
    const int r = i / width;
    const int c = i % width;
    if (r > 0) {
        out.push_back(i - width);
    }
    if (c > 0) {
        out.push_back(i - 1);
    }
    if (c + 1 < width) {
        out.push_back(i + 1);
    }
    if (r + 1 < height) {
        out.push_back(i + width);
    }
    return out;
}

std::vector<std::pair<int, int>> IsingInstance::edges() const {
    std::vector<std::pair<int, int>> out;
    for (int i = 0; i < sites(); ++i) {
        if (i % width + 1 < width) {
            out.emplace_back(i, i + 1);
        }
        if (i / width + 1 < height) {
            out.emplace_back(i, i + width);
        }
    }
    return out;
}

void validate(const IsingInstance& instance) {
    if (instance.height < 1 || instance.width < 1) {
        throw DomainError("Ising grid dimensions must be positive");
    }
    if (static_cast<int>(instance.x.size()) != instance.sites()) {
        throw DomainError("Ising observation has " + std::to_string(instance.x.size()) + " entries, grid has " +
                          std::to_string(instance.sites()));
    }
    for (int v : instance.x) {
        if (v != 1 && v != -1) {
            throw DomainError("Ising observations must be -1 or +1");
        }
    }
    if (!std::isfinite(instance.eta1) || !std::isfinite(instance.eta2)) {
        throw DomainError("Ising couplings must be finite");
    }
}

IsingExactResult ising_exact(const IsingInstance& instance) {
    validate(instance);
    require_exact(instance);
    const int n = instance.sites();
    const std::uint32_t states = 1U << n;
    const auto edges = instance.edges();

    std::vector<double> log_psi(states);
    std::vector<double> log_prior(states);
    for (std::uint32_t s = 0; s < states; ++s) {
        double field = 0.0;
        for (int i = 0; i < n; ++i) {
            field += spin(s, i) * instance.x[static_cast<std::size_t>(i)];
        }
        log_prior[s] = instance.eta1 * coupling_energy(edges, s);
        log_psi[s] = log_prior[s] + instance.eta2 * field;
    }
    IsingExactResult out;
    out.log_unnormalized_evidence = log_sum_exp(log_psi);
    // Summing x out of the joint leaves a factor 2 cosh(eta2) per site.
    const double log_z = log_sum_exp(log_prior) + n * std::log(2.0 * std::cosh(instance.eta2));
    out.log_px = out.log_unnormalized_evidence - log_z;
    out.posterior.resize(states);
    out.marginals = Eigen::VectorXd::Zero(n);
    for (std::uint32_t s = 0; s < states; ++s) {
        const double p = std::exp(log_psi[s] - out.log_unnormalized_evidence);
        out.posterior[s] = p;
        for (int i = 0; i < n; ++i) {
            if (spin(s, i) > 0) {
                out.marginals[i] += p;
            }
        }
    }
    return out;
}

double site_conditional(const IsingInstance& instance, const std::vector<int>& z, int i) {
    double field = 0.0;
    for (int j : instance.neighbors(i)) {
        field += z[static_cast<std::size_t>(j)];
    }
    return sigmoid(2.0 * (instance.eta1 * field + instance.eta2 * instance.x[static_cast<std::size_t>(i)]));
}

void gibbs_sweep(const IsingInstance& instance, std::vector<int>& z, Rng& rng) {
    for (int i = 0; i < instance.sites(); ++i) {
        z[static_cast<std::size_t>(i)] = rng.bernoulli(site_conditional(instance, z, i)) ? 1 : -1;
    }
}

GibbsResult gibbs_ising(const IsingInstance& instance, long long sweeps, long long burn_in, Rng& rng) {
    validate(instance);
    if (sweeps < 1 || burn_in < 0) {
        throw ConfigError("Gibbs sampling needs sweeps >= 1 and burn_in >= 0");
    }
    std::vector<int> z = instance.x;
    for (long long t = 0; t < burn_in; ++t) {
        gibbs_sweep(instance, z, rng);
    }
    std::vector<long long> ups(z.size(), 0);
    for (long long t = 0; t < sweeps; ++t) {
        gibbs_sweep(instance, z, rng);
        for (std::size_t i = 0; i < z.size(); ++i) {
            ups[i] += z[i] > 0 ? 1 : 0;
        }
    }
    GibbsResult out;
    out.marginals.resize(static_cast<Eigen::Index>(z.size()));
    for (std::size_t i = 0; i < z.size(); ++i) {
        out.marginals[static_cast<Eigen::Index>(i)] = static_cast<double>(ups[i]) / static_cast<double>(sweeps);
    }
    out.final_state = std::move(z);
    return out;
}

double mean_field_free_energy(const IsingInstance& instance, const Eigen::VectorXd& q1) {
    double neg_entropy = 0.0;
    for (Eigen::Index i = 0; i < q1.size(); ++i) {
        neg_entropy += xlogx(q1[i]) + xlogx(1.0 - q1[i]);
    }
    const Eigen::VectorXd mu = 2.0 * q1.array() - 1.0;
    double pair = 0.0;
    for (const auto& [i, j] : instance.edges()) {
        pair += mu[i] * mu[j];
    }
    double field = 0.0;
    for (Eigen::Index i = 0; i < q1.size(); ++i) {
        field += instance.x[static_cast<std::size_t>(i)] * mu[i];
    }
    return neg_entropy - instance.eta1 * pair - instance.eta2 * field;
}

double kl_posterior_to_mean_field(const IsingExactResult& exact, const Eigen::VectorXd& q1) {
    double neg_entropy = 0.0;
    for (Eigen::Index s = 0; s < exact.posterior.size(); ++s) {
        neg_entropy += xlogx(exact.posterior[s]);
    }
    double cross = 0.0;
    for (Eigen::Index i = 0; i < q1.size(); ++i) {
        const double p = exact.marginals[i];
        if (p > 0) {
            cross += p * std::log(q1[i]);
        }
        if (p < 1) {
            cross += (1.0 - p) * std::log1p(-q1[i]);
        }
    }
    return std::max(0.0, neg_entropy - cross);
}

MfviResult mfvi_ising(const IsingInstance& instance, const MfviConfig& config) {
    validate(instance);
    const int n = instance.sites();
    const bool exact_available = n <= kMaxExactIsingSites;
    IsingExactResult exact;
    if (exact_available) {
        exact = ising_exact(instance);
    }

    MfviResult out;
    Eigen::VectorXd& q = out.state.q1;
    q.resize(n);
    for (int i = 0; i < n; ++i) {
        q[i] = 0.5 + 1e-3 * instance.x[static_cast<std::size_t>(i)];
    }
    Eigen::VectorXd mu = 2.0 * q.array() - 1.0;
    std::vector<std::vector<int>> nbrs(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
        nbrs[static_cast<std::size_t>(i)] = instance.neighbors(i);
    }

    out.trace = exact_available ? Trace({"free_energy", "kl_exact"}) : Trace({"free_energy"});
    auto record = [&](int sweep) {
        const double f = mean_field_free_energy(instance, q);
        if (exact_available) {
            out.trace.append(static_cast<std::size_t>(sweep), {f, kl_posterior_to_mean_field(exact, q)});
        } else {
            out.trace.append(static_cast<std::size_t>(sweep), {f});
        }
    };
    record(0);
    if (config.record_site_updates) {
        out.site_free_energies.push_back(mean_field_free_energy(instance, q));
    }

    for (int sweep = 1; sweep <= config.max_sweeps; ++sweep) {
        double moved = 0.0;
        for (int i = 0; i < n; ++i) {
            double field = 0.0;
            for (int j : nbrs[static_cast<std::size_t>(i)]) {
                field += mu[j];
            }
            const double updated =
                sigmoid(2.0 * (instance.eta1 * field + instance.eta2 * instance.x[static_cast<std::size_t>(i)]));
            moved = std::max(moved, std::abs(updated - q[i]));
            q[i] = updated;
            mu[i] = 2.0 * updated - 1.0;
            if (config.record_site_updates) {
                out.site_free_energies.push_back(mean_field_free_energy(instance, q));
            }
        }
        out.sweeps = sweep;
        record(sweep);
        if (moved < config.tol) {
            out.converged = true;
            break;
        }
    }
    out.state.free_energy = mean_field_free_energy(instance, q);
    return out;
}

std::pair<std::vector<int>, std::vector<int>> sample_ising(int height, int width, double eta1, double eta2, Rng& rng) {
    IsingInstance prior{height, width, std::vector<int>(static_cast<std::size_t>(height) * static_cast<std::size_t>(width), 1),
                        eta1, 0.0};
    validate(prior);
    const int n = prior.sites();
    std::vector<int> z(static_cast<std::size_t>(n));
    if (n <= kMaxExactIsingSites) {
        const auto edges = prior.edges();
        const std::uint32_t states = 1U << n;
        Eigen::VectorXd logw(states);
        for (std::uint32_t s = 0; s < states; ++s) {
            logw[s] = eta1 * coupling_energy(edges, s);
        }
        const Eigen::VectorXd w = (logw.array() - logw.maxCoeff()).exp();
        const auto s = static_cast<std::uint32_t>(rng.categorical(w));
        for (int i = 0; i < n; ++i) {
            z[static_cast<std::size_t>(i)] = spin(s, i);
        }
    } else {
        for (auto& v : z) {
            v = rng.bernoulli(0.5) ? 1 : -1;
        }
        for (int t = 0; t < 1000; ++t) {
            gibbs_sweep(prior, z, rng);
        }
    }
    const double agree = sigmoid(2.0 * eta2);
    std::vector<int> x(z.size());
    for (std::size_t i = 0; i < z.size(); ++i) {
        x[i] = rng.bernoulli(agree) ? z[i] : -z[i];
    }
    return {std::move(x), std::move(z)};
}

}  // namespace lvkit::inference
