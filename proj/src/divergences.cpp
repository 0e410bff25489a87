#include "lvkit/divergences.hpp"

#include <algorithm>
#include <array>
#include <cmath>

namespace lvkit::divergences {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

void require_same_alphabet(const FinitePmf& p, const FinitePmf& q) {
    if (p.size() != q.size()) {
        throw DomainError("pmfs are over alphabets of different sizes (" + std::to_string(p.size()) + " vs " +
                          std::to_string(q.size()) + ")");
    }
}

void check_generator(const std::string& name, const FGenerator::Functions& fns) {
    if (!fns.f || !fns.g || !fns.g_prime || !fns.g_second) {
        throw ConfigError("f-generator '" + name + "' is missing a function");
    }
    if (std::abs(fns.f(1.0)) > 1e-12) {
        throw ConfigError("f-generator '" + name + "' violates f(1) = 0");
    }
    constexpr std::array<double, 6> probes{0.05, 0.3, 0.9, 1.0, 2.5, 7.0};
    for (double a : probes) {
        for (double b : probes) {
            const double mid = fns.f(0.5 * (a + b));
            const double chord = 0.5 * (fns.f(a) + fns.f(b));
            if (mid > chord + 1e-12 * (1.0 + std::abs(chord))) {
                throw ConfigError("f-generator '" + name + "' is not convex");
            }
        }
    }
}

/// Interior starting point of the critic domain.
double domain_start(const FGenerator& f) {
    const bool lo = std::isfinite(f.t_min());
    const bool hi = std::isfinite(f.t_max());
    if (lo && hi) {
        return 0.5 * (f.t_min() + f.t_max());
    }
    if (hi) {
        return f.t_max() - 1.0;
    }
    if (lo) {
        return f.t_min() + 1.0;
    }
    return 0.0;
}

void require_strict_convexity(const FGenerator& f, double t) {
    const double curvature = f.g_second(t);
    if (!(curvature > 0) || !std::isfinite(curvature)) {
        throw ConfigError("f-generator '" + f.name() + "': g is not strictly convex at t = " + std::to_string(t) +
                          " (g'' = " + std::to_string(curvature) +
                          "); the per-symbol critic problem has no unique maximizer");
    }
}

/// Solve g'(t) = ratio on the open critic domain.
double solve_critic(const FGenerator& f, double ratio) {
    auto residual = [&](double t) { return f.g_prime(t) - ratio; };

    const double start = domain_start(f);
    double lo = f.t_min();
    double hi = f.t_max();
    const double r0 = residual(start);
    if (r0 == 0) {
        return start;
    }
    // Bracket the root; open infinite sides are expanded geometrically.
    if (r0 < 0) {
        lo = start;
        if (!std::isfinite(hi)) {
            double step = 1.0;
            hi = start + step;
            int guard = 0;
            while (residual(hi) < 0) {
                lo = hi;
                step *= 2.0;
                hi = start + step;
                if (++guard > 200) {
                    throw NumericError("f-divergence critic: cannot bracket g'(t) = " + std::to_string(ratio));
                }
            }
        }
    } else {
        hi = start;
        if (!std::isfinite(lo)) {
            double step = 1.0;
            lo = start - step;
            int guard = 0;
            while (residual(lo) > 0) {
                hi = lo;
                step *= 2.0;
                lo = start - step;
                if (++guard > 200) {
                    throw NumericError("f-divergence critic: cannot bracket g'(t) = " + std::to_string(ratio));
                }
            }
        }
    }

    double t = std::isfinite(lo) && std::isfinite(hi) ? 0.5 * (lo + hi) : start;
    if (t <= f.t_min() || t >= f.t_max()) {
        t = 0.5 * (lo + hi);
    }
    for (int iter = 0; iter < 300; ++iter) {
        const double r = residual(t);
        if (r == 0) {
            return t;
        }
        if (r < 0) {
            lo = t;
        } else {
            hi = t;
        }
        const double slope = f.g_second(t);
        double next = t - r / slope;
        const bool inside = std::isfinite(next) && next > lo && next < hi;
        if (!inside) {
            next = 0.5 * (lo + hi);
        }
        if (std::abs(next - t) <= 1e-15 * (1.0 + std::abs(t))) {
            return next;
        }
        t = next;
    }
    return t;
}

}  // namespace

FinitePmf::FinitePmf(Eigen::VectorXd probs) : probs_(std::move(probs)) {
    if (probs_.size() < 2) {
        throw DomainError("pmf alphabet must have at least 2 symbols");
    }
    if (!probs_.allFinite() || (probs_.array() < 0).any()) {
        throw DomainError("pmf entries must be finite and nonnegative");
    }
    if (std::abs(probs_.sum() - 1.0) > 1e-12) {
        throw DomainError("pmf entries must sum to 1 (sum = " + std::to_string(probs_.sum()) + ")");
    }
}

FinitePmf FinitePmf::uniform(Eigen::Index size) {
    if (size < 2) {
        throw DomainError("pmf alphabet must have at least 2 symbols");
    }
    return FinitePmf(Eigen::VectorXd::Constant(size, 1.0 / static_cast<double>(size)));
}

double generalized_entropy(const FinitePmf& p, const Loss& loss) {
    const auto& pr = p.probs();
    if (std::holds_alternative<ZeroOneLoss>(loss)) {
        return 1.0 - pr.maxCoeff();
    }
    if (std::holds_alternative<LogLoss>(loss)) {
        double h = 0.0;
        for (double v : pr) {
            h -= xlogx(v);
        }
        return h;
    }
    const auto& values = std::get<QuadraticLoss>(loss).values;
    if (values.size() != pr.size()) {
        throw DomainError("quadratic loss needs one numeric value per alphabet symbol");
    }
    const double mean = pr.dot(values);
    const double second = pr.dot(values.cwiseProduct(values));
    return std::max(0.0, second - mean * mean);
}

ExtendedValue kl(const FinitePmf& p, const FinitePmf& q) {
    require_same_alphabet(p, q);
    double sum = 0.0;
    for (Eigen::Index i = 0; i < p.size(); ++i) {
        if (p[i] == 0) {
            continue;
        }
        if (q[i] == 0) {
            return ExtendedValue::plus_infinity();
        }
        sum += p[i] * (std::log(p[i]) - std::log(q[i]));
    }
    return ExtendedValue::finite(std::max(sum, 0.0));
}

ExtendedValue cross_entropy(const FinitePmf& p, const FinitePmf& q) {
    require_same_alphabet(p, q);
    double sum = 0.0;
    for (Eigen::Index i = 0; i < p.size(); ++i) {
        if (p[i] == 0) {
            continue;
        }
        if (q[i] == 0) {
            return ExtendedValue::plus_infinity();
        }
        sum -= p[i] * std::log(q[i]);
    }
    return ExtendedValue::finite(sum);
}

double jensen_shannon(const FinitePmf& p, const FinitePmf& q) {
    require_same_alphabet(p, q);
    double sum = 0.0;
    for (Eigen::Index i = 0; i < p.size(); ++i) {
        const double m = 0.5 * (p[i] + q[i]);
        if (p[i] > 0) {
            sum += p[i] * (std::log(p[i]) - std::log(m));
        }
        if (q[i] > 0) {
            sum += q[i] * (std::log(q[i]) - std::log(m));
        }
    }
    return std::clamp(sum, 0.0, 2.0 * std::log(2.0));
}

ExtendedValue alpha_divergence(const FinitePmf& p, const FinitePmf& q, double alpha) {
    require_same_alphabet(p, q);
    if (alpha == 0.0 || alpha == 1.0 || !std::isfinite(alpha)) {
        throw DomainError("alpha-divergence is undefined at alpha in {0, 1}; use kl(q, p) or kl(p, q) for the limits");
    }
    double numerator = 0.0;
    for (Eigen::Index i = 0; i < p.size(); ++i) {
        const double pi = p[i];
        const double qi = q[i];
        if (pi == 0 && qi == 0) {
            continue;
        }
        if ((pi == 0 && alpha < 0) || (qi == 0 && alpha > 1)) {
            return ExtendedValue::plus_infinity();
        }
        numerator += alpha * pi + (1.0 - alpha) * qi - std::pow(pi, alpha) * std::pow(qi, 1.0 - alpha);
    }
    return ExtendedValue::finite(std::max(0.0, numerator / (alpha * (1.0 - alpha))));
}

FGenerator::FGenerator(Kind kind, std::string name, Functions fns)
    : kind_(kind), name_(std::move(name)), fns_(std::move(fns)) {
    check_generator(name_, fns_);
}

FGenerator FGenerator::kl_forward() {
    Functions fns;
    fns.f = [](double x) { return xlogx(x); };
    fns.g = [](double t) { return std::exp(t - 1.0); };
    fns.g_prime = fns.g;
    fns.g_second = fns.g;
    return FGenerator(Kind::KLForward, "kl", std::move(fns));
}

FGenerator FGenerator::jensen_shannon() {
    const double ln2 = std::log(2.0);
    Functions fns;
    fns.f = [](double x) {
        if (x == 0) {
            return std::log(2.0);
        }
        return x * std::log(2.0 * x / (1.0 + x)) + std::log(2.0 / (1.0 + x));
    };
    fns.g = [](double t) { return -std::log(2.0 - std::exp(t)); };
    fns.g_prime = [](double t) {
        const double e = std::exp(t);
        return e / (2.0 - e);
    };
    fns.g_second = [](double t) {
        const double e = std::exp(t);
        return 2.0 * e / ((2.0 - e) * (2.0 - e));
    };
    fns.t_max = ln2;
    fns.recession = ln2;
    return FGenerator(Kind::JensenShannon, "js", std::move(fns));
}

FGenerator FGenerator::alpha(double a) {
    if (a == 0.0 || a == 1.0 || !std::isfinite(a)) {
        throw DomainError("alpha generator requires alpha not in {0, 1}");
    }
    const double scale = a * (1.0 - a);
    Functions fns;
    fns.f = [a, scale](double x) { return (a * (x - 1.0) - (std::pow(x, a) - 1.0)) / scale; };
    // g = f*: the maximizing x solves f'(x) = t, i.e. x = (1 + (a-1) t)^(1/(a-1)).
    auto argmax = [a](double t) { return std::pow(1.0 + (a - 1.0) * t, 1.0 / (a - 1.0)); };
    fns.g = [a, scale, argmax](double t) {
        const double x = argmax(t);
        return x * t - (a * (x - 1.0) - (std::pow(x, a) - 1.0)) / scale;
    };
    fns.g_prime = argmax;
    fns.g_second = [a](double t) { return std::pow(1.0 + (a - 1.0) * t, (2.0 - a) / (a - 1.0)); };
    if (a < 1) {
        fns.t_max = 1.0 / (1.0 - a);
        fns.recession = 1.0 / (1.0 - a);
    } else {
        fns.t_min = -1.0 / (a - 1.0);
    }
    return FGenerator(Kind::Alpha, "alpha=" + std::to_string(a), std::move(fns));
}

FGenerator FGenerator::custom(std::string name, Functions fns) {
    return FGenerator(Kind::Custom, std::move(name), std::move(fns));
}

ExtendedValue f_divergence_closed(const FinitePmf& p, const FinitePmf& q, const FGenerator& f) {
    require_same_alphabet(p, q);
    double sum = 0.0;
    for (Eigen::Index i = 0; i < p.size(); ++i) {
        if (p[i] == 0 && q[i] == 0) {
            continue;
        }
        double term = 0.0;
        if (q[i] == 0) {
            if (!std::isfinite(f.recession())) {
                return ExtendedValue::plus_infinity();
            }
            term = p[i] * f.recession();
        } else {
            const double fx = f.f(p[i] / q[i]);
            if (!std::isfinite(fx)) {
                return ExtendedValue::plus_infinity();
            }
            term = q[i] * fx;
        }
        sum += term;
    }
    return ExtendedValue::finite(sum);
}

VariationalResult f_divergence_variational(const FinitePmf& p, const FinitePmf& q, const FGenerator& f) {
    require_same_alphabet(p, q);
    require_strict_convexity(f, domain_start(f));

    VariationalResult out;
    out.critic = Eigen::VectorXd::Zero(p.size());
    double sum = 0.0;
    bool infinite = false;
    for (Eigen::Index i = 0; i < p.size(); ++i) {
        const double pi = p[i];
        const double qi = q[i];
        if (pi == 0 && qi == 0) {
            out.critic[i] = domain_start(f);
            continue;
        }
        if (qi == 0) {
            // sup_t p t over the domain: attained at the upper end.
            out.critic[i] = f.t_max();
            if (!std::isfinite(f.t_max())) {
                infinite = true;
            } else {
                sum += pi * f.t_max();
            }
            continue;
        }
        if (pi == 0) {
            // sup_t -q g(t) = q f(0), approached at the lower end.
            out.critic[i] = f.t_min();
            const double f0 = f.f(0.0);
            if (!std::isfinite(f0)) {
                infinite = true;
            } else {
                sum += qi * f0;
            }
            continue;
        }
        const double t = solve_critic(f, pi / qi);
        require_strict_convexity(f, t);
        out.critic[i] = t;
        sum += pi * t - qi * f.g(t);
    }
    out.value = infinite ? ExtendedValue::plus_infinity() : ExtendedValue::finite(sum);
    return out;
}

double f_variational_objective(const FinitePmf& p, const FinitePmf& q, const FGenerator& f,
                               const Eigen::VectorXd& critic) {
    require_same_alphabet(p, q);
    if (critic.size() != p.size()) {
        throw DomainError("critic length does not match the alphabet");
    }
    double sum = 0.0;
    for (Eigen::Index i = 0; i < p.size(); ++i) {
        const double t = critic[i];
        if (p[i] == 0 && q[i] == 0) {
            continue;
        }
        if (t <= f.t_min()) {
            // g decreases to -f(0) at the lower end.
            const double linear = p[i] == 0 ? 0.0 : (std::isfinite(t) ? p[i] * t : -kInf);
            sum += linear + q[i] * f.f(0.0);
            continue;
        }
        if (t >= f.t_max()) {
            sum += (q[i] == 0) ? p[i] * t : -kInf;
            continue;
        }
        sum += p[i] * t - q[i] * f.g(t);
    }
    return sum;
}

}  // namespace lvkit::divergences
