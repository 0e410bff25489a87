#pragma once

// Information measures over finite alphabets. All values are in nats.

#include <functional>
#include <string>
#include <variant>
#include <vector>

#include <Eigen/Dense>

#include "lvkit/common.hpp"

namespace lvkit::divergences {

/// Probability mass function over an alphabet of size >= 2.
class FinitePmf {
   public:
    /// Throws DomainError unless entries are finite, >= 0 and sum to 1 within 1e-12.
    explicit FinitePmf(Eigen::VectorXd probs);
    static FinitePmf uniform(Eigen::Index size);

    const Eigen::VectorXd& probs() const { return probs_; }
    Eigen::Index size() const { return probs_.size(); }
    double operator[](Eigen::Index i) const { return probs_[i]; }

   private:
    Eigen::VectorXd probs_;
};

// ----- generalized entropy -----

struct ZeroOneLoss {};
struct LogLoss {};
/// Squared-error loss over numeric values attached to each alphabet symbol.
struct QuadraticLoss {
    Eigen::VectorXd values;
};
using Loss = std::variant<ZeroOneLoss, LogLoss, QuadraticLoss>;

/// Minimum expected loss min_xhat E_p[loss(x, xhat)]:
/// 1 - max p for 0-1 loss, Shannon entropy for log loss, variance for quadratic loss.
double generalized_entropy(const FinitePmf& p, const Loss& loss);

// ----- divergences -----

/// KL(p||q); flagged +inf when p puts mass where q does not.
ExtendedValue kl(const FinitePmf& p, const FinitePmf& q);
/// H(p||q) = -sum p ln q = KL(p||q) + H(p).
ExtendedValue cross_entropy(const FinitePmf& p, const FinitePmf& q);
/// Unhalved Jensen-Shannon divergence KL(p||m) + KL(q||m), m = (p+q)/2; lies in [0, 2 ln 2].
double jensen_shannon(const FinitePmf& p, const FinitePmf& q);
/// Amari alpha-divergence; alpha in {0, 1} is a DomainError (use kl for the limits).
ExtendedValue alpha_divergence(const FinitePmf& p, const FinitePmf& q, double alpha);

// ----- f-divergences -----

/// Convex generator f with f(1) = 0 together with its conjugate g = f*.
///
/// The variational form maximizes sum_x T(x) p(x) - g(T(x)) q(x) symbol by
/// symbol, so g must be strictly convex on its open domain (t_min, t_max).
class FGenerator {
   public:
    enum class Kind { KLForward, JensenShannon, Alpha, Custom };

    struct Functions {
        std::function<double(double)> f;       // on [0, inf); may return +inf at 0
        std::function<double(double)> g;       // on (t_min, t_max)
        std::function<double(double)> g_prime;
        std::function<double(double)> g_second;
        double t_min = -std::numeric_limits<double>::infinity();
        double t_max = std::numeric_limits<double>::infinity();
        /// lim_{x->inf} f(x)/x; the cost per unit of p-mass where q = 0.
        double recession = std::numeric_limits<double>::infinity();
    };

    /// f(x) = x ln x, g(t) = exp(t - 1).
    static FGenerator kl_forward();
    /// g(t) = -ln(2 - e^t); reproduces the unhalved Jensen-Shannon divergence.
    static FGenerator jensen_shannon();
    /// f(x) = (alpha (x - 1) - (x^alpha - 1)) / (alpha (1 - alpha)), alpha not in {0, 1}.
    static FGenerator alpha(double alpha);
    /// User-supplied pair; f convexity and f(1) = 0 are checked at sample points.
    static FGenerator custom(std::string name, Functions fns);

    Kind kind() const { return kind_; }
    const std::string& name() const { return name_; }
    double f(double x) const { return fns_.f(x); }
    double g(double t) const { return fns_.g(t); }
    double g_prime(double t) const { return fns_.g_prime(t); }
    double g_second(double t) const { return fns_.g_second(t); }
    double t_min() const { return fns_.t_min; }
    double t_max() const { return fns_.t_max; }
    double recession() const { return fns_.recession; }

   private:
    FGenerator(Kind kind, std::string name, Functions fns);
    Kind kind_;
    std::string name_;
    Functions fns_;
};

/// D_f(p||q) = sum_x q(x) f(p(x)/q(x)).
ExtendedValue f_divergence_closed(const FinitePmf& p, const FinitePmf& q, const FGenerator& f);

struct VariationalResult {
    ExtendedValue value;
    /// Optimal critic per symbol; +-inf where the optimum sits on an open domain end.
    Eigen::VectorXd critic;
};

/// max_T E_p[T] - E_q[g(T)] solved per symbol from g'(T(x)) = p(x)/q(x) by
/// safeguarded Newton with bisection fallback. A generator whose g is not
/// strictly convex at the probe points is a ConfigError.
VariationalResult f_divergence_variational(const FinitePmf& p, const FinitePmf& q, const FGenerator& f);

/// Value of the variational objective E_p[T] - E_q[g(T)] for a given critic.
double f_variational_objective(const FinitePmf& p, const FinitePmf& q, const FGenerator& f,
                               const Eigen::VectorXd& critic);

}  // namespace lvkit::divergences
