#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <limits>
#include <random>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

namespace lvkit {

// ----- errors -----

/// Invalid parameters or observations for a distribution or divergence.
class DomainError : public std::domain_error {
   public:
    using std::domain_error::domain_error;
};

/// Bad configuration of an algorithm (sizes, hyperparameters, caps).
class ConfigError : public std::invalid_argument {
   public:
    using std::invalid_argument::invalid_argument;
};

/// Statistical estimation impossible from the given data (empty, singular, collapsed).
class EstimationError : public std::runtime_error {
   public:
    using std::runtime_error::runtime_error;
};

/// Floating point failure: zero densities, NaNs, overflow, non-convergence.
class NumericError : public std::runtime_error {
   public:
    using std::runtime_error::runtime_error;
};

/// A real number that may be an explicitly flagged infinity.
///
/// Divergences and bounds that are infinite are never reported as a bare
/// sentinel; callers check `infinite` first. When `infinite` is set, `value`
/// holds the signed IEEE infinity as well.
struct ExtendedValue {
    double value = 0.0;
    bool infinite = false;

    static ExtendedValue finite(double v) { return {v, false}; }
    static ExtendedValue plus_infinity() { return {std::numeric_limits<double>::infinity(), true}; }
    static ExtendedValue minus_infinity() { return {-std::numeric_limits<double>::infinity(), true}; }
};

// ----- scalar helpers -----

inline double sigmoid(double t) {
    if (t >= 0) {
        return 1.0 / (1.0 + std::exp(-t));
    }
    const double e = std::exp(t);
    return e / (1.0 + e);
}

/// ln(1 + e^t) without overflow.
inline double softplus(double t) {
    return t > 0 ? t + std::log1p(std::exp(-t)) : std::log1p(std::exp(t));
}

inline double logit(double p) { return std::log(p) - std::log1p(-p); }

/// p ln p with the 0 ln 0 = 0 convention.
inline double xlogx(double p) { return p > 0 ? p * std::log(p) : 0.0; }

/// ln Σ exp(v_i); returns -inf for an empty or all -inf input.
double log_sum_exp(std::span<const double> values);
double log_sum_exp(const Eigen::Ref<const Eigen::VectorXd>& values);

inline constexpr double kLog2Pi = 1.8378770664093454835606594728112;

// ----- traces -----

/// Ordered per-iteration records emitted by every iterative fitter.
///
/// Each row is an iteration index followed by one value per named column.
class Trace {
   public:
    Trace() = default;
    explicit Trace(std::vector<std::string> columns) : columns_(std::move(columns)) {}

    void append(std::size_t iteration, std::vector<double> values);

    const std::vector<std::string>& columns() const { return columns_; }
    std::size_t size() const { return iterations_.size(); }
    bool empty() const { return iterations_.empty(); }

    std::size_t iteration(std::size_t row) const { return iterations_.at(row); }
    double at(std::size_t row, std::string_view column) const;
    std::vector<double> column(std::string_view column) const;
    const std::vector<double>& row(std::size_t row) const { return rows_.at(row); }

    /// CSV with header `iter,<columns...>`; floats use 17 significant digits.
    void write_csv(std::ostream& out) const;

   private:
    std::size_t column_index(std::string_view column) const;

    std::vector<std::string> columns_;
    std::vector<std::size_t> iterations_;
    std::vector<std::vector<double>> rows_;
};

// ----- randomness -----

/// Counter-based 64-bit generator.
///
/// Output i of stream s under key k is a SplitMix64 finalizer applied to
/// (k, s, i), so independent streams can be split off a run seed without
/// sharing state and draws are reproducible regardless of call interleaving
/// across streams.
class Rng {
   public:
    using result_type = std::uint64_t;

    explicit Rng(std::uint64_t seed, std::uint64_t stream = 0) : key_(seed), stream_(stream) {}

    static constexpr result_type min() { return 0; }
    static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }
    result_type operator()();

    /// A new generator with the same key on a different stream.
    Rng split(std::uint64_t stream) const { return Rng(key_, stream_ * 0x9E3779B97F4A7C15ULL + stream + 1); }

    /// Uniform on [0, 1) with 53 random bits.
    double uniform();
    /// Uniform integer in [0, n).
    std::size_t uniform_index(std::size_t n);
    double normal();
    bool bernoulli(double p) { return uniform() < p; }
    /// Index drawn from a (not necessarily normalized) nonnegative weight vector.
    std::size_t categorical(const Eigen::Ref<const Eigen::VectorXd>& weights);

    std::uint64_t counter() const { return counter_; }

   private:
    std::uint64_t key_;
    std::uint64_t stream_;
    std::uint64_t counter_ = 0;
    std::normal_distribution<double> normal_{0.0, 1.0};
};

// ----- small linear algebra helpers -----

/// Largest principal angle (radians) between the column spaces of A and B.
double max_principal_angle(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b);

}  // namespace lvkit
