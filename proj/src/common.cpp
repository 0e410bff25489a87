#include "lvkit/common.hpp"

#include <algorithm>
#include <iomanip>
#include <ostream>
#include <sstream>

namespace lvkit {

double log_sum_exp(std::span<const double> values) {
    double peak = -std::numeric_limits<double>::infinity();
    for (double v : values) {
        peak = std::max(peak, v);
    }
    if (!std::isfinite(peak)) {
        return peak;
    }
    double sum = 0.0;
    for (double v : values) {
        sum += std::exp(v - peak);
    }
    return peak + std::log(sum);
}

double log_sum_exp(const Eigen::Ref<const Eigen::VectorXd>& values) {
    return log_sum_exp(std::span<const double>(values.data(), static_cast<std::size_t>(values.size())));
}

void Trace::append(std::size_t iteration, std::vector<double> values) {
    if (values.size() != columns_.size()) {
        throw std::invalid_argument("trace row has " + std::to_string(values.size()) + " values, expected " +
                                    std::to_string(columns_.size()));
    }
    iterations_.push_back(iteration);
    rows_.push_back(std::move(values));
}

std::size_t Trace::column_index(std::string_view column) const {
    auto it = std::find(columns_.begin(), columns_.end(), column);
    if (it == columns_.end()) {
        throw std::out_of_range("trace has no column '" + std::string(column) + "'");
    }
    return static_cast<std::size_t>(it - columns_.begin());
}

double Trace::at(std::size_t row, std::string_view column) const { return rows_.at(row).at(column_index(column)); }

std::vector<double> Trace::column(std::string_view column) const {
    const std::size_t j = column_index(column);
    std::vector<double> out;
    out.reserve(rows_.size());
    for (const auto& r : rows_) {
        out.push_back(r[j]);
    }
    return out;
}

void Trace::write_csv(std::ostream& out) const {
    out << "iter";
    for (const auto& c : columns_) {
        out << ',' << c;
    }
    out << '\n';
    std::ostringstream line;
    line << std::setprecision(17);
    for (std::size_t r = 0; r < rows_.size(); ++r) {
        line.str("");
        line << iterations_[r];
        for (double v : rows_[r]) {
            line << ',' << v;
        }
        out << line.str() << '\n';
    }
}

namespace {

std::uint64_t splitmix64(std::uint64_t z) {
    z += 0x9E3779B97F4A7C15ULL;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

}  // namespace

Rng::result_type Rng::operator()() {
    const std::uint64_t block = splitmix64(key_ ^ splitmix64(stream_));
    return splitmix64(block + 0x632BE59BD9B4E019ULL * (counter_++));
}

double Rng::uniform() { return static_cast<double>((*this)() >> 11) * 0x1.0p-53; }

std::size_t Rng::uniform_index(std::size_t n) {
    if (n == 0) {
        throw std::invalid_argument("uniform_index: empty range");
    }
    // Rejection sampling removes modulo bias.
    const std::uint64_t bound = std::numeric_limits<std::uint64_t>::max() -
                                std::numeric_limits<std::uint64_t>::max() % static_cast<std::uint64_t>(n);
    std::uint64_t r = (*this)();
    while (r >= bound) {
        r = (*this)();
    }
    return static_cast<std::size_t>(r % n);
}

double Rng::normal() { return normal_(*this); }

std::size_t Rng::categorical(const Eigen::Ref<const Eigen::VectorXd>& weights) {
    const double total = weights.sum();
    if (!(total > 0) || !std::isfinite(total)) {
        throw std::invalid_argument("categorical: weights must have positive finite sum");
    }
    const double u = uniform() * total;
    double acc = 0.0;
    for (Eigen::Index k = 0; k < weights.size(); ++k) {
        acc += weights[k];
        if (u < acc) {
            return static_cast<std::size_t>(k);
        }
    }
    // Rounding can leave u == acc; return the last index with positive weight.
    for (Eigen::Index k = weights.size() - 1; k >= 0; --k) {
        if (weights[k] > 0) {
            return static_cast<std::size_t>(k);
        }
    }
    return 0;
}

double max_principal_angle(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) {
    if (a.rows() != b.rows() || a.cols() != b.cols()) {
        throw std::invalid_argument("max_principal_angle: subspaces must have equal shape");
    }
    const Eigen::MatrixXd qa = Eigen::HouseholderQR<Eigen::MatrixXd>(a).householderQ() *
                               Eigen::MatrixXd::Identity(a.rows(), a.cols());
    const Eigen::MatrixXd qb = Eigen::HouseholderQR<Eigen::MatrixXd>(b).householderQ() *
                               Eigen::MatrixXd::Identity(b.rows(), b.cols());
    // sin of the largest angle is the norm of the part of span(B) outside span(A);
    // this stays accurate for tiny angles where acos of the cosines does not.
    const Eigen::MatrixXd residual = qb - qa * (qa.transpose() * qb);
    const double s = Eigen::JacobiSVD<Eigen::MatrixXd>(residual).singularValues()(0);
    return std::asin(std::min(1.0, s));
}

}  // namespace lvkit
