#pragma once

#include <cstddef>
#include <functional>
#include <vector>

namespace lvkit::inference {

/// Gauss-Legendre nodes and weights on [-1, 1].
struct GaussLegendreRule {
    std::vector<double> nodes;
    std::vector<double> weights;
};

/// n-point rule; tables are computed once per n and shared.
const GaussLegendreRule& gauss_legendre(std::size_t n);

/// Integral of f over [lo, hi] with the n-point rule.
double integrate(const std::function<double(double)>& f, double lo, double hi, std::size_t n);

}  // namespace lvkit::inference
