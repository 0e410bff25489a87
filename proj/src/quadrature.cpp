#include "lvkit/quadrature.hpp"

#include <map>
#include <memory>
#include <mutex>

#include <gsl/gsl_integration.h>

#include "lvkit/common.hpp"

namespace lvkit::inference {

const GaussLegendreRule& gauss_legendre(std::size_t n) {
    static std::mutex mutex;
    static std::map<std::size_t, std::unique_ptr<GaussLegendreRule>> cache;
    if (n < 1) {
        throw ConfigError("Gauss-Legendre rule needs at least one node");
    }
    const std::lock_guard<std::mutex> lock(mutex);
    auto& slot = cache[n];
    if (!slot) {
        gsl_integration_glfixed_table* table = gsl_integration_glfixed_table_alloc(n);
        if (table == nullptr) {
            throw NumericError("could not build Gauss-Legendre table");
        }
        auto rule = std::make_unique<GaussLegendreRule>();
        rule->nodes.resize(n);
        rule->weights.resize(n);
        for (std::size_t i = 0; i < n; ++i) {
            gsl_integration_glfixed_point(-1.0, 1.0, i, &rule->nodes[i], &rule->weights[i], table);
        }
        gsl_integration_glfixed_table_free(table);
        slot = std::move(rule);
    }
    return *slot;
}

double integrate(const std::function<double(double)>& f, double lo, double hi, std::size_t n) {
    const GaussLegendreRule& rule = gauss_legendre(n);
    const double half = 0.5 * (hi - lo);
    const double mid = 0.5 * (hi + lo);
    double sum = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        sum += rule.weights[i] * f(mid + half * rule.nodes[i]);
    }
    return half * sum;
}

}  // namespace lvkit::inference
