#include <doctest.h>

#include <set>

#include "lvkit/pagerank.hpp"
#include "support/oracles.hpp"

using namespace lvkit;
using namespace lvkit::pagerank;

namespace {

using Edges = std::vector<std::pair<int, int>>;

Edges random_edges(oracle::Gen& g, int n, double density) {
    Edges e;
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
            if (i != j && g.uniform(0, 1) < density) {
                e.emplace_back(i, j);
            }
        }
    }
    return e;
}

}  // namespace

TEST_CASE("reference graphs") {
    const auto cycle = solve(LinkGraph(2, {{0, 1}, {1, 0}}), 0.85);
    CHECK(std::abs(cycle.ranks[0] - 1.0) < 1e-12);
    CHECK(std::abs(cycle.ranks[1] - 1.0) < 1e-12);

    const Edges chain{{0, 1}, {1, 2}};
    const auto r = solve(LinkGraph(3, chain), 0.85);
    const Eigen::VectorXd oracle_ranks = oracle::pagerank_dense(3, chain, 0.85);
    CHECK((r.ranks - oracle_ranks).cwiseAbs().maxCoeff() < 1e-10);
    CHECK(r.ranks[0] == doctest::Approx(0.15).epsilon(1e-12));
    CHECK(r.ranks[1] == doctest::Approx(0.2775).epsilon(1e-12));
    CHECK(r.ranks[2] == doctest::Approx(0.385875).epsilon(1e-12));
    CHECK(r.residual < 1e-12);
}

TEST_CASE("pages without inlinks get 1 - d") {
    const auto r = solve(LinkGraph(4, {{0, 1}, {2, 1}, {1, 3}}), 0.6);
    CHECK(r.ranks[0] == doctest::Approx(0.4).epsilon(1e-14));
    CHECK(r.ranks[2] == doctest::Approx(0.4).epsilon(1e-14));
}

TEST_CASE("iteration agrees with the dense linear solve") {
    oracle::Gen g(171);
    for (int t = 0; t < 30; ++t) {
        const int n = g.integer(2, 100);
        const auto edges = random_edges(g, n, g.uniform(0.01, 0.3));
        const double d = g.uniform(0.05, 0.95);
        const auto r = solve(LinkGraph(n, edges), d);
        CHECK((r.ranks - oracle::pagerank_dense(n, edges, d)).cwiseAbs().maxCoeff() < 1e-10);
        CHECK(r.residual < 1e-12);
    }
}

TEST_CASE("adding an inlink never lowers the target rank") {
    oracle::Gen g(172);
    for (int t = 0; t < 200; ++t) {
        const int n = g.integer(2, 10);
        auto edges = random_edges(g, n, 0.3);
        const int from = g.integer(0, n - 1);
        int to = g.integer(0, n - 2);
        to += to >= from ? 1 : 0;
        const double d = g.uniform(0.1, 0.95);
        const double before = oracle::pagerank_dense(n, edges, d)[to];
        const double before_iter = solve(LinkGraph(n, edges), d).ranks[to];
        edges.emplace_back(from, to);
        const double after = solve(LinkGraph(n, edges), d).ranks[to];
        CHECK(after >= before - 1e-12);
        CHECK(after >= before_iter - 1e-12);
    }
}

TEST_CASE("graph construction") {
    const LinkGraph g(3, {{0, 1}, {0, 1}, {2, 1}});
    CHECK(g.out_degree(0) == 1);
    CHECK(g.inlinks(1).size() == 2);
    CHECK(g.adjacency()(1, 0) == 1.0);
    CHECK(g.adjacency()(0, 1) == 0.0);
    CHECK_THROWS_AS(LinkGraph(2, {{0, 0}}), DomainError);
    CHECK_THROWS_AS(LinkGraph(2, {{0, 2}}), DomainError);
    CHECK_THROWS_AS(LinkGraph(2, {{-1, 0}}), DomainError);

    const auto [lg, labels] = graph_from_labels({{"b", "a"}, {"a", "c"}, {"c", "b"}});
    CHECK(labels == std::vector<std::string>{"b", "a", "c"});
    CHECK(lg.inlinks(1) == std::vector<int>{0});
}

TEST_CASE("solver configuration and non-convergence") {
    const LinkGraph g(2, {{0, 1}, {1, 0}});
    CHECK_THROWS_AS(solve(g, 0.0), ConfigError);
    CHECK_THROWS_AS(solve(g, 1.0), ConfigError);
    const LinkGraph chain(3, {{0, 1}, {1, 2}, {2, 0}, {0, 2}});
    CHECK_THROWS_WITH_AS(solve(chain, 0.99, 1e-14, 3), doctest::Contains("residual"), NumericError);
}
