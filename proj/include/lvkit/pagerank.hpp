#pragma once

// PageRank in its unnormalized form
//
//   p_i = (1 - d) + d sum_{j != i} (L_ij / C_j) p_j,
//
// where L_ij = 1 iff page j links to page i and C_j is the out-degree of j.
// Pages without outlinks cast no votes. Ranks do not sum to 1.

#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "lvkit/common.hpp"

namespace lvkit::pagerank {

class LinkGraph {
   public:
    /// Edges are (from, to) page indices in [0, n). Duplicate edges count once;
    /// self-links and out-of-range indices are DomainErrors.
    LinkGraph(int n_pages, const std::vector<std::pair<int, int>>& edges);

    int size() const { return n_; }
    /// Pages linking to page i.
    const std::vector<int>& inlinks(int i) const { return in_[static_cast<std::size_t>(i)]; }
    int out_degree(int j) const { return out_[static_cast<std::size_t>(j)]; }
    /// Dense adjacency L with L(i, j) = 1 iff j links to i.
    Eigen::MatrixXd adjacency() const;

   private:
    int n_;
    std::vector<std::vector<int>> in_;
    std::vector<int> out_;
};

/// Builds a graph from labelled edges; pages are numbered by first appearance
/// and their labels returned alongside.
std::pair<LinkGraph, std::vector<std::string>> graph_from_labels(
    const std::vector<std::pair<std::string, std::string>>& edges);

struct PageRankResult {
    Eigen::VectorXd ranks;
    int iterations = 0;
    double residual = 0.0;  // max_i |p_i - rhs_i(p)|
};

/// Jacobi iteration from p = 1 until the residual drops below tol. Requires
/// 0 < d < 1; exceeding max_iters raises NumericError reporting the residual.
PageRankResult solve(const LinkGraph& graph, double d, double tol = 1e-12, int max_iters = 10000);

}  // namespace lvkit::pagerank
