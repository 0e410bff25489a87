#include "lvkit/pagerank.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <sstream>

#include "lvkit/common.hpp"

namespace lvkit::pagerank {

LinkGraph::LinkGraph(int n_pages, const std::vector<std::pair<int, int>>& edges)
    : n_(n_pages), in_(static_cast<std::size_t>(std::max(n_pages, 0))), out_(static_cast<std::size_t>(std::max(n_pages, 0)), 0) {
    if (n_pages < 1) {
        throw DomainError("link graph needs at least one page");
    }
    for (const auto& [from, to] : edges) {
        if (from < 0 || to < 0 || from >= n_ || to >= n_) {
            throw DomainError("link (" + std::to_string(from) + ", " + std::to_string(to) + ") is out of range");
        }
        if (from == to) {
            throw DomainError("self-link on page " + std::to_string(from));
        }
        auto& in = in_[static_cast<std::size_t>(to)];
        if (std::find(in.begin(), in.end(), from) == in.end()) {
            in.push_back(from);
            ++out_[static_cast<std::size_t>(from)];
        }
    }
    for (auto& in : in_) {
        std::sort(in.begin(), in.end());
    }
}

Eigen::MatrixXd LinkGraph::adjacency() const {
    Eigen::MatrixXd l = Eigen::MatrixXd::Zero(n_, n_);
    for (int i = 0; i < n_; ++i) {
        for (int j : inlinks(i)) {
            l(i, j) = 1.0;
        }
    }
    return l;
}

std::pair<LinkGraph, std::vector<std::string>> graph_from_labels(
    const std::vector<std::pair<std::string, std::string>>& edges) {
    std::map<std::string, int> index;
    std::vector<std::string> labels;
    auto id = [&](const std::string& label) {
        const auto [it, inserted] = index.emplace(label, static_cast<int>(labels.size()));
        if (inserted) {
            labels.push_back(label);
        }
        return it->second;
    };
    std::vector<std::pair<int, int>> numbered;
    numbered.reserve(edges.size());
    for (const auto& [from, to] : edges) {
        const int f = id(from);
        numbered.emplace_back(f, id(to));
    }
    LinkGraph graph(static_cast<int>(labels.size()), numbered);
    return {std::move(graph), std::move(labels)};
}

PageRankResult solve(const LinkGraph& graph, double d, double tol, int max_iters) {
    if (!(d > 0 && d < 1)) {
        throw ConfigError("damping factor d must lie in (0, 1)");
    }
    if (!(tol > 0) || max_iters < 1) {
        throw ConfigError("PageRank needs tol > 0 and max_iters >= 1");
    }
    const int n = graph.size();
    Eigen::VectorXd p = Eigen::VectorXd::Ones(n);
    Eigen::VectorXd next(n);
    auto rhs = [&](const Eigen::VectorXd& v, Eigen::VectorXd& out) {
        for (int i = 0; i < n; ++i) {
            double votes = 0.0;
            for (int j : graph.inlinks(i)) {
                votes += v[j] / graph.out_degree(j);
            }
            out[i] = (1.0 - d) + d * votes;
        }
    };
    PageRankResult result;
    for (int it = 0; it <= max_iters; ++it) {
        rhs(p, next);
        result.residual = (next - p).cwiseAbs().maxCoeff();
        if (result.residual < tol) {
            result.ranks = p;
            result.iterations = it;
            return result;
        }
        p.swap(next);
    }
    std::ostringstream msg;
    msg.precision(17);
    msg << "PageRank did not converge in " << max_iters << " iterations (residual " << result.residual << ")";
    throw NumericError(msg.str());
}

}  // namespace lvkit::pagerank
