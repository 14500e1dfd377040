#ifndef GRAPHSPACE_OBJECTIVE_HPP
#define GRAPHSPACE_OBJECTIVE_HPP

// Matching objective ||P A1 P^T - A2||^2 + lambda * Tr(P D), configuration and
// result types shared by the exact and approximate solvers.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <string>
#include <vector>

#include "graphspace/errors.hpp"
#include "graphspace/graph.hpp"

namespace graphspace {

enum class Solver { umeyama, faq, brute };
enum class FaqInit { barycenter, identity, random };

struct MatchConfig {
    double lambda = 0.0;
    Padding padding = Padding::two_way;
    Solver solver = Solver::faq;
    bool refinement = true;
    FaqInit faq_init = FaqInit::barycenter;
    /// Extra seeded random starts run after the configured initialization.
    int restarts = 0;
    int max_iter = 100;
    double tol = 1e-8;
    std::uint64_t seed = 0;

    void validate() const {
        internal::require(std::isfinite(lambda) && lambda >= 0.0, "lambda must be finite and >= 0");
        internal::require(max_iter >= 1, "max_iter must be at least 1");
        internal::require(std::isfinite(tol) && tol > 0.0, "tol must be positive");
        internal::require(restarts >= 0, "restarts must be non-negative");
    }
};

struct SolverTrace {
    int iterations = 0;
    /// Relaxed objective after each Frank-Wolfe step (index 0 is the start).
    std::vector<double> objectives;
    std::vector<double> step_sizes;
    bool converged = true;
    int refinement_swaps = 0;
    int runs = 1;
    int best_run = 0;
};

struct ObjectiveTerms {
    double edge = 0.0;
    double node = 0.0;
    double total = 0.0;
};

namespace internal {

inline double sorted_sum(std::vector<double>& terms) {
    std::sort(terms.begin(), terms.end());
    return std::accumulate(terms.begin(), terms.end(), 0.0);
}

}  // namespace internal

/// Exact objective for node i -> slot p[i]. Terms are summed in sorted order so
/// the value is independent of which graph plays the source role.
inline ObjectiveTerms evaluate_objective(const Matrix& a1, const Matrix& a2, const Matrix& node_cost,
                                         double lambda, const Permutation& p) {
    const Index n = a1.rows();
    internal::require(a2.rows() == n && p.size() == n, "objective: dimension mismatch");
    std::vector<double> terms;
    terms.reserve(static_cast<std::size_t>(n * n));
    for (Index j = 0; j < n; ++j) {
        for (Index i = 0; i < n; ++i) {
            const double diff = a1(i, j) - a2(p[i], p[j]);
            terms.push_back(diff * diff);
        }
    }
    ObjectiveTerms out;
    out.edge = internal::sorted_sum(terms);
    if (lambda > 0.0 && node_cost.size() > 0) {
        terms.clear();
        for (Index i = 0; i < n; ++i) {
            terms.push_back(node_cost(i, p[i]));
        }
        out.node = internal::sorted_sum(terms);
    }
    out.total = out.edge + lambda * out.node;
    return out;
}

/// Same quantity, straight summation. Used inside search loops.
inline double objective_value(const Matrix& a1, const Matrix& a2, const Matrix& node_cost,
                              double lambda, const std::vector<Index>& p) {
    const Index n = a1.rows();
    double edge = 0.0;
    for (Index j = 0; j < n; ++j) {
        const Index pj = p[static_cast<std::size_t>(j)];
        for (Index i = 0; i < n; ++i) {
            const double diff = a1(i, j) - a2(p[static_cast<std::size_t>(i)], pj);
            edge += diff * diff;
        }
    }
    double node = 0.0;
    if (lambda > 0.0 && node_cost.size() > 0) {
        for (Index i = 0; i < n; ++i) {
            node += node_cost(i, p[static_cast<std::size_t>(i)]);
        }
    }
    return edge + lambda * node;
}

/// A registered pair: permute(g1_padded, p) is aligned with g2_padded.
struct MatchResult {
    Permutation p;
    Graph g1_padded;
    Graph g1_registered;
    Graph g2_padded;
    /// Extended node-distance matrix D' (rows: g1 nodes, cols: g2 nodes); empty when lambda = 0.
    Matrix node_cost;
    double lambda = 0.0;
    double edge_term = 0.0;
    double node_term = 0.0;
    double objective = 0.0;
    /// sqrt(objective); with lambda = 0 this is the quotient distance on edges alone.
    double d_g = 0.0;
    SolverTrace trace;

    ObjectiveTerms recompute() const {
        return evaluate_objective(g1_padded.adjacency(), g2_padded.adjacency(), node_cost, lambda, p);
    }
};

inline MatchResult make_match_result(const Graph& g1_padded, const Graph& g2_padded,
                                     Matrix node_cost, double lambda, Permutation p,
                                     SolverTrace trace = {}) {
    MatchResult r;
    const ObjectiveTerms terms =
        evaluate_objective(g1_padded.adjacency(), g2_padded.adjacency(), node_cost, lambda, p);
    r.g1_registered = permute(g1_padded, p);
    r.p = std::move(p);
    r.g1_padded = g1_padded;
    r.g2_padded = g2_padded;
    r.node_cost = std::move(node_cost);
    r.lambda = lambda;
    r.edge_term = terms.edge;
    r.node_term = terms.node;
    r.objective = terms.total;
    r.d_g = std::sqrt(std::max(0.0, terms.total));
    r.trace = std::move(trace);
    return r;
}

/// D' for a padded pair, or an empty matrix when node terms are disabled.
inline Matrix node_cost_for(const Graph& g1_padded, const Graph& g2_padded, double lambda) {
    if (lambda <= 0.0) {
        return Matrix(0, 0);
    }
    internal::require(g1_padded.has_attributes() && g2_padded.has_attributes(),
                      "lambda > 0 requires node attributes on both graphs");
    return node_distance_matrix(g1_padded, g2_padded, true);
}

}  // namespace graphspace

#endif
