#ifndef GRAPHSPACE_MATCHING_HPP
#define GRAPHSPACE_MATCHING_HPP

// Approximate graph matching (spectral and Frank-Wolfe), greedy pairwise
// exchange refinement, the quotient distance and geodesics between registered
// graphs.

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <string>
#include <vector>

#include "graphspace/assignment.hpp"
#include "graphspace/errors.hpp"
#include "graphspace/graph.hpp"
#include "graphspace/objective.hpp"

namespace graphspace {

/// Uniformly random permutation of size n.
template <class Rng>
Permutation random_permutation(Index n, Rng& rng) {
    std::vector<Index> images(static_cast<std::size_t>(n));
    std::iota(images.begin(), images.end(), Index{0});
    std::shuffle(images.begin(), images.end(), rng);
    return Permutation(std::move(images));
}

/// Greedy 2-exchange: repeatedly applies the single best swap of two node
/// images while it lowers the objective. Returns the number of swaps applied.
inline int refine_two_exchange(const Matrix& a1, const Matrix& a2, const Matrix& node_cost,
                               double lambda, Permutation& p) {
    const Index n = a1.rows();
    if (n < 2) {
        return 0;
    }
    const bool use_nodes = lambda > 0.0 && node_cost.size() > 0;
    std::vector<Index> images = p.images();
    std::vector<Index> owner(static_cast<std::size_t>(n));
    for (Index i = 0; i < n; ++i) {
        owner[static_cast<std::size_t>(images[static_cast<std::size_t>(i)])] = i;
    }
    // Registered source adjacency in slot coordinates.
    Matrix b(n, n);
    for (Index j = 0; j < n; ++j) {
        for (Index i = 0; i < n; ++i) {
            b(images[static_cast<std::size_t>(i)], images[static_cast<std::size_t>(j)]) = a1(i, j);
        }
    }
    const Matrix& c = a2;
    const double threshold = 1e-12 * (b.squaredNorm() + c.squaredNorm() + 1.0);

    int swaps = 0;
    for (;;) {
        double best_delta = -threshold;
        Index best_s = -1;
        Index best_t = -1;
        for (Index s = 0; s < n; ++s) {
            for (Index t = s + 1; t < n; ++t) {
                double delta = 0.0;
                for (Index l = 0; l < n; ++l) {
                    if (l == s || l == t) {
                        continue;
                    }
                    delta += (b(s, l) - b(t, l)) * (c(s, l) - c(t, l));
                    delta += (b(l, s) - b(l, t)) * (c(l, s) - c(l, t));
                }
                delta += (b(s, t) - b(t, s)) * (c(s, t) - c(t, s));
                delta *= 2.0;
                if (use_nodes) {
                    const Index os = owner[static_cast<std::size_t>(s)];
                    const Index ot = owner[static_cast<std::size_t>(t)];
                    delta += lambda * (node_cost(os, t) + node_cost(ot, s) - node_cost(os, s) -
                                       node_cost(ot, t));
                }
                if (delta < best_delta) {
                    best_delta = delta;
                    best_s = s;
                    best_t = t;
                }
            }
        }
        if (best_s < 0) {
            break;
        }
        b.row(best_s).swap(b.row(best_t));
        b.col(best_s).swap(b.col(best_t));
        const Index os = owner[static_cast<std::size_t>(best_s)];
        const Index ot = owner[static_cast<std::size_t>(best_t)];
        std::swap(owner[static_cast<std::size_t>(best_s)], owner[static_cast<std::size_t>(best_t)]);
        images[static_cast<std::size_t>(os)] = best_t;
        images[static_cast<std::size_t>(ot)] = best_s;
        ++swaps;
    }
    p = Permutation(std::move(images));
    return swaps;
}

namespace internal {

inline void require_matchable(const Graph& g1, const Graph& g2) {
    require_compatible(g1, g2);
}

// One Frank-Wolfe descent over doubly stochastic matrices, P(slot, node).
// Minimizes f(P) = -<P A1 P^T, A2> + (lambda/2) <P, D^T>, which on
// permutations equals (objective - ||A1||^2 - ||A2||^2) / 2.
inline Permutation faq_descent(const Matrix& a1, const Matrix& a2, const Matrix& node_cost,
                               double lambda, Matrix p, int max_iter, double tol,
                               SolverTrace& trace) {
    const bool use_nodes = lambda > 0.0 && node_cost.size() > 0;
    const Matrix linear = use_nodes ? Matrix(0.5 * lambda * node_cost.transpose()) : Matrix();

    auto relaxed_objective = [&](const Matrix& x) {
        double f = -((x * a1 * x.transpose()).cwiseProduct(a2)).sum();
        if (use_nodes) {
            f += x.cwiseProduct(linear).sum();
        }
        return f;
    };

    double f = relaxed_objective(p);
    trace.objectives.assign(1, f);
    trace.step_sizes.clear();
    trace.iterations = 0;
    trace.converged = false;

    for (int it = 0; it < max_iter; ++it) {
        Matrix grad = -(a2 * p * a1.transpose()) - (a2.transpose() * p * a1);
        if (use_nodes) {
            grad += linear;
        }
        // <grad, Q> over permutation matrices Q(slot, node): rows are nodes.
        const AssignmentResult vertex = solve_lap(grad.transpose(), Sense::min);
        const Matrix q = vertex.assignment.matrix();
        const Matrix r = q - p;
        const double slope = grad.cwiseProduct(r).sum();
        trace.iterations = it + 1;
        if (slope >= 0.0) {
            trace.converged = true;
            break;
        }
        const double curvature = -((r * a1 * r.transpose()).cwiseProduct(a2)).sum();
        double eta = 1.0;
        if (curvature > 0.0) {
            eta = std::min(1.0, -slope / (2.0 * curvature));
        }
        p += eta * r;
        const double f_next = f + eta * slope + eta * eta * curvature;
        trace.step_sizes.push_back(eta);
        trace.objectives.push_back(f_next);
        const double change = std::abs(f - f_next);
        f = f_next;
        if (change <= tol * std::max(std::abs(f), std::numeric_limits<double>::min())) {
            trace.converged = true;
            break;
        }
    }
    // Nearest permutation: maximize <P, Q>.
    return solve_lap(p.transpose(), Sense::max).assignment;
}

}  // namespace internal

/// Frank-Wolfe (FAQ) matching of two equally sized graphs. Works for directed
/// graphs. Runs the configured start plus up to `cfg.restarts` seeded random
/// starts and keeps the best projected registration; a zero objective ends the
/// search early.
inline MatchResult match_faq(const Graph& g1, const Graph& g2, const MatchConfig& cfg) {
    cfg.validate();
    internal::require_matchable(g1, g2);
    const Index n = g1.size();
    Matrix node_cost = node_cost_for(g1, g2, cfg.lambda);
    const Matrix& a1 = g1.adjacency();
    const Matrix& a2 = g2.adjacency();
    if (n == 0) {
        return make_match_result(g1, g2, std::move(node_cost), cfg.lambda, Permutation::identity(0));
    }
    const Matrix barycenter = Matrix::Constant(n, n, 1.0 / static_cast<double>(n));

    const int runs = 1 + cfg.restarts;
    int executed = 0;
    double best_value = std::numeric_limits<double>::infinity();
    Permutation best_p;
    SolverTrace best_trace;
    for (int run = 0; run < runs; ++run) {
        std::seed_seq seq{cfg.seed, static_cast<std::uint64_t>(run)};
        std::mt19937_64 rng(seq);
        Matrix start;
        const FaqInit init = run == 0 ? cfg.faq_init : FaqInit::random;
        switch (init) {
            case FaqInit::barycenter:
                start = barycenter;
                break;
            case FaqInit::identity:
                start = Matrix::Identity(n, n);
                break;
            case FaqInit::random:
                start = 0.5 * (barycenter + random_permutation(n, rng).matrix());
                break;
        }
        SolverTrace trace;
        Permutation p = internal::faq_descent(a1, a2, node_cost, cfg.lambda, std::move(start),
                                              cfg.max_iter, cfg.tol, trace);
        if (cfg.refinement) {
            trace.refinement_swaps = refine_two_exchange(a1, a2, node_cost, cfg.lambda, p);
        }
        const double value = objective_value(a1, a2, node_cost, cfg.lambda, p.images());
        if (value < best_value) {
            best_value = value;
            best_p = p;
            best_trace = std::move(trace);
            best_trace.best_run = run;
        }
        executed = run + 1;
        // The objective is a sum of nonnegative terms.
        if (best_value <= 0.0) {
            break;
        }
    }
    best_trace.runs = executed;
    return make_match_result(g1, g2, std::move(node_cost), cfg.lambda, std::move(best_p),
                             std::move(best_trace));
}

/// Spectral matching from absolute eigenvector matrices, optionally followed by
/// greedy 2-exchange refinement. Undirected graphs only.
inline MatchResult match_umeyama(const Graph& g1, const Graph& g2, const MatchConfig& cfg) {
    cfg.validate();
    internal::require_matchable(g1, g2);
    internal::require(!g1.directed(), "Umeyama matching requires undirected graphs; use FAQ");
    const Index n = g1.size();
    Matrix node_cost = node_cost_for(g1, g2, cfg.lambda);
    if (n == 0) {
        return make_match_result(g1, g2, std::move(node_cost), cfg.lambda, Permutation::identity(0));
    }

    auto abs_eigenvectors = [](const Matrix& a) {
        Eigen::SelfAdjointEigenSolver<Matrix> solver(a);
        if (solver.info() != Eigen::Success) {
            throw SolverError("eigendecomposition did not converge");
        }
        // Eigen sorts ascending; columns are reversed to descending order.
        return Matrix(solver.eigenvectors().rowwise().reverse().cwiseAbs());
    };
    const Matrix u1 = abs_eigenvectors(g1.adjacency());
    const Matrix u2 = abs_eigenvectors(g2.adjacency());
    Matrix score = u1 * u2.transpose();
    if (cfg.lambda > 0.0) {
        score -= cfg.lambda * node_cost;
    }
    Permutation p = solve_lap(score, Sense::max).assignment;

    SolverTrace trace;
    trace.iterations = 1;
    if (cfg.refinement) {
        trace.refinement_swaps =
            refine_two_exchange(g1.adjacency(), g2.adjacency(), node_cost, cfg.lambda, p);
    }
    return make_match_result(g1, g2, std::move(node_cost), cfg.lambda, std::move(p),
                             std::move(trace));
}

/// Pads the pair per `cfg.padding`, registers g1 onto g2 with the configured
/// solver, and reports d_g = sqrt(||P A1 P^T - A2||^2 + lambda Tr(P D')).
inline MatchResult graph_distance(const Graph& g1, const Graph& g2, const MatchConfig& cfg) {
    cfg.validate();
    internal::require(g1.directed() == g2.directed(),
                      "cannot match a directed graph with an undirected one");
    if (cfg.lambda > 0.0) {
        internal::require(g1.has_attributes() && g2.has_attributes(),
                          "lambda > 0 requires node attributes on both graphs");
    }
    auto [p1, p2] = pad_pair(g1, g2, cfg.padding);
    switch (cfg.solver) {
        case Solver::umeyama:
            return match_umeyama(p1, p2, cfg);
        case Solver::brute:
            return brute_force_match(p1, p2, cfg.lambda).best;
        case Solver::faq:
            break;
    }
    return match_faq(p1, p2, cfg);
}

/// Point at time t on the straight line between the registered graphs.
/// Where exactly one endpoint slot is a null node its attribute is taken from
/// the other endpoint, so the slot keeps its position while its edges change.
inline Graph geodesic(const MatchResult& m, double t) {
    internal::require(std::isfinite(t) && t >= 0.0 && t <= 1.0, "geodesic time must lie in [0, 1]");
    const Graph& g0 = m.g1_registered;
    const Graph& g1 = m.g2_padded;
    require_compatible(g0, g1);
    if (t == 0.0) {
        return g0;
    }
    if (t == 1.0) {
        return g1;
    }
    const Index n = g0.size();
    Matrix a = (1.0 - t) * g0.adjacency() + t * g1.adjacency();
    a.diagonal().setZero();
    if (!g0.directed()) {
        // Keep exact symmetry.
        for (Index i = 0; i < n; ++i) {
            for (Index j = i + 1; j < n; ++j) {
                a(j, i) = a(i, j);
            }
        }
    }
    std::vector<bool> mask(static_cast<std::size_t>(n));
    for (Index i = 0; i < n; ++i) {
        mask[static_cast<std::size_t>(i)] = g0.is_null(i) && g1.is_null(i);
    }
    std::optional<Matrix> attrs;
    if (g0.has_attributes() && g1.has_attributes() && g0.attribute_dim() == g1.attribute_dim()) {
        attrs = Matrix(n, g0.attribute_dim());
        for (Index i = 0; i < n; ++i) {
            if (g0.is_null(i) && g1.is_null(i)) {
                attrs->row(i).setZero();
            } else if (g0.is_null(i)) {
                attrs->row(i) = g1.attributes().row(i);
            } else if (g1.is_null(i)) {
                attrs->row(i) = g0.attributes().row(i);
            } else {
                attrs->row(i) =
                    (1.0 - t) * g0.attributes().row(i) + t * g1.attributes().row(i);
            }
        }
    }
    return Graph(std::move(a), g0.directed(), std::move(attrs), std::move(mask));
}

}  // namespace graphspace

#endif
