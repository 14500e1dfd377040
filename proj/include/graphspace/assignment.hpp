#ifndef GRAPHSPACE_ASSIGNMENT_HPP
#define GRAPHSPACE_ASSIGNMENT_HPP

#include <algorithm>
#include <cfloat>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>
#include <vector>

#include "graphspace/errors.hpp"
#include "graphspace/graph.hpp"
#include "graphspace/objective.hpp"

namespace graphspace {

enum class Sense { min, max };

struct AssignmentResult {
    /// Row i is assigned to column assignment[i].
    Permutation assignment;
    double cost = 0.0;
};

namespace internal {

// Shortest augmenting path Hungarian method with row/column potentials, O(n^3).
// On return `col_of_row` is optimal and (u, v) are feasible duals with
// c(i, j) - u[i] - v[j] >= 0, tight on every matched pair.
inline void hungarian(const Matrix& c, std::vector<Index>& col_of_row, std::vector<double>& u,
                      std::vector<double>& v) {
    const Index n = c.rows();
    const double inf = std::numeric_limits<double>::infinity();
    // 1-based internally; column 0 is the virtual root.
    std::vector<double> uu(static_cast<std::size_t>(n + 1), 0.0);
    std::vector<double> vv(static_cast<std::size_t>(n + 1), 0.0);
    std::vector<Index> row_of_col(static_cast<std::size_t>(n + 1), 0);
    std::vector<Index> way(static_cast<std::size_t>(n + 1), 0);
    std::vector<double> minv(static_cast<std::size_t>(n + 1));
    std::vector<char> used(static_cast<std::size_t>(n + 1));

    for (Index i = 1; i <= n; ++i) {
        row_of_col[0] = i;
        Index j0 = 0;
        std::fill(minv.begin(), minv.end(), inf);
        std::fill(used.begin(), used.end(), 0);
        do {
            used[static_cast<std::size_t>(j0)] = 1;
            const Index i0 = row_of_col[static_cast<std::size_t>(j0)];
            double delta = inf;
            Index j1 = 0;
            for (Index j = 1; j <= n; ++j) {
                const auto sj = static_cast<std::size_t>(j);
                if (used[sj]) {
                    continue;
                }
                const double cur = c(i0 - 1, j - 1) - uu[static_cast<std::size_t>(i0)] - vv[sj];
                if (cur < minv[sj]) {
                    minv[sj] = cur;
                    way[sj] = j0;
                }
                if (minv[sj] < delta) {
                    delta = minv[sj];
                    j1 = j;
                }
            }
            for (Index j = 0; j <= n; ++j) {
                const auto sj = static_cast<std::size_t>(j);
                if (used[sj]) {
                    uu[static_cast<std::size_t>(row_of_col[sj])] += delta;
                    vv[sj] -= delta;
                } else {
                    minv[sj] -= delta;
                }
            }
            j0 = j1;
        } while (row_of_col[static_cast<std::size_t>(j0)] != 0);
        do {
            const Index j1 = way[static_cast<std::size_t>(j0)];
            row_of_col[static_cast<std::size_t>(j0)] = row_of_col[static_cast<std::size_t>(j1)];
            j0 = j1;
        } while (j0 != 0);
    }

    col_of_row.assign(static_cast<std::size_t>(n), 0);
    for (Index j = 1; j <= n; ++j) {
        col_of_row[static_cast<std::size_t>(row_of_col[static_cast<std::size_t>(j)] - 1)] = j - 1;
    }
    u.assign(uu.begin() + 1, uu.end());
    v.assign(vv.begin() + 1, vv.end());
}

// Every optimal assignment lives on the tight edges of an optimal dual, so the
// lexicographically smallest optimum is the lexicographically smallest perfect
// matching of the tight subgraph. Rows are fixed greedily; row i may move to
// column j when an alternating cycle through the unfixed rows closes back on i.
inline void lexicographic_canonicalize(const Matrix& c, const std::vector<double>& u,
                                       const std::vector<double>& v,
                                       std::vector<Index>& col_of_row) {
    const Index n = c.rows();
    const auto sn = static_cast<std::size_t>(n);
    double scale = 1.0;
    if (n > 0) {
        scale = std::max(scale, c.cwiseAbs().maxCoeff());
    }
    const double eps = 16.0 * static_cast<double>(n) * DBL_EPSILON * scale;

    std::vector<char> tight(sn * sn);
    for (Index i = 0; i < n; ++i) {
        for (Index j = 0; j < n; ++j) {
            tight[static_cast<std::size_t>(i) * sn + static_cast<std::size_t>(j)] =
                c(i, j) - u[static_cast<std::size_t>(i)] - v[static_cast<std::size_t>(j)] <= eps;
        }
    }
    auto is_tight = [&](Index i, Index j) {
        return tight[static_cast<std::size_t>(i) * sn + static_cast<std::size_t>(j)] != 0;
    };

    std::vector<Index> row_of_col(sn);
    for (Index i = 0; i < n; ++i) {
        row_of_col[static_cast<std::size_t>(col_of_row[static_cast<std::size_t>(i)])] = i;
    }
    std::vector<char> fixed(sn, 0);
    std::vector<char> reaches(sn);
    std::vector<Index> next(sn);
    std::vector<Index> queue;
    queue.reserve(sn);

    for (Index i = 0; i < n; ++i) {
        // Rows that can hand their column along a chain ending at row i.
        std::fill(reaches.begin(), reaches.end(), 0);
        reaches[static_cast<std::size_t>(i)] = 1;
        queue.clear();
        queue.push_back(i);
        for (std::size_t head = 0; head < queue.size(); ++head) {
            const Index x = queue[head];
            const Index cx = col_of_row[static_cast<std::size_t>(x)];
            for (Index r = 0; r < n; ++r) {
                const auto sr = static_cast<std::size_t>(r);
                if (!fixed[sr] && !reaches[sr] && is_tight(r, cx)) {
                    reaches[sr] = 1;
                    next[sr] = x;
                    queue.push_back(r);
                }
            }
        }
        Index best = col_of_row[static_cast<std::size_t>(i)];
        for (Index j = 0; j < best; ++j) {
            const Index owner = row_of_col[static_cast<std::size_t>(j)];
            if (is_tight(i, j) && !fixed[static_cast<std::size_t>(owner)] &&
                reaches[static_cast<std::size_t>(owner)]) {
                best = j;
                break;
            }
        }
        if (best != col_of_row[static_cast<std::size_t>(i)]) {
            std::vector<Index> path;
            for (Index x = row_of_col[static_cast<std::size_t>(best)]; x != i;
                 x = next[static_cast<std::size_t>(x)]) {
                path.push_back(x);
            }
            path.push_back(i);
            const Index first_col = col_of_row[static_cast<std::size_t>(path.front())];
            for (std::size_t t = 0; t + 1 < path.size(); ++t) {
                col_of_row[static_cast<std::size_t>(path[t])] =
                    col_of_row[static_cast<std::size_t>(path[t + 1])];
            }
            col_of_row[static_cast<std::size_t>(i)] = first_col;
            for (Index r : path) {
                row_of_col[static_cast<std::size_t>(col_of_row[static_cast<std::size_t>(r)])] = r;
            }
        }
        fixed[static_cast<std::size_t>(i)] = 1;
    }
}

}  // namespace internal

/// Globally optimal linear assignment. Among co-optimal assignments the
/// lexicographically smallest one is returned.
inline AssignmentResult solve_lap(const Matrix& cost, Sense sense = Sense::min) {
    internal::require(cost.rows() == cost.cols(), "assignment cost matrix must be square");
    internal::require(cost.allFinite(), "assignment cost matrix has non-finite entries");
    const Matrix c = sense == Sense::min ? cost : Matrix(-cost);
    std::vector<Index> col_of_row;
    std::vector<double> u;
    std::vector<double> v;
    internal::hungarian(c, col_of_row, u, v);
    internal::lexicographic_canonicalize(c, u, v, col_of_row);

    AssignmentResult out;
    for (Index i = 0; i < cost.rows(); ++i) {
        out.cost += cost(i, col_of_row[static_cast<std::size_t>(i)]);
    }
    out.assignment = Permutation(std::move(col_of_row));
    return out;
}

inline constexpr Index kBruteForceMaxNodes = 10;

struct BruteForceResult {
    /// The lexicographically smallest optimal registration.
    MatchResult best;
    /// Every registration attaining the optimum (ties occur with discrete weights).
    std::vector<Permutation> optima;
};

/// Exhaustive minimizer of ||P A1 P^T - A2||^2 + lambda Tr(P D') over all
/// permutations of equally sized (already padded) graphs.
inline BruteForceResult brute_force_match(const Graph& g1, const Graph& g2, double lambda) {
    require_compatible(g1, g2);
    internal::require(lambda >= 0.0, "lambda must be >= 0");
    const Index n = g1.size();
    internal::require(n <= kBruteForceMaxNodes,
                      "brute force matching refuses " + std::to_string(n) + " nodes (limit " +
                          std::to_string(kBruteForceMaxNodes) + ")");
    Matrix node_cost = node_cost_for(g1, g2, lambda);
    const Matrix& a1 = g1.adjacency();
    const Matrix& a2 = g2.adjacency();

    std::vector<Index> perm(static_cast<std::size_t>(n));
    std::iota(perm.begin(), perm.end(), Index{0});
    double best = std::numeric_limits<double>::infinity();
    std::vector<std::vector<Index>> optima;
    do {
        const double value = objective_value(a1, a2, node_cost, lambda, perm);
        const double slack = 1e-12 * std::max(1.0, std::abs(std::min(best, value)));
        if (value < best - slack) {
            best = value;
            optima.clear();
            optima.push_back(perm);
        } else if (value <= best + slack) {
            optima.push_back(perm);
        }
    } while (std::next_permutation(perm.begin(), perm.end()));

    BruteForceResult out;
    out.optima.reserve(optima.size());
    for (auto& o : optima) {
        out.optima.emplace_back(std::move(o));
    }
    SolverTrace trace;
    trace.iterations = 0;
    out.best = make_match_result(g1, g2, std::move(node_cost), lambda, out.optima.front(), trace);
    return out;
}

}  // namespace graphspace

#endif
