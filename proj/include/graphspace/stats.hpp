#ifndef GRAPHSPACE_STATS_HPP
#define GRAPHSPACE_STATS_HPP

// Statistics in graph space: the Karcher mean of a corpus under optimal
// registration, PCA of registered residuals, and a Gaussian model on the
// principal scores that can be sampled back into graphs.

#include <Eigen/Cholesky>
#include <Eigen/SVD>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "graphspace/errors.hpp"
#include "graphspace/graph.hpp"
#include "graphspace/matching.hpp"
#include "graphspace/objective.hpp"
#include "graphspace/parallel.hpp"

namespace graphspace {

struct GraphMean {
    Graph mu;
    /// Per sample: node i of the padded input sits at slot permutations[k][i].
    std::vector<Permutation> permutations;
    std::vector<Graph> registered;
    /// sum_k ||A_k* - A_mu||^2 after each outer iteration.
    std::vector<double> energy_trace;
    int iterations = 0;
    bool converged = false;
};

namespace internal {

inline Graph average_registered(const std::vector<Graph>& registered, bool with_attrs) {
    const Index m = registered.front().size();
    const bool directed = registered.front().directed();
    const auto count = static_cast<double>(registered.size());
    Matrix sum = Matrix::Zero(m, m);
    for (const Graph& g : registered) {
        sum += g.adjacency();
    }
    Matrix a = sum / count;
    std::vector<bool> mask(static_cast<std::size_t>(m), true);
    std::optional<Matrix> attrs;
    if (with_attrs) {
        attrs = Matrix::Zero(m, registered.front().attribute_dim());
    }
    for (Index s = 0; s < m; ++s) {
        Index present = 0;
        for (const Graph& g : registered) {
            if (!g.is_null(s)) {
                ++present;
                if (attrs) {
                    attrs->row(s) += g.attributes().row(s);
                }
            }
        }
        if (present > 0) {
            mask[static_cast<std::size_t>(s)] = false;
            if (attrs) {
                attrs->row(s) /= static_cast<double>(present);
            }
        }
    }
    return Graph(std::move(a), directed, std::move(attrs), std::move(mask));
}

inline double mean_energy(const std::vector<Graph>& registered, const Graph& mu) {
    double e = 0.0;
    for (const Graph& g : registered) {
        e += squared_ambient_distance(g, mu);
    }
    return e;
}

}  // namespace internal

/// Template size used for a corpus under the given padding mode.
inline Index template_size(const std::vector<Graph>& graphs, Padding padding) {
    Index largest = 0;
    for (const Graph& g : graphs) {
        largest = std::max(largest, g.size());
    }
    return padding == Padding::two_way ? 2 * largest : largest;
}

/// Karcher mean: alternate registration of every sample to the template with
/// averaging of the registered adjacencies. A new registration replaces the
/// previous one only if it does not increase that sample's squared distance to
/// the current template, so the energy trace is non-increasing.
inline GraphMean karcher_mean(const std::vector<Graph>& graphs, const MatchConfig& cfg,
                              int max_outer = 20, double tol = 1e-8) {
    using internal::require;
    cfg.validate();
    require(!graphs.empty(), "karcher mean needs at least one graph");
    require(max_outer >= 1, "max_outer must be at least 1");
    require(tol > 0.0, "tol must be positive");
    const bool directed = graphs.front().directed();
    bool all_attrs = true;
    for (std::size_t k = 0; k < graphs.size(); ++k) {
        require(graphs[k].directed() == directed,
                "graph " + std::to_string(k) + " differs in directedness from graph 0");
        all_attrs = all_attrs && graphs[k].has_attributes();
    }
    if (all_attrs) {
        for (std::size_t k = 0; k < graphs.size(); ++k) {
            require(graphs[k].attribute_dim() == graphs.front().attribute_dim(),
                    "graph " + std::to_string(k) + " has attribute dimension " +
                        std::to_string(graphs[k].attribute_dim()) + ", expected " +
                        std::to_string(graphs.front().attribute_dim()));
        }
    }
    require(cfg.lambda == 0.0 || all_attrs, "lambda > 0 requires node attributes on every graph");

    if (cfg.padding == Padding::none) {
        for (std::size_t k = 0; k < graphs.size(); ++k) {
            require(graphs[k].size() == graphs.front().size(),
                    "padding is disabled but graph " + std::to_string(k) + " has a different size");
        }
    }
    const Index m = template_size(graphs, cfg.padding);
    std::vector<Graph> padded;
    padded.reserve(graphs.size());
    std::size_t largest = 0;
    for (std::size_t k = 0; k < graphs.size(); ++k) {
        Graph g = pad_to(graphs[k], m);
        if (!all_attrs && g.has_attributes()) {
            g = Graph(g.adjacency(), g.directed(), std::nullopt, g.null_mask());
        }
        padded.push_back(std::move(g));
        if (graphs[k].size() > graphs[largest].size()) {
            largest = k;
        }
    }

    MatchConfig reg_cfg = cfg;
    reg_cfg.padding = Padding::none;

    GraphMean out;
    out.permutations.assign(padded.size(), Permutation::identity(m));
    out.registered = padded;
    Graph mu = padded[largest];

    for (int it = 0; it < max_outer; ++it) {
        parallel_for(padded.size(), [&](std::size_t k) {
            MatchConfig sample_cfg = reg_cfg;
            sample_cfg.seed = derive_seed(cfg.seed, static_cast<std::uint64_t>(it) * padded.size() + k);
            MatchResult r = sample_cfg.solver == Solver::umeyama
                                ? match_umeyama(padded[k], mu, sample_cfg)
                            : sample_cfg.solver == Solver::brute
                                ? brute_force_match(padded[k], mu, sample_cfg.lambda).best
                                : match_faq(padded[k], mu, sample_cfg);
            const double candidate = squared_ambient_distance(r.g1_registered, mu);
            const double previous = squared_ambient_distance(out.registered[k], mu);
            if (candidate <= previous) {
                out.permutations[k] = std::move(r.p);
                out.registered[k] = std::move(r.g1_registered);
            }
        });
        mu = internal::average_registered(out.registered, all_attrs);
        const double energy = internal::mean_energy(out.registered, mu);
        out.iterations = it + 1;
        const bool settled =
            !out.energy_trace.empty() &&
            out.energy_trace.back() - energy <=
                tol * std::max(out.energy_trace.back(), std::numeric_limits<double>::min());
        out.energy_trace.push_back(energy);
        if (energy == 0.0 || settled) {
            out.converged = true;
            break;
        }
    }
    out.mu = std::move(mu);
    return out;
}

/// PCA of registered residuals A_k* - A_mu. Edge features are the strict upper
/// triangle (undirected) or the full off-diagonal (directed), row-major; the
/// optional node block holds node_weight * (x - x_mu) per slot, row-major.
struct GraphPcaModel {
    GraphMean mean;
    Index template_size = 0;
    bool directed = false;
    bool include_nodes = false;
    Index attr_dim = 0;
    double node_weight = 1.0;
    /// True when every input edge weight is >= 0; reconstructions are clamped.
    bool nonnegative = true;
    Index sample_count = 0;
    /// Feature-space centre; reconstruction at zero scores.
    Vector center;
    /// Orthonormal principal directions, one per column, by descending singular value.
    Matrix basis;
    Vector singular_values;
    /// samples x components.
    Matrix scores;
    Vector explained_variance_ratio;

    Index components() const { return basis.cols(); }
    Index edge_features() const {
        return directed ? template_size * (template_size - 1)
                        : template_size * (template_size - 1) / 2;
    }
    Index feature_count() const {
        return edge_features() + (include_nodes ? template_size * attr_dim : 0);
    }
    /// Standard deviation of the scores along each component (divisor m - 1).
    Vector component_std() const {
        const double denom = sample_count > 1 ? static_cast<double>(sample_count - 1) : 1.0;
        return singular_values / std::sqrt(denom);
    }
};

namespace internal {

inline Vector vectorize_edges(const Matrix& a, bool directed) {
    const Index m = a.rows();
    Vector v(directed ? m * (m - 1) : m * (m - 1) / 2);
    Index k = 0;
    for (Index i = 0; i < m; ++i) {
        for (Index j = directed ? 0 : i + 1; j < m; ++j) {
            if (i != j) {
                v(k++) = a(i, j);
            }
        }
    }
    return v;
}

inline void fill_edges(Matrix& a, const Vector& v, bool directed) {
    const Index m = a.rows();
    Index k = 0;
    for (Index i = 0; i < m; ++i) {
        for (Index j = directed ? 0 : i + 1; j < m; ++j) {
            if (i == j) {
                continue;
            }
            a(i, j) = v(k++);
            if (!directed) {
                a(j, i) = a(i, j);
            }
        }
    }
}

inline Vector mean_features(const GraphPcaModel& model) {
    const Graph& mu = model.mean.mu;
    Vector v = Vector::Zero(model.feature_count());
    v.head(model.edge_features()) = vectorize_edges(mu.adjacency(), model.directed);
    if (model.include_nodes) {
        for (Index s = 0; s < model.template_size; ++s) {
            v.segment(model.edge_features() + s * model.attr_dim, model.attr_dim) =
                model.node_weight * mu.attributes().row(s).transpose();
        }
    }
    return v;
}

}  // namespace internal

/// Graph PCA: Karcher mean, residual vectorization, thin SVD of the centred
/// residual matrix. Scores are projections of the centred residuals.
inline GraphPcaModel graph_pca(const std::vector<Graph>& graphs, const MatchConfig& cfg,
                               bool include_nodes, int max_outer = 20, double tol = 1e-8) {
    internal::require(graphs.size() >= 2, "graph PCA needs at least two graphs");
    GraphPcaModel model;
    model.mean = karcher_mean(graphs, cfg, max_outer, tol);
    const Graph& mu = model.mean.mu;
    model.template_size = mu.size();
    model.directed = mu.directed();
    model.sample_count = static_cast<Index>(graphs.size());
    model.include_nodes = include_nodes;
    if (include_nodes) {
        internal::require(mu.has_attributes(), "include_nodes requires node attributes on every graph");
        model.attr_dim = mu.attribute_dim();
        model.node_weight = cfg.lambda > 0.0 ? std::sqrt(cfg.lambda) : 1.0;
    }
    model.nonnegative = std::all_of(graphs.begin(), graphs.end(),
                                    [](const Graph& g) { return g.nonnegative(); });

    const Index samples = model.sample_count;
    const Index edges = model.edge_features();
    const Vector mean_vec = internal::mean_features(model);
    Matrix residuals = Matrix::Zero(samples, model.feature_count());
    for (Index k = 0; k < samples; ++k) {
        const Graph& g = model.mean.registered[static_cast<std::size_t>(k)];
        residuals.row(k).head(edges) =
            (internal::vectorize_edges(g.adjacency(), model.directed) - mean_vec.head(edges))
                .transpose();
        if (include_nodes) {
            for (Index s = 0; s < model.template_size; ++s) {
                // A null node takes the attribute of whatever it is matched to: zero residual.
                if (g.is_null(s) || mu.is_null(s)) {
                    continue;
                }
                residuals.row(k).segment(edges + s * model.attr_dim, model.attr_dim) =
                    model.node_weight * (g.attributes().row(s) - mu.attributes().row(s));
            }
        }
    }
    const Eigen::RowVectorXd column_mean = residuals.colwise().mean();
    model.center = mean_vec + column_mean.transpose();
    const Matrix centered = residuals.rowwise() - column_mean;

    const Index comps = std::min(samples, model.feature_count());
    if (comps == 0) {
        model.basis = Matrix(model.feature_count(), 0);
        model.singular_values = Vector(0);
        model.scores = Matrix(samples, 0);
        model.explained_variance_ratio = Vector(0);
        return model;
    }
    Eigen::BDCSVD<Matrix> svd(centered, Eigen::ComputeThinU | Eigen::ComputeThinV);
    model.basis = svd.matrixV().leftCols(comps);
    model.singular_values = svd.singularValues().head(comps);
    for (Index c = 0; c < comps; ++c) {
        Index pivot = 0;
        model.basis.col(c).cwiseAbs().maxCoeff(&pivot);
        if (model.basis(pivot, c) < 0.0) {
            model.basis.col(c) *= -1.0;
        }
    }
    model.scores = centered * model.basis;
    const double total = model.singular_values.squaredNorm();
    model.explained_variance_ratio = total > 0.0
                                         ? Vector(model.singular_values.array().square() / total)
                                         : Vector(Vector::Zero(comps));
    return model;
}

/// Smallest number of leading components whose explained variance reaches `fraction`.
inline Index components_for_variance(const GraphPcaModel& model, double fraction) {
    double cumulative = 0.0;
    for (Index c = 0; c < model.components(); ++c) {
        cumulative += model.explained_variance_ratio(c);
        if (cumulative >= fraction - 1e-12) {
            return c + 1;
        }
    }
    return std::max<Index>(1, model.components());
}

/// Maps principal scores back to a graph. Uses the leading scores.size()
/// components. Negative weights are clamped to 0 for nonnegative corpora, then
/// weights with |w| < threshold are removed.
inline Graph reconstruct(const GraphPcaModel& model, const Vector& scores, double threshold = 0.0) {
    internal::require(scores.size() <= model.components(),
                      "got " + std::to_string(scores.size()) + " scores for a model with " +
                          std::to_string(model.components()) + " components");
    internal::require(threshold >= 0.0, "threshold must be >= 0");
    Vector v = model.center;
    if (scores.size() > 0) {
        v += model.basis.leftCols(scores.size()) * scores;
    }
    const Index m = model.template_size;
    const Graph& mu = model.mean.mu;
    Matrix a = Matrix::Zero(m, m);
    internal::fill_edges(a, v.head(model.edge_features()), model.directed);
    for (Index j = 0; j < m; ++j) {
        for (Index i = 0; i < m; ++i) {
            double& w = a(i, j);
            if (model.nonnegative && w < 0.0) {
                w = 0.0;
            }
            if (std::abs(w) < threshold || mu.is_null(i) || mu.is_null(j)) {
                w = 0.0;
            }
        }
    }
    std::optional<Matrix> attrs;
    if (mu.has_attributes()) {
        attrs = mu.attributes();
        if (model.include_nodes) {
            for (Index s = 0; s < m; ++s) {
                attrs->row(s) =
                    v.segment(model.edge_features() + s * model.attr_dim, model.attr_dim).transpose() /
                    model.node_weight;
            }
        }
        for (Index s = 0; s < m; ++s) {
            if (mu.is_null(s)) {
                attrs->row(s).setZero();
            }
        }
    }
    return Graph(std::move(a), model.directed, std::move(attrs), mu.null_mask());
}

struct GaussianGraphModel {
    GraphPcaModel pca;
    Index k = 0;
    Vector score_mean;
    Matrix score_cov;
    /// Lower Cholesky factor of score_cov + jitter * I.
    Matrix cholesky;
    double jitter = 0.0;
    double threshold = 0.0;
};

inline GaussianGraphModel fit_gaussian(const GraphPcaModel& pca, Index k, double threshold = 0.0) {
    internal::require(k >= 1, "the Gaussian model needs k >= 1 components");
    internal::require(k <= pca.components(), "k = " + std::to_string(k) + " exceeds the " +
                                                 std::to_string(pca.components()) +
                                                 " available components");
    internal::require(pca.scores.rows() >= 2, "fitting a covariance needs at least two samples");
    GaussianGraphModel g;
    g.pca = pca;
    g.k = k;
    g.threshold = threshold;
    const Matrix s = pca.scores.leftCols(k);
    g.score_mean = s.colwise().mean().transpose();
    const Matrix centered = s.rowwise() - g.score_mean.transpose();
    g.score_cov = centered.transpose() * centered / static_cast<double>(s.rows() - 1);
    g.score_cov = (0.5 * (g.score_cov + g.score_cov.transpose())).eval();

    for (double jitter : {0.0, 1e-14, 1e-12, 1e-10}) {
        Eigen::LLT<Matrix> llt(g.score_cov + jitter * Matrix::Identity(k, k));
        if (llt.info() == Eigen::Success) {
            g.cholesky = llt.matrixL();
            g.jitter = jitter;
            return g;
        }
    }
    throw SolverError("score covariance is not positive semidefinite");
}

/// count x k matrix of score vectors drawn from N(score_mean, score_cov).
inline Matrix sample_scores(const GaussianGraphModel& model, std::uint64_t seed, Index count) {
    internal::require(count >= 0, "sample count must be non-negative");
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> normal(0.0, 1.0);
    Matrix out(count, model.k);
    Vector z(model.k);
    for (Index r = 0; r < count; ++r) {
        for (Index c = 0; c < model.k; ++c) {
            z(c) = normal(rng);
        }
        out.row(r) = (model.score_mean + model.cholesky * z).transpose();
    }
    return out;
}

inline std::vector<Graph> sample(const GaussianGraphModel& model, std::uint64_t seed, Index count) {
    const Matrix scores = sample_scores(model, seed, count);
    std::vector<Graph> out;
    out.reserve(static_cast<std::size_t>(count));
    for (Index r = 0; r < count; ++r) {
        out.push_back(reconstruct(model.pca, scores.row(r).transpose(), model.threshold));
    }
    return out;
}

}  // namespace graphspace

#endif
