#ifndef GRAPHSPACE_GRAPH_HPP
#define GRAPHSPACE_GRAPH_HPP

// Graph data model: weighted adjacency with optional node attributes, the
// permutation-group action on node labels, null-node padding, the ambient
// Frobenius metric, and the adjacency <-> Laplacian correspondence.

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numeric>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "graphspace/errors.hpp"

namespace graphspace {

using Index = Eigen::Index;
using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

/// A weighted graph on n nodes, stored as a dense adjacency matrix.
///
/// Undirected graphs are exactly symmetric. The diagonal is always zero.
/// Null nodes are padding: they carry no edges and a zero attribute vector.
class Graph {
public:
    Graph() = default;

    explicit Graph(Matrix adjacency, bool directed = false,
                   std::optional<Matrix> node_attrs = std::nullopt,
                   std::vector<bool> null_mask = {})
        : adjacency_(std::move(adjacency)),
          directed_(directed),
          node_attrs_(std::move(node_attrs)),
          null_mask_(std::move(null_mask)) {
        if (null_mask_.empty()) {
            null_mask_.assign(static_cast<std::size_t>(adjacency_.rows()), false);
        }
        validate();
    }

    Index size() const { return adjacency_.rows(); }
    const Matrix& adjacency() const { return adjacency_; }
    bool directed() const { return directed_; }

    bool has_attributes() const { return node_attrs_.has_value(); }
    const std::optional<Matrix>& node_attrs() const { return node_attrs_; }
    const Matrix& attributes() const {
        internal::require(node_attrs_.has_value(), "graph has no node attributes");
        return *node_attrs_;
    }
    Index attribute_dim() const { return node_attrs_ ? node_attrs_->cols() : 0; }

    const std::vector<bool>& null_mask() const { return null_mask_; }
    bool is_null(Index i) const { return null_mask_[static_cast<std::size_t>(i)]; }
    Index real_node_count() const {
        return static_cast<Index>(std::count(null_mask_.begin(), null_mask_.end(), false));
    }

    bool nonnegative() const { return size() == 0 || adjacency_.minCoeff() >= 0.0; }

    friend bool operator==(const Graph& a, const Graph& b) {
        if (a.directed_ != b.directed_ || a.size() != b.size() ||
            a.null_mask_ != b.null_mask_ || a.has_attributes() != b.has_attributes()) {
            return false;
        }
        if (a.adjacency_ != b.adjacency_) {
            return false;
        }
        if (a.node_attrs_ && (a.node_attrs_->cols() != b.node_attrs_->cols() ||
                              *a.node_attrs_ != *b.node_attrs_)) {
            return false;
        }
        return true;
    }
    friend bool operator!=(const Graph& a, const Graph& b) { return !(a == b); }

private:
    void validate() const {
        using internal::require;
        const Index n = adjacency_.rows();
        require(adjacency_.cols() == n, "adjacency matrix must be square, got " +
                                            std::to_string(adjacency_.rows()) + "x" +
                                            std::to_string(adjacency_.cols()));
        require(adjacency_.allFinite(), "adjacency matrix has non-finite entries");
        for (Index i = 0; i < n; ++i) {
            require(adjacency_(i, i) == 0.0,
                    "self-loop at node " + std::to_string(i) + " (nonzero diagonal)");
        }
        if (!directed_) {
            for (Index i = 0; i < n; ++i) {
                for (Index j = i + 1; j < n; ++j) {
                    require(adjacency_(i, j) == adjacency_(j, i),
                            "undirected adjacency is not symmetric at (" + std::to_string(i) +
                                "," + std::to_string(j) + ")");
                }
            }
        }
        require(static_cast<Index>(null_mask_.size()) == n,
                "null mask length " + std::to_string(null_mask_.size()) +
                    " does not match node count " + std::to_string(n));
        if (node_attrs_) {
            require(node_attrs_->rows() == n, "node attribute matrix has " +
                                                  std::to_string(node_attrs_->rows()) +
                                                  " rows, expected " + std::to_string(n));
            require(node_attrs_->cols() >= 1, "node attribute dimension must be at least 1");
            require(node_attrs_->allFinite(), "node attributes have non-finite entries");
        }
        for (Index i = 0; i < n; ++i) {
            if (!is_null(i)) {
                continue;
            }
            require(adjacency_.row(i).isZero(0.0) && adjacency_.col(i).isZero(0.0),
                    "null node " + std::to_string(i) + " has incident edges");
            if (node_attrs_) {
                require(node_attrs_->row(i).isZero(0.0),
                        "null node " + std::to_string(i) + " has a nonzero attribute");
            }
        }
    }

    Matrix adjacency_{0, 0};
    bool directed_ = false;
    std::optional<Matrix> node_attrs_;
    std::vector<bool> null_mask_;
};

/// A bijection on {0..n-1}. `perm[i] = j` sends node i to slot j; as a matrix
/// P(perm[i], i) = 1, so the action on adjacencies is A -> P A P^T.
class Permutation {
public:
    Permutation() = default;

    explicit Permutation(std::vector<Index> images) : images_(std::move(images)) {
        std::vector<bool> seen(images_.size(), false);
        const auto n = static_cast<Index>(images_.size());
        for (std::size_t i = 0; i < images_.size(); ++i) {
            const Index j = images_[i];
            internal::require(j >= 0 && j < n, "permutation image " + std::to_string(j) +
                                                   " out of range at position " +
                                                   std::to_string(i));
            internal::require(!seen[static_cast<std::size_t>(j)],
                              "permutation is not a bijection: image " + std::to_string(j) +
                                  " repeated");
            seen[static_cast<std::size_t>(j)] = true;
        }
    }

    static Permutation identity(Index n) {
        std::vector<Index> images(static_cast<std::size_t>(n));
        std::iota(images.begin(), images.end(), Index{0});
        return Permutation(std::move(images));
    }

    Index size() const { return static_cast<Index>(images_.size()); }
    Index operator[](Index i) const { return images_[static_cast<std::size_t>(i)]; }
    const std::vector<Index>& images() const { return images_; }

    bool is_identity() const {
        for (std::size_t i = 0; i < images_.size(); ++i) {
            if (images_[i] != static_cast<Index>(i)) {
                return false;
            }
        }
        return true;
    }

    Permutation inverse() const {
        std::vector<Index> inv(images_.size());
        for (std::size_t i = 0; i < images_.size(); ++i) {
            inv[static_cast<std::size_t>(images_[i])] = static_cast<Index>(i);
        }
        return Permutation(std::move(inv));
    }

    Matrix matrix() const {
        Matrix p = Matrix::Zero(size(), size());
        for (Index i = 0; i < size(); ++i) {
            p((*this)[i], i) = 1.0;
        }
        return p;
    }

    friend bool operator==(const Permutation&, const Permutation&) = default;

private:
    std::vector<Index> images_;
};

/// q after p: i -> q[p[i]].
inline Permutation compose(const Permutation& q, const Permutation& p) {
    internal::require(q.size() == p.size(), "cannot compose permutations of different sizes");
    std::vector<Index> images(static_cast<std::size_t>(p.size()));
    for (Index i = 0; i < p.size(); ++i) {
        images[static_cast<std::size_t>(i)] = q[p[i]];
    }
    return Permutation(std::move(images));
}

/// Relabels nodes: returns P A P^T with attributes and null flags moved along.
inline Graph permute(const Graph& g, const Permutation& p) {
    const Index n = g.size();
    internal::require(p.size() == n, "permutation of length " + std::to_string(p.size()) +
                                         " applied to graph with " + std::to_string(n) +
                                         " nodes");
    const Matrix& a = g.adjacency();
    Matrix out(n, n);
    for (Index j = 0; j < n; ++j) {
        for (Index i = 0; i < n; ++i) {
            out(p[i], p[j]) = a(i, j);
        }
    }
    std::optional<Matrix> attrs;
    if (g.has_attributes()) {
        attrs = Matrix(n, g.attribute_dim());
        for (Index i = 0; i < n; ++i) {
            attrs->row(p[i]) = g.attributes().row(i);
        }
    }
    std::vector<bool> mask(static_cast<std::size_t>(n));
    for (Index i = 0; i < n; ++i) {
        mask[static_cast<std::size_t>(p[i])] = g.is_null(i);
    }
    return Graph(std::move(out), g.directed(), std::move(attrs), std::move(mask));
}

enum class Padding { none, one_way, two_way };

/// Appends null nodes until the graph has m nodes.
inline Graph pad_to(const Graph& g, Index m) {
    const Index n = g.size();
    internal::require(m >= n, "cannot pad a graph with " + std::to_string(n) +
                                  " nodes down to " + std::to_string(m));
    if (m == n) {
        return g;
    }
    Matrix a = Matrix::Zero(m, m);
    a.topLeftCorner(n, n) = g.adjacency();
    std::optional<Matrix> attrs;
    if (g.has_attributes()) {
        attrs = Matrix::Zero(m, g.attribute_dim());
        attrs->topRows(n) = g.attributes();
    }
    std::vector<bool> mask = g.null_mask();
    mask.resize(static_cast<std::size_t>(m), true);
    return Graph(std::move(a), g.directed(), std::move(attrs), std::move(mask));
}

/// Pads both graphs to a common size m >= max(n1, n2).
inline std::pair<Graph, Graph> pad_pair_to_size(const Graph& g1, const Graph& g2, Index m) {
    internal::require(m >= std::max(g1.size(), g2.size()),
                      "padding target " + std::to_string(m) + " is smaller than max(" +
                          std::to_string(g1.size()) + ", " + std::to_string(g2.size()) + ")");
    return {pad_to(g1, m), pad_to(g2, m)};
}

/// two_way: both graphs grow to n1 + n2 nodes. one_way: the smaller graph is
/// padded to the larger. none: sizes must already agree.
inline std::pair<Graph, Graph> pad_pair(const Graph& g1, const Graph& g2, Padding mode) {
    switch (mode) {
        case Padding::two_way:
            return pad_pair_to_size(g1, g2, g1.size() + g2.size());
        case Padding::one_way:
            return pad_pair_to_size(g1, g2, std::max(g1.size(), g2.size()));
        case Padding::none:
            break;
    }
    internal::require(g1.size() == g2.size(),
                      "graphs have " + std::to_string(g1.size()) + " and " +
                          std::to_string(g2.size()) + " nodes and padding is disabled");
    return {g1, g2};
}

inline void require_compatible(const Graph& g1, const Graph& g2) {
    internal::require(g1.size() == g2.size(), "graph sizes differ: " + std::to_string(g1.size()) +
                                                  " vs " + std::to_string(g2.size()));
    internal::require(g1.directed() == g2.directed(), "cannot compare directed and undirected graphs");
}

/// Sum over all ordered pairs (i, j); an undirected edge counts twice.
inline double squared_ambient_distance(const Graph& g1, const Graph& g2) {
    require_compatible(g1, g2);
    // Sequential column-major sum: appended zero blocks leave the value unchanged.
    const Matrix& a = g1.adjacency();
    const Matrix& b = g2.adjacency();
    double total = 0.0;
    for (Index j = 0; j < a.cols(); ++j) {
        for (Index i = 0; i < a.rows(); ++i) {
            const double diff = a(i, j) - b(i, j);
            total += diff * diff;
        }
    }
    return total;
}

inline double ambient_distance(const Graph& g1, const Graph& g2) {
    return std::sqrt(squared_ambient_distance(g1, g2));
}

/// Squared Euclidean distances between node attributes of g1 (rows) and g2
/// (columns). The extended form requires equal (padded) sizes and zeroes every
/// row or column that belongs to a null node.
inline Matrix node_distance_matrix(const Graph& g1, const Graph& g2, bool extended) {
    internal::require(g1.has_attributes() && g2.has_attributes(),
                      "node distances require node attributes on both graphs");
    internal::require(g1.attribute_dim() == g2.attribute_dim(),
                      "node attribute dimensions differ: " + std::to_string(g1.attribute_dim()) +
                          " vs " + std::to_string(g2.attribute_dim()));
    if (extended) {
        internal::require(g1.size() == g2.size(),
                          "extended node distances need equally padded graphs");
    }
    const Matrix& x = g1.attributes();
    const Matrix& y = g2.attributes();
    Matrix d(g1.size(), g2.size());
    for (Index j = 0; j < g2.size(); ++j) {
        for (Index i = 0; i < g1.size(); ++i) {
            d(i, j) = (x.row(i) - y.row(j)).squaredNorm();
        }
    }
    if (extended) {
        for (Index i = 0; i < g1.size(); ++i) {
            if (g1.is_null(i)) {
                d.row(i).setZero();
            }
        }
        for (Index j = 0; j < g2.size(); ++j) {
            if (g2.is_null(j)) {
                d.col(j).setZero();
            }
        }
    }
    return d;
}

/// L = D - A with D the diagonal of weighted degrees. Defined for undirected
/// graphs with nonnegative weights.
inline Matrix to_laplacian(const Graph& g) {
    internal::require(!g.directed(), "Laplacian representation requires an undirected graph");
    internal::require(g.nonnegative(), "Laplacian representation requires nonnegative weights");
    Matrix l = -g.adjacency();
    for (Index i = 0; i < g.size(); ++i) {
        l(i, i) = g.adjacency().row(i).sum();
    }
    return l;
}

inline Graph from_laplacian(const Matrix& l) {
    using internal::require;
    const Index n = l.rows();
    require(l.cols() == n, "Laplacian must be square");
    require(l.allFinite(), "Laplacian has non-finite entries");
    Matrix a = Matrix::Zero(n, n);
    for (Index i = 0; i < n; ++i) {
        double off_sum = 0.0;
        double scale = std::abs(l(i, i));
        for (Index j = 0; j < n; ++j) {
            if (i == j) {
                continue;
            }
            require(l(i, j) == l(j, i), "Laplacian is not symmetric at (" + std::to_string(i) +
                                            "," + std::to_string(j) + ")");
            require(l(i, j) <= 0.0, "Laplacian off-diagonal entry (" + std::to_string(i) + "," +
                                        std::to_string(j) + ") is positive");
            a(i, j) = -l(i, j);
            off_sum += a(i, j);
            scale += a(i, j);
        }
        require(std::abs(l(i, i) - off_sum) <= 1e-9 * std::max(1.0, scale),
                "Laplacian row " + std::to_string(i) + " does not sum to zero");
    }
    return Graph(std::move(a), false);
}

}  // namespace graphspace

#endif
