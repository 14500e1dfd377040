#ifndef GRAPHSPACE_GENERATE_HPP
#define GRAPHSPACE_GENERATE_HPP

// Synthetic graph families: Erdos-Renyi 0/1 graphs, complete graphs with
// Cauchy (Student-t, 1 d.o.f.) weights, and distorted letter drawings with 2D
// node coordinates.

#include <cmath>
#include <cstdint>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "graphspace/errors.hpp"
#include "graphspace/graph.hpp"
#include "graphspace/matching.hpp"
#include "graphspace/parallel.hpp"

namespace graphspace {

enum class Family { binomial, full_heavy_tailed, letter_like };

struct LetterPrototype {
    char letter;
    std::vector<std::pair<double, double>> coords;
    std::vector<std::pair<Index, Index>> edges;
};

/// Stick-figure letters on a 4 x 4 canvas.
inline const std::vector<LetterPrototype>& letter_prototypes() {
    static const std::vector<LetterPrototype> letters = {
        {'A', {{0, 0}, {2, 4}, {4, 0}, {1, 2}, {3, 2}}, {{0, 3}, {3, 1}, {1, 4}, {4, 2}, {3, 4}}},
        {'E', {{0, 0}, {0, 2}, {0, 4}, {3, 4}, {2.5, 2}, {3, 0}}, {{0, 1}, {1, 2}, {2, 3}, {1, 4}, {0, 5}}},
        {'F', {{0, 0}, {0, 2}, {0, 4}, {3, 4}, {2.5, 2}}, {{0, 1}, {1, 2}, {2, 3}, {1, 4}}},
        {'H', {{0, 0}, {0, 2}, {0, 4}, {4, 0}, {4, 2}, {4, 4}}, {{0, 1}, {1, 2}, {3, 4}, {4, 5}, {1, 4}}},
        {'I', {{2, 0}, {2, 4}, {1, 0}, {3, 0}, {1, 4}, {3, 4}}, {{0, 1}, {2, 0}, {0, 3}, {4, 1}, {1, 5}}},
        {'K', {{0, 0}, {0, 2}, {0, 4}, {3, 4}, {3, 0}}, {{0, 1}, {1, 2}, {1, 3}, {1, 4}}},
        {'L', {{0, 4}, {0, 0}, {3, 0}}, {{0, 1}, {1, 2}}},
        {'M', {{0, 0}, {0, 4}, {2, 2}, {4, 4}, {4, 0}}, {{0, 1}, {1, 2}, {2, 3}, {3, 4}}},
        {'N', {{0, 0}, {0, 4}, {4, 0}, {4, 4}}, {{0, 1}, {1, 2}, {2, 3}}},
        {'T', {{0, 4}, {2, 4}, {4, 4}, {2, 0}}, {{0, 1}, {1, 2}, {1, 3}}},
        {'V', {{0, 4}, {2, 0}, {4, 4}}, {{0, 1}, {1, 2}}},
        {'W', {{0, 4}, {1, 0}, {2, 2}, {3, 0}, {4, 4}}, {{0, 1}, {1, 2}, {2, 3}, {3, 4}}},
        {'X', {{0, 0}, {4, 4}, {0, 4}, {4, 0}, {2, 2}}, {{0, 4}, {4, 1}, {2, 4}, {4, 3}}},
        {'Y', {{0, 4}, {4, 4}, {2, 2}, {2, 0}}, {{0, 2}, {1, 2}, {2, 3}}},
        {'Z', {{0, 4}, {4, 4}, {0, 0}, {4, 0}}, {{0, 1}, {1, 2}, {2, 3}}},
    };
    return letters;
}

inline const LetterPrototype& letter_prototype(char letter) {
    for (const auto& p : letter_prototypes()) {
        if (p.letter == letter) {
            return p;
        }
    }
    throw ValidationError(std::string("unknown letter prototype '") + letter + "'");
}

/// Undistorted letter graph: binary edges, node attributes are coordinates.
inline Graph letter_graph(char letter) {
    const LetterPrototype& proto = letter_prototype(letter);
    const auto n = static_cast<Index>(proto.coords.size());
    Matrix a = Matrix::Zero(n, n);
    for (auto [i, j] : proto.edges) {
        a(i, j) = a(j, i) = 1.0;
    }
    Matrix x(n, 2);
    for (Index i = 0; i < n; ++i) {
        x(i, 0) = proto.coords[static_cast<std::size_t>(i)].first;
        x(i, 1) = proto.coords[static_cast<std::size_t>(i)].second;
    }
    return Graph(std::move(a), false, std::move(x));
}

struct GeneratorSpec {
    Family family = Family::binomial;
    Index n_min = 5;
    Index n_max = 10;
    /// Edge probability of the binomial family.
    double p = 0.5;
    char letter = 'A';
    /// Standard deviation of the Gaussian coordinate noise.
    double coord_noise = 0.2;
    /// Probability of deleting each prototype edge; non-edges are inserted at a
    /// rate that keeps the expected edge count unchanged.
    double edge_noise = 0.05;
    /// Relabel letter nodes at random.
    bool shuffle = true;

    void validate() const {
        using internal::require;
        if (family != Family::letter_like) {
            require(n_min >= 1 && n_max >= n_min, "node count range must satisfy 1 <= min <= max");
        }
        require(std::isfinite(p) && p >= 0.0 && p <= 1.0, "p must lie in [0, 1]");
        require(std::isfinite(coord_noise) && coord_noise >= 0.0, "coordinate noise must be >= 0");
        require(std::isfinite(edge_noise) && edge_noise >= 0.0 && edge_noise <= 1.0,
                "edge noise must lie in [0, 1]");
        if (family == Family::letter_like) {
            letter_prototype(letter);
        }
    }
};

inline Family parse_family(const std::string& name) {
    if (name == "binomial") {
        return Family::binomial;
    }
    if (name == "full_heavy_tailed" || name == "heavy") {
        return Family::full_heavy_tailed;
    }
    if (name == "letter_like" || name == "letter") {
        return Family::letter_like;
    }
    throw ValidationError("unknown graph family '" + name + "'");
}

inline const char* family_name(Family f) {
    switch (f) {
        case Family::binomial:
            return "binomial";
        case Family::full_heavy_tailed:
            return "full_heavy_tailed";
        case Family::letter_like:
            return "letter_like";
    }
    return "?";
}

namespace internal {

inline Graph distorted_letter(const GeneratorSpec& spec, std::mt19937_64& rng) {
    Graph proto = letter_graph(spec.letter);
    const Index n = proto.size();
    Matrix a = proto.adjacency();
    Matrix x = proto.attributes();
    std::normal_distribution<double> jitter(0.0, 1.0);
    for (Index i = 0; i < n; ++i) {
        for (Index c = 0; c < 2; ++c) {
            x(i, c) += spec.coord_noise * jitter(rng);
        }
    }
    const Index pairs = n * (n - 1) / 2;
    Index present = 0;
    for (Index i = 0; i < n; ++i) {
        for (Index j = i + 1; j < n; ++j) {
            present += a(i, j) != 0.0 ? 1 : 0;
        }
    }
    const Index absent = pairs - present;
    const double insert_rate =
        absent > 0 ? std::min(1.0, spec.edge_noise * static_cast<double>(present) / static_cast<double>(absent))
                   : 0.0;
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    for (Index i = 0; i < n; ++i) {
        for (Index j = i + 1; j < n; ++j) {
            const double u = unit(rng);
            if (a(i, j) != 0.0) {
                if (u < spec.edge_noise) {
                    a(i, j) = a(j, i) = 0.0;
                }
            } else if (u < insert_rate) {
                a(i, j) = a(j, i) = 1.0;
            }
        }
    }
    Graph g(std::move(a), false, std::move(x));
    if (spec.shuffle) {
        g = permute(g, random_permutation(n, rng));
    }
    return g;
}

}  // namespace internal

inline Graph generate(const GeneratorSpec& spec, std::mt19937_64& rng) {
    spec.validate();
    if (spec.family == Family::letter_like) {
        return internal::distorted_letter(spec, rng);
    }
    std::uniform_int_distribution<Index> size(spec.n_min, spec.n_max);
    const Index n = size(rng);
    Matrix a = Matrix::Zero(n, n);
    if (spec.family == Family::binomial) {
        std::bernoulli_distribution edge(spec.p);
        for (Index i = 0; i < n; ++i) {
            for (Index j = i + 1; j < n; ++j) {
                if (edge(rng)) {
                    a(i, j) = a(j, i) = 1.0;
                }
            }
        }
    } else {
        std::cauchy_distribution<double> weight(0.0, 1.0);
        for (Index i = 0; i < n; ++i) {
            for (Index j = i + 1; j < n; ++j) {
                a(i, j) = a(j, i) = weight(rng);
            }
        }
    }
    return Graph(std::move(a));
}

inline Graph generate(const GeneratorSpec& spec, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    return generate(spec, rng);
}

/// count graphs; graph k is drawn from the stream derive_seed(seed, k).
inline std::vector<Graph> generate_corpus(const GeneratorSpec& spec, std::uint64_t seed, Index count) {
    internal::require(count >= 0, "graph count must be non-negative");
    std::vector<Graph> out;
    out.reserve(static_cast<std::size_t>(count));
    for (Index k = 0; k < count; ++k) {
        out.push_back(generate(spec, derive_seed(seed, static_cast<std::uint64_t>(k))));
    }
    return out;
}

}  // namespace graphspace

#endif
