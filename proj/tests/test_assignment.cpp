#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>

#include "graphspace/assignment.hpp"
#include "test_support.hpp"

namespace gs = graphspace;
using gs::Graph;
using gs::Index;
using gs::Matrix;
using gs::Permutation;
using gs::Sense;
using gs::testing::graph_from;
using gs::testing::random_weighted;
using gs::testing::shuffled;

namespace {

struct Enumerated {
    double cost;
    std::vector<Index> first;  // lexicographically first optimum
};

// Exhaustive oracle, sums in row order like the solver does.
Enumerated enumerate_min(const Matrix& c) {
    std::vector<Index> perm(static_cast<std::size_t>(c.rows()));
    std::iota(perm.begin(), perm.end(), Index{0});
    Enumerated best{std::numeric_limits<double>::infinity(), {}};
    do {
        double cost = 0.0;
        for (Index i = 0; i < c.rows(); ++i) {
            cost += c(i, perm[static_cast<std::size_t>(i)]);
        }
        if (cost < best.cost) {
            best = {cost, perm};
        }
    } while (std::next_permutation(perm.begin(), perm.end()));
    return best;
}

}  // namespace

TEST(SolveLapTest, TwoByTwo) {
    Matrix c(2, 2);
    c << 1, 2, 2, 1;
    const auto r = gs::solve_lap(c, Sense::min);
    EXPECT_TRUE(r.assignment.is_identity());
    EXPECT_EQ(r.cost, 2.0);
}

TEST(SolveLapTest, IdentityMaximization) {
    const auto r = gs::solve_lap(Matrix::Identity(6, 6), Sense::max);
    EXPECT_TRUE(r.assignment.is_identity());
    EXPECT_EQ(r.cost, 6.0);
}

TEST(SolveLapTest, EmptyMatrix) {
    const auto r = gs::solve_lap(Matrix(0, 0));
    EXPECT_EQ(r.assignment.size(), 0);
    EXPECT_EQ(r.cost, 0.0);
}

TEST(SolveLapTest, MatchesExhaustiveMinimum) {
    std::mt19937_64 rng(21);
    std::uniform_real_distribution<double> u(-5.0, 5.0);
    for (int trial = 0; trial < 200; ++trial) {
        const Index n = 1 + trial % 7;
        Matrix c(n, n);
        for (Index i = 0; i < n; ++i) {
            for (Index j = 0; j < n; ++j) {
                c(i, j) = u(rng);
            }
        }
        const auto r = gs::solve_lap(c);
        const auto oracle = enumerate_min(c);
        EXPECT_EQ(r.cost, oracle.cost) << "trial " << trial;
        double recomputed = 0.0;
        for (Index i = 0; i < n; ++i) {
            recomputed += c(i, r.assignment[i]);
        }
        EXPECT_EQ(r.cost, recomputed);
    }
}

TEST(SolveLapTest, LexicographicTieBreaking) {
    // Optimal assignments avoid the diagonal: (1,2,0) and (2,0,1).
    const auto r = gs::solve_lap(Matrix::Identity(3, 3), Sense::min);
    EXPECT_EQ(r.assignment, Permutation({1, 2, 0}));
    EXPECT_TRUE(gs::solve_lap(Matrix::Zero(5, 5)).assignment.is_identity());

    // Small integer costs produce many ties.
    std::mt19937_64 rng(5);
    std::uniform_int_distribution<int> u(0, 2);
    for (int trial = 0; trial < 300; ++trial) {
        const Index n = 2 + trial % 6;
        Matrix c(n, n);
        for (Index i = 0; i < n; ++i) {
            for (Index j = 0; j < n; ++j) {
                c(i, j) = u(rng);
            }
        }
        const auto oracle = enumerate_min(c);
        const auto r = gs::solve_lap(c);
        EXPECT_EQ(r.cost, oracle.cost);
        EXPECT_EQ(r.assignment.images(), oracle.first) << "trial " << trial;
    }
}

TEST(SolveLapTest, MinMaxDuality) {
    std::mt19937_64 rng(22);
    std::uniform_real_distribution<double> u(0.0, 10.0);
    for (int trial = 0; trial < 50; ++trial) {
        const Index n = 2 + trial % 20;
        Matrix c(n, n);
        for (Index i = 0; i < n; ++i) {
            for (Index j = 0; j < n; ++j) {
                c(i, j) = u(rng);
            }
        }
        EXPECT_EQ(gs::solve_lap(c, Sense::min).cost, -gs::solve_lap(Matrix(-c), Sense::max).cost);
    }
}

TEST(SolveLapTest, RejectsNonFinite) {
    Matrix c = Matrix::Zero(2, 2);
    c(0, 1) = std::numeric_limits<double>::infinity();
    EXPECT_THROW(gs::solve_lap(c), gs::ValidationError);
    EXPECT_THROW(gs::solve_lap(Matrix::Zero(2, 3)), gs::ValidationError);
}

TEST(BruteForceTest, SelfMatchIsIdentity) {
    std::mt19937_64 rng(31);
    const Graph g = random_weighted(6, rng);
    const auto r = gs::brute_force_match(g, g, 0.0);
    EXPECT_EQ(r.best.objective, 0.0);
    EXPECT_TRUE(r.best.p.is_identity());
    EXPECT_EQ(r.optima.size(), 1u);
}

TEST(BruteForceTest, RecoversRandomRelabeling) {
    std::mt19937_64 rng(32);
    for (int trial = 0; trial < 10; ++trial) {
        const Graph g = random_weighted(7, rng, trial % 2 == 1);
        const Permutation p = shuffled(7, rng);
        const auto r = gs::brute_force_match(g, gs::permute(g, p), 0.0);
        EXPECT_EQ(r.best.objective, 0.0);
        EXPECT_EQ(r.best.p, p);
    }
}

TEST(BruteForceTest, TwoNodeTie) {
    const Graph a = graph_from({{0, 1}, {1, 0}});
    const Graph b = graph_from({{0, 3}, {3, 0}});
    const auto r = gs::brute_force_match(a, b, 0.0);
    EXPECT_EQ(r.best.objective, 8.0);
    EXPECT_DOUBLE_EQ(r.best.d_g, 2.0 * std::sqrt(2.0));
    EXPECT_EQ(r.optima.size(), 2u);
}

TEST(BruteForceTest, NodeTermUsesExtendedDistances) {
    Matrix x1(2, 1);
    x1 << 0, 10;
    Matrix x2(2, 1);
    x2 << 10, 1;
    const Graph g1(Matrix::Zero(2, 2), false, x1);
    const Graph g2(Matrix::Zero(2, 2), false, x2);
    const auto r = gs::brute_force_match(g1, g2, 1.0);
    EXPECT_EQ(r.best.p, Permutation({1, 0}));
    EXPECT_EQ(r.best.objective, 1.0);
}

TEST(BruteForceTest, CostIsSymmetric) {
    std::mt19937_64 rng(33);
    for (int trial = 0; trial < 30; ++trial) {
        const Index n = 2 + trial % 5;
        const Graph g1 = random_weighted(n, rng, false, 2);
        const Graph g2 = random_weighted(n, rng, false, 2);
        const double lambda = trial % 2 == 0 ? 0.0 : 0.7;
        EXPECT_EQ(gs::brute_force_match(g1, g2, lambda).best.objective,
                  gs::brute_force_match(g2, g1, lambda).best.objective);
    }
}

TEST(BruteForceTest, SizeGuard) {
    EXPECT_THROW(gs::brute_force_match(Graph(Matrix::Zero(11, 11)), Graph(Matrix::Zero(11, 11)), 0.0),
                 gs::ValidationError);
}
