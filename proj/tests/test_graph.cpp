#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "graphspace/graph.hpp"
#include "test_support.hpp"

namespace gs = graphspace;
using gs::Graph;
using gs::Index;
using gs::Matrix;
using gs::Permutation;
using gs::testing::graph_from;
using gs::testing::random_weighted;
using gs::testing::shuffled;

TEST(GraphTest, RejectsSelfLoops) {
    Matrix a = Matrix::Zero(2, 2);
    a(0, 0) = 1.0;
    EXPECT_THROW(Graph{a}, gs::ValidationError);
}

TEST(GraphTest, RejectsAsymmetricUndirected) {
    Matrix a = Matrix::Zero(2, 2);
    a(0, 1) = 1.0;
    EXPECT_THROW(Graph{a}, gs::ValidationError);
    EXPECT_NO_THROW(Graph(a, true));
}

TEST(GraphTest, RejectsAttributeRowMismatchAndDirtyNullNodes) {
    Matrix a = Matrix::Zero(2, 2);
    EXPECT_THROW(Graph(a, false, Matrix::Zero(3, 2)), gs::ValidationError);
    Matrix b = Matrix::Zero(2, 2);
    b(0, 1) = b(1, 0) = 1.0;
    EXPECT_THROW(Graph(b, false, std::nullopt, {false, true}), gs::ValidationError);
    Matrix attrs = Matrix::Ones(2, 1);
    EXPECT_THROW(Graph(Matrix::Zero(2, 2), false, attrs, {false, true}), gs::ValidationError);
}

TEST(PermutationTest, RejectsNonBijection) {
    EXPECT_THROW(Permutation({0, 0, 1}), gs::ValidationError);
    EXPECT_THROW(Permutation({0, 3}), gs::ValidationError);
}

TEST(PermutationTest, MatrixIsOrthogonal) {
    std::mt19937_64 rng(3);
    const Permutation p = shuffled(7, rng);
    const Matrix m = p.matrix();
    EXPECT_TRUE((m * m.transpose()).isIdentity(0.0));
    for (Index i = 0; i < 7; ++i) {
        EXPECT_EQ(m(p[i], i), 1.0);
    }
}

TEST(PermuteTest, IdentityLeavesGraphUnchanged) {
    std::mt19937_64 rng(1);
    const Graph g = random_weighted(5, rng, false, 2);
    EXPECT_EQ(gs::permute(g, Permutation::identity(5)), g);
}

TEST(PermuteTest, SwapOfSingleEdgeIsInvariant) {
    const Graph g = graph_from({{0, 1}, {1, 0}});
    EXPECT_EQ(gs::permute(g, Permutation({1, 0})), g);
}

TEST(PermuteTest, CyclicShiftOfPath) {
    // Path 0-1-2 under 0->1, 1->2, 2->0 becomes edges (1,2) and (2,0).
    const Graph g = graph_from({{0, 1, 0}, {1, 0, 1}, {0, 1, 0}});
    const Graph h = gs::permute(g, Permutation({1, 2, 0}));
    const Graph expected = graph_from({{0, 0, 1}, {0, 0, 1}, {1, 1, 0}});
    EXPECT_EQ(h, expected);
}

TEST(PermuteTest, MatchesMatrixAction) {
    std::mt19937_64 rng(11);
    const Graph g = random_weighted(6, rng, true);
    const Permutation p = shuffled(6, rng);
    const Matrix pm = p.matrix();
    EXPECT_TRUE(gs::permute(g, p).adjacency().isApprox(pm * g.adjacency() * pm.transpose(), 0.0));
}

TEST(PermuteTest, DimensionMismatchThrows) {
    EXPECT_THROW(gs::permute(Graph(Matrix::Zero(3, 3)), Permutation::identity(2)),
                 gs::ValidationError);
}

TEST(PermuteTest, ComposesWithGroupLaw) {
    std::mt19937_64 rng(7);
    for (int trial = 0; trial < 50; ++trial) {
        const Index n = 2 + trial % 8;
        const Graph g = random_weighted(n, rng, trial % 2 == 0, 3);
        const Permutation p = shuffled(n, rng);
        const Permutation q = shuffled(n, rng);
        EXPECT_EQ(gs::permute(gs::permute(g, p), q), gs::permute(g, gs::compose(q, p)));
        EXPECT_TRUE(gs::compose(p.inverse(), p).is_identity());
    }
}

TEST(PadTest, TwoWayBlocks) {
    std::mt19937_64 rng(2);
    const Graph g1 = random_weighted(2, rng);
    const Graph g2 = random_weighted(3, rng);
    const auto [p1, p2] = gs::pad_pair(g1, g2, gs::Padding::two_way);
    ASSERT_EQ(p1.size(), 5);
    ASSERT_EQ(p2.size(), 5);
    EXPECT_EQ(Matrix(p1.adjacency().topLeftCorner(2, 2)), g1.adjacency());
    EXPECT_EQ(Matrix(p2.adjacency().topLeftCorner(3, 3)), g2.adjacency());
    EXPECT_EQ(p1.adjacency().squaredNorm(), g1.adjacency().squaredNorm());
    EXPECT_EQ(p2.adjacency().squaredNorm(), g2.adjacency().squaredNorm());
    EXPECT_EQ(p1.real_node_count(), 2);
    EXPECT_EQ(p2.real_node_count(), 3);
    EXPECT_TRUE(p1.is_null(2) && p1.is_null(4) && !p1.is_null(1));
}

TEST(PadTest, ToSizeNoOpAndGuard) {
    std::mt19937_64 rng(4);
    const Graph g1 = random_weighted(4, rng);
    const Graph g2 = random_weighted(4, rng);
    const auto [p1, p2] = gs::pad_pair_to_size(g1, g2, 4);
    EXPECT_EQ(p1, g1);
    EXPECT_EQ(p2, g2);
    EXPECT_THROW(gs::pad_pair_to_size(g1, random_weighted(6, rng), 5), gs::ValidationError);
    EXPECT_THROW(gs::pad_pair(g1, random_weighted(6, rng), gs::Padding::none), gs::ValidationError);
}

TEST(PadTest, PaddingIsNeutralForAmbientDistance) {
    std::mt19937_64 rng(5);
    for (int trial = 0; trial < 20; ++trial) {
        const Graph g1 = random_weighted(5, rng);
        const Graph g2 = random_weighted(5, rng);
        const auto [p1, p2] = gs::pad_pair(g1, g2, gs::Padding::two_way);
        EXPECT_EQ(gs::ambient_distance(p1, p2), gs::ambient_distance(g1, g2));
    }
}

TEST(AmbientDistanceTest, HandValues) {
    const Graph a = graph_from({{0, 1}, {1, 0}});
    const Graph b = graph_from({{0, 3}, {3, 0}});
    EXPECT_EQ(gs::ambient_distance(a, a), 0.0);
    EXPECT_DOUBLE_EQ(gs::ambient_distance(a, b), 2.0 * std::sqrt(2.0));
    EXPECT_THROW(gs::ambient_distance(a, Graph(Matrix::Zero(3, 3))), gs::ValidationError);
}

TEST(AmbientDistanceTest, PermutationsAreIsometries) {
    std::mt19937_64 rng(8);
    for (int trial = 0; trial < 200; ++trial) {
        const Index n = 1 + trial % 12;
        const bool directed = trial % 3 == 0;
        const Graph g1 = random_weighted(n, rng, directed, 0, -2.0, 2.0);
        const Graph g2 = random_weighted(n, rng, directed, 0, -2.0, 2.0);
        const Permutation p = shuffled(n, rng);
        const double d = gs::ambient_distance(g1, g2);
        const double dp = gs::ambient_distance(gs::permute(g1, p), gs::permute(g2, p));
        EXPECT_LE(std::abs(d - dp), 1e-12 * (1.0 + d));
    }
}

TEST(NodeDistanceTest, HandValuesAndExtendedForm) {
    Matrix x(2, 2);
    x << 0, 0, 3, 4;
    const Graph g(Matrix::Zero(2, 2), false, x);
    const Matrix d = gs::node_distance_matrix(g, g, false);
    EXPECT_EQ(d(0, 0), 0.0);
    EXPECT_EQ(d(1, 1), 0.0);
    EXPECT_EQ(d(0, 1), 25.0);
    EXPECT_EQ(d(1, 0), 25.0);

    Matrix y1(1, 2);
    y1 << 1, 2;
    Matrix y2(1, 2);
    y2 << 4, 6;
    const auto [p1, p2] = gs::pad_pair(Graph(Matrix::Zero(1, 1), false, y1),
                                       Graph(Matrix::Zero(1, 1), false, y2), gs::Padding::two_way);
    const Matrix ext = gs::node_distance_matrix(p1, p2, true);
    ASSERT_EQ(ext.rows(), 2);
    EXPECT_EQ(ext(0, 0), 25.0);
    EXPECT_EQ(ext(0, 1), 0.0);
    EXPECT_EQ(ext(1, 0), 0.0);
    EXPECT_EQ(ext(1, 1), 0.0);
}

TEST(NodeDistanceTest, Errors) {
    const Graph bare(Matrix::Zero(2, 2));
    const Graph attributed(Matrix::Zero(2, 2), false, Matrix::Zero(2, 3));
    const Graph other_dim(Matrix::Zero(2, 2), false, Matrix::Zero(2, 2));
    EXPECT_THROW(gs::node_distance_matrix(bare, attributed, false), gs::ValidationError);
    EXPECT_THROW(gs::node_distance_matrix(attributed, other_dim, false), gs::ValidationError);
}

TEST(LaplacianTest, TwoNodeEdge) {
    const Matrix l = gs::to_laplacian(graph_from({{0, 1}, {1, 0}}));
    Matrix expected(2, 2);
    expected << 1, -1, -1, 1;
    EXPECT_EQ(l, expected);
}

TEST(LaplacianTest, RoundTripEquivarianceAndPaths) {
    std::mt19937_64 rng(9);
    for (int trial = 0; trial < 50; ++trial) {
        const Index n = 2 + trial % 9;
        const Graph g1 = random_weighted(n, rng);
        const Graph g2 = random_weighted(n, rng);
        const Matrix l1 = gs::to_laplacian(g1);
        const Matrix l2 = gs::to_laplacian(g2);
        EXPECT_EQ(gs::from_laplacian(l1), g1);

        const Permutation p = shuffled(n, rng);
        const Matrix pm = p.matrix();
        EXPECT_LE((gs::to_laplacian(gs::permute(g1, p)) - pm * l1 * pm.transpose())
                      .cwiseAbs()
                      .maxCoeff(),
                  1e-12);

        for (double t : {0.0, 0.25, 0.5, 1.0}) {
            const Graph mid(Matrix((1.0 - t) * g1.adjacency() + t * g2.adjacency()));
            EXPECT_LE((gs::to_laplacian(mid) - ((1.0 - t) * l1 + t * l2)).cwiseAbs().maxCoeff(),
                      1e-12);
        }
    }
}

TEST(LaplacianTest, NotAnIsometryWitness) {
    // ||A1 - A2||_F = sqrt(2) while ||L1 - L2||_F = 2.
    const Graph a1 = graph_from({{0, 1}, {1, 0}});
    const Graph a2(Matrix::Zero(2, 2));
    EXPECT_DOUBLE_EQ((a1.adjacency() - a2.adjacency()).norm(), std::sqrt(2.0));
    EXPECT_DOUBLE_EQ((gs::to_laplacian(a1) - gs::to_laplacian(a2)).norm(), 2.0);
}

TEST(LaplacianTest, Errors) {
    EXPECT_THROW(gs::to_laplacian(graph_from({{0, -1}, {-1, 0}})), gs::ValidationError);
    Matrix directed = Matrix::Zero(2, 2);
    directed(0, 1) = 1.0;
    EXPECT_THROW(gs::to_laplacian(Graph(directed, true)), gs::ValidationError);
    Matrix asym(2, 2);
    asym << 1, -1, -0.5, 0.5;
    EXPECT_THROW(gs::from_laplacian(asym), gs::ValidationError);
    Matrix bad_rows(2, 2);
    bad_rows << 2, -1, -1, 1;
    EXPECT_THROW(gs::from_laplacian(bad_rows), gs::ValidationError);
}
