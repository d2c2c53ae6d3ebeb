#include <cmath>
#include <numbers>

#include <gtest/gtest.h>

#include "pgdsdn/error.hpp"
#include "pgdsdn/graph.hpp"
#include "pgdsdn/laplacian.hpp"
#include "pgdsdn/spectral.hpp"
#include "test_support.hpp"

using namespace pgdsdn;
using namespace pgdsdn::testing;

TEST(Geodesic, PathGraph) {
    auto g = path_graph(3);
    EXPECT_EQ(geodesic_distance(*g, 0, 2), 2u);
    EXPECT_EQ(geodesic_distance(*g, 0, 1), 1u);
    for (Vertex i = 0; i < 3; ++i) EXPECT_EQ(geodesic_distance(*g, i, i), 0u);
}

TEST(Geodesic, InvalidVertexThrows) {
    auto g = path_graph(3);
    EXPECT_THROW(geodesic_distance(*g, 0, 3), ArgumentError);
    EXPECT_THROW(ball(*g, 7, 1), ArgumentError);
}

TEST(Geodesic, SymmetricAndTriangle) {
    Rng rng(11);
    for (int rep = 0; rep < 5; ++rep) {
        auto g = random_connected_graph(30, rng);
        for (Vertex i = 0; i < 30; ++i) {
            for (Vertex j = 0; j < 30; ++j) {
                const auto dij = *geodesic_distance(*g, i, j);
                EXPECT_EQ(dij, *geodesic_distance(*g, j, i));
                const auto k = static_cast<Vertex>(rng.next_u64() % 30);
                EXPECT_LE(dij, *geodesic_distance(*g, i, k) + *geodesic_distance(*g, k, j));
            }
        }
    }
}

TEST(Ball, Examples) {
    auto g = path_graph(3);
    EXPECT_EQ(ball(*g, 0, 1).members, (std::vector<Vertex>{0, 1}));
    EXPECT_EQ(ball(*g, 1, 1).members, (std::vector<Vertex>{0, 1, 2}));
    for (Vertex i = 0; i < 3; ++i) EXPECT_EQ(ball(*g, i, 0).members, std::vector<Vertex>{i});
}

TEST(Ball, MatchesBruteForce) {
    Rng rng(5);
    for (std::size_t n : {2u, 7u, 20u, 50u}) {
        auto g = random_connected_graph(n, rng);
        for (unsigned s = 0; s <= 4; ++s) {
            for (Vertex i = 0; i < n; ++i) {
                std::vector<Vertex> expect;
                for (Vertex j = 0; j < n; ++j) {
                    if (*geodesic_distance(*g, i, j) <= s) expect.push_back(j);
                }
                const auto b = ball(*g, i, s);
                EXPECT_EQ(b.members, expect);
                EXPECT_TRUE(b.contains(i));
                if (s > 0) {
                    for (Vertex v : ball(*g, i, s - 1).members) EXPECT_TRUE(b.contains(v));
                }
            }
        }
    }
}

TEST(GraphBuild, RejectsBadEdges) {
    std::vector<Edge> loop{{0, 0}, {0, 1}};
    EXPECT_THROW(Graph::from_edges(2, loop), ArgumentError);
    std::vector<Edge> dup{{0, 1}, {1, 0}};
    EXPECT_THROW(Graph::from_edges(2, dup), ArgumentError);
    std::vector<Edge> out_of_range{{0, 5}};
    EXPECT_THROW(Graph::from_edges(2, out_of_range), ArgumentError);
    std::vector<Edge> split{{0, 1}, {2, 3}};
    EXPECT_THROW(Graph::from_edges(4, split), ArgumentError);
}

TEST(GraphBuild, NeighborsSortedAndSymmetric) {
    Rng rng(3);
    auto g = random_connected_graph(40, rng);
    for (Vertex i = 0; i < 40; ++i) {
        auto nb = g->neighbors(i);
        EXPECT_TRUE(std::is_sorted(nb.begin(), nb.end()));
        for (Vertex j : nb) {
            EXPECT_NE(i, j);
            auto back = g->neighbors(j);
            EXPECT_TRUE(std::binary_search(back.begin(), back.end(), i));
        }
    }
}

TEST(Rgg, DeterministicAndMeanDegree) {
    const std::size_t n = 512;
    const double r = std::sqrt(2.0 / n);
    const Graph a = random_geometric_graph(n, r, 42, 4096);
    const Graph b = random_geometric_graph(n, r, 42, 4096);
    EXPECT_EQ(a.edges(), b.edges());
    EXPECT_EQ(a.accepted_seed(), b.accepted_seed());
    EXPECT_TRUE(is_connected(a));

    double total = 0.0;
    const int seeds = 5;
    for (int s = 0; s < seeds; ++s) {
        const Graph g = random_geometric_graph(n, r, 100 + s, 4096);
        total += 2.0 * static_cast<double>(g.edge_count()) / n;
    }
    EXPECT_NEAR(total / seeds, n * std::numbers::pi * r * r, 2.0);
}

TEST(Rgg, EdgesRespectRadius) {
    const Graph g = random_geometric_graph(200, 0.15, 9, 4096);
    auto pts = g.coordinates();
    for (Vertex i = 0; i < 200; ++i) {
        for (Vertex j = i + 1; j < 200; ++j) {
            const double d = std::hypot(pts[i].x - pts[j].x, pts[i].y - pts[j].y);
            const auto nb = g.neighbors(i);
            EXPECT_EQ(std::binary_search(nb.begin(), nb.end(), j), d <= 0.15);
        }
    }
}

TEST(Rgg, TwoVerticesLargeRadius) {
    const Graph g = random_geometric_graph(2, 2.0, 1);
    EXPECT_EQ(g.edges(), (std::vector<Edge>{{0, 1}}));
}

TEST(Rgg, AdjacencyWidthIsOne) {
    auto g = std::make_shared<const Graph>(random_geometric_graph(512, std::sqrt(2.0 / 512), 7, 4096));
    EXPECT_EQ(GraphFilter::adjacency(g).width(), 1u);
}

TEST(Rgg, ExhaustedBudgetThrows) {
    try {
        random_geometric_graph(100, 0.01, 1, 3);
        FAIL() << "expected GenerationError";
    } catch (const GenerationError& e) {
        EXPECT_EQ(e.attempts(), 3u);
    }
}

TEST(Knn, Collinear) {
    std::vector<Point> pts{{0, 0}, {1, 0}, {3, 0}};
    EXPECT_EQ(knn_graph(pts, 1).edges(), (std::vector<Edge>{{0, 1}, {1, 2}}));
}

TEST(Knn, CompleteWhenKIsNMinusOne) {
    Rng rng(2);
    std::vector<Point> pts(6);
    for (auto& p : pts) p = {rng.uniform(), rng.uniform()};
    EXPECT_EQ(knn_graph(pts, 5).edge_count(), 15u);
}

TEST(Knn, SquareCorners) {
    std::vector<Point> pts{{0, 0}, {1, 0}, {1, 1}, {0, 1}};
    EXPECT_EQ(knn_graph(pts, 2).edges(), (std::vector<Edge>{{0, 1}, {0, 3}, {1, 2}, {2, 3}}));
}

TEST(Knn, TooFewPoints) {
    std::vector<Point> pts{{0, 0}, {1, 0}};
    EXPECT_THROW(knn_graph(pts, 2), ArgumentError);
}

TEST(Laplacian, PathGraph) {
    auto g = path_graph(3);
    const auto l = laplacians(g);
    Eigen::MatrixXd expect(3, 3);
    expect << 1, -1, 0, -1, 2, -1, 0, -1, 1;
    EXPECT_EQ(l.combinatorial.to_dense(), expect);
    EXPECT_EQ(l.combinatorial.width(), 1u);
    EXPECT_EQ(l.normalized.width(), 1u);
    const auto y = apply(l.combinatorial, Signal(g, {1, 1, 1}));
    for (double v : y.values()) EXPECT_EQ(v, 0.0);
}

TEST(Laplacian, SingleEdgeNormalizedEqualsCombinatorial) {
    const auto l = laplacians(single_edge());
    EXPECT_EQ(l.normalized.to_dense(), l.combinatorial.to_dense());
}

TEST(Laplacian, RowSumsAndSpectrum) {
    Rng rng(8);
    for (int rep = 0; rep < 5; ++rep) {
        auto g = random_connected_graph(40, rng);
        const auto l = laplacians(g);
        for (Vertex i = 0; i < 40; ++i) {
            double s = 0.0;
            for (const auto& e : l.combinatorial.row(i)) s += e.value;
            EXPECT_EQ(s, 0.0);
        }
        EXPECT_FALSE(l.normalized.asymmetry(0.0).has_value());
        const auto est = power_spectral_radius(as_operator(l.normalized));
        EXPECT_LE(est.value, 2.0 + 1e-12);
    }
}
