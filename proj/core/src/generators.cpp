#include <algorithm>
#include <numeric>
#include <string>

#include "pgdsdn/error.hpp"
#include "pgdsdn/graph.hpp"
#include "pgdsdn/random.hpp"

namespace pgdsdn {
namespace {

double squared_distance(const Point& a, const Point& b) {
    const double dx = a.x - b.x;
    const double dy = a.y - b.y;
    return dx * dx + dy * dy;
}

bool edges_connect(std::size_t n, std::span<const Edge> edges) {
    std::vector<std::size_t> parent(n);
    std::iota(parent.begin(), parent.end(), std::size_t{0});
    auto find = [&](std::size_t v) {
        while (parent[v] != v) v = parent[v] = parent[parent[v]];
        return v;
    };
    std::size_t components = n;
    for (const auto& [a, b] : edges) {
        const auto ra = find(a);
        const auto rb = find(b);
        if (ra != rb) {
            parent[ra] = rb;
            --components;
        }
    }
    return components == 1;
}

}  // namespace

Graph random_geometric_graph(std::size_t n, double radius, std::uint64_t seed,
                             std::size_t max_attempts) {
    if (n < 2) throw ArgumentError("random geometric graph needs n >= 2");
    if (!(radius > 0.0)) throw ArgumentError("random geometric graph needs radius > 0");

    const double r2 = radius * radius;
    for (std::size_t attempt = 0; attempt < max_attempts; ++attempt) {
        const std::uint64_t sub_seed = derive_seed(seed, attempt, "rgg");
        Rng rng(sub_seed);
        std::vector<Point> points(n);
        for (auto& p : points) {
            p.x = rng.uniform();
            p.y = rng.uniform();
        }
        std::vector<Edge> edges;
        for (Vertex i = 0; i < n; ++i) {
            for (Vertex j = i + 1; j < n; ++j) {
                if (squared_distance(points[i], points[j]) <= r2) edges.emplace_back(i, j);
            }
        }
        if (!edges_connect(n, edges)) continue;
        Graph g = Graph::from_edges(n, edges, std::move(points));
        g.set_accepted_seed(sub_seed);
        return g;
    }
    throw GenerationError("random geometric graph stayed disconnected after " +
                              std::to_string(max_attempts) + " attempts (n=" + std::to_string(n) +
                              ", radius=" + std::to_string(radius) + ")",
                          max_attempts);
}

Graph knn_graph(std::span<const Point> points, std::size_t k) {
    const std::size_t n = points.size();
    if (k < 1) throw ArgumentError("k-NN graph needs k >= 1");
    if (n < k + 1) {
        throw ArgumentError("k-NN graph with k=" + std::to_string(k) + " needs at least " +
                            std::to_string(k + 1) + " points, got " + std::to_string(n));
    }

    std::vector<Edge> edges;
    std::vector<Vertex> order(n);
    for (Vertex i = 0; i < n; ++i) {
        std::iota(order.begin(), order.end(), Vertex{0});
        std::partial_sort(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(k + 1),
                          order.end(), [&](Vertex a, Vertex b) {
                              if (a == i || b == i) return a == i && b != i;
                              const double da = squared_distance(points[i], points[a]);
                              const double db = squared_distance(points[i], points[b]);
                              return da < db || (da == db && a < b);
                          });
        // order[0] is i itself.
        for (std::size_t r = 1; r <= k; ++r) {
            const Vertex j = order[r];
            edges.emplace_back(std::min(i, j), std::max(i, j));
        }
    }
    std::sort(edges.begin(), edges.end());
    edges.erase(std::unique(edges.begin(), edges.end()), edges.end());

    if (!edges_connect(n, edges)) {
        throw GenerationError("k-NN graph with k=" + std::to_string(k) + " is disconnected", 1);
    }
    return Graph::from_edges(n, edges, std::vector<Point>(points.begin(), points.end()));
}

}  // namespace pgdsdn
