#include "pgdsdn/graph.hpp"

#include <algorithm>
#include <string>

#include "pgdsdn/error.hpp"

namespace pgdsdn {

bool HopNeighborhood::contains(Vertex v) const {
    return std::binary_search(members.begin(), members.end(), v);
}

Graph Graph::from_edges(std::size_t n, std::span<const Edge> edges,
                        std::optional<std::vector<Point>> coordinates) {
    if (n == 0) throw ArgumentError("graph must have at least one vertex");
    if (coordinates && coordinates->size() != n) {
        throw ArgumentError("coordinate count " + std::to_string(coordinates->size()) +
                            " does not match vertex count " + std::to_string(n));
    }

    std::vector<std::vector<Vertex>> adjacency(n);
    for (const auto& [a, b] : edges) {
        if (a >= n || b >= n) {
            throw ArgumentError("edge (" + std::to_string(a) + ", " + std::to_string(b) +
                                ") references a vertex outside 0.." + std::to_string(n - 1));
        }
        if (a == b) throw ArgumentError("self-loop at vertex " + std::to_string(a));
        adjacency[a].push_back(b);
        adjacency[b].push_back(a);
    }

    Graph g;
    g.offsets_.assign(n + 1, 0);
    for (std::size_t v = 0; v < n; ++v) {
        auto& nb = adjacency[v];
        std::sort(nb.begin(), nb.end());
        if (std::adjacent_find(nb.begin(), nb.end()) != nb.end()) {
            throw ArgumentError("duplicate edge at vertex " + std::to_string(v));
        }
        g.offsets_[v + 1] = g.offsets_[v] + nb.size();
    }
    g.targets_.reserve(g.offsets_[n]);
    for (const auto& nb : adjacency) g.targets_.insert(g.targets_.end(), nb.begin(), nb.end());
    if (coordinates) g.coordinates_ = std::move(*coordinates);

    if (!is_connected(g)) throw ArgumentError("graph is not connected");
    return g;
}

void Graph::check_vertex(Vertex v) const {
    if (v >= size()) {
        throw ArgumentError("vertex " + std::to_string(v) + " out of range for graph of " +
                            std::to_string(size()) + " vertices");
    }
}

std::size_t Graph::degree(Vertex v) const {
    check_vertex(v);
    return offsets_[v + 1] - offsets_[v];
}

std::span<const Vertex> Graph::neighbors(Vertex v) const {
    check_vertex(v);
    return {targets_.data() + offsets_[v], offsets_[v + 1] - offsets_[v]};
}

const Point& Graph::coordinate(Vertex v) const {
    check_vertex(v);
    if (!has_coordinates()) throw ArgumentError("graph has no coordinates");
    return coordinates_[v];
}

std::vector<Edge> Graph::edges() const {
    std::vector<Edge> out;
    out.reserve(edge_count());
    for (Vertex i = 0; i < size(); ++i) {
        for (Vertex j : neighbors(i)) {
            if (i < j) out.emplace_back(i, j);
        }
    }
    return out;
}

std::vector<int> hop_distances(const Graph& g, Vertex source, int max_depth) {
    g.check_vertex(source);
    std::vector<int> dist(g.size(), -1);
    std::vector<Vertex> frontier{source};
    std::vector<Vertex> next;
    dist[source] = 0;
    for (int depth = 0; !frontier.empty() && (max_depth < 0 || depth < max_depth); ++depth) {
        next.clear();
        for (Vertex u : frontier) {
            for (Vertex w : g.neighbors(u)) {
                if (dist[w] < 0) {
                    dist[w] = depth + 1;
                    next.push_back(w);
                }
            }
        }
        std::sort(next.begin(), next.end());
        frontier.swap(next);
    }
    return dist;
}

std::optional<unsigned> geodesic_distance(const Graph& g, Vertex i, Vertex j) {
    g.check_vertex(i);
    g.check_vertex(j);
    if (i == j) return 0U;
    std::vector<char> seen(g.size(), 0);
    std::vector<Vertex> frontier{i};
    std::vector<Vertex> next;
    seen[i] = 1;
    for (unsigned depth = 1; !frontier.empty(); ++depth) {
        next.clear();
        for (Vertex u : frontier) {
            for (Vertex w : g.neighbors(u)) {
                if (w == j) return depth;
                if (!seen[w]) {
                    seen[w] = 1;
                    next.push_back(w);
                }
            }
        }
        frontier.swap(next);
    }
    return std::nullopt;
}

HopNeighborhood ball(const Graph& g, Vertex i, unsigned s) {
    const auto dist = hop_distances(g, i, static_cast<int>(s));
    HopNeighborhood hood{i, s, {}};
    for (Vertex v = 0; v < g.size(); ++v) {
        if (dist[v] >= 0) hood.members.push_back(v);
    }
    return hood;
}

std::vector<HopNeighborhood> all_balls(const Graph& g, unsigned s) {
    std::vector<HopNeighborhood> out;
    out.reserve(g.size());
    for (Vertex i = 0; i < g.size(); ++i) out.push_back(ball(g, i, s));
    return out;
}

bool is_connected(const Graph& g) {
    const auto dist = hop_distances(g, 0);
    return std::none_of(dist.begin(), dist.end(), [](int d) { return d < 0; });
}

}  // namespace pgdsdn
