#pragma once

#include <cstddef>
#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <utility>
#include <vector>

namespace pgdsdn {

using Vertex = std::uint32_t;
using Edge = std::pair<Vertex, Vertex>;

struct Point {
    double x = 0.0;
    double y = 0.0;
};

/// Vertices within `radius` hops of `center`, sorted ascending.
struct HopNeighborhood {
    Vertex center = 0;
    unsigned radius = 0;
    std::vector<Vertex> members;

    bool contains(Vertex v) const;
};

/// Connected, undirected, unweighted graph in CSR form.
///
/// Immutable after construction; shared between filters, signals and the
/// network simulator through std::shared_ptr<const Graph>.
class Graph {
public:
    /// Builds and validates a graph from an edge list.
    ///
    /// Edges may be listed in either orientation; duplicates of the same
    /// undirected edge are an error, as are self-loops and out-of-range ids.
    /// The graph must be connected.
    static Graph from_edges(std::size_t n, std::span<const Edge> edges,
                            std::optional<std::vector<Point>> coordinates = std::nullopt);

    std::size_t size() const noexcept { return offsets_.size() - 1; }
    std::size_t edge_count() const noexcept { return targets_.size() / 2; }
    std::size_t degree(Vertex v) const;
    std::span<const Vertex> neighbors(Vertex v) const;

    bool has_coordinates() const noexcept { return !coordinates_.empty(); }
    std::span<const Point> coordinates() const noexcept { return coordinates_; }
    const Point& coordinate(Vertex v) const;

    /// Seed the generator accepted after connectivity retries, if any.
    std::optional<std::uint64_t> accepted_seed() const noexcept { return accepted_seed_; }
    void set_accepted_seed(std::uint64_t seed) noexcept { accepted_seed_ = seed; }

    /// Edges (i, j) with i < j in ascending order.
    std::vector<Edge> edges() const;

    void check_vertex(Vertex v) const;

private:
    Graph() = default;

    std::vector<std::size_t> offsets_{0};
    std::vector<Vertex> targets_;
    std::vector<Point> coordinates_;
    std::optional<std::uint64_t> accepted_seed_;
};

using GraphPtr = std::shared_ptr<const Graph>;

/// Number of edges on a shortest path; nullopt if unreachable.
std::optional<unsigned> geodesic_distance(const Graph& g, Vertex i, Vertex j);

/// The s-hop ball B(i, s). BFS frontier is expanded in ascending id order.
HopNeighborhood ball(const Graph& g, Vertex i, unsigned s);

/// B(i, s) for every vertex, indexed by center.
std::vector<HopNeighborhood> all_balls(const Graph& g, unsigned s);

/// Hop distances from `source` to every vertex reached within `max_depth`
/// hops; unreachable or farther vertices hold -1.
std::vector<int> hop_distances(const Graph& g, Vertex source, int max_depth = -1);

bool is_connected(const Graph& g);

/// n uniform points on [0,1]^2, edge iff Euclidean distance <= radius.
///
/// Retries with derived sub-seeds until the graph is connected. Throws
/// GenerationError after `max_attempts` disconnected samples.
Graph random_geometric_graph(std::size_t n, double radius, std::uint64_t seed,
                             std::size_t max_attempts = 64);

/// Union-symmetrized k-nearest-neighbor graph over 2-D points. Distance ties
/// are broken by lower vertex id. Throws GenerationError if the result is
/// disconnected.
Graph knn_graph(std::span<const Point> points, std::size_t k);

}  // namespace pgdsdn
