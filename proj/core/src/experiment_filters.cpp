#include <cmath>
#include <map>

#include "pgdsdn/error.hpp"
#include "pgdsdn/filter.hpp"
#include "pgdsdn/laplacian.hpp"
#include "pgdsdn/random.hpp"

namespace pgdsdn {

GraphFilter build_experiment_filter_fig1(const GraphPtr& g, double gamma, std::uint64_t seed) {
    if (!g->has_coordinates()) throw ArgumentError("experiment filter needs vertex coordinates");
    if (!(gamma >= 0.0)) throw ArgumentError("gamma must be non-negative");

    const std::size_t n = g->size();
    const double scale = 2.0 * static_cast<double>(n);
    const auto balls = all_balls(*g, 2);

    // One draw per ordered pair, in (row, col) ascending order.
    Rng rng(seed);
    std::map<std::pair<Vertex, Vertex>, double> noise;
    for (Vertex i = 0; i < n; ++i) {
        for (Vertex j : balls[i].members) noise[{i, j}] = gamma > 0.0 ? rng.uniform(-gamma, gamma) : 0.0;
    }

    std::vector<Triplet> t;
    for (Vertex i = 0; i < n; ++i) {
        const Point& pi = g->coordinate(i);
        for (Vertex j : balls[i].members) {
            const Point& pj = g->coordinate(j);
            const double dx = pi.x - pj.x;
            const double dy = pi.y - pj.y;
            const double sx = pi.x + pj.x;
            const double sy = pi.y + pj.y;
            const double kernel = std::exp(-scale * (dx * dx + dy * dy) - (sx * sx + sy * sy) / 2.0);
            t.push_back({i, j, kernel + (noise[{i, j}] + noise[{j, i}]) / 2.0});
        }
    }

    const auto lap = laplacians(g);
    const auto sq = compose(lap.normalized, lap.normalized);
    const auto sq_entries = sq.triplets();
    t.insert(t.end(), sq_entries.begin(), sq_entries.end());
    return GraphFilter::from_triplets(g, std::move(t));
}

GraphFilter build_denoise_filter(const GraphPtr& g, double alpha) {
    if (!(alpha >= 0.0)) throw ArgumentError("alpha must be non-negative");
    const auto identity = GraphFilter::identity(g);
    if (alpha == 0.0) return identity;
    return add(identity, laplacians(g).normalized.scaled(alpha));
}

}  // namespace pgdsdn
