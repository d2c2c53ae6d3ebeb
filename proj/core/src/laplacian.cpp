#include "pgdsdn/laplacian.hpp"

#include <cmath>
#include <string>

#include "pgdsdn/error.hpp"

namespace pgdsdn {

Laplacians laplacians(const GraphPtr& g) {
    const std::size_t n = g->size();
    std::vector<double> degree(n);
    for (Vertex i = 0; i < n; ++i) {
        degree[i] = static_cast<double>(g->degree(i));
        if (degree[i] == 0.0) throw ArgumentError("isolated vertex " + std::to_string(i));
    }

    std::vector<Triplet> lap;
    std::vector<Triplet> sym;
    for (Vertex i = 0; i < n; ++i) {
        lap.push_back({i, i, degree[i]});
        sym.push_back({i, i, 1.0});
        for (Vertex j : g->neighbors(i)) {
            lap.push_back({i, j, -1.0});
            sym.push_back({i, j, -1.0 / std::sqrt(degree[i] * degree[j])});
        }
    }
    return Laplacians{
        GraphFilter::from_triplets(g, std::move(lap)),
        GraphFilter::from_triplets(g, std::move(sym)),
        DiagonalPreconditioner{g, std::move(degree), DiagonalKind::degree, 1},
    };
}

}  // namespace pgdsdn
