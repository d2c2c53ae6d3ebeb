#include "pgdsdn/preconditioner.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "pgdsdn/error.hpp"

namespace pgdsdn {
namespace {

std::vector<double> absolute_row_sums(const GraphFilter& h) {
    std::vector<double> sums(h.size(), 0.0);
    for (Vertex i = 0; i < h.size(); ++i) {
        double s = 0.0;
        for (const auto& e : h.row(i)) s += std::abs(e.value);
        sums[i] = s;
    }
    return sums;
}

void require_matching(const GraphFilter& h, const DiagonalPreconditioner& p) {
    if (p.graph.get() != &h.graph() || p.size() != h.size()) {
        throw ArgumentError("preconditioner was not built for this filter's graph");
    }
}

}  // namespace

std::string_view to_string(DiagonalKind kind) {
    switch (kind) {
        case DiagonalKind::pgda: return "pgda";
        case DiagonalKind::spgda: return "spgda";
        case DiagonalKind::degree: return "degree";
        case DiagonalKind::imia: return "imia";
    }
    return "unknown";
}

DiagonalKind parse_diagonal_kind(std::string_view text) {
    if (text == "pgda") return DiagonalKind::pgda;
    if (text == "spgda") return DiagonalKind::spgda;
    if (text == "degree") return DiagonalKind::degree;
    if (text == "imia") return DiagonalKind::imia;
    throw ArgumentError("unknown diagonal kind '" + std::string(text) + "'");
}

std::vector<double> local_dominance(const GraphFilter& h) {
    const auto rows = absolute_row_sums(h);
    const auto cols = absolute_row_sums(h.transposed());
    std::vector<double> d(h.size());
    for (std::size_t i = 0; i < d.size(); ++i) d[i] = std::max(rows[i], cols[i]);
    return d;
}

DiagonalPreconditioner build_pgda_preconditioner(const GraphFilter& h) {
    if (h.nonzeros() == 0) throw ArgumentError("preconditioner of the zero filter is singular");
    const auto d = local_dominance(h);
    const auto balls = all_balls(h.graph(), h.width());
    std::vector<double> diag(h.size());
    for (Vertex i = 0; i < h.size(); ++i) {
        double best = 0.0;
        for (Vertex k : balls[i].members) best = std::max(best, d[k]);
        diag[i] = best;
    }
    return {h.graph_ptr(), std::move(diag), DiagonalKind::pgda, h.width()};
}

DiagonalPreconditioner build_spgda_preconditioner(const GraphFilter& h, double symmetry_tol) {
    if (auto bad = h.asymmetry(symmetry_tol)) {
        throw ArgumentError("filter is not symmetric: |H(" + std::to_string(bad->row) + "," +
                            std::to_string(bad->col) + ") - H(" + std::to_string(bad->col) + "," +
                            std::to_string(bad->row) + ")| = " + std::to_string(bad->gap));
    }
    auto diag = absolute_row_sums(h);
    for (std::size_t i = 0; i < diag.size(); ++i) {
        if (diag[i] == 0.0) throw ArgumentError("row " + std::to_string(i) + " of the filter is zero");
    }
    return {h.graph_ptr(), std::move(diag), DiagonalKind::spgda, h.width()};
}

GraphFilter normalized_filter(const GraphFilter& h, const DiagonalPreconditioner& p) {
    require_matching(h, p);
    std::vector<Triplet> t;
    t.reserve(h.nonzeros());
    for (Vertex i = 0; i < h.size(); ++i) {
        for (const auto& e : h.row(i)) {
            t.push_back({i, e.col, e.value / std::sqrt(p[i] * p[e.col])});
        }
    }
    return GraphFilter::from_triplets(h.graph_ptr(), std::move(t));
}

DominanceResult check_dominance(const GraphFilter& h, const DiagonalPreconditioner& p,
                                DominanceMode mode, const PowerOptions& opts) {
    require_matching(h, p);
    const std::size_t n = h.size();
    DominanceResult result;

    switch (mode) {
        case DominanceMode::pgda: {
            const GraphFilter ht = h.transposed();
            std::vector<double> tmp(n);
            double bound = 0.0;
            for (double v : p.diag) bound = std::max(bound, v * v);
            // lambda(P^2 - H^T H) <= max P^2 since H^T H is semidefinite.
            LinearOperator diff{n, [&](std::span<const double> in, std::span<double> out) {
                                    h.apply(in, tmp);
                                    ht.apply(tmp, out);
                                    for (std::size_t i = 0; i < n; ++i) {
                                        out[i] = p[i] * p[i] * in[i] - out[i];
                                    }
                                }};
            const auto est = smallest_eigenvalue_symmetric(diff, bound, opts);
            result = {est.value, false, est.converged, est.iterations};
            break;
        }
        case DominanceMode::spgda: {
            if (auto bad = h.asymmetry(1e-12)) {
                throw ArgumentError("spgda dominance needs a symmetric filter (worst pair " +
                                    std::to_string(bad->row) + "," + std::to_string(bad->col) + ")");
            }
            double bound = schur_norm(h);
            bound += *std::max_element(p.diag.begin(), p.diag.end());
            LinearOperator diff{n, [&](std::span<const double> in, std::span<double> out) {
                                    h.apply(in, out);
                                    for (std::size_t i = 0; i < n; ++i) out[i] = p[i] * in[i] - out[i];
                                }};
            const auto est = smallest_eigenvalue_symmetric(diff, bound, opts);
            result = {est.value, false, est.converged, est.iterations};
            break;
        }
        case DominanceMode::diag_chain: {
            const auto sym = absolute_row_sums(h);
            double gap = std::numeric_limits<double>::infinity();
            for (std::size_t i = 0; i < n; ++i) gap = std::min(gap, p[i] - sym[i]);
            result.min_value = gap;
            break;
        }
        case DominanceMode::schur: {
            const double s = schur_norm(h);
            double gap = std::numeric_limits<double>::infinity();
            for (std::size_t i = 0; i < n; ++i) gap = std::min(gap, s - p[i]);
            result.min_value = gap;
            break;
        }
    }
    result.pass = result.converged && result.min_value >= kDominanceTolerance;
    return result;
}

}  // namespace pgdsdn
