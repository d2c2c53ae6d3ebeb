#pragma once

#include <cstddef>
#include <string_view>
#include <vector>

#include "pgdsdn/filter.hpp"
#include "pgdsdn/spectral.hpp"

namespace pgdsdn {

enum class DiagonalKind { pgda, spgda, degree, imia };

std::string_view to_string(DiagonalKind kind);
DiagonalKind parse_diagonal_kind(std::string_view text);

/// Positive per-vertex diagonal, tagged with how it was built.
struct DiagonalPreconditioner {
    GraphPtr graph;
    std::vector<double> diag;
    DiagonalKind kind = DiagonalKind::pgda;
    /// Geodesic-width of the filter the diagonal was built from.
    unsigned source_width = 0;

    std::size_t size() const noexcept { return diag.size(); }
    double operator[](std::size_t i) const { return diag[i]; }
};

/// P_H(i,i) = max over k in B(i, w) of d(k), where
/// d(k) = max(sum_j |H(k,j)|, sum_j |H(j,k)|).
DiagonalPreconditioner build_pgda_preconditioner(const GraphFilter& h);

/// P_sym(i,i) = sum_j |H(i,j)|. Rejects filters that are not symmetric
/// within `symmetry_tol`, naming the worst pair.
DiagonalPreconditioner build_spgda_preconditioner(const GraphFilter& h,
                                                  double symmetry_tol = 1e-12);

/// Per-vertex d(i) = max(absolute row sum, absolute column sum); the local
/// quantity exchanged by the distributed preconditioner.
std::vector<double> local_dominance(const GraphFilter& h);

/// H(i,j) / sqrt(P(i,i) P(j,j)).
GraphFilter normalized_filter(const GraphFilter& h, const DiagonalPreconditioner& p);

enum class DominanceMode {
    pgda,        ///< P^2 - H^T H is positive semidefinite
    spgda,       ///< P_sym - H is positive semidefinite
    diag_chain,  ///< P_sym(i,i) <= P_H(i,i)
    schur,       ///< P_H(i,i) <= Schur norm of H
};

struct DominanceResult {
    /// Smallest eigenvalue of the difference, or smallest entrywise gap.
    double min_value = 0.0;
    bool pass = false;
    bool converged = true;
    std::size_t iterations = 0;
};

inline constexpr double kDominanceTolerance = -1e-10;

/// Checks one of the dominance relations between a filter and a diagonal.
/// diag_chain and schur expect `p` of kind pgda.
DominanceResult check_dominance(const GraphFilter& h, const DiagonalPreconditioner& p,
                                DominanceMode mode, const PowerOptions& opts = {});

}  // namespace pgdsdn
