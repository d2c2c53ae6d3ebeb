#pragma once

#include <cstddef>
#include <optional>
#include <string_view>
#include <vector>

#include "pgdsdn/filter.hpp"
#include "pgdsdn/preconditioner.hpp"
#include "pgdsdn/spectral.hpp"

namespace pgdsdn {

enum class Method { pgda, spgda, opgd, imia };

inline constexpr Method kAllMethods[] = {Method::pgda, Method::spgda, Method::opgd, Method::imia};

std::string_view to_string(Method m);
Method parse_method(std::string_view text);

/// Everything a method needs besides the filter: the diagonal (P_H, P_sym,
/// or D~) or the constant step length.
struct MethodParams {
    Method method = Method::pgda;
    std::vector<double> diagonal;
    double step = 0.0;
};

MethodParams method_params(const GraphFilter& h, Method method, const PowerOptions& opts = {});

/// beta = 2 / (sigma_max^2 + sigma_min^2).
double optimal_step(const GraphFilter& h, const PowerOptions& opts = {});

/// D~(i,i) = H(i,i) / sum_{j in B(i, w)} H(i,j)^2.
DiagonalPreconditioner imia_diagonal(const GraphFilter& h);

/// Error-propagation operator of a method:
///   pgda  I - P^{-1} H^T H P^{-1}
///   spgda I - P_sym^{-1/2} H P_sym^{-1/2}
///   opgd  I - beta H^T H
///   imia  I - D~ H
/// The returned operator keeps references to `h`.
LinearOperator iteration_matrix(const GraphFilter& h, const MethodParams& params);

/// Dense LU solve with partial pivoting; throws NumericError on a singular
/// pivot or when |Hx - y| > 1e-8 |y|.
Signal direct_solve_oracle(const GraphFilter& h, const Signal& y);

struct SolverConfig {
    Method method = Method::pgda;
    std::size_t max_iter = 200;
    /// Stop once |Hx - y| <= residual_tol * |y|; 0 disables.
    double residual_tol = 0.0;
    /// Abort once the residual exceeds this multiple of the initial one.
    double divergence_factor = 1e6;
    std::optional<std::vector<double>> initial;
    /// Precomputed parameters; derived from the filter when absent.
    std::optional<MethodParams> params;
    bool keep_iterates = false;
};

enum class SolveStatus { converged, max_iter, diverged };
std::string_view to_string(SolveStatus s);

inline constexpr double kSnrCapDb = 300.0;

struct IterationRecord {
    std::size_t m = 0;
    double residual = 0.0;
    /// NaN when no reference solution was supplied.
    double rel_error = 0.0;
    double weighted_error = 0.0;
    double snr = 0.0;
};

struct SolveTrace {
    Method method = Method::pgda;
    std::vector<IterationRecord> records;
    SolveStatus status = SolveStatus::max_iter;
    /// Geometric mean of successive weighted-error ratios (residual ratios
    /// without a reference).
    double estimated_rate = 0.0;
};

struct SolveResult {
    Signal x;
    SolveTrace trace;
    /// x^(0..m) when SolverConfig::keep_iterates is set.
    std::vector<std::vector<double>> iterates;
};

SolveResult solve(const GraphFilter& h, const Signal& y, const SolverConfig& cfg,
                  const Signal* reference = nullptr);

/// Per-vertex weights of the norm the convergence envelope is stated in.
std::vector<double> error_weights(const MethodParams& params);

}  // namespace pgdsdn
