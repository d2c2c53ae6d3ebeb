#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>

#include "pgdsdn/filter.hpp"

namespace pgdsdn {

/// Square linear map out = A in, evaluated without materializing A.
struct LinearOperator {
    std::size_t dim = 0;
    std::function<void(std::span<const double>, std::span<double>)> apply;
};

LinearOperator as_operator(const GraphFilter& h);

struct PowerOptions {
    double tol = 1e-12;
    std::size_t max_iter = 100000;
    std::uint64_t seed = 0x5eed;
};

struct SpectralEstimate {
    double value = 0.0;
    std::size_t iterations = 0;
    bool converged = false;
};

/// Largest |eigenvalue| of an operator similar to a symmetric matrix.
///
/// Each step maps v to A(Av) and reads off sqrt(|A^2 v|) for unit v, which
/// also converges when both +r and -r are eigenvalues. Iteration stops
/// when two successive estimates differ by less than tol * max(1, estimate).
SpectralEstimate power_spectral_radius(const LinearOperator& op, const PowerOptions& opts = {});

/// Largest eigenvalue of a symmetric positive semidefinite operator, using
/// the Rayleigh quotient of the power iterate.
SpectralEstimate largest_eigenvalue_psd(const LinearOperator& op, const PowerOptions& opts = {});

/// Smallest eigenvalue of a symmetric operator whose spectrum lies below
/// `upper_bound`, via the largest eigenvalue of upper_bound*I - A.
SpectralEstimate smallest_eigenvalue_symmetric(const LinearOperator& op, double upper_bound,
                                               const PowerOptions& opts = {});

struct SingularValueEstimate {
    double sigma_max = 0.0;
    double sigma_min = 0.0;
    std::size_t iterations = 0;
    bool converged = false;

    double condition_number() const { return sigma_max / sigma_min; }
};

/// sigma_max^2 = lambda_max(H^T H); sigma_min^2 = sigma_max^2 -
/// lambda_max(sigma_max^2 I - H^T H). Inverse-free.
SingularValueEstimate extreme_singular_values(const GraphFilter& h, const PowerOptions& opts = {});

}  // namespace pgdsdn
