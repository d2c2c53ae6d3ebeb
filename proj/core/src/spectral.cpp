#include "pgdsdn/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include "pgdsdn/error.hpp"
#include "pgdsdn/random.hpp"

namespace pgdsdn {
namespace {

double norm2(std::span<const double> v) {
    double s = 0.0;
    for (double x : v) s += x * x;
    return std::sqrt(s);
}

double dot(std::span<const double> a, std::span<const double> b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

std::vector<double> start_vector(std::size_t n, std::uint64_t seed) {
    Rng rng(seed);
    std::vector<double> v(n);
    for (auto& x : v) x = rng.normal();
    const double nv = norm2(v);
    for (auto& x : v) x /= nv;
    return v;
}

bool close_enough(double prev, double cur, double tol) {
    return std::abs(cur - prev) < tol * std::max(1.0, std::abs(cur));
}

}  // namespace

LinearOperator as_operator(const GraphFilter& h) {
    return {h.size(), [&h](std::span<const double> in, std::span<double> out) { h.apply(in, out); }};
}

SpectralEstimate power_spectral_radius(const LinearOperator& op, const PowerOptions& opts) {
    const std::size_t n = op.dim;
    if (n == 0) return {0.0, 0, true};
    std::vector<double> tmp(n), w(n);

    for (int attempt = 0; attempt < 2; ++attempt) {
        auto v = start_vector(n, derive_seed(opts.seed, static_cast<std::uint64_t>(attempt), "power"));
        double prev = -1.0;
        for (std::size_t it = 1; it <= opts.max_iter; ++it) {
            op.apply(v, tmp);
            op.apply(tmp, w);
            const double nw = norm2(w);
            if (!std::isfinite(nw)) throw NumericError("power iteration produced non-finite values", it);
            if (nw == 0.0) {
                // Start vector in the kernel of A^2: retry once, then accept 0.
                if (it == 1 && attempt == 0) break;
                return {0.0, it, true};
            }
            const double est = std::sqrt(nw);
            for (std::size_t i = 0; i < n; ++i) v[i] = w[i] / nw;
            if (prev >= 0.0 && close_enough(prev, est, opts.tol)) return {est, it, true};
            prev = est;
            if (it == opts.max_iter) return {est, it, false};
        }
        if (attempt == 1) break;
    }
    return {0.0, 0, true};
}

SpectralEstimate largest_eigenvalue_psd(const LinearOperator& op, const PowerOptions& opts) {
    const std::size_t n = op.dim;
    if (n == 0) return {0.0, 0, true};
    std::vector<double> w(n);

    for (int attempt = 0; attempt < 2; ++attempt) {
        auto v = start_vector(n, derive_seed(opts.seed, static_cast<std::uint64_t>(attempt), "psd"));
        double prev = 0.0;
        bool have_prev = false;
        for (std::size_t it = 1; it <= opts.max_iter; ++it) {
            op.apply(v, w);
            const double rq = dot(v, w);
            const double nw = norm2(w);
            if (!std::isfinite(nw)) throw NumericError("power iteration produced non-finite values", it);
            if (nw == 0.0) {
                if (it == 1 && attempt == 0) break;
                return {0.0, it, true};
            }
            for (std::size_t i = 0; i < n; ++i) v[i] = w[i] / nw;
            if (have_prev && close_enough(prev, rq, opts.tol)) return {rq, it, true};
            prev = rq;
            have_prev = true;
            if (it == opts.max_iter) return {rq, it, false};
        }
        if (attempt == 1) break;
    }
    return {0.0, 0, true};
}

SpectralEstimate smallest_eigenvalue_symmetric(const LinearOperator& op, double upper_bound,
                                               const PowerOptions& opts) {
    const std::size_t n = op.dim;
    LinearOperator shifted{n, [&op, upper_bound, n](std::span<const double> in, std::span<double> out) {
                               op.apply(in, out);
                               for (std::size_t i = 0; i < n; ++i) out[i] = upper_bound * in[i] - out[i];
                           }};
    auto est = largest_eigenvalue_psd(shifted, opts);
    est.value = upper_bound - est.value;
    return est;
}

SingularValueEstimate extreme_singular_values(const GraphFilter& h, const PowerOptions& opts) {
    const std::size_t n = h.size();
    const GraphFilter ht = h.transposed();
    auto gram = std::make_shared<std::vector<double>>(n);
    LinearOperator normal{n, [&h, &ht, gram](std::span<const double> in, std::span<double> out) {
                              h.apply(in, *gram);
                              ht.apply(*gram, out);
                          }};

    const auto top = largest_eigenvalue_psd(normal, opts);
    const double shift = top.value;
    LinearOperator flipped{n, [&normal, shift, n](std::span<const double> in, std::span<double> out) {
                               normal.apply(in, out);
                               for (std::size_t i = 0; i < n; ++i) out[i] = shift * in[i] - out[i];
                           }};
    PowerOptions low = opts;
    low.seed = derive_seed(opts.seed, 1, "sigma_min");
    const auto bottom = largest_eigenvalue_psd(flipped, low);

    SingularValueEstimate out;
    out.sigma_max = std::sqrt(std::max(top.value, 0.0));
    out.sigma_min = std::sqrt(std::max(shift - bottom.value, 0.0));
    out.iterations = top.iterations + bottom.iterations;
    out.converged = top.converged && bottom.converged;
    return out;
}

}  // namespace pgdsdn
