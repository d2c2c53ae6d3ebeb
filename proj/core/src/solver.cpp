#include "pgdsdn/solver.hpp"

#include <cmath>
#include <limits>
#include <memory>
#include <string>

#include "pgdsdn/error.hpp"

namespace pgdsdn {
namespace {

double norm2(std::span<const double> v) {
    double s = 0.0;
    for (double x : v) s += x * x;
    return std::sqrt(s);
}

/// Row-compressed copy of a filter with every entry rescaled.
struct ScaledRows {
    std::vector<std::size_t> offsets;
    std::vector<Vertex> cols;
    std::vector<double> values;

    void apply(std::span<const double> x, std::span<double> y) const {
        for (std::size_t i = 0; i + 1 < offsets.size(); ++i) {
            double acc = 0.0;
            for (std::size_t k = offsets[i]; k < offsets[i + 1]; ++k) acc += values[k] * x[cols[k]];
            y[i] = acc;
        }
    }
};

template <class Scale>
ScaledRows scale_rows(const GraphFilter& h, Scale scale) {
    ScaledRows out;
    out.offsets.push_back(0);
    for (Vertex i = 0; i < h.size(); ++i) {
        for (const auto& e : h.row(i)) {
            out.cols.push_back(e.col);
            out.values.push_back(scale(i, e.value));
        }
        out.offsets.push_back(out.cols.size());
    }
    return out;
}

}  // namespace

std::string_view to_string(Method m) {
    switch (m) {
        case Method::pgda: return "pgda";
        case Method::spgda: return "spgda";
        case Method::opgd: return "opgd";
        case Method::imia: return "imia";
    }
    return "unknown";
}

Method parse_method(std::string_view text) {
    for (Method m : kAllMethods) {
        if (to_string(m) == text) return m;
    }
    throw ArgumentError("unknown method '" + std::string(text) + "'");
}

std::string_view to_string(SolveStatus s) {
    switch (s) {
        case SolveStatus::converged: return "converged";
        case SolveStatus::max_iter: return "max_iter";
        case SolveStatus::diverged: return "diverged";
    }
    return "unknown";
}

double optimal_step(const GraphFilter& h, const PowerOptions& opts) {
    const auto sv = extreme_singular_values(h, opts);
    if (!(sv.sigma_min > 1e-10 * sv.sigma_max)) {
        throw NumericError("filter is numerically singular (sigma_min=" + std::to_string(sv.sigma_min) +
                           ", sigma_max=" + std::to_string(sv.sigma_max) + ")");
    }
    return 2.0 / (sv.sigma_max * sv.sigma_max + sv.sigma_min * sv.sigma_min);
}

DiagonalPreconditioner imia_diagonal(const GraphFilter& h) {
    std::vector<double> diag(h.size());
    for (Vertex i = 0; i < h.size(); ++i) {
        const double hii = h.at(i, i);
        if (hii == 0.0) throw ArgumentError("IMIA needs a nonzero diagonal; H(" + std::to_string(i) + "," +
                                            std::to_string(i) + ") = 0");
        double sq = 0.0;
        for (const auto& e : h.row(i)) sq += e.value * e.value;
        diag[i] = hii / sq;
    }
    return {h.graph_ptr(), std::move(diag), DiagonalKind::imia, h.width()};
}

MethodParams method_params(const GraphFilter& h, Method method, const PowerOptions& opts) {
    MethodParams p;
    p.method = method;
    switch (method) {
        case Method::pgda: p.diagonal = build_pgda_preconditioner(h).diag; break;
        case Method::spgda: p.diagonal = build_spgda_preconditioner(h).diag; break;
        case Method::opgd: p.step = optimal_step(h, opts); break;
        case Method::imia: p.diagonal = imia_diagonal(h).diag; break;
    }
    return p;
}

std::vector<double> error_weights(const MethodParams& params) {
    switch (params.method) {
        case Method::pgda: return params.diagonal;
        case Method::spgda: {
            std::vector<double> w(params.diagonal.size());
            for (std::size_t i = 0; i < w.size(); ++i) w[i] = std::sqrt(params.diagonal[i]);
            return w;
        }
        case Method::opgd:
        case Method::imia: return {};
    }
    return {};
}

LinearOperator iteration_matrix(const GraphFilter& h, const MethodParams& params) {
    const std::size_t n = h.size();
    if (params.method != Method::opgd && params.diagonal.size() != n) {
        throw ArgumentError("method parameters do not match the filter size");
    }
    auto ht = std::make_shared<GraphFilter>(h.transposed());
    auto tmp = std::make_shared<std::vector<double>>(n);
    auto tmp2 = std::make_shared<std::vector<double>>(n);

    switch (params.method) {
        case Method::pgda: {
            const auto p = params.diagonal;
            return {n, [&h, ht, tmp, tmp2, p, n](std::span<const double> in, std::span<double> out) {
                        for (std::size_t i = 0; i < n; ++i) (*tmp2)[i] = in[i] / p[i];
                        h.apply(*tmp2, *tmp);
                        ht->apply(*tmp, out);
                        for (std::size_t i = 0; i < n; ++i) out[i] = in[i] - out[i] / p[i];
                    }};
        }
        case Method::spgda: {
            const auto p = params.diagonal;
            return {n, [&h, tmp, p, n](std::span<const double> in, std::span<double> out) {
                        for (std::size_t i = 0; i < n; ++i) (*tmp)[i] = in[i] / std::sqrt(p[i]);
                        h.apply(*tmp, out);
                        for (std::size_t i = 0; i < n; ++i) out[i] = in[i] - out[i] / std::sqrt(p[i]);
                    }};
        }
        case Method::opgd: {
            const double beta = params.step;
            return {n, [&h, ht, tmp, beta, n](std::span<const double> in, std::span<double> out) {
                        h.apply(in, *tmp);
                        ht->apply(*tmp, out);
                        for (std::size_t i = 0; i < n; ++i) out[i] = in[i] - beta * out[i];
                    }};
        }
        case Method::imia: {
            const auto d = params.diagonal;
            return {n, [&h, d, n](std::span<const double> in, std::span<double> out) {
                        h.apply(in, out);
                        for (std::size_t i = 0; i < n; ++i) out[i] = in[i] - d[i] * out[i];
                    }};
        }
    }
    throw ArgumentError("unknown method");
}

Signal direct_solve_oracle(const GraphFilter& h, const Signal& y) {
    if (&h.graph() != &y.graph()) throw ArgumentError("direct solve: filter and signal graphs differ");
    const auto n = static_cast<Eigen::Index>(h.size());
    const Eigen::MatrixXd dense = h.to_dense();
    const Eigen::PartialPivLU<Eigen::MatrixXd> lu(dense);

    const auto pivots = lu.matrixLU().diagonal().cwiseAbs();
    const double largest = pivots.maxCoeff();
    const double floor = static_cast<double>(n) * std::numeric_limits<double>::epsilon() * largest;
    for (Eigen::Index k = 0; k < n; ++k) {
        if (!(pivots[k] > floor)) {
            throw NumericError("filter is singular to working precision at pivot " + std::to_string(k), k);
        }
    }

    const Eigen::Map<const Eigen::VectorXd> rhs(y.values().data(), n);
    const Eigen::VectorXd sol = lu.solve(rhs);
    Signal x(h.graph_ptr(), std::vector<double>(sol.data(), sol.data() + n));

    const auto hx = apply(h, x);
    double res = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) res += (hx[i] - y[i]) * (hx[i] - y[i]);
    res = std::sqrt(res);
    const double ynorm = norm2(y.values());
    if (!(res <= 1e-8 * ynorm)) {
        throw NumericError("direct solve residual " + std::to_string(res) + " exceeds 1e-8 * |y| = " +
                           std::to_string(1e-8 * ynorm));
    }
    return x;
}

SolveResult solve(const GraphFilter& h, const Signal& y, const SolverConfig& cfg, const Signal* reference) {
    if (&h.graph() != &y.graph()) throw ArgumentError("solve: filter and observation graphs differ");
    if (reference && &reference->graph() != &h.graph()) {
        throw ArgumentError("solve: reference lives on a different graph");
    }
    if (cfg.max_iter < 1) throw ArgumentError("solve: max_iter must be >= 1");
    if (!(cfg.divergence_factor > 1.0)) throw ArgumentError("solve: divergence_factor must exceed 1");

    const std::size_t n = h.size();
    if (cfg.method == Method::spgda) {
        if (auto bad = h.asymmetry(1e-12)) {
            throw ArgumentError("SPGDA needs a symmetric filter; worst pair (" + std::to_string(bad->row) +
                                "," + std::to_string(bad->col) + ")");
        }
    }
    const MethodParams params = cfg.params ? *cfg.params : method_params(h, cfg.method);
    if (params.method != cfg.method) throw ArgumentError("solve: parameters belong to another method");
    if (cfg.method != Method::opgd && params.diagonal.size() != n) {
        throw ArgumentError("solve: parameter diagonal has the wrong length");
    }

    std::vector<double> x = cfg.initial ? *cfg.initial : std::vector<double>(n, 0.0);
    if (x.size() != n) throw ArgumentError("solve: initial iterate has the wrong length");
    const auto yv = y.values();
    const auto weights = error_weights(params);

    // Method-specific operands, laid out as the vertex-level algorithms use them.
    ScaledRows approx;
    std::vector<double> y_scaled;
    std::unique_ptr<GraphFilter> ht;
    switch (cfg.method) {
        case Method::pgda: {
            const auto& p = params.diagonal;
            approx = scale_rows(h.transposed(), [&p](Vertex i, double v) { return v / (p[i] * p[i]); });
            break;
        }
        case Method::spgda: {
            const auto& p = params.diagonal;
            approx = scale_rows(h, [&p](Vertex i, double v) { return v / p[i]; });
            y_scaled.resize(n);
            for (std::size_t i = 0; i < n; ++i) y_scaled[i] = yv[i] / p[i];
            break;
        }
        case Method::opgd: ht = std::make_unique<GraphFilter>(h.transposed()); break;
        case Method::imia: break;
    }

    const double ynorm = norm2(yv);
    const double ref_norm = reference ? norm2(reference->values()) : 0.0;
    std::vector<double> hx(n), work(n), diff(n);

    SolveResult result{Signal::zeros(h.graph_ptr()), {}, {}};
    auto& trace = result.trace;
    trace.method = cfg.method;

    auto record = [&](std::size_t m) {
        h.apply(x, hx);
        for (std::size_t i = 0; i < n; ++i) diff[i] = hx[i] - yv[i];
        IterationRecord rec;
        rec.m = m;
        rec.residual = norm2(diff);
        if (!std::isfinite(rec.residual)) {
            throw NumericError("non-finite iterate at iteration " + std::to_string(m), static_cast<std::ptrdiff_t>(m));
        }
        if (reference) {
            double err = 0.0;
            double werr = 0.0;
            for (std::size_t i = 0; i < n; ++i) {
                const double e = x[i] - (*reference)[i];
                const double w = weights.empty() ? e : weights[i] * e;
                err += e * e;
                werr += w * w;
            }
            err = std::sqrt(err);
            rec.rel_error = ref_norm > 0.0 ? err / ref_norm : err;
            rec.weighted_error = std::sqrt(werr);
            rec.snr = rec.rel_error > 0.0 ? std::min(kSnrCapDb, -20.0 * std::log10(rec.rel_error)) : kSnrCapDb;
        } else {
            rec.rel_error = rec.weighted_error = rec.snr = std::numeric_limits<double>::quiet_NaN();
        }
        trace.records.push_back(rec);
        if (cfg.keep_iterates) result.iterates.push_back(x);
    };

    record(0);
    const double r0 = trace.records.front().residual;
    trace.status = SolveStatus::max_iter;
    if (r0 == 0.0) {
        trace.status = SolveStatus::converged;
    } else {
        for (std::size_t m = 1; m <= cfg.max_iter; ++m) {
            switch (cfg.method) {
                case Method::pgda:
                    // hx holds H x^(m-1) from the previous record.
                    for (std::size_t i = 0; i < n; ++i) diff[i] = yv[i] - hx[i];
                    approx.apply(diff, work);
                    for (std::size_t i = 0; i < n; ++i) x[i] = x[i] + work[i];
                    break;
                case Method::spgda:
                    approx.apply(x, work);
                    for (std::size_t i = 0; i < n; ++i) x[i] = x[i] + y_scaled[i] - work[i];
                    break;
                case Method::opgd:
                    for (std::size_t i = 0; i < n; ++i) diff[i] = hx[i] - yv[i];
                    ht->apply(diff, work);
                    for (std::size_t i = 0; i < n; ++i) x[i] -= params.step * work[i];
                    break;
                case Method::imia:
                    for (std::size_t i = 0; i < n; ++i) x[i] -= params.diagonal[i] * (hx[i] - yv[i]);
                    break;
            }
            record(m);
            const double res = trace.records.back().residual;
            if (cfg.residual_tol > 0.0 && res <= cfg.residual_tol * ynorm) {
                trace.status = SolveStatus::converged;
                break;
            }
            if (res > cfg.divergence_factor * r0) {
                trace.status = SolveStatus::diverged;
                break;
            }
        }
    }

    const auto& first = trace.records.front();
    const auto& last = trace.records.back();
    const double steps = static_cast<double>(last.m);
    const double a = reference ? first.weighted_error : first.residual;
    const double b = reference ? last.weighted_error : last.residual;
    trace.estimated_rate = (steps > 0 && a > 0.0 && b > 0.0) ? std::pow(b / a, 1.0 / steps)
                                                             : std::numeric_limits<double>::quiet_NaN();

    std::copy(x.begin(), x.end(), result.x.values().begin());
    return result;
}

}  // namespace pgdsdn
