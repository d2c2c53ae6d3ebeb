#include "pgdsdn/experiment.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <functional>
#include <limits>
#include <memory>
#include <numbers>
#include <sstream>

#include <json.hpp>

#include "pgdsdn/error.hpp"
#include "pgdsdn/parallel.hpp"
#include "pgdsdn/random.hpp"

namespace pgdsdn {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

double norm2(std::span<const double> v) {
    double s = 0.0;
    for (double x : v) s += x * x;
    return std::sqrt(s);
}

double max_abs_one_minus(const Eigen::VectorXd& eig) {
    double r = 0.0;
    for (Eigen::Index i = 0; i < eig.size(); ++i) r = std::max(r, std::abs(1.0 - eig[i]));
    return r;
}

Eigen::VectorXd symmetric_eigenvalues(const Eigen::MatrixXd& a) {
    const Eigen::MatrixXd sym = 0.5 * (a + a.transpose());
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(sym, Eigen::EigenvaluesOnly);
    if (es.info() != Eigen::Success) throw NumericError("dense eigensolver did not converge");
    return es.eigenvalues();
}

/// Spectral data the harness reports for one filter.
class SpectralProbe {
public:
    SpectralProbe(const GraphFilter& h, const ScenarioConfig& cfg) : h_(h), cfg_(cfg) {
        opts_.tol = cfg.power_tol;
        opts_.max_iter = cfg.power_max_iter;
        if (cfg.spectral == SpectralBackend::dense) {
            dense_ = h.to_dense();
            symmetric_ = !h.asymmetry(1e-12).has_value();
            if (symmetric_) {
                const Eigen::VectorXd ev = symmetric_eigenvalues(dense_);
                sigma_max_ = ev.cwiseAbs().maxCoeff();
                sigma_min_ = ev.cwiseAbs().minCoeff();
            } else {
                const Eigen::VectorXd ev = symmetric_eigenvalues(dense_.transpose() * dense_);
                sigma_max_ = std::sqrt(std::max(0.0, ev.maxCoeff()));
                sigma_min_ = std::sqrt(std::max(0.0, ev.minCoeff()));
            }
        } else {
            const auto sv = extreme_singular_values(h, opts_);
            sigma_max_ = sv.sigma_max;
            sigma_min_ = sv.sigma_min;
        }
    }

    double condition_number() const { return sigma_min_ > 0.0 ? sigma_max_ / sigma_min_ : kInf; }

    MethodParams params(Method m) const {
        if (m != Method::opgd) return method_params(h_, m);
        if (!(sigma_min_ > 1e-10 * sigma_max_)) throw NumericError("filter is numerically singular");
        MethodParams p;
        p.method = Method::opgd;
        p.step = 2.0 / (sigma_max_ * sigma_max_ + sigma_min_ * sigma_min_);
        return p;
    }

    double radius(const MethodParams& p) const {
        if (cfg_.spectral == SpectralBackend::power) {
            return power_spectral_radius(iteration_matrix(h_, p), opts_).value;
        }
        const auto n = dense_.rows();
        switch (p.method) {
            case Method::pgda: {
                Eigen::MatrixXd b = dense_;
                for (Eigen::Index j = 0; j < n; ++j) b.col(j) /= p.diagonal[static_cast<std::size_t>(j)];
                return max_abs_one_minus(symmetric_eigenvalues(b.transpose() * b));
            }
            case Method::spgda: {
                Eigen::MatrixXd s = dense_;
                for (Eigen::Index i = 0; i < n; ++i) {
                    const double ri = 1.0 / std::sqrt(p.diagonal[static_cast<std::size_t>(i)]);
                    s.row(i) *= ri;
                    s.col(i) *= ri;
                }
                return max_abs_one_minus(symmetric_eigenvalues(s));
            }
            case Method::opgd: {
                const double a = p.step * sigma_max_ * sigma_max_;
                const double b = p.step * sigma_min_ * sigma_min_;
                return std::max(std::abs(1.0 - a), std::abs(1.0 - b));
            }
            case Method::imia: {
                const bool positive = std::all_of(p.diagonal.begin(), p.diagonal.end(), [](double d) { return d > 0.0; });
                if (symmetric_ && positive) {
                    // I - D H is similar to I - D^{1/2} H D^{1/2}.
                    Eigen::MatrixXd s = dense_;
                    for (Eigen::Index i = 0; i < n; ++i) {
                        const double ri = std::sqrt(p.diagonal[static_cast<std::size_t>(i)]);
                        s.row(i) *= ri;
                        s.col(i) *= ri;
                    }
                    return max_abs_one_minus(symmetric_eigenvalues(s));
                }
                Eigen::MatrixXd t = dense_;
                for (Eigen::Index i = 0; i < n; ++i) t.row(i) *= p.diagonal[static_cast<std::size_t>(i)];
                const Eigen::MatrixXd it = Eigen::MatrixXd::Identity(n, n) - t;
                Eigen::EigenSolver<Eigen::MatrixXd> es(it, false);
                if (es.info() != Eigen::Success) throw NumericError("dense eigensolver did not converge");
                return es.eigenvalues().cwiseAbs().maxCoeff();
            }
        }
        return kNaN;
    }

private:
    static constexpr double kInf = std::numeric_limits<double>::infinity();
    const GraphFilter& h_;
    const ScenarioConfig& cfg_;
    PowerOptions opts_;
    Eigen::MatrixXd dense_;
    bool symmetric_ = false;
    double sigma_max_ = 0.0;
    double sigma_min_ = 0.0;
};

/// Same bookkeeping as solve(), applied to an iterate produced elsewhere.
IterationRecord evaluate(const GraphFilter& h, const Signal& y, std::span<const double> x, const Signal& ref,
                         std::span<const double> weights, std::size_t m) {
    const std::size_t n = h.size();
    std::vector<double> hx(n);
    h.apply(x, hx);
    std::vector<double> diff(n);
    for (std::size_t i = 0; i < n; ++i) diff[i] = hx[i] - y[i];
    IterationRecord rec;
    rec.m = m;
    rec.residual = norm2(diff);
    double err = 0.0;
    double werr = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double e = x[i] - ref[i];
        const double w = weights.empty() ? e : weights[i] * e;
        err += e * e;
        werr += w * w;
    }
    const double ref_norm = norm2(ref.values());
    err = std::sqrt(err);
    rec.rel_error = ref_norm > 0.0 ? err / ref_norm : err;
    rec.weighted_error = std::sqrt(werr);
    rec.snr = rec.rel_error > 0.0 ? std::min(kSnrCapDb, -20.0 * std::log10(rec.rel_error)) : kSnrCapDb;
    return rec;
}

/// PGDA or SPGDA through the simulator, recording the same trace solve() would.
SolveTrace distributed_trace(Network& net, const GraphFilter& h, const Signal& y, const Signal& ref,
                             const MethodParams& params, const ScenarioConfig& cfg) {
    const auto weights = error_weights(params);
    SolveTrace trace;
    trace.method = params.method;
    net.begin_epoch();
    net.load_observation(y);
    net.reset_iterates();
    trace.records.push_back(evaluate(h, y, net.gather_x().values(), ref, weights, 0));
    const double r0 = trace.records.front().residual;
    bool diverged = false;
    net.set_observer([&](std::size_t m, const Network& nw) {
        if (diverged) return;
        const Signal x = nw.gather_x();
        auto rec = evaluate(h, y, x.values(), ref, weights, m);
        if (!std::isfinite(rec.residual)) throw NumericError("non-finite iterate at iteration " + std::to_string(m),
                                                             static_cast<std::ptrdiff_t>(m));
        trace.records.push_back(rec);
        if (r0 > 0.0 && rec.residual > cfg.divergence_factor * r0) diverged = true;
    });
    if (params.method == Method::pgda) {
        net.distributed_preconditioner();
        net.run_pgda(cfg.iterations);
    } else {
        net.distributed_spgda_setup();
        net.run_spgda(cfg.iterations);
    }
    net.set_observer(nullptr);
    trace.status = diverged ? SolveStatus::diverged : (r0 == 0.0 ? SolveStatus::converged : SolveStatus::max_iter);
    if (r0 == 0.0) trace.records.resize(1);
    const auto& first = trace.records.front();
    const auto& last = trace.records.back();
    trace.estimated_rate = (last.m > 0 && first.weighted_error > 0.0 && last.weighted_error > 0.0)
                               ? std::pow(last.weighted_error / first.weighted_error, 1.0 / static_cast<double>(last.m))
                               : kNaN;
    return trace;
}

enum class Metric { rel_error, snr };

struct MethodOutcome {
    std::vector<double> curve;
    std::optional<std::size_t> hit;
    std::vector<double> envelope;
    double radius = kNaN;
    bool diverged = false;
};

struct TrialOutput {
    std::vector<MethodOutcome> methods;
    double condition_number = kNaN;
    double oracle_residual = kNaN;
    double signal_norm = kNaN;
    double observation_norm = kNaN;
    double limit_snr = kNaN;
    std::optional<RoundLog> log;
};

double relative_residual(const GraphFilter& h, const Signal& x, const Signal& y) {
    const Signal hx = apply(h, x);
    double r = 0.0;
    for (std::size_t i = 0; i < hx.size(); ++i) r += (hx[i] - y[i]) * (hx[i] - y[i]);
    const double yn = norm2(y.values());
    return yn > 0.0 ? std::sqrt(r) / yn : std::sqrt(r);
}

/// Solves one instance with every configured method. `metric_ref` is the
/// signal E_2 / SNR are measured against.
TrialOutput run_instance(const GraphFilter& h, const Signal& y, const Signal& metric_ref, Metric metric,
                         const ScenarioConfig& cfg, bool keep_log) {
    TrialOutput out;
    const SpectralProbe probe(h, cfg);
    out.condition_number = probe.condition_number();
    out.observation_norm = norm2(y.values());

    std::unique_ptr<Network> net;
    if (cfg.distributed) {
        Network::Options opts;
        opts.threads = 1;
        opts.log.keep_messages = keep_log;
        opts.log.max_logged_rounds = cfg.roundlog_max_rounds;
        net = std::make_unique<Network>(h.graph_ptr(), cfg.range.value_or(h.width()), opts);
        net->load_filter(h);
    }

    for (Method m : cfg.methods) {
        MethodOutcome mo;
        const MethodParams params = probe.params(m);
        mo.radius = probe.radius(params);

        SolveTrace trace;
        try {
            if (net && (m == Method::pgda || m == Method::spgda)) {
                trace = distributed_trace(*net, h, y, metric_ref, params, cfg);
            } else {
                SolverConfig sc;
                sc.method = m;
                sc.max_iter = cfg.iterations;
                sc.divergence_factor = cfg.divergence_factor;
                sc.params = params;
                trace = solve(h, y, sc, &metric_ref).trace;
            }
        } catch (const NumericError&) {
            trace.status = SolveStatus::diverged;
        }
        // A method whose iteration matrix has radius >= 1 does not converge on
        // this instance even if the residual has not blown up yet.
        mo.diverged = trace.status == SolveStatus::diverged || !(mo.radius < 1.0);
        if (!mo.diverged) {
            mo.curve.reserve(cfg.iterations + 1);
            for (const auto& r : trace.records) mo.curve.push_back(metric == Metric::snr ? r.snr : r.rel_error);
            // An exact start stops the trace early; the iterate stays put.
            while (mo.curve.size() < cfg.iterations + 1) mo.curve.push_back(mo.curve.back());

            if (metric == Metric::rel_error && (m == Method::pgda || m == Method::spgda)) {
                const auto w = error_weights(params);
                const auto [lo, hi] = std::minmax_element(w.begin(), w.end());
                const double factor = (*hi / *lo) * mo.curve.front();
                mo.envelope.resize(cfg.iterations + 1);
                for (std::size_t k = 0; k <= cfg.iterations; ++k) {
                    mo.envelope[k] = factor * std::pow(mo.radius, static_cast<double>(k));
                }
            }
        }
        out.methods.push_back(std::move(mo));
    }
    if (net && keep_log) out.log = net->log();
    return out;
}

std::vector<TrialOutput> run_trials(std::size_t trials, std::size_t threads,
                                    const std::function<TrialOutput(std::size_t)>& body) {
    std::vector<TrialOutput> outs(trials);
    parallel_for(trials, threads, [&](std::size_t t) { outs[t] = body(t); });
    return outs;
}

TrialAggregate aggregate(const ScenarioConfig& cfg, Metric metric, std::vector<TrialOutput>& outs) {
    TrialAggregate agg;
    agg.scenario = cfg.scenario;
    agg.metric = metric == Metric::snr ? "snr_db" : "rel_error";
    agg.trials = outs.size();
    agg.iterations = cfg.iterations;
    for (std::size_t t = 0; t < outs.size(); ++t) agg.trial_seeds.push_back(derive_seed(cfg.master_seed, t, "trial"));

    double limit_sum = 0.0;
    std::size_t limit_count = 0;
    for (auto& o : outs) {
        agg.condition_numbers.push_back(o.condition_number);
        agg.oracle_residuals.push_back(o.oracle_residual);
        agg.signal_norms.push_back(o.signal_norm);
        agg.observation_norms.push_back(o.observation_norm);
        if (std::isfinite(o.limit_snr)) {
            limit_sum += o.limit_snr;
            ++limit_count;
        }
    }
    if (metric == Metric::snr && limit_count > 0) agg.limit_snr = limit_sum / static_cast<double>(limit_count);

    for (std::size_t k = 0; k < cfg.methods.size(); ++k) {
        MethodAggregate ma;
        ma.method = cfg.methods[k];
        ma.mean_curve.assign(cfg.iterations + 1, 0.0);
        const bool has_env = !outs.empty() && !outs.front().methods[k].envelope.empty();
        double radius_sum = 0.0;
        for (const auto& o : outs) {
            const auto& mo = o.methods[k];
            ma.spectral_radii.push_back(mo.radius);
            radius_sum += mo.radius;
            if (mo.diverged) {
                ++ma.diverged;
                continue;
            }
            ++ma.completed;
            for (std::size_t m = 0; m <= cfg.iterations; ++m) ma.mean_curve[m] += mo.curve[m];
            if (has_env && !mo.envelope.empty()) {
                ma.mean_envelope.resize(cfg.iterations + 1, 0.0);
                for (std::size_t m = 0; m <= cfg.iterations; ++m) ma.mean_envelope[m] += mo.envelope[m];
            }
        }
        ma.mean_spectral_radius = outs.empty() ? kNaN : radius_sum / static_cast<double>(outs.size());
        for (auto& v : ma.mean_curve) v = ma.completed ? v / static_cast<double>(ma.completed) : kNaN;
        for (auto& v : ma.mean_envelope) v /= static_cast<double>(ma.completed);

        const auto first_hit = [&](const std::vector<double>& curve, double limit) -> std::optional<std::size_t> {
            for (std::size_t m = 0; m < curve.size(); ++m) {
                const bool hit = metric == Metric::snr ? std::abs(curve[m] - limit) <= cfg.snr_margin_db
                                                       : curve[m] <= cfg.target_error;
                if (hit) return m;
            }
            return std::nullopt;
        };
        if (ma.completed && (metric == Metric::rel_error || agg.limit_snr)) {
            ma.iterations_to_target = first_hit(ma.mean_curve, agg.limit_snr.value_or(0.0));
        }
        std::vector<double> hits;
        for (const auto& o : outs) {
            const auto& mo = o.methods[k];
            if (mo.diverged) continue;
            const auto h = first_hit(mo.curve, o.limit_snr);
            hits.push_back(h ? static_cast<double>(*h) : std::numeric_limits<double>::infinity());
        }
        if (!hits.empty()) {
            std::sort(hits.begin(), hits.end());
            const std::size_t mid = hits.size() / 2;
            ma.median_iterations_to_target = hits.size() % 2 ? hits[mid] : 0.5 * (hits[mid - 1] + hits[mid]);
        }
        agg.methods.push_back(std::move(ma));
    }
    for (auto& o : outs) {
        if (o.log) {
            agg.round_log = std::move(o.log);
            break;
        }
    }
    return agg;
}

GraphPtr load_graph(const ScenarioConfig& cfg) {
    std::optional<std::vector<Point>> coords;
    std::size_t n = 0;
    if (!cfg.points_path.empty()) {
        std::ifstream in(cfg.points_path);
        if (!in) throw IoError("cannot open " + cfg.points_path);
        auto table = read_points_csv(in);
        n = table.points.size();
        coords = std::move(table.points);
    }
    if (cfg.edges_path.empty()) {
        if (!coords) throw ConfigError("no graph input");
        return std::make_shared<const Graph>(knn_graph(*coords, cfg.k));
    }
    std::ifstream in(cfg.edges_path);
    if (!in) throw IoError("cannot open " + cfg.edges_path);
    const auto edges = read_edges_csv(in);
    if (!coords) {
        for (const auto& [i, j] : edges) n = std::max<std::size_t>(n, std::max(i, j) + 1);
    }
    return std::make_shared<const Graph>(Graph::from_edges(n, edges, std::move(coords)));
}

}  // namespace

const MethodAggregate& TrialAggregate::at(Method m) const {
    for (const auto& ma : methods) {
        if (ma.method == m) return ma;
    }
    throw ArgumentError("method " + std::string(to_string(m)) + " was not run");
}

Signal blockwise_polynomial(const GraphPtr& g) {
    if (!g->has_coordinates()) throw ArgumentError("blockwise_polynomial needs vertex coordinates");
    std::vector<double> v(g->size());
    for (Vertex i = 0; i < g->size(); ++i) {
        const auto [x, y] = g->coordinate(i);
        const int strip = std::min(3, static_cast<int>(std::floor(2.0 * (x + y))));
        v[i] = (strip % 2 == 0) ? 0.5 - 2.0 * x : 0.5 + x * x + y * y;
    }
    return Signal(g, std::move(v));
}

Signal add_uniform_noise(const Signal& x, double eta, std::uint64_t seed) {
    if (eta < 0.0) throw ArgumentError("noise level must be >= 0");
    Signal out = x;
    if (eta == 0.0) return out;
    Rng rng(seed);
    for (std::size_t i = 0; i < out.size(); ++i) out[i] += rng.uniform(-eta, eta);
    return out;
}

PointsTable synthetic_temperature_field(std::size_t n, std::uint64_t seed) {
    Rng rng(seed);
    PointsTable t;
    std::vector<double> values;
    for (std::size_t i = 0; i < n; ++i) {
        const double x = rng.uniform();
        const double y = rng.uniform();
        t.points.push_back({x, y});
        values.push_back(70.0 + 15.0 * std::sin(2.0 * std::numbers::pi * x) * std::cos(std::numbers::pi * y) +
                         10.0 * y);
    }
    t.values = std::move(values);
    return t;
}

TrialAggregate run_fig1(const ScenarioConfig& cfg) {
    validate(cfg);
    const double radius = cfg.radius.value_or(std::sqrt(2.0 / static_cast<double>(cfg.n)));
    auto outs = run_trials(cfg.trials, cfg.threads, [&](std::size_t t) {
        const std::uint64_t seed = derive_seed(cfg.master_seed, t, "trial");
        auto g = std::make_shared<const Graph>(random_geometric_graph(cfg.n, radius, derive_seed(seed, 0, "graph"), cfg.rgg_max_attempts));
        const GraphFilter h = build_experiment_filter_fig1(g, cfg.gamma, derive_seed(seed, 0, "filter"));
        const Signal x = add_uniform_noise(blockwise_polynomial(g), cfg.eta, derive_seed(seed, 0, "signal"));
        const Signal y = apply(h, x);
        const Signal xs = direct_solve_oracle(h, y);
        TrialOutput o = run_instance(h, y, xs, Metric::rel_error, cfg, t == 0);
        o.oracle_residual = relative_residual(h, xs, y);
        o.signal_norm = norm2(x.values());
        return o;
    });
    return aggregate(cfg, Metric::rel_error, outs);
}

TrialAggregate run_denoise(const ScenarioConfig& cfg, const PointsTable& data) {
    validate(cfg);
    if (!data.values) throw ConfigError("denoise input needs a value column");
    const auto g = std::make_shared<const Graph>(knn_graph(data.points, cfg.k));
    const GraphFilter h = build_denoise_filter(g, cfg.alpha);
    const Signal clean(g, *data.values);
    const double clean_norm = norm2(clean.values());
    auto outs = run_trials(cfg.trials, cfg.threads, [&](std::size_t t) {
        const std::uint64_t seed = derive_seed(cfg.master_seed, t, "trial");
        const Signal b = add_uniform_noise(clean, cfg.eta, derive_seed(seed, 0, "signal"));
        const Signal xt = direct_solve_oracle(h, b);
        TrialOutput o = run_instance(h, b, clean, Metric::snr, cfg, t == 0);
        o.oracle_residual = relative_residual(h, xt, b);
        o.signal_norm = clean_norm;
        double err = 0.0;
        for (std::size_t i = 0; i < xt.size(); ++i) err += (xt[i] - clean[i]) * (xt[i] - clean[i]);
        err = std::sqrt(err) / clean_norm;
        o.limit_snr = err > 0.0 ? std::min(kSnrCapDb, -20.0 * std::log10(err)) : kSnrCapDb;
        return o;
    });
    return aggregate(cfg, Metric::snr, outs);
}

TrialAggregate run_time_varying(const ScenarioConfig& cfg) {
    validate(cfg);
    ScenarioConfig run_cfg = cfg;
    run_cfg.methods = {Method::pgda};
    const double radius = cfg.radius.value_or(std::sqrt(2.0 / static_cast<double>(cfg.n)));

    std::vector<std::vector<EpochSummary>> epochs(cfg.trials);
    auto outs = run_trials(cfg.trials, cfg.threads, [&](std::size_t t) {
        const std::uint64_t seed = derive_seed(cfg.master_seed, t, "trial");
        auto g = std::make_shared<const Graph>(random_geometric_graph(cfg.n, radius, derive_seed(seed, 0, "graph"), cfg.rgg_max_attempts));
        const Signal x0 = blockwise_polynomial(g);
        std::vector<GraphFilter> filters;
        std::vector<Signal> ys;
        std::vector<Signal> oracles;
        unsigned width = 0;
        TrialOutput o;
        o.oracle_residual = 0.0;
        for (std::size_t e = 0; e < cfg.epochs; ++e) {
            filters.push_back(build_experiment_filter_fig1(g, cfg.gamma, derive_seed(seed, e, "filter")));
            const Signal x = add_uniform_noise(x0, cfg.eta, derive_seed(seed, e, "signal"));
            ys.push_back(apply(filters.back(), x));
            oracles.push_back(direct_solve_oracle(filters.back(), ys.back()));
            o.oracle_residual = std::max(o.oracle_residual, relative_residual(filters.back(), oracles.back(), ys.back()));
            width = std::max(width, filters.back().width());
        }

        Network::Options opts;
        opts.log.keep_messages = t == 0;
        opts.log.max_logged_rounds = cfg.roundlog_max_rounds;
        Network net(g, cfg.range.value_or(width), opts);

        // Per-iteration E_2 against the running epoch's oracle.
        MethodOutcome mo;
        mo.curve.assign(cfg.iterations + 1, 0.0);
        mo.curve[0] = cfg.epochs;  // x^(0) = 0 gives E_2 = 1 in every epoch
        std::size_t epoch = 0;
        net.set_observer([&](std::size_t m, const Network& nw) {
            const Signal x = nw.gather_x();
            double err = 0.0;
            const Signal& ref = oracles[epoch];
            for (std::size_t i = 0; i < x.size(); ++i) err += (x[i] - ref[i]) * (x[i] - ref[i]);
            mo.curve[m] += std::sqrt(err) / norm2(ref.values());
            if (m == cfg.iterations) ++epoch;
        });
        const auto results = pgdsdn::run_time_varying(net, filters, ys, cfg.iterations);
        for (auto& v : mo.curve) v /= static_cast<double>(cfg.epochs);

        for (std::size_t e = 0; e < results.size(); ++e) {
            double err = 0.0;
            for (std::size_t i = 0; i < results[e].x.size(); ++i) {
                err += (results[e].x[i] - oracles[e][i]) * (results[e].x[i] - oracles[e][i]);
            }
            epochs[t].push_back({e, results[e].messages, results[e].rounds, std::sqrt(err) / norm2(oracles[e].values())});
        }
        mo.radius = kNaN;
        o.methods.push_back(std::move(mo));
        if (t == 0) o.log = net.log();
        return o;
    });
    TrialAggregate agg = aggregate(run_cfg, Metric::rel_error, outs);
    for (std::size_t t = 0; t < epochs.size(); ++t) {
        for (auto e : epochs[t]) {
            e.epoch = t * cfg.epochs + e.epoch;
            agg.epochs.push_back(e);
        }
    }
    return agg;
}

TrialAggregate run_custom(const ScenarioConfig& cfg) {
    validate(cfg);
    const GraphPtr g = load_graph(cfg);
    GraphFilter h = [&] {
        std::ifstream in(cfg.filter_path);
        if (!in) throw IoError("cannot open " + cfg.filter_path);
        return read_filter_csv(in, g);
    }();
    const Signal y = [&] {
        std::ifstream in(cfg.signal_path);
        if (!in) throw IoError("cannot open " + cfg.signal_path);
        return read_signal_csv(in, g);
    }();
    ScenarioConfig one = cfg;
    one.trials = 1;
    const Signal xs = direct_solve_oracle(h, y);
    std::vector<TrialOutput> outs;
    outs.push_back(run_instance(h, y, xs, Metric::rel_error, one, true));
    outs.back().oracle_residual = relative_residual(h, xs, y);
    outs.back().signal_norm = norm2(xs.values());
    return aggregate(one, Metric::rel_error, outs);
}

TrialAggregate run_scenario(const ScenarioConfig& cfg) {
    switch (cfg.scenario) {
        case Scenario::fig1: return run_fig1(cfg);
        case Scenario::denoise: {
            if (cfg.points_path.empty()) {
                return run_denoise(cfg, synthetic_temperature_field(cfg.n, derive_seed(cfg.master_seed, 0, "dataset")));
            }
            std::ifstream in(cfg.points_path);
            if (!in) throw IoError("cannot open " + cfg.points_path);
            return run_denoise(cfg, read_points_csv(in));
        }
        case Scenario::time_varying: return run_time_varying(cfg);
        case Scenario::custom: return run_custom(cfg);
    }
    throw ConfigError("unknown scenario");
}

std::string curves_csv(const TrialAggregate& agg) {
    std::ostringstream ss;
    ss << "method,m,mean_metric\n";
    for (const auto& ma : agg.methods) {
        for (std::size_t m = 0; m < ma.mean_curve.size(); ++m) {
            ss << to_string(ma.method) << ',' << m << ',' << format_double(ma.mean_curve[m]) << '\n';
        }
    }
    return ss.str();
}

std::string summary_json(const TrialAggregate& agg, const ScenarioConfig& cfg) {
    using nlohmann::json;
    const auto num = [](double v) { return std::isfinite(v) ? json(v) : json(nullptr); };
    const auto list = [&](const std::vector<double>& v) {
        json a = json::array();
        for (double x : v) a.push_back(num(x));
        return a;
    };
    const auto stats = [&](std::vector<double> v) {
        json s;
        std::erase_if(v, [](double x) { return !std::isfinite(x); });
        if (v.empty()) return json(nullptr);
        std::sort(v.begin(), v.end());
        double sum = 0.0;
        for (double x : v) sum += x;
        s["mean"] = sum / static_cast<double>(v.size());
        s["median"] = v.size() % 2 ? v[v.size() / 2] : 0.5 * (v[v.size() / 2 - 1] + v[v.size() / 2]);
        s["min"] = v.front();
        s["max"] = v.back();
        return s;
    };

    json j;
    j["scenario"] = std::string(to_string(agg.scenario));
    j["metric"] = agg.metric;
    j["trials"] = agg.trials;
    j["M"] = agg.iterations;
    j["master_seed"] = cfg.master_seed;
    j["trial_seeds"] = agg.trial_seeds;
    j["config"] = json::parse(config_to_json(cfg));
    // Where the files go is not part of the run.
    j["config"].erase("output_dir");
    j["config_source"] = cfg.source_text;

    json methods = json::object();
    for (const auto& ma : agg.methods) {
        json m;
        m["mean_spectral_radius"] = num(ma.mean_spectral_radius);
        m["spectral_radii"] = list(ma.spectral_radii);
        m["iterations_to_target"] = ma.iterations_to_target ? json(*ma.iterations_to_target) : json(nullptr);
        m["median_iterations_to_target"] = num(ma.median_iterations_to_target);
        m["completed"] = ma.completed;
        m["diverged"] = ma.diverged;
        m["final_mean_metric"] = num(ma.mean_curve.empty() ? kNaN : ma.mean_curve.back());
        methods[std::string(to_string(ma.method))] = m;
    }
    j["methods"] = methods;
    j["condition_number"] = stats(agg.condition_numbers);
    j["condition_numbers"] = list(agg.condition_numbers);
    j["oracle_relative_residual"] = stats(agg.oracle_residuals);
    j["signal_norm"] = stats(agg.signal_norms);
    j["observation_norm"] = stats(agg.observation_norms);
    j["diverged_total"] = [&] {
        std::size_t d = 0;
        for (const auto& ma : agg.methods) d += ma.diverged;
        return d;
    }();
    if (agg.limit_snr) j["limit_snr_db"] = *agg.limit_snr;
    if (agg.metric == "snr_db") j["snr_margin_db"] = cfg.snr_margin_db;
    else j["target_error"] = cfg.target_error;
    if (!agg.epochs.empty()) {
        json e = json::array();
        for (const auto& ep : agg.epochs) {
            e.push_back({{"epoch", ep.epoch}, {"messages", ep.messages}, {"rounds", ep.rounds},
                         {"rel_error", num(ep.rel_error)}});
        }
        j["epochs"] = e;
    }
    if (agg.round_log) {
        j["round_log"] = {{"total_messages", agg.round_log->total_messages},
                          {"rounds", agg.round_log->rounds.size()},
                          {"max_hops", agg.round_log->max_hops},
                          {"logged_messages", agg.round_log->messages.size()}};
    }
    return j.dump(2) + "\n";
}

void emit_outputs(const TrialAggregate& agg, const ScenarioConfig& cfg, const std::filesystem::path& dir) {
    write_file_atomic(dir / "curves.csv", curves_csv(agg));
    write_file_atomic(dir / "summary.json", summary_json(agg, cfg));
    if (agg.round_log) {
        std::ostringstream ss;
        write_round_log_csv(ss, *agg.round_log, cfg.roundlog_values);
        write_file_atomic(dir / "roundlog.csv", ss.str());
    }
    if (!agg.epochs.empty()) {
        std::ostringstream ss;
        ss << "epoch,messages,rounds,rel_error\n";
        for (const auto& e : agg.epochs) {
            ss << e.epoch << ',' << e.messages << ',' << e.rounds << ',' << format_double(e.rel_error) << '\n';
        }
        write_file_atomic(dir / "epochs.csv", ss.str());
    }
}

}  // namespace pgdsdn
