#include <cmath>
#include <filesystem>
#include <sstream>

#include <gtest/gtest.h>

#include "pgdsdn/error.hpp"
#include "pgdsdn/experiment.hpp"
#include "test_support.hpp"

using namespace pgdsdn;
using namespace pgdsdn::testing;

namespace fs = std::filesystem;

namespace {

ScenarioConfig small_fig1() {
    ScenarioConfig cfg = parse_config(R"({"scenario":"fig1","n":64,"trials":3,"M":30})");
    validate(cfg);
    return cfg;
}

std::size_t count_lines(const std::string& s) { return static_cast<std::size_t>(std::count(s.begin(), s.end(), '\n')); }

}  // namespace

TEST(Blockwise, Examples) {
    auto g = make_graph(3, {{0, 1}, {1, 2}}, std::vector<Point>{{0, 0}, {0.4, 0.4}, {1, 1}});
    const auto x = blockwise_polynomial(g);
    EXPECT_EQ(x[0], 0.5);
    EXPECT_DOUBLE_EQ(x[1], 0.82);
    EXPECT_EQ(x[2], 2.5);
}

TEST(UniformNoise, ZeroLevelIsIdentity) {
    Rng rng(1);
    auto g = random_connected_graph(20, rng);
    const auto x = random_signal(g, rng);
    const auto y = add_uniform_noise(x, 0.0, 5);
    for (std::size_t i = 0; i < 20; ++i) EXPECT_EQ(x[i], y[i]);
}

TEST(UniformNoise, SupportAndVariance) {
    auto g = path_graph(1000);
    const auto zero = Signal::zeros(g);
    const double eta = 0.7;
    double sum = 0.0, sq = 0.0;
    std::size_t count = 0;
    for (std::uint64_t s = 0; s < 100; ++s) {
        const auto y = add_uniform_noise(zero, eta, s);
        for (double v : y.values()) {
            EXPECT_LE(std::abs(v), eta);
            sum += v;
            sq += v * v;
            ++count;
        }
    }
    const double mean = sum / count;
    const double var = sq / count - mean * mean;
    EXPECT_NEAR(var, eta * eta / 3.0, 0.05 * eta * eta / 3.0);
}

TEST(Config, ParsesAndValidates) {
    auto cfg = parse_config(R"({"scenario":"fig1","methods":"spgda,imia","M":12,"seed":7})");
    EXPECT_EQ(cfg.methods, (std::vector<Method>{Method::spgda, Method::imia}));
    EXPECT_EQ(cfg.iterations, 12u);
    EXPECT_EQ(cfg.master_seed, 7u);
    EXPECT_NO_THROW(validate(cfg));

    auto denoise = parse_config(R"({"scenario":"denoise"})");
    EXPECT_EQ(denoise.n, 218u);
    EXPECT_EQ(denoise.eta, 35.0);
}

TEST(Config, Errors) {
    EXPECT_THROW(validate(parse_config(R"({"methods":[]})")), ConfigError);
    EXPECT_THROW(validate(parse_config(R"({"methods":"pgda,pgda"})")), ConfigError);
    EXPECT_THROW(parse_config(R"({"methods":["newton"]})"), ConfigError);
    EXPECT_THROW(parse_config(R"({"bogus":1})"), ConfigError);
    EXPECT_THROW(parse_config(R"({"n":-4})"), ConfigError);
    EXPECT_THROW(parse_config("not json"), ConfigError);
    EXPECT_THROW(parse_config(R"({"scenario":"fig3"})"), ConfigError);
    EXPECT_THROW(validate(parse_config(R"({"trials":0})")), ConfigError);
    EXPECT_THROW(validate(parse_config(R"({"scenario":"custom"})")), ConfigError);
    EXPECT_THROW(load_config("/nonexistent/cfg.json"), ConfigError);
}

TEST(Config, EmptyMethodsRejectedBeforeRunning) {
    auto cfg = small_fig1();
    cfg.methods.clear();
    EXPECT_THROW(run_fig1(cfg), ConfigError);
}

TEST(Fig1, CurveShapeAndDeterminism) {
    const auto cfg = small_fig1();
    const auto a = run_fig1(cfg);
    EXPECT_EQ(a.trials, 3u);
    EXPECT_EQ(a.trial_seeds.size(), 3u);
    const auto csv = curves_csv(a);
    EXPECT_EQ(count_lines(csv), 1 + cfg.methods.size() * (cfg.iterations + 1));

    const auto b = run_fig1(cfg);
    EXPECT_EQ(curves_csv(b), csv);
    EXPECT_EQ(summary_json(b, cfg), summary_json(a, cfg));
    for (double r : a.oracle_residuals) EXPECT_LE(r, 1e-8);

    for (const auto& m : a.methods) {
        EXPECT_EQ(m.spectral_radii.size(), 3u);
        EXPECT_EQ(m.completed + m.diverged, 3u);
    }
}

TEST(Fig1, ThreadsDoNotChangeResults) {
    auto cfg = small_fig1();
    const auto seq = curves_csv(run_fig1(cfg));
    cfg.threads = 3;
    EXPECT_EQ(curves_csv(run_fig1(cfg)), seq);
}

TEST(Fig1, NoiselessErrorDecreases) {
    auto cfg = parse_config(R"({"scenario":"fig1","n":64,"trials":1,"M":60,"gamma":0,"eta":0})");
    const auto agg = run_fig1(cfg);
    for (const auto& m : agg.methods) {
        ASSERT_EQ(m.diverged, 0u) << to_string(m.method);
        for (std::size_t k = 1; k < m.mean_curve.size(); ++k) {
            EXPECT_LT(m.mean_curve[k], m.mean_curve[k - 1]) << to_string(m.method) << " m=" << k;
        }
    }
}

TEST(Fig1, EnvelopeBoundsMeanCurve) {
    const auto agg = run_fig1(small_fig1());
    for (Method meth : {Method::pgda, Method::spgda}) {
        const auto& m = agg.at(meth);
        if (m.completed == 0) continue;
        ASSERT_EQ(m.mean_envelope.size(), m.mean_curve.size());
        for (std::size_t k = 0; k < m.mean_curve.size(); ++k) {
            EXPECT_LE(m.mean_curve[k], m.mean_envelope[k] * (1 + 1e-8)) << to_string(meth) << " m=" << k;
        }
    }
}

TEST(Fig1, DistributedMatchesCentralized) {
    auto cfg = small_fig1();
    cfg.methods = {Method::pgda, Method::spgda};
    cfg.trials = 2;
    const auto central = run_fig1(cfg);
    cfg.distributed = true;
    const auto dist = run_fig1(cfg);
    EXPECT_EQ(curves_csv(dist), curves_csv(central));
    ASSERT_TRUE(dist.round_log);
    EXPECT_LE(dist.round_log->max_hops, 2u);
}

TEST(Denoise, AlphaZeroConvergesInOneStep) {
    auto cfg = parse_config(R"({"scenario":"denoise","n":60,"alpha":0,"trials":2,"M":5,"eta":3})");
    const auto data = synthetic_temperature_field(cfg.n, 11);
    const auto agg = run_denoise(cfg, data);
    ASSERT_TRUE(agg.limit_snr);
    for (Method m : {Method::spgda, Method::imia}) {
        const auto& curve = agg.at(m).mean_curve;
        EXPECT_NEAR(curve[1], *agg.limit_snr, 1e-9) << to_string(m);
    }
}

TEST(Denoise, NoiselessSnrAgainstOracleGrowsToCap) {
    const auto data = synthetic_temperature_field(80, 3);
    auto g = std::make_shared<const Graph>(knn_graph(data.points, 5));
    const auto h = build_denoise_filter(g, 0.9075);
    const Signal b(g, *data.values);
    const auto ref = direct_solve_oracle(h, b);
    for (Method m : kAllMethods) {
        SolverConfig cfg;
        cfg.method = m;
        cfg.max_iter = 400;
        const auto trace = solve(h, b, cfg, &ref).trace;
        for (std::size_t k = 1; k < trace.records.size(); ++k) {
            EXPECT_GE(trace.records[k].snr, trace.records[k - 1].snr) << to_string(m) << " m=" << k;
        }
        EXPECT_EQ(trace.records.back().snr, kSnrCapDb) << to_string(m);
    }
}

TEST(Denoise, OrderingOnSyntheticData) {
    auto cfg = parse_config(R"({"scenario":"denoise","trials":5,"M":80})");
    const auto data = synthetic_temperature_field(cfg.n, derive_seed(cfg.master_seed, 0, "dataset"));
    const auto agg = run_denoise(cfg, data);
    for (double r : agg.oracle_residuals) EXPECT_LE(r, 1e-8);
    ASSERT_TRUE(agg.at(Method::spgda).iterations_to_target);
    ASSERT_TRUE(agg.at(Method::pgda).iterations_to_target);
    EXPECT_LT(*agg.at(Method::spgda).iterations_to_target, *agg.at(Method::pgda).iterations_to_target);
}

TEST(Outputs, FilesWritten) {
    const fs::path dir = fs::temp_directory_path() / "pgdsdn_outputs_test";
    fs::remove_all(dir);
    auto cfg = small_fig1();
    cfg.trials = 1;
    cfg.distributed = true;
    cfg.methods = {Method::spgda, Method::opgd};
    const auto agg = run_fig1(cfg);
    emit_outputs(agg, cfg, dir);
    EXPECT_TRUE(fs::exists(dir / "curves.csv"));
    EXPECT_TRUE(fs::exists(dir / "summary.json"));
    EXPECT_TRUE(fs::exists(dir / "roundlog.csv"));
    const auto summary = read_file(dir / "summary.json");
    EXPECT_NE(summary.find("\"trial_seeds\""), std::string::npos);
    EXPECT_NE(summary.find("\"diverged\""), std::string::npos);
    fs::remove_all(dir);
}

TEST(TimeVarying, EpochSummaries) {
    auto cfg = parse_config(R"({"scenario":"time_varying","M":40,"epochs":2})");
    const auto agg = run_time_varying(cfg);
    ASSERT_EQ(agg.epochs.size(), 2u);
    EXPECT_EQ(agg.epochs[0].messages, agg.epochs[1].messages);
    EXPECT_EQ(agg.epochs[0].rounds, 1 + 2 * 40u);
    for (const auto& e : agg.epochs) EXPECT_LT(e.rel_error, 1.0);
    ASSERT_TRUE(agg.round_log);
    EXPECT_LE(agg.round_log->max_hops, 2u);
}

TEST(TimeVarying, SingleEpochEqualsDistributedFig1) {
    auto tv = parse_config(R"({"scenario":"time_varying","M":25,"epochs":1})");
    auto f1 = parse_config(R"({"scenario":"fig1","n":64,"M":25,"trials":1,"distributed":true,"methods":"pgda"})");
    EXPECT_EQ(curves_csv(run_time_varying(tv)), curves_csv(run_fig1(f1)));
}
