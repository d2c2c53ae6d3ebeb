#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "pgdsdn/csv_io.hpp"
#include "pgdsdn/error.hpp"
#include "pgdsdn/experiment.hpp"
#include "pgdsdn/random.hpp"

namespace fs = std::filesystem;
using namespace pgdsdn;

namespace {

enum Exit { kOk = 0, kFailure = 1, kConfig = 2, kNumeric = 3, kIo = 4 };

struct RunArgs {
    std::string config;
    std::optional<std::uint64_t> seed;
    std::optional<std::size_t> trials;
    std::optional<std::size_t> threads;
    std::string out;
    bool distributed = false;
    std::string methods;
};

ScenarioConfig resolve(const RunArgs& a) {
    ScenarioConfig cfg = a.config.empty() ? parse_config("{}") : load_config(a.config);
    if (a.seed) cfg.master_seed = *a.seed;
    if (a.trials) cfg.trials = *a.trials;
    if (a.threads) cfg.threads = *a.threads;
    if (!a.out.empty()) cfg.output_dir = a.out;
    if (a.distributed) cfg.distributed = true;
    if (!a.methods.empty()) {
        cfg.methods = parse_config(nlohmann::json{{"methods", a.methods}}.dump()).methods;
    }
    validate(cfg);
    return cfg;
}

int cmd_run(const RunArgs& a) {
    const ScenarioConfig cfg = resolve(a);
    const TrialAggregate agg = run_scenario(cfg);
    emit_outputs(agg, cfg, cfg.output_dir);

    std::size_t diverged = 0;
    for (const auto& m : agg.methods) diverged += m.diverged;
    std::cout << "wrote " << cfg.output_dir << " (" << to_string(cfg.scenario) << ", " << agg.trials
              << " trials, " << diverged << " diverged runs)\n";
    if (agg.trials == 1 && diverged > 0) {
        std::cerr << "error: " << diverged << " method(s) diverged\n";
        return kNumeric;
    }
    return kOk;
}

struct GenArgs {
    std::string config;
    std::optional<std::uint64_t> seed;
    std::string out;
    std::string filter = "none";
};

int cmd_gen_graph(const GenArgs& a) {
    ScenarioConfig cfg = a.config.empty() ? parse_config("{}") : load_config(a.config);
    if (a.seed) cfg.master_seed = *a.seed;
    if (!a.out.empty()) cfg.output_dir = a.out;
    validate(cfg);
    const fs::path dir = cfg.output_dir;

    GraphPtr g;
    std::optional<std::vector<double>> values;
    if (cfg.scenario == Scenario::denoise) {
        auto data = synthetic_temperature_field(cfg.n, derive_seed(cfg.master_seed, 0, "dataset"));
        g = std::make_shared<const Graph>(knn_graph(data.points, cfg.k));
        values = std::move(data.values);
    } else {
        const double radius = cfg.radius.value_or(std::sqrt(2.0 / static_cast<double>(cfg.n)));
        g = std::make_shared<const Graph>(random_geometric_graph(cfg.n, radius, cfg.master_seed, cfg.rgg_max_attempts));
    }

    std::ostringstream points;
    if (values) write_points_csv(points, g->coordinates(), std::span<const double>(*values));
    else write_points_csv(points, g->coordinates());
    write_file_atomic(dir / "points.csv", points.str());
    std::ostringstream edges;
    write_edges_csv(edges, *g);
    write_file_atomic(dir / "edges.csv", edges.str());

    if (a.filter != "none") {
        const GraphFilter h = a.filter == "fig1"
                                  ? build_experiment_filter_fig1(g, cfg.gamma, derive_seed(cfg.master_seed, 0, "filter"))
                                  : build_denoise_filter(g, cfg.alpha);
        const Signal x = a.filter == "fig1"
                             ? add_uniform_noise(blockwise_polynomial(g), cfg.eta,
                                                 derive_seed(cfg.master_seed, 0, "signal"))
                             : add_uniform_noise(Signal(g, *values), cfg.eta, derive_seed(cfg.master_seed, 0, "signal"));
        std::ostringstream fs_;
        write_filter_csv(fs_, h);
        write_file_atomic(dir / "filter.csv", fs_.str());
        std::ostringstream ys;
        write_signal_csv(ys, a.filter == "fig1" ? apply(h, x) : x);
        write_file_atomic(dir / "signal.csv", ys.str());
    }
    std::cout << "graph: " << g->size() << " vertices, " << g->edge_count() << " edges";
    if (g->accepted_seed()) std::cout << ", accepted seed " << *g->accepted_seed();
    std::cout << "\n";
    return kOk;
}

int cmd_ingest(const std::string& points_path, std::size_t k, const std::string& out) {
    std::ifstream in(points_path);
    if (!in) throw IoError("cannot open " + points_path);
    const PointsTable table = read_points_csv(in);
    const Graph g = knn_graph(table.points, k);
    const fs::path dir = out.empty() ? fs::path("out") : fs::path(out);
    std::ostringstream points;
    if (table.values) write_points_csv(points, table.points, std::span<const double>(*table.values));
    else write_points_csv(points, table.points);
    write_file_atomic(dir / "points.csv", points.str());
    std::ostringstream edges;
    write_edges_csv(edges, g);
    write_file_atomic(dir / "edges.csv", edges.str());
    std::cout << "ingested " << table.points.size() << " points" << (table.values ? " with values" : "")
              << "; " << k << "-NN graph has " << g.edge_count() << " edges\n";
    return kOk;
}

int cmd_report(const std::string& dir) {
    const auto summary = nlohmann::json::parse(read_file(fs::path(dir) / "summary.json"));
    std::cout << "scenario " << summary.at("scenario").get<std::string>() << ", " << summary.at("trials")
              << " trials, M=" << summary.at("M") << ", metric " << summary.at("metric").get<std::string>() << "\n";
    const auto show = [](const nlohmann::json& v) {
        if (v.is_null()) return std::string("-");
        if (!v.is_number_float()) return v.dump();
        std::ostringstream ss;
        ss << std::setprecision(6) << v.get<double>();
        return ss.str();
    };
    std::cout << std::left << std::setw(8) << "method" << std::setw(12) << "radius" << std::setw(11) << "to-target"
              << std::setw(9) << "median" << std::setw(14) << "final" << "diverged\n";
    for (const auto& [name, m] : summary.at("methods").items()) {
        std::cout << std::left << std::setw(8) << name << std::setw(12) << show(m.at("mean_spectral_radius"))
                  << std::setw(11) << show(m.at("iterations_to_target")) << std::setw(9)
                  << show(m.at("median_iterations_to_target")) << std::setw(14) << show(m.at("final_mean_metric"))
                  << m.at("diverged") << "\n";
    }
    if (const auto it = summary.find("condition_number"); it != summary.end() && !it->is_null()) {
        std::cout << "condition number: mean " << it->at("mean") << ", median " << it->at("median") << ", range ["
                  << it->at("min") << ", " << it->at("max") << "]\n";
    }
    if (const auto it = summary.find("limit_snr_db"); it != summary.end()) {
        std::cout << "limit SNR: " << *it << " dB\n";
    }
    if (const auto it = summary.find("round_log"); it != summary.end()) {
        std::cout << "messages: " << it->at("total_messages") << " over " << it->at("rounds")
                  << " rounds, max hops " << it->at("max_hops") << "\n";
    }
    return kOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Preconditioned gradient descent inverse filtering on spatially distributed networks"};
    app.require_subcommand(1);

    RunArgs run;
    auto* run_cmd = app.add_subcommand("run", "Run a scenario and write curves.csv / summary.json");
    run_cmd->add_option("--config", run.config, "Scenario config (flat JSON)");
    run_cmd->add_option("--seed", run.seed, "Master seed (u64)");
    run_cmd->add_option("--trials", run.trials, "Number of trials")->check(CLI::PositiveNumber);
    run_cmd->add_option("--threads", run.threads, "Worker threads for trials (0 = hardware)");
    run_cmd->add_option("--out", run.out, "Output directory");
    run_cmd->add_flag("--distributed", run.distributed, "Route PGDA/SPGDA through the SDN simulator");
    run_cmd->add_option("--methods", run.methods, "Comma-separated subset of pgda,spgda,opgd,imia");

    GenArgs gen;
    auto* gen_cmd = app.add_subcommand("gen-graph", "Generate a graph (and optionally a filter and signal)");
    gen_cmd->add_option("--config", gen.config, "Scenario config (flat JSON)");
    gen_cmd->add_option("--seed", gen.seed, "Master seed (u64)");
    gen_cmd->add_option("--out", gen.out, "Output directory");
    gen_cmd->add_option("--filter", gen.filter, "Also write filter.csv and signal.csv")
        ->check(CLI::IsMember({"none", "fig1", "denoise"}));

    std::string ingest_points;
    std::size_t ingest_k = 5;
    std::string ingest_out;
    auto* ingest_cmd = app.add_subcommand("ingest", "Validate a points CSV and build its k-NN graph");
    ingest_cmd->add_option("points", ingest_points, "CSV with id,x,y[,value]")->required();
    ingest_cmd->add_option("--k", ingest_k, "Nearest neighbors")->check(CLI::PositiveNumber);
    ingest_cmd->add_option("--out", ingest_out, "Output directory");

    std::string report_dir = "out";
    auto* report_cmd = app.add_subcommand("report", "Summarize a finished run");
    report_cmd->add_option("--out,dir", report_dir, "Run output directory");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kOk : kConfig;
    }

    try {
        if (*run_cmd) return cmd_run(run);
        if (*gen_cmd) return cmd_gen_graph(gen);
        if (*ingest_cmd) return cmd_ingest(ingest_points, ingest_k, ingest_out);
        if (*report_cmd) return cmd_report(report_dir);
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kConfig;
    } catch (const RangeError& e) {
        std::cerr << "range error: " << e.what() << "\n";
        return kConfig;
    } catch (const IoError& e) {
        std::cerr << "i/o error: " << e.what() << "\n";
        return kIo;
    } catch (const NumericError& e) {
        std::cerr << "numeric error: " << e.what() << "\n";
        return kNumeric;
    } catch (const GenerationError& e) {
        std::cerr << "generation error: " << e.what() << "\n";
        return kNumeric;
    } catch (const nlohmann::json::exception& e) {
        std::cerr << "i/o error: " << e.what() << "\n";
        return kIo;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kFailure;
    }
    return kOk;
}
