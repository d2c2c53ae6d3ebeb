#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <limits>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "pgdsdn/csv_io.hpp"
#include "pgdsdn/filter.hpp"
#include "pgdsdn/sdn.hpp"
#include "pgdsdn/solver.hpp"

namespace pgdsdn {

enum class Scenario { fig1, denoise, time_varying, custom };

std::string_view to_string(Scenario s);
Scenario parse_scenario(std::string_view text);

/// How the harness measures spectral radii and condition numbers.
enum class SpectralBackend { dense, power };

struct ScenarioConfig {
    Scenario scenario = Scenario::fig1;
    std::size_t n = 512;
    /// RGG connection radius; sqrt(2/n) when unset.
    std::optional<double> radius;
    std::size_t k = 5;
    /// Connectivity retries per RGG sample; at the default radius only about
    /// one sample in a hundred is connected.
    std::size_t rgg_max_attempts = 4096;
    double gamma = 0.05;
    double eta = 0.2;
    double alpha = 0.9075;
    std::vector<Method> methods{std::begin(kAllMethods), std::end(kAllMethods)};
    std::size_t iterations = 200;
    std::size_t trials = 100;
    std::uint64_t master_seed = 20190501;
    std::string output_dir = "out";
    bool distributed = false;
    /// Communication range L; the filter's width when unset.
    std::optional<unsigned> range;
    std::size_t epochs = 3;
    /// E_2 level for the iterations-to-target statistic.
    double target_error = 0.05;
    /// Denoise: distance to the limit SNR counted as "reached", in dB.
    double snr_margin_db = 0.1;
    double divergence_factor = 1e6;
    std::size_t threads = 1;
    SpectralBackend spectral = SpectralBackend::dense;
    double power_tol = 1e-10;
    std::size_t power_max_iter = 20000;
    bool roundlog_values = true;
    std::size_t roundlog_max_rounds = 4;
    /// Inputs for denoise (points with values) and custom (graph + filter + signal).
    std::string points_path;
    std::string edges_path;
    std::string filter_path;
    std::string signal_path;
    /// Text the config was parsed from, echoed into summary.json.
    std::string source_text;
};

/// Parses a flat JSON object; unknown keys and bad values raise ConfigError.
ScenarioConfig parse_config(std::string_view json_text);
ScenarioConfig load_config(const std::filesystem::path& path);
/// Throws ConfigError on inconsistent settings.
void validate(const ScenarioConfig& cfg);
std::string config_to_json(const ScenarioConfig& cfg);

/// Value 0.5 - 2x on strips 0 and 2, 0.5 + x^2 + y^2 on strips 1 and 3,
/// where the strip of (x, y) is min(3, floor(2(x + y))).
Signal blockwise_polynomial(const GraphPtr& g);
/// Adds i.i.d. U[-eta, eta] noise to every component.
Signal add_uniform_noise(const Signal& x, double eta, std::uint64_t seed);

/// Uniform points on [0,1]^2 carrying 70 + 15 sin(2 pi x) cos(pi y) + 10 y.
PointsTable synthetic_temperature_field(std::size_t n, std::uint64_t seed);

struct MethodAggregate {
    Method method = Method::pgda;
    /// Trial mean of E_2(m) (or SNR(m) in dB for denoise), m = 0..M.
    std::vector<double> mean_curve;
    /// Trial mean of the geometric envelope on E_2 (pgda/spgda only).
    std::vector<double> mean_envelope;
    std::vector<double> spectral_radii;
    double mean_spectral_radius = 0.0;
    /// First m at which the mean curve meets the target, if it does.
    std::optional<std::size_t> iterations_to_target;
    /// Median over completed trials of each trial's own first hit (inf when
    /// more than half never hit).
    double median_iterations_to_target = std::numeric_limits<double>::quiet_NaN();
    std::size_t completed = 0;
    /// Residual blow-up, or an iteration matrix with spectral radius >= 1.
    std::size_t diverged = 0;
};

struct EpochSummary {
    std::size_t epoch = 0;
    std::size_t messages = 0;
    std::size_t rounds = 0;
    double rel_error = 0.0;
};

struct TrialAggregate {
    Scenario scenario = Scenario::fig1;
    std::string metric;
    std::size_t trials = 0;
    std::size_t iterations = 0;
    std::vector<std::uint64_t> trial_seeds;
    std::vector<MethodAggregate> methods;
    std::vector<double> condition_numbers;
    std::vector<double> oracle_residuals;
    std::vector<double> signal_norms;
    std::vector<double> observation_norms;
    /// Denoise: trial-mean SNR of the direct solution against the clean values.
    std::optional<double> limit_snr;
    std::vector<EpochSummary> epochs;
    std::optional<RoundLog> round_log;

    const MethodAggregate& at(Method m) const;
};

TrialAggregate run_fig1(const ScenarioConfig& cfg);
TrialAggregate run_denoise(const ScenarioConfig& cfg, const PointsTable& data);
TrialAggregate run_time_varying(const ScenarioConfig& cfg);
TrialAggregate run_custom(const ScenarioConfig& cfg);
/// Dispatches on cfg.scenario, loading whatever inputs it names.
TrialAggregate run_scenario(const ScenarioConfig& cfg);

std::string curves_csv(const TrialAggregate& agg);
std::string summary_json(const TrialAggregate& agg, const ScenarioConfig& cfg);

/// Writes curves.csv, summary.json, and (when present) roundlog.csv and
/// epochs.csv into `dir`, each atomically.
void emit_outputs(const TrialAggregate& agg, const ScenarioConfig& cfg, const std::filesystem::path& dir);

}  // namespace pgdsdn
