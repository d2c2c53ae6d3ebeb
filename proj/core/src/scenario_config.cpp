#include <cmath>
#include <set>
#include <string>

#include <json.hpp>

#include "pgdsdn/error.hpp"
#include "pgdsdn/experiment.hpp"

namespace pgdsdn {

namespace {

using nlohmann::json;

template <class T>
T get_as(const json& j, const std::string& key) {
    try {
        return j.get<T>();
    } catch (const json::exception&) {
        throw ConfigError("config key '" + key + "' has the wrong type");
    }
}

std::size_t get_count(const json& j, const std::string& key) {
    if (!j.is_number_unsigned() && !(j.is_number_integer() && j.get<long long>() >= 0)) {
        throw ConfigError("config key '" + key + "' must be a non-negative integer");
    }
    return j.get<std::size_t>();
}

double get_real(const json& j, const std::string& key) {
    if (!j.is_number()) throw ConfigError("config key '" + key + "' must be a number");
    const double v = j.get<double>();
    if (!std::isfinite(v)) throw ConfigError("config key '" + key + "' must be finite");
    return v;
}

std::vector<Method> parse_methods(const json& j) {
    std::vector<std::string> names;
    if (j.is_string()) {
        const auto text = j.get<std::string>();
        std::size_t start = 0;
        while (start <= text.size()) {
            const auto comma = text.find(',', start);
            const auto piece = text.substr(start, comma == std::string::npos ? std::string::npos : comma - start);
            if (!piece.empty()) names.push_back(piece);
            if (comma == std::string::npos) break;
            start = comma + 1;
        }
    } else if (j.is_array()) {
        for (const auto& e : j) names.push_back(get_as<std::string>(e, "methods"));
    } else {
        throw ConfigError("config key 'methods' must be a list or a comma-separated string");
    }
    std::vector<Method> out;
    for (const auto& name : names) {
        try {
            out.push_back(parse_method(name));
        } catch (const ArgumentError& e) {
            throw ConfigError(e.what());
        }
    }
    return out;
}

}  // namespace

std::string_view to_string(Scenario s) {
    switch (s) {
        case Scenario::fig1: return "fig1";
        case Scenario::denoise: return "denoise";
        case Scenario::time_varying: return "time_varying";
        case Scenario::custom: return "custom";
    }
    return "unknown";
}

Scenario parse_scenario(std::string_view text) {
    for (Scenario s : {Scenario::fig1, Scenario::denoise, Scenario::time_varying, Scenario::custom}) {
        if (to_string(s) == text) return s;
    }
    throw ConfigError("unknown scenario '" + std::string(text) + "'");
}

ScenarioConfig parse_config(std::string_view json_text) {
    json j;
    try {
        j = json::parse(json_text);
    } catch (const json::parse_error& e) {
        throw ConfigError(std::string("config is not valid JSON: ") + e.what());
    }
    if (!j.is_object()) throw ConfigError("config must be a JSON object");

    ScenarioConfig cfg;
    cfg.source_text = std::string(json_text);
    if (auto it = j.find("scenario"); it != j.end()) cfg.scenario = parse_scenario(get_as<std::string>(*it, "scenario"));
    if (cfg.scenario == Scenario::time_varying) {
        cfg.n = 64;
        cfg.iterations = 500;
        cfg.trials = 1;
        cfg.distributed = true;
    } else if (cfg.scenario == Scenario::denoise) {
        cfg.n = 218;
        cfg.eta = 35.0;
    }

    for (const auto& [key, value] : j.items()) {
        if (key == "scenario") continue;
        if (key == "n") cfg.n = get_count(value, key);
        else if (key == "radius") cfg.radius = get_real(value, key);
        else if (key == "k") cfg.k = get_count(value, key);
        else if (key == "rgg_max_attempts") cfg.rgg_max_attempts = get_count(value, key);
        else if (key == "gamma") cfg.gamma = get_real(value, key);
        else if (key == "eta") cfg.eta = get_real(value, key);
        else if (key == "alpha") cfg.alpha = get_real(value, key);
        else if (key == "methods") cfg.methods = parse_methods(value);
        else if (key == "M" || key == "iterations") cfg.iterations = get_count(value, key);
        else if (key == "trials") cfg.trials = get_count(value, key);
        else if (key == "master_seed" || key == "seed") cfg.master_seed = get_count(value, key);
        else if (key == "output_dir") cfg.output_dir = get_as<std::string>(value, key);
        else if (key == "distributed") cfg.distributed = get_as<bool>(value, key);
        else if (key == "range") cfg.range = static_cast<unsigned>(get_count(value, key));
        else if (key == "epochs") cfg.epochs = get_count(value, key);
        else if (key == "target_error") cfg.target_error = get_real(value, key);
        else if (key == "snr_margin_db") cfg.snr_margin_db = get_real(value, key);
        else if (key == "divergence_factor") cfg.divergence_factor = get_real(value, key);
        else if (key == "threads") cfg.threads = get_count(value, key);
        else if (key == "spectral") {
            const auto s = get_as<std::string>(value, key);
            if (s == "dense") cfg.spectral = SpectralBackend::dense;
            else if (s == "power") cfg.spectral = SpectralBackend::power;
            else throw ConfigError("config key 'spectral' must be \"dense\" or \"power\"");
        }
        else if (key == "power_tol") cfg.power_tol = get_real(value, key);
        else if (key == "power_max_iter") cfg.power_max_iter = get_count(value, key);
        else if (key == "roundlog_values") cfg.roundlog_values = get_as<bool>(value, key);
        else if (key == "roundlog_max_rounds") cfg.roundlog_max_rounds = get_count(value, key);
        else if (key == "points") cfg.points_path = get_as<std::string>(value, key);
        else if (key == "edges") cfg.edges_path = get_as<std::string>(value, key);
        else if (key == "filter") cfg.filter_path = get_as<std::string>(value, key);
        else if (key == "signal") cfg.signal_path = get_as<std::string>(value, key);
        else throw ConfigError("unknown config key '" + key + "'");
    }
    return cfg;
}

ScenarioConfig load_config(const std::filesystem::path& path) {
    std::string text;
    try {
        text = read_file(path);
    } catch (const IoError& e) {
        throw ConfigError(e.what());
    }
    return parse_config(text);
}

void validate(const ScenarioConfig& cfg) {
    if (cfg.methods.empty()) throw ConfigError("method list is empty");
    if (std::set<Method>(cfg.methods.begin(), cfg.methods.end()).size() != cfg.methods.size()) {
        throw ConfigError("method list has duplicates");
    }
    if (cfg.trials < 1) throw ConfigError("trials must be >= 1");
    if (cfg.iterations < 1) throw ConfigError("M must be >= 1");
    if (cfg.n < 2 && cfg.scenario != Scenario::custom) throw ConfigError("n must be >= 2");
    if (cfg.radius && !(*cfg.radius > 0.0)) throw ConfigError("radius must be positive");
    if (cfg.k < 1) throw ConfigError("k must be >= 1");
    if (cfg.rgg_max_attempts < 1) throw ConfigError("rgg_max_attempts must be >= 1");
    if (cfg.gamma < 0.0) throw ConfigError("gamma must be >= 0");
    if (cfg.eta < 0.0) throw ConfigError("eta must be >= 0");
    if (cfg.alpha < 0.0) throw ConfigError("alpha must be >= 0");
    if (cfg.epochs < 1) throw ConfigError("epochs must be >= 1");
    if (!(cfg.target_error > 0.0)) throw ConfigError("target_error must be positive");
    if (!(cfg.snr_margin_db > 0.0)) throw ConfigError("snr_margin_db must be positive");
    if (!(cfg.divergence_factor > 1.0)) throw ConfigError("divergence_factor must exceed 1");
    if (!(cfg.power_tol > 0.0) || cfg.power_max_iter < 1) throw ConfigError("bad power-iteration settings");
    if (cfg.output_dir.empty()) throw ConfigError("output_dir is empty");
    if (cfg.scenario == Scenario::custom) {
        if (cfg.filter_path.empty() || cfg.signal_path.empty()) {
            throw ConfigError("custom scenario needs 'filter' and 'signal' paths");
        }
        if (cfg.edges_path.empty() && cfg.points_path.empty()) {
            throw ConfigError("custom scenario needs an 'edges' or 'points' path");
        }
    }
}

std::string config_to_json(const ScenarioConfig& cfg) {
    json j;
    j["scenario"] = std::string(to_string(cfg.scenario));
    j["n"] = cfg.n;
    if (cfg.radius) j["radius"] = *cfg.radius;
    j["k"] = cfg.k;
    j["rgg_max_attempts"] = cfg.rgg_max_attempts;
    j["gamma"] = cfg.gamma;
    j["eta"] = cfg.eta;
    j["alpha"] = cfg.alpha;
    std::vector<std::string> methods;
    for (Method m : cfg.methods) methods.emplace_back(to_string(m));
    j["methods"] = methods;
    j["M"] = cfg.iterations;
    j["trials"] = cfg.trials;
    j["master_seed"] = cfg.master_seed;
    j["output_dir"] = cfg.output_dir;
    j["distributed"] = cfg.distributed;
    if (cfg.range) j["range"] = *cfg.range;
    j["epochs"] = cfg.epochs;
    j["target_error"] = cfg.target_error;
    j["snr_margin_db"] = cfg.snr_margin_db;
    j["divergence_factor"] = cfg.divergence_factor;
    j["threads"] = cfg.threads;
    j["spectral"] = cfg.spectral == SpectralBackend::dense ? "dense" : "power";
    j["power_tol"] = cfg.power_tol;
    j["power_max_iter"] = cfg.power_max_iter;
    j["roundlog_values"] = cfg.roundlog_values;
    j["roundlog_max_rounds"] = cfg.roundlog_max_rounds;
    if (!cfg.points_path.empty()) j["points"] = cfg.points_path;
    if (!cfg.edges_path.empty()) j["edges"] = cfg.edges_path;
    if (!cfg.filter_path.empty()) j["filter"] = cfg.filter_path;
    if (!cfg.signal_path.empty()) j["signal"] = cfg.signal_path;
    return j.dump();
}

}  // namespace pgdsdn
