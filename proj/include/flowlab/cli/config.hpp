#pragma once
// Scenario configuration: a flat JSON object with defaults, strict key
// checking and range validation. The canonical dump() is the reference
// serialization the golden-file test pins down.

#include <json.hpp> // vendored nlohmann/json
#include <set>
#include <string>

#include "flowlab/flow/state.hpp"
#include "flowlab/io/csv.hpp"

namespace flowlab {

struct ScenarioConfig {
    std::string scenario = "fixed_point";
    Formulation formulation = Formulation::SKRF_metric;
    double s_max = 6.0;
    int n = 801;
    double dt = 1e-3;
    double horizon = 10.0;
    int stride = 100;
    int filter_degree = 2;
    double c = 0.3;        ///< tanh volume-form coefficient
    double epsilon = 0.05; ///< traceless perturbation amplitude
    double factor = 4.0;   ///< conformal rescale factor
    bool diagnostics = true;
    bool plots = false;
    std::string output_dir = "out";
    std::uint64_t seed = 20240811ULL;

    std::string dump() const {
        std::string s;
        s += "scenario = " + scenario + "\n";
        s += "formulation = " + std::string(to_string(formulation)) + "\n";
        s += "S_max = " + format_num(s_max) + "\n";
        s += "N = " + std::to_string(n) + "\n";
        s += "dt = " + format_num(dt) + "\n";
        s += "T = " + format_num(horizon) + "\n";
        s += "stride = " + std::to_string(stride) + "\n";
        s += "filter_degree = " + std::to_string(filter_degree) + "\n";
        s += "c = " + format_num(c) + "\n";
        s += "epsilon = " + format_num(epsilon) + "\n";
        s += "factor = " + format_num(factor) + "\n";
        s += "diagnostics = " + std::string(diagnostics ? "true" : "false") + "\n";
        s += "plots = " + std::string(plots ? "true" : "false") + "\n";
        s += "output_dir = " + output_dir + "\n";
        s += "seed = " + std::to_string(seed) + "\n";
        return s;
    }
};

inline Formulation formulation_from_string(const std::string& s) {
    if (s == "SRF") return Formulation::SRF;
    if (s == "SKRF_metric") return Formulation::SKRF_metric;
    if (s == "SKRF_symplectic") return Formulation::SKRF_symplectic;
    if (s == "BackwardKRF_gauged") return Formulation::BackwardKRF_gauged;
    if (s == "Baby_closed_form") return Formulation::Baby_closed_form;
    throw ConfigError("formulation", "unknown formulation '" + s + "'");
}

/// Scenario-specific defaults; the config file can override any of them.
inline void apply_scenario_defaults(ScenarioConfig& cfg) {
    if (cfg.scenario == "fixed_point") {
        cfg.horizon = 5.0;
        cfg.filter_degree = 1;
    } else if (cfg.scenario == "conformal_rescale") {
        cfg.horizon = 10.0;
        cfg.filter_degree = 1;
        cfg.factor = 4.0;
    } else if (cfg.scenario == "tanh_soliton_volume") {
        cfg.horizon = 3.0;
        cfg.filter_degree = 2;
        cfg.c = 0.3;
    } else if (cfg.scenario == "traceless_perturbation") {
        cfg.horizon = 12.0;
        cfg.filter_degree = 2;
        cfg.epsilon = 0.05;
    } else {
        throw ConfigError("scenario", "unknown scenario '" + cfg.scenario + "'");
    }
}

/// Parse a JSON config. Malformed text raises ParseError with the position;
/// well-formed text with bad values raises ConfigError naming the key.
inline ScenarioConfig parse_config(const std::string& text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        throw ParseError(std::string("config parse error: ") + e.what());
    }
    if (!j.is_object()) throw ParseError("config must be a JSON object");

    static const std::set<std::string> known = {
        "scenario", "formulation", "S_max", "N", "dt", "T", "stride", "filter_degree",
        "c", "epsilon", "factor", "diagnostics", "plots", "output_dir", "seed"};
    for (auto it = j.begin(); it != j.end(); ++it)
        if (!known.count(it.key()))
            throw ConfigError(it.key(), "unknown key '" + it.key() + "'");

    ScenarioConfig cfg;
    if (!j.contains("scenario")) throw ConfigError("scenario", "missing key 'scenario'");
    cfg.scenario = j.at("scenario").get<std::string>();
    apply_scenario_defaults(cfg);

    try {
        if (j.contains("formulation"))
            cfg.formulation = formulation_from_string(j.at("formulation").get<std::string>());
        if (j.contains("S_max")) cfg.s_max = j.at("S_max").get<double>();
        if (j.contains("N")) cfg.n = j.at("N").get<int>();
        if (j.contains("dt")) cfg.dt = j.at("dt").get<double>();
        if (j.contains("T")) cfg.horizon = j.at("T").get<double>();
        if (j.contains("stride")) cfg.stride = j.at("stride").get<int>();
        if (j.contains("filter_degree")) cfg.filter_degree = j.at("filter_degree").get<int>();
        if (j.contains("c")) cfg.c = j.at("c").get<double>();
        if (j.contains("epsilon")) cfg.epsilon = j.at("epsilon").get<double>();
        if (j.contains("factor")) cfg.factor = j.at("factor").get<double>();
        if (j.contains("diagnostics")) cfg.diagnostics = j.at("diagnostics").get<bool>();
        if (j.contains("plots")) cfg.plots = j.at("plots").get<bool>();
        if (j.contains("output_dir")) cfg.output_dir = j.at("output_dir").get<std::string>();
        if (j.contains("seed")) cfg.seed = j.at("seed").get<std::uint64_t>();
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError("(type)", std::string("config value has wrong type: ") + e.what());
    }

    if (cfg.s_max <= 0.0) throw ConfigError("S_max", "S_max must be positive");
    if (cfg.n < 5 || cfg.n % 2 == 0) throw ConfigError("N", "N must be odd and >= 5");
    if (!(cfg.dt > 0.0)) throw ConfigError("dt", "dt must be positive");
    if (!(cfg.horizon > 0.0)) throw ConfigError("T", "T must be positive");
    if (cfg.stride < 1) throw ConfigError("stride", "stride must be >= 1");
    if (cfg.filter_degree < 0 || cfg.filter_degree > 64)
        throw ConfigError("filter_degree", "filter_degree must be in [0, 64]");
    if (!(std::abs(cfg.c) < 1.0)) throw ConfigError("c", "c must satisfy |c|<1");
    if (!(cfg.factor > 0.0)) throw ConfigError("factor", "factor must be positive");
    return cfg;
}

} // namespace flowlab
