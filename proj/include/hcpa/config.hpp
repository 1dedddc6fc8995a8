/*
 Copyright 2026 The hcpa Authors

 Licensed under the Apache License, Version 2.0 (the "License");
 you may not use this file except in compliance with the License.
 You may obtain a copy of the License at

      https://www.apache.org/licenses/LICENSE-2.0

 Unless required by applicable law or agreed to in writing, software
 distributed under the License is distributed on an "AS IS" BASIS,
 WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 See the License for the specific language governing permissions and
 limitations under the License.
*/

// Run configuration (JSON) and JSON reports.
//
// Schema (every section except "model" is optional; unknown keys are errors):
//
//   model        { a, b, sigma, alpha, beta, T, W0, lambda_min? }
//   grid         { n_steps }                       Riccati grid on [0, T]
//   contract     { lambda_A }                      multiplier for riccati/simulate
//   mc           { n_paths, quick_n_paths, seed, n_steps, dump_paths }
//   sweep        { lambda_A_min, lambda_A_max, points }
//   calibration  { tol, eps }
//   feedback_pde { x_min, x_max, nx, y_min, y_max, ny, n_time_steps }
//   burgers      { kind, value, slope, intercept, table, L, nodes, time_nodes,
//                  x_min, x_max, nx, n_time_steps, out_x_min, out_x_max,
//                  out_nx, out_nt }
//   check        { corrupt_terminal }
//   output       { dir }

#ifndef HCPA_CONFIG_HPP
#define HCPA_CONFIG_HPP

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <initializer_list>
#include <string>
#include <string_view>

#include <json.hpp>

#include "hcpa/burgers.hpp"
#include "hcpa/contract.hpp"
#include "hcpa/errors.hpp"
#include "hcpa/feedback_pde.hpp"
#include "hcpa/model.hpp"

namespace hcpa {

struct SweepSpec {
    double lambda_A_min = -0.95;
    double lambda_A_max = 0.95;
    std::size_t points = 41;

    std::vector<double> grid() const { return linspace(lambda_A_min, lambda_A_max, points); }
};

struct BurgersSpec {
    std::string kind = "linear";  ///< constant | linear | tabulated
    double value = 1.0;           ///< constant kind
    double slope = 1.0;           ///< linear kind
    double intercept = 0.0;
    std::string table;            ///< tabulated kind: CSV path (t,x,s)
    QuadratureConfig quad;
    HeatGrid heat;
    double out_x_min = -1.0;
    double out_x_max = 2.0;
    std::size_t out_nx = 31;
    std::size_t out_nt = 35;
};

struct RunConfig {
    ModelParams model;
    std::size_t riccati_steps = 2000;
    double lambda_A = 0.8660254037844386;  // lambda_P = 0.5
    MonteCarloConfig mc;
    std::size_t quick_n_paths = 10000;
    std::size_t dump_paths = 20;
    SweepSpec sweep;
    double calibration_tol = 1e-3;
    MultiplierRange range;
    SpaceGrid2D feedback_pde;
    BurgersSpec burgers;
    bool corrupt_terminal = false;
    std::string output_dir = "out";
    std::filesystem::path base_dir;  ///< directory of the config file

    /// Throws ConfigError on any invariant violation.
    void validate() const {
        model.validate();
        if (riccati_steps < 4) throw ConfigError("grid.n_steps must be >= 4");
        Multipliers::from_lambda_A(lambda_A, model.lambda_min);
        if (mc.n_paths == 0 || quick_n_paths == 0) throw ConfigError("mc.n_paths must be positive");
        if (mc.n_steps < 2) throw ConfigError("mc.n_steps must be >= 2");
        if (sweep.points == 0) throw ConfigError("sweep.points must be positive");
        if (sweep.points > 1 && !(sweep.lambda_A_max > sweep.lambda_A_min))
            throw ConfigError("sweep.lambda_A_max must exceed lambda_A_min");
        for (double la : sweep.grid()) Multipliers::from_lambda_A(la, model.lambda_min);
        if (!(calibration_tol > 0.0)) throw ConfigError("calibration.tol must be > 0");
        if (!(range.eps > 0.0 && range.eps < 1.0)) throw ConfigError("calibration.eps must lie in (0, 1)");
        if (feedback_pde.nx < 3 || feedback_pde.ny < 3 || feedback_pde.n_time_steps < 2)
            throw ConfigError("feedback_pde grid too small");
        if (burgers.kind != "constant" && burgers.kind != "linear" && burgers.kind != "tabulated")
            throw ConfigError("burgers.kind must be constant, linear or tabulated");
        if (burgers.kind == "tabulated" && burgers.table.empty()) throw ConfigError("burgers.table is required");
        burgers.quad.validate();
        if (burgers.out_nx < 2 || burgers.out_nt < 1) throw ConfigError("burgers output grid too small");
    }

    CashFlowField cash_flow() const {
        if (burgers.kind == "constant") return CashFlowField::constant(burgers.value);
        if (burgers.kind == "linear") return CashFlowField::linear(burgers.slope, burgers.intercept);
        std::filesystem::path p(burgers.table);
        if (p.is_relative()) p = base_dir / p;
        std::ifstream in(p);
        if (!in) throw ConfigError("cannot open cash-flow table " + p.string());
        return CashFlowField::from_csv(in);
    }
};

namespace detail {

using nlohmann::json;

inline void reject_unknown(const json& obj, std::string_view section, std::initializer_list<std::string_view> keys) {
    if (!obj.is_object()) throw ConfigError(std::string(section) + " must be a JSON object");
    for (const auto& [k, _] : obj.items()) {
        bool ok = false;
        for (auto name : keys) ok = ok || k == name;
        if (!ok) throw ConfigError("unknown key '" + k + "' in " + std::string(section));
    }
}

template <class T>
void read_opt(const json& obj, const char* key, T& out) {
    if (!obj.contains(key)) return;
    try {
        out = obj.at(key).get<T>();
    } catch (const json::exception& e) {
        throw ConfigError(std::string("bad value for '") + key + "': " + e.what());
    }
}

template <class T>
void read_req(const json& obj, const char* key, T& out, std::string_view section) {
    if (!obj.contains(key)) throw ConfigError("missing '" + std::string(key) + "' in " + std::string(section));
    read_opt(obj, key, out);
}

}  // namespace detail

inline RunConfig parse_config(const nlohmann::json& j, std::filesystem::path base_dir = {}) {
    using detail::read_opt;
    using detail::read_req;
    RunConfig c;
    c.base_dir = std::move(base_dir);
    detail::reject_unknown(j, "config",
                           {"model", "grid", "contract", "mc", "sweep", "calibration", "feedback_pde", "burgers",
                            "check", "output"});
    if (!j.contains("model")) throw ConfigError("config needs a 'model' section");
    const auto& m = j.at("model");
    detail::reject_unknown(m, "model", {"a", "b", "sigma", "alpha", "beta", "T", "W0", "lambda_min"});
    read_req(m, "a", c.model.a, "model");
    read_req(m, "b", c.model.b, "model");
    read_req(m, "sigma", c.model.sigma, "model");
    read_req(m, "alpha", c.model.alpha, "model");
    read_req(m, "beta", c.model.beta, "model");
    read_req(m, "T", c.model.T, "model");
    read_req(m, "W0", c.model.W0, "model");
    read_opt(m, "lambda_min", c.model.lambda_min);
    if (j.contains("grid")) {
        detail::reject_unknown(j["grid"], "grid", {"n_steps"});
        read_opt(j["grid"], "n_steps", c.riccati_steps);
    }
    c.mc.riccati_steps = c.riccati_steps;
    if (j.contains("contract")) {
        detail::reject_unknown(j["contract"], "contract", {"lambda_A"});
        read_opt(j["contract"], "lambda_A", c.lambda_A);
    }
    if (j.contains("mc")) {
        const auto& s = j["mc"];
        detail::reject_unknown(s, "mc", {"n_paths", "quick_n_paths", "seed", "n_steps", "dump_paths"});
        read_opt(s, "n_paths", c.mc.n_paths);
        read_opt(s, "quick_n_paths", c.quick_n_paths);
        read_opt(s, "seed", c.mc.seed);
        read_opt(s, "n_steps", c.mc.n_steps);
        read_opt(s, "dump_paths", c.dump_paths);
    }
    if (j.contains("sweep")) {
        const auto& s = j["sweep"];
        detail::reject_unknown(s, "sweep", {"lambda_A_min", "lambda_A_max", "points"});
        read_opt(s, "lambda_A_min", c.sweep.lambda_A_min);
        read_opt(s, "lambda_A_max", c.sweep.lambda_A_max);
        read_opt(s, "points", c.sweep.points);
    }
    if (j.contains("calibration")) {
        const auto& s = j["calibration"];
        detail::reject_unknown(s, "calibration", {"tol", "eps"});
        read_opt(s, "tol", c.calibration_tol);
        read_opt(s, "eps", c.range.eps);
    }
    if (j.contains("feedback_pde")) {
        const auto& s = j["feedback_pde"];
        detail::reject_unknown(s, "feedback_pde", {"x_min", "x_max", "nx", "y_min", "y_max", "ny", "n_time_steps"});
        read_opt(s, "x_min", c.feedback_pde.x_min);
        read_opt(s, "x_max", c.feedback_pde.x_max);
        read_opt(s, "nx", c.feedback_pde.nx);
        read_opt(s, "y_min", c.feedback_pde.y_min);
        read_opt(s, "y_max", c.feedback_pde.y_max);
        read_opt(s, "ny", c.feedback_pde.ny);
        read_opt(s, "n_time_steps", c.feedback_pde.n_time_steps);
    }
    if (j.contains("burgers")) {
        const auto& s = j["burgers"];
        detail::reject_unknown(s, "burgers",
                               {"kind", "value", "slope", "intercept", "table", "L", "nodes", "time_nodes", "x_min",
                                "x_max", "nx", "n_time_steps", "out_x_min", "out_x_max", "out_nx", "out_nt"});
        auto& b = c.burgers;
        read_opt(s, "kind", b.kind);
        read_opt(s, "value", b.value);
        read_opt(s, "slope", b.slope);
        read_opt(s, "intercept", b.intercept);
        read_opt(s, "table", b.table);
        read_opt(s, "L", b.quad.L);
        read_opt(s, "nodes", b.quad.nodes);
        read_opt(s, "time_nodes", b.quad.time_nodes);
        read_opt(s, "x_min", b.heat.x_min);
        read_opt(s, "x_max", b.heat.x_max);
        read_opt(s, "nx", b.heat.nx);
        read_opt(s, "n_time_steps", b.heat.n_time_steps);
        read_opt(s, "out_x_min", b.out_x_min);
        read_opt(s, "out_x_max", b.out_x_max);
        read_opt(s, "out_nx", b.out_nx);
        read_opt(s, "out_nt", b.out_nt);
    }
    if (j.contains("check")) {
        detail::reject_unknown(j["check"], "check", {"corrupt_terminal"});
        read_opt(j["check"], "corrupt_terminal", c.corrupt_terminal);
    }
    if (j.contains("output")) {
        detail::reject_unknown(j["output"], "output", {"dir"});
        read_opt(j["output"], "dir", c.output_dir);
    }
    c.validate();
    return c;
}

/// Throws ConfigError on unreadable files, malformed JSON or invalid values.
inline RunConfig load_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file " + path.string());
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError("malformed JSON in " + path.string() + ": " + e.what());
    }
    return parse_config(j, path.parent_path());
}

inline nlohmann::json to_json(const CostEstimate& e) {
    return {{"mean", e.mean}, {"se", e.std_error}, {"n_paths", e.n_paths}};
}

inline nlohmann::json to_json(const WinWinReport& r) {
    nlohmann::json j;
    j["W0"] = r.W0;
    j["W_c"] = r.W_c;
    j["informative"] = r.informative;
    j["JA_lambda0"] = to_json(r.JA_zero);
    j["JP_lambda0"] = to_json(r.JP_zero);
    if (r.calibration) {
        j["lambda_A0"] = r.calibration->lambda_A0;
        j["lambda_P0"] = r.calibration->lambda_P0;
        j["iterations"] = r.calibration->iterations;
        j["JA_calibrated"] = to_json(r.JA_calibrated);
        j["JP_calibrated"] = to_json(r.JP_calibrated);
        j["JP_gap"] = to_json(r.JP_gap);
        j["agent_benefits"] = r.agent_benefits;
        j["principal_benefits"] = r.principal_benefits;
    } else {
        j["lambda_A0"] = nullptr;
    }
    j["note"] = r.note;
    return j;
}

}  // namespace hcpa

#endif  // HCPA_CONFIG_HPP
