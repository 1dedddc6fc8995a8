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

// hcpa: command-line driver for the principal-agent contract experiments.
//
//   hcpa riccati   --config cfg.json [--out DIR]
//   hcpa simulate  --config cfg.json [--riccati-csv FILE]
//   hcpa sweep     --config cfg.json
//   hcpa calibrate --config cfg.json
//   hcpa burgers   --config cfg.json
//   hcpa check     --config cfg.json
//
// Common flags: --out DIR, --threads N (0 = all), --quick.
// Exit codes: 0 ok, 1 config error, 2 numerical blow-up, 3 infeasible
// calibration; `check` exits with the number of failed groups (max 125).

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "check_suite.hpp"
#include "hcpa/config.hpp"
#include "hcpa/hcpa.hpp"

namespace fs = std::filesystem;
using namespace hcpa;

namespace {

constexpr int kExitConfig = 1;
constexpr int kExitBlowUp = 2;
constexpr int kExitInfeasible = 3;

struct Options {
    std::string config;
    std::string out;
    unsigned threads = 0;
    bool quick = false;
    std::string riccati_csv;
};

struct Context {
    RunConfig cfg;
    fs::path out_dir;
    unsigned threads = 0;
    bool quick = false;

    MonteCarloConfig mc() const {
        MonteCarloConfig mc = cfg.mc;
        mc.threads = threads;
        if (quick) mc.n_paths = std::min(mc.n_paths, cfg.quick_n_paths);
        return mc;
    }
};

std::ofstream open_output(const Context& ctx, const std::string& name) {
    fs::create_directories(ctx.out_dir);
    std::ofstream os(ctx.out_dir / name);
    if (!os) throw ConfigError("cannot write " + (ctx.out_dir / name).string());
    return os;
}

void write_json(const Context& ctx, const std::string& name, const nlohmann::json& j) {
    auto os = open_output(ctx, name);
    os << j.dump(2) << '\n';
}

int cmd_riccati(const Context& ctx) {
    const auto& m = ctx.cfg.model;
    const auto mult = Multipliers::from_lambda_A(ctx.cfg.lambda_A, m.lambda_min);
    std::optional<RiccatiTable> solved;
    try {
        solved = solve_riccati(m, mult, TimeGrid(0.0, m.T, ctx.cfg.riccati_steps));
    } catch (const BlowUp& e) {
        std::cerr << "Riccati system blew up for lambda_A = " << mult.lambda_A() << ", lambda_P = " << mult.lambda_P()
                  << ": " << e.what() << '\n';
        return kExitBlowUp;
    }
    const RiccatiTable& table = *solved;
    auto os = open_output(ctx, "riccati.csv");
    write_riccati_csv(os, table);
    const auto want = riccati_terminal(m, mult);
    const auto got = table.node(table.grid.n_steps());
    std::cout << "terminal row (C1, C2, D1, D2) = (" << csv::format(got[0]) << ", " << csv::format(got[1]) << ", "
              << csv::format(got[2]) << ", " << csv::format(got[3]) << ") "
              << (got == want ? "matches" : "DOES NOT MATCH") << " terminal data\n";
    const auto c0 = table.node(0);
    std::cout << "initial row (C1, C2, D1, D2) = (" << c0[0] << ", " << c0[1] << ", " << c0[2] << ", " << c0[3]
              << ")\n";
    std::cout << "wrote " << (ctx.out_dir / "riccati.csv").string() << '\n';
    return 0;
}

int cmd_simulate(const Context& ctx, const std::string& riccati_csv) {
    const auto& m = ctx.cfg.model;
    const auto mult = Multipliers::from_lambda_A(ctx.cfg.lambda_A, m.lambda_min);
    const RiccatiTable table = [&] {
        if (riccati_csv.empty()) return solve_riccati(m, mult, TimeGrid(0.0, m.T, ctx.cfg.riccati_steps));
        std::ifstream in(riccati_csv);
        if (!in) throw ConfigError("cannot open " + riccati_csv);
        return read_riccati_csv(in, m, mult);
    }();
    const auto mc = ctx.mc();
    const auto pc = simulate_path_costs(table, mc);
    const auto ja = estimate(pc.ja), jp = estimate(pc.jp);

    // first paths of the same streams, for plotting
    const std::size_t n_dump = std::min(ctx.cfg.dump_paths, mc.n_paths);
    if (n_dump > 0) {
        SimulationOptions opt;
        opt.threads = ctx.threads;
        const auto ens = simulate_closed_loop(table, n_dump, mc.seed, TimeGrid(0.0, m.T, mc.n_steps), opt);
        auto os = open_output(ctx, "paths.csv");
        write_paths_csv(os, ens);
        std::cout << "R quadrature max relative deviation over " << n_dump
                  << " dumped paths: " << check_R_quadrature(ens, table) << '\n';
    }
    nlohmann::json j{{"lambda_A", mult.lambda_A()}, {"lambda_P", mult.lambda_P()}, {"seed", mc.seed},
                     {"n_steps", mc.n_steps},       {"JA", to_json(ja)},            {"JP", to_json(jp)}};
    write_json(ctx, "costs.json", j);
    std::cout << "JA = " << csv::format(ja.mean) << " +- " << ja.std_error << "\n"
              << "JP = " << csv::format(jp.mean) << " +- " << jp.std_error << "\n";
    return 0;
}

int cmd_sweep(const Context& ctx) {
    const auto res = sweep_multipliers(ctx.cfg.model, ctx.cfg.sweep.grid(), ctx.mc());
    auto os = open_output(ctx, "sweep.csv");
    write_sweep_csv(os, res);
    std::size_t infeasible = 0, ja_violations = 0, jp_violations = 0;
    for (const auto& r : res.rows) infeasible += r.feasible ? 0 : 1;
    for (const auto& s : res.ja_steps) ja_violations += s.diff.mean < 0.0 ? 0 : 1;
    for (const auto& d : res.jp_mirror) jp_violations += d.diff.mean < 0.0 ? 0 : 1;
    std::cout << res.rows.size() << " rows (" << infeasible << " infeasible); JA increases at " << ja_violations
              << " of " << res.ja_steps.size() << " adjacent pairs; JP(-|l|) >= JP(+|l|) at " << jp_violations
              << " of " << res.jp_mirror.size() << " mirrored pairs\n";
    std::cout << "wrote " << (ctx.out_dir / "sweep.csv").string() << '\n';
    return 0;
}

int cmd_calibrate(const Context& ctx) {
    const auto& m = ctx.cfg.model;
    try {
        const auto rep = win_win_report(m, ctx.mc(), ctx.cfg.calibration_tol, ctx.cfg.range);
        write_json(ctx, "report.json", to_json(rep));
        if (rep.calibration)
            std::cout << "lambda_A0 = " << rep.calibration->lambda_A0 << " (JA = " << rep.JA_calibrated.mean
                      << "), W_c = " << rep.W_c << ", agent benefits: " << std::boolalpha << rep.agent_benefits
                      << ", principal benefits: " << rep.principal_benefits << '\n';
        else
            std::cout << rep.note << '\n';
        return 0;
    } catch (const NotBracketed& e) {
        write_json(ctx, "report.json",
                   {{"error", "NotBracketed"}, {"message", e.what()}, {"W0", m.W0},
                    {"JA_range", {e.ja_low(), e.ja_high()}}});
        std::cerr << e.what() << '\n';
        return kExitInfeasible;
    } catch (const ThresholdBelowWc& e) {
        write_json(ctx, "report.json",
                   {{"error", "ThresholdBelowWc"}, {"message", e.what()}, {"W0", m.W0}, {"W_c", e.wc()}});
        std::cerr << e.what() << '\n';
        return kExitInfeasible;
    }
}

int cmd_burgers(const Context& ctx) {
    const auto& cfg = ctx.cfg;
    const auto& m = cfg.model;
    const auto& b = cfg.burgers;
    const auto field = cfg.cash_flow();
    const std::size_t nt = b.out_nt;
    // rows t_0..t_{nt-1} < T plus the terminal row phi(T) = 0
    const auto quad = tabulate([&](double t, double x) { return effort_hopf_cole(t, x, field, m, b.quad); }, m.T, nt,
                               b.out_x_min, b.out_x_max, b.out_nx);
    auto os = open_output(ctx, "effort.csv");
    write_effort_csv(os, quad);

    const auto heat = heat_solve_check(field, m, b.heat);
    double fd_gap = 0.0, closed_gap = 0.0, max_effort = 0.0;
    for (std::size_t i = 0; i <= nt; ++i)
        for (std::size_t j = 0; j < quad.nx; ++j) {
            const double t = quad.t(i), x = quad.x(j), e = quad.at(i, j);
            max_effort = std::max(max_effort, std::abs(e));
            if (x >= b.heat.x_min && x <= b.heat.x_max) fd_gap = std::max(fd_gap, std::abs(heat.phi.interpolate(t, x) - e));
            if (field.kind() == CashFlowField::Kind::linear && b.slope == 1.0 && b.intercept == 0.0)
                closed_gap = std::max(closed_gap, std::abs(linear_cashflow_effort(t, x, m) - e));
        }
    nlohmann::json j{{"kind", b.kind}, {"max_abs_effort", max_effort}, {"max_quadrature_vs_fd", fd_gap}};
    std::cout << "kind " << b.kind << ": max |effort| " << max_effort << ", quadrature vs FD heat route " << fd_gap;
    if (field.kind() == CashFlowField::Kind::linear && b.slope == 1.0 && b.intercept == 0.0) {
        j["max_quadrature_vs_closed_form"] = closed_gap;
        std::cout << ", quadrature vs closed form " << closed_gap;
    }
    std::cout << '\n';
    write_json(ctx, "burgers.json", j);
    return 0;
}

int cmd_check(const Context& ctx) {
    const auto outcomes = tools::run_check_suite(ctx.cfg, ctx.threads);
    int failed = 0;
    for (const auto& o : outcomes) {
        std::cout << (o.passed ? "[PASS] " : "[FAIL] ") << o.group << ": " << o.detail << '\n';
        failed += o.passed ? 0 : 1;
    }
    std::cout << outcomes.size() - static_cast<std::size_t>(failed) << "/" << outcomes.size() << " groups passed\n";
    return std::min(failed, 125);
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Optimal hidden contracts: Riccati feedback, Monte-Carlo costs, Hopf-Cole effort"};
    app.require_subcommand(1);
    Options opt;
    auto add_common = [&](CLI::App* sub) {
        sub->add_option("--config", opt.config, "JSON run configuration")->required()->check(CLI::ExistingFile);
        sub->add_option("--out", opt.out, "output directory (overrides output.dir)");
        sub->add_option("--threads", opt.threads, "worker threads, 0 = all")->default_val(0);
        sub->add_flag("--quick", opt.quick, "quick-test sizes");
        return sub;
    };
    auto* riccati = add_common(app.add_subcommand("riccati", "solve the Riccati system and write riccati.csv"));
    auto* simulate = add_common(app.add_subcommand("simulate", "simulate the optimal contract, estimate costs"));
    simulate->add_option("--riccati-csv", opt.riccati_csv, "use a previously written Riccati table");
    auto* sweep = add_common(app.add_subcommand("sweep", "Monte-Carlo costs over a lambda_A grid"));
    auto* calibrate = add_common(app.add_subcommand("calibrate", "calibrate the participation constraint"));
    auto* burgers = add_common(app.add_subcommand("burgers", "Hopf-Cole effort for a given cash flow"));
    auto* check = add_common(app.add_subcommand("check", "run the invariant suite"));

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : kExitConfig;
    }

    try {
        Context ctx;
        ctx.cfg = load_config(opt.config);
        ctx.out_dir = opt.out.empty() ? fs::path(ctx.cfg.output_dir) : fs::path(opt.out);
        ctx.threads = opt.threads;
        ctx.quick = opt.quick;
        if (*riccati) return cmd_riccati(ctx);
        if (*simulate) return cmd_simulate(ctx, opt.riccati_csv);
        if (*sweep) return cmd_sweep(ctx);
        if (*calibrate) return cmd_calibrate(ctx);
        if (*burgers) return cmd_burgers(ctx);
        if (*check) return cmd_check(ctx);
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return kExitConfig;
    } catch (const MultiplierFloor& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return kExitConfig;
    } catch (const NumericalError& e) {
        std::cerr << "numerical failure: " << e.what() << '\n';
        return kExitBlowUp;
    } catch (const Infeasible& e) {
        std::cerr << "infeasible: " << e.what() << '\n';
        return kExitInfeasible;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitConfig;
    }
    return 0;
}
