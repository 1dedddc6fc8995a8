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

// Monte-Carlo estimation of the agent and principal costs
//
//     J_A = E[ int_0^T (s - e)^2 / 2 dt - alpha x(T)^2 / 2 ]
//     J_P = E[ int_0^T s^2 / 2 dt - beta x(T)^2 / 2 ]
//
// and the experiments built on it: multiplier sweeps with common random
// numbers, calibration of the participation constraint J_A = W0, and the
// comparison of the calibrated contract against lambda_A = 0.

#ifndef HCPA_CONTRACT_HPP
#define HCPA_CONTRACT_HPP

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "hcpa/csv.hpp"
#include "hcpa/errors.hpp"
#include "hcpa/model.hpp"
#include "hcpa/parallel.hpp"
#include "hcpa/riccati.hpp"
#include "hcpa/simulate.hpp"

namespace hcpa {

struct CostEstimate {
    double mean = 0.0;
    double std_error = 0.0;  ///< sample standard deviation / sqrt(n_paths)
    std::size_t n_paths = 0;
};

inline CostEstimate estimate(const std::vector<double>& samples) {
    CostEstimate est;
    est.n_paths = samples.size();
    if (samples.empty()) return est;
    double sum = 0.0;
    for (double v : samples) sum += v;
    est.mean = sum / static_cast<double>(samples.size());
    if (samples.size() > 1) {
        double ss = 0.0;
        for (double v : samples) ss += (v - est.mean) * (v - est.mean);
        est.std_error = std::sqrt(ss / static_cast<double>(samples.size() - 1) / static_cast<double>(samples.size()));
    }
    return est;
}

/// Mean and standard error of the per-path difference lhs - rhs
/// (common random numbers make the two samples path-aligned).
inline CostEstimate paired_difference(const std::vector<double>& lhs, const std::vector<double>& rhs) {
    if (lhs.size() != rhs.size()) throw ConfigError("paired samples must have equal length");
    std::vector<double> d(lhs.size());
    for (std::size_t i = 0; i < d.size(); ++i) d[i] = lhs[i] - rhs[i];
    return estimate(d);
}

/// Per-path realized costs, indexed by path.
struct PathCosts {
    std::vector<double> ja;
    std::vector<double> jp;
};

/// Realized costs of one path from node values (trapezoid rule in time).
class PathCostAccumulator {
public:
    PathCostAccumulator(const TimeGrid& grid, const ModelParams& m) : grid_(grid), m_(m) {}

    void operator()(std::size_t i, double x, double /*R*/, double e, double s) {
        const double ra = 0.5 * (s - e) * (s - e);
        const double rp = 0.5 * s * s;
        const std::size_t n = grid_.n_steps();
        if (i > 0) {
            const double dt = grid_.time(i) - grid_.time(i - 1);
            running_a_ += 0.5 * dt * (prev_a_ + ra);
            running_p_ += 0.5 * dt * (prev_p_ + rp);
        }
        prev_a_ = ra;
        prev_p_ = rp;
        if (i == n) x_T_ = x;
    }

    double ja() const { return running_a_ - m_.alpha * 0.5 * x_T_ * x_T_; }
    double jp() const { return running_p_ - m_.beta * 0.5 * x_T_ * x_T_; }

private:
    TimeGrid grid_;
    ModelParams m_;
    double running_a_ = 0.0, running_p_ = 0.0;
    double prev_a_ = 0.0, prev_p_ = 0.0;
    double x_T_ = 0.0;
};

inline PathCosts path_costs(const PathEnsemble& ens) {
    PathCosts out;
    out.ja.resize(ens.n_paths);
    out.jp.resize(ens.n_paths);
    for (std::size_t p = 0; p < ens.n_paths; ++p) {
        PathCostAccumulator acc(ens.grid, ens.params);
        for (std::size_t i = 0; i < ens.grid.n_nodes(); ++i) {
            const std::size_t k = ens.index(p, i);
            acc(i, ens.x[k], ens.R[k], ens.e[k], ens.s[k]);
        }
        out.ja[p] = acc.ja();
        out.jp[p] = acc.jp();
    }
    return out;
}

struct CostPair {
    CostEstimate JA;
    CostEstimate JP;
};

/// Costs of a stored ensemble. The ensemble's params are used for the
/// terminal bonus factors; `params` overrides them when given.
inline CostPair estimate_costs(const PathEnsemble& ens, const std::optional<ModelParams>& params = std::nullopt) {
    PathEnsemble const* src = &ens;
    PathEnsemble copy;
    if (params) {
        copy = ens;
        copy.params = *params;
        src = &copy;
    }
    const auto pc = path_costs(*src);
    return {estimate(pc.ja), estimate(pc.jp)};
}

/// Monte-Carlo settings shared by the experiments.
struct MonteCarloConfig {
    std::size_t n_paths = 10000;
    std::uint64_t seed = 20260101;
    std::size_t n_steps = 500;         ///< simulation time steps on [0, T]
    std::size_t riccati_steps = 2000;  ///< Riccati grid on [0, T]
    std::size_t noise_substeps = 1;
    unsigned threads = 1;
};

/// Simulates without storing paths; returns per-path costs.
inline PathCosts simulate_path_costs(const RiccatiTable& table, const MonteCarloConfig& mc) {
    if (mc.n_paths == 0) throw ConfigError("n_paths must be positive");
    const TimeGrid grid(0.0, table.params.T, mc.n_steps);
    const FeedbackSchedule sched(table, grid);
    PathCosts out;
    out.ja.resize(mc.n_paths);
    out.jp.resize(mc.n_paths);
    parallel_for(mc.n_paths, mc.threads, [&](std::size_t begin, std::size_t end) {
        for (std::size_t p = begin; p < end; ++p) {
            PathCostAccumulator acc(grid, table.params);
            simulate_path(sched, mc.seed, p, mc.noise_substeps, acc);
            out.ja[p] = acc.ja();
            out.jp[p] = acc.jp();
        }
    });
    return out;
}

/// Riccati solve + simulation at one multiplier. Throws BlowUp, MultiplierFloor.
inline PathCosts costs_at(const ModelParams& m, double lambda_A, const MonteCarloConfig& mc) {
    const auto mult = Multipliers::from_lambda_A(lambda_A, m.lambda_min);
    const auto table = solve_riccati(m, mult, TimeGrid(0.0, m.T, mc.riccati_steps));
    return simulate_path_costs(table, mc);
}

struct SweepRow {
    double lambda_A = 0.0;
    double lambda_P = 1.0;
    bool feasible = true;
    std::string failure;  ///< reason when infeasible
    CostEstimate JA;
    CostEstimate JP;
};

/// JA(row i + 1) - JA(row i) for adjacent feasible rows.
struct AdjacentDifference {
    std::size_t row = 0;
    CostEstimate diff;
};

/// JP(-|lambda_A|) - JP(+|lambda_A|).
struct MirrorDifference {
    double abs_lambda_A = 0.0;
    CostEstimate diff;
};

struct SweepResult {
    std::vector<SweepRow> rows;
    std::vector<AdjacentDifference> ja_steps;
    std::vector<MirrorDifference> jp_mirror;
};

/// Evaluates both costs at each lambda_A with the same seed (common random
/// numbers). A row whose Riccati system blows up is marked infeasible.
inline SweepResult sweep_multipliers(const ModelParams& m, const std::vector<double>& lambda_A_grid,
                                     const MonteCarloConfig& mc) {
    for (std::size_t i = 1; i < lambda_A_grid.size(); ++i)
        if (!(lambda_A_grid[i] > lambda_A_grid[i - 1])) throw ConfigError("lambda_A grid must be strictly increasing");
    SweepResult res;
    std::vector<std::optional<PathCosts>> samples(lambda_A_grid.size());
    for (std::size_t i = 0; i < lambda_A_grid.size(); ++i) {
        const auto mult = Multipliers::from_lambda_A(lambda_A_grid[i], m.lambda_min);
        SweepRow row;
        row.lambda_A = mult.lambda_A();
        row.lambda_P = mult.lambda_P();
        try {
            samples[i] = costs_at(m, row.lambda_A, mc);
            row.JA = estimate(samples[i]->ja);
            row.JP = estimate(samples[i]->jp);
        } catch (const NumericalError& err) {
            row.feasible = false;
            row.failure = err.what();
        }
        res.rows.push_back(std::move(row));
    }
    for (std::size_t i = 0; i + 1 < samples.size(); ++i)
        if (samples[i] && samples[i + 1])
            res.ja_steps.push_back({i, paired_difference(samples[i + 1]->ja, samples[i]->ja)});
    for (std::size_t i = 0; i < samples.size(); ++i) {
        if (!samples[i] || !(lambda_A_grid[i] > 0.0)) continue;
        for (std::size_t j = 0; j < samples.size(); ++j) {
            if (samples[j] && std::abs(lambda_A_grid[j] + lambda_A_grid[i]) < 1e-9) {
                res.jp_mirror.push_back({lambda_A_grid[i], paired_difference(samples[j]->jp, samples[i]->jp)});
                break;
            }
        }
    }
    std::sort(res.jp_mirror.begin(), res.jp_mirror.end(),
              [](const auto& l, const auto& r) { return l.abs_lambda_A < r.abs_lambda_A; });
    return res;
}

/// n points evenly spaced on [lo, hi].
inline std::vector<double> linspace(double lo, double hi, std::size_t n) {
    std::vector<double> out;
    if (n == 1) return {lo};
    for (std::size_t i = 0; i < n; ++i) out.push_back(lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(n - 1));
    return out;
}

/// Columns lambda_A,lambda_P,JA_mean,JA_se,JP_mean,JP_se; empty estimate cells
/// for infeasible rows.
inline void write_sweep_csv(std::ostream& os, const SweepResult& res) {
    csv::Writer w(os);
    w.header({"lambda_A", "lambda_P", "JA_mean", "JA_se", "JP_mean", "JP_se"});
    for (const auto& r : res.rows) {
        if (r.feasible)
            w.row(r.lambda_A, r.lambda_P, r.JA.mean, r.JA.std_error, r.JP.mean, r.JP.std_error);
        else
            w.row(r.lambda_A, r.lambda_P, "", "", "", "");
    }
}

/// Range of multipliers searched by calibration.
struct MultiplierRange {
    double eps = 0.05;  ///< lambda_A in [-1 + eps, 1 - eps]

    std::pair<double, double> bounds(double lambda_min) const {
        const double cap = std::min(1.0 - eps, Multipliers::lambda_A_cap(lambda_min));
        return {-cap, cap};
    }
};

struct CalibrationResult {
    double lambda_A0 = 0.0;
    double lambda_P0 = 1.0;
    CostEstimate JA;  ///< at the root
    CostEstimate JP;
    std::size_t iterations = 0;
    double lambda_lo = 0.0;  ///< final bracket
    double lambda_hi = 0.0;
};

namespace detail {

/// Largest feasible lambda_A in [from, to] (to assumed infeasible), by bisection.
inline double last_feasible(const ModelParams& m, double from, double to, const MonteCarloConfig& mc) {
    for (int k = 0; k < 30; ++k) {
        const double mid = 0.5 * (from + to);
        try {
            solve_riccati(m, Multipliers::from_lambda_A(mid, m.lambda_min), TimeGrid(0.0, m.T, mc.riccati_steps));
            from = mid;
        } catch (const BlowUp&) {
            to = mid;
        }
    }
    return from;
}

}  // namespace detail

/// Bisection on lambda_A for J_A(lambda_A) = W0 (J_A decreases in lambda_A),
/// with every evaluation using the same seed. Stops once
/// |J_A - W0| < max(tol, 2 stderr). Throws NotBracketed when W0 is outside the
/// J_A range on the multiplier range.
inline CalibrationResult calibrate_participation(const ModelParams& m, const MonteCarloConfig& mc, double tol,
                                                 const MultiplierRange& range = {}) {
    auto [lo, hi] = range.bounds(m.lambda_min);
    auto eval = [&](double la) {
        const auto pc = costs_at(m, la, mc);
        return std::pair{estimate(pc.ja), estimate(pc.jp)};
    };
    std::pair<CostEstimate, CostEstimate> at_hi;
    try {
        at_hi = eval(hi);
    } catch (const BlowUp&) {
        hi = detail::last_feasible(m, 0.0, hi, mc);
        at_hi = eval(hi);
    }
    const auto at_lo = eval(lo);
    const double W0 = m.W0;
    auto close_enough = [&](const CostEstimate& ja) { return std::abs(ja.mean - W0) < std::max(tol, 2.0 * ja.std_error); };

    CalibrationResult res;
    auto accept = [&](double la, const std::pair<CostEstimate, CostEstimate>& v, std::size_t it) {
        res.lambda_A0 = la;
        res.lambda_P0 = Multipliers::from_lambda_A(la, m.lambda_min).lambda_P();
        res.JA = v.first;
        res.JP = v.second;
        res.iterations = it;
        res.lambda_lo = lo;
        res.lambda_hi = hi;
        return res;
    };
    if (W0 > at_lo.first.mean || W0 < at_hi.first.mean) {
        if (close_enough(at_lo.first)) return accept(lo, at_lo, 0);
        if (close_enough(at_hi.first)) return accept(hi, at_hi, 0);
        std::ostringstream os;
        os << "W0 = " << W0 << " is outside the attainable J_A range [" << at_hi.first.mean << ", "
           << at_lo.first.mean << "] for lambda_A in [" << lo << ", " << hi << "]";
        throw NotBracketed(os.str(), at_hi.first.mean, at_lo.first.mean);
    }
    for (std::size_t it = 1; it <= 60; ++it) {
        const double mid = 0.5 * (lo + hi);
        const auto v = eval(mid);
        if (close_enough(v.first) || hi - lo < 1e-12) return accept(mid, v, it);
        if (v.first.mean > W0)
            lo = mid;
        else
            hi = mid;
    }
    const double mid = 0.5 * (lo + hi);
    return accept(mid, eval(mid), 60);
}

/// Comparison of the lambda_A = 0 contract against the calibrated one.
struct WinWinReport {
    double W0 = 0.0;
    double W_c = 0.0;  ///< J_A at lambda_A = 0
    bool informative = true;
    std::optional<CalibrationResult> calibration;
    CostEstimate JA_zero;
    CostEstimate JP_zero;
    CostEstimate JA_calibrated;
    CostEstimate JP_calibrated;
    CostEstimate JP_gap;  ///< JP(0) - JP(lambda_A0), paired
    bool agent_benefits = false;      ///< JA(0) < W0 within 2 stderr
    bool principal_benefits = false;  ///< JP(0) < JP(lambda_A0) within 2 joint stderr
    std::string note;
};

/// Throws ThresholdBelowWc when W0 <= W_c and NotBracketed from calibration.
/// When J_A does not vary with lambda_A beyond noise (e.g. b = 0) the report is
/// returned with informative = false and no calibration.
inline WinWinReport win_win_report(const ModelParams& m, const MonteCarloConfig& mc, double tol,
                                   const MultiplierRange& range = {}) {
    WinWinReport rep;
    rep.W0 = m.W0;
    const auto zero = costs_at(m, 0.0, mc);
    rep.JA_zero = estimate(zero.ja);
    rep.JP_zero = estimate(zero.jp);
    rep.W_c = rep.JA_zero.mean;

    auto [lo, hi] = range.bounds(m.lambda_min);
    PathCosts at_lo = costs_at(m, lo, mc);
    std::optional<PathCosts> at_hi;
    try {
        at_hi = costs_at(m, hi, mc);
    } catch (const BlowUp&) {
        at_hi = costs_at(m, detail::last_feasible(m, 0.0, hi, mc), mc);
    }
    const auto spread = paired_difference(at_lo.ja, at_hi->ja);
    if (std::abs(spread.mean) <= 2.0 * spread.std_error + 1e-14 * (1.0 + std::abs(rep.W_c))) {
        rep.informative = false;
        rep.note = "J_A does not depend on lambda_A beyond Monte-Carlo noise; calibration is not informative";
        return rep;
    }
    if (m.W0 <= rep.W_c) {
        std::ostringstream os;
        os << "W0 = " << m.W0 << " is not above W_c = " << rep.W_c;
        throw ThresholdBelowWc(os.str(), rep.W_c);
    }
    rep.calibration = calibrate_participation(m, mc, tol, range);
    const auto cal = costs_at(m, rep.calibration->lambda_A0, mc);
    rep.JA_calibrated = estimate(cal.ja);
    rep.JP_calibrated = estimate(cal.jp);
    rep.JP_gap = paired_difference(zero.jp, cal.jp);
    rep.agent_benefits = rep.JA_zero.mean - m.W0 < 2.0 * rep.JA_zero.std_error;
    rep.principal_benefits = rep.JP_gap.mean < 2.0 * rep.JP_gap.std_error;
    std::ostringstream os;
    os << "constraint gap W0 - J_A(0) = " << m.W0 - rep.W_c;
    rep.note = os.str();
    return rep;
}

}  // namespace hcpa

#endif  // HCPA_CONTRACT_HPP
