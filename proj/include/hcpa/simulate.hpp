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

// Euler-Maruyama simulation of the closed-loop optimal dynamics
//
//     dx = (a x + b^2 p + b s) dt + sigma dW,   x(0) = 0
//     dR = (a R + lambda_A b^2 p - b^2 P) dt,   R(0) = 0
//
// with p = C1 x + C2 R, P = D1 x + D2 R, s = (b / lambda_P) P and e = b p + s,
// all evaluated at the left endpoint of each step.

#ifndef HCPA_SIMULATE_HPP
#define HCPA_SIMULATE_HPP

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <ostream>
#include <sstream>
#include <vector>

#include "hcpa/csv.hpp"
#include "hcpa/errors.hpp"
#include "hcpa/parallel.hpp"
#include "hcpa/riccati.hpp"
#include "hcpa/rng.hpp"

namespace hcpa {

struct SimulationOptions {
    /// Each step consumes this many standard normals, summed and rescaled.
    /// A run on n steps with substeps 2 sees the same Brownian path as a run on
    /// 2n steps with substeps 1.
    std::size_t noise_substeps = 1;
    unsigned threads = 1;  ///< 0 = all hardware threads
};

/// Coefficients resampled onto a simulation grid.
struct FeedbackSchedule {
    TimeGrid grid;
    ModelParams params;
    Multipliers mult;
    std::vector<RiccatiState> coeffs;

    FeedbackSchedule(const RiccatiTable& table, const TimeGrid& sim_grid)
        : grid(sim_grid), params(table.params), mult(table.mult) {
        if (sim_grid.t0() < table.grid.t0() - 1e-12 || sim_grid.T() > table.grid.T() + 1e-12)
            throw OutOfRange("simulation grid extends beyond the Riccati table");
        coeffs.reserve(sim_grid.n_nodes());
        for (std::size_t i = 0; i < sim_grid.n_nodes(); ++i)
            coeffs.push_back(table.at(std::clamp(sim_grid.time(i), table.grid.t0(), table.grid.T())));
    }
};

/// Controls and adjoints at one node given the state.
struct ClosedLoopPoint {
    double p, P, e, s;
};

inline ClosedLoopPoint closed_loop_point(const RiccatiState& c, double x, double R, const ModelParams& m,
                                         const Multipliers& mult) noexcept {
    ClosedLoopPoint pt;
    pt.p = c[0] * x + c[1] * R;
    pt.P = c[2] * x + c[3] * R;
    pt.s = m.b / mult.lambda_P() * pt.P;
    pt.e = m.b * pt.p + pt.s;
    return pt;
}

/// Simulates one path, calling visit(i, x, R, e, s) at every node i = 0..n.
template <class Visitor>
void simulate_path(const FeedbackSchedule& sched, std::uint64_t seed, std::uint64_t path,
                   std::size_t noise_substeps, Visitor&& visit) {
    const auto& m = sched.params;
    const auto& mult = sched.mult;
    const std::size_t n = sched.grid.n_steps();
    const double b2 = m.b * m.b;
    const double inv_sqrt_sub = 1.0 / std::sqrt(static_cast<double>(noise_substeps));
    PathRng rng(seed, path);
    double x = 0.0, R = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const auto pt = closed_loop_point(sched.coeffs[i], x, R, m, mult);
        visit(i, x, R, pt.e, pt.s);
        const double dt = sched.grid.time(i + 1) - sched.grid.time(i);
        double z = 0.0;
        for (std::size_t k = 0; k < noise_substeps; ++k) z += rng.normal();
        z *= inv_sqrt_sub;
        const double dx = (m.a * x + b2 * pt.p + m.b * pt.s) * dt + m.sigma * std::sqrt(dt) * z;
        const double dR = (m.a * R + mult.lambda_A() * b2 * pt.p - b2 * pt.P) * dt;
        x += dx;
        R += dR;
    }
    if (!std::isfinite(x) || !std::isfinite(R)) {
        std::ostringstream os;
        os << "path " << path << " diverged";
        throw NonFinite(os.str());
    }
    const auto pt = closed_loop_point(sched.coeffs[n], x, R, m, mult);
    visit(n, x, R, pt.e, pt.s);
}

/// Stored ensemble of (x, R, e, s) paths, row-major by path.
struct PathEnsemble {
    std::uint64_t seed = 0;
    TimeGrid grid{0.0, 1.0, 2};
    std::size_t n_paths = 0;
    ModelParams params;
    Multipliers mult;
    std::vector<double> x, R, e, s;

    std::size_t index(std::size_t path, std::size_t node) const { return path * grid.n_nodes() + node; }
};

inline PathEnsemble simulate_closed_loop(const RiccatiTable& table, std::size_t n_paths, std::uint64_t seed,
                                         const TimeGrid& grid, const SimulationOptions& opt = {}) {
    if (n_paths == 0) throw ConfigError("n_paths must be positive");
    if (opt.noise_substeps == 0) throw ConfigError("noise_substeps must be positive");
    const FeedbackSchedule sched(table, grid);
    PathEnsemble ens;
    ens.seed = seed;
    ens.grid = grid;
    ens.n_paths = n_paths;
    ens.params = table.params;
    ens.mult = table.mult;
    const std::size_t total = n_paths * grid.n_nodes();
    ens.x.resize(total);
    ens.R.resize(total);
    ens.e.resize(total);
    ens.s.resize(total);
    parallel_for(n_paths, opt.threads, [&](std::size_t begin, std::size_t end) {
        for (std::size_t p = begin; p < end; ++p) {
            simulate_path(sched, seed, p, opt.noise_substeps,
                          [&](std::size_t i, double x, double R, double e, double s) {
                              const std::size_t k = ens.index(p, i);
                              ens.x[k] = x;
                              ens.R[k] = R;
                              ens.e[k] = e;
                              ens.s[k] = s;
                          });
        }
    });
    return ens;
}

/// Recomputes each path's R from the integrating-factor solution of
///     R' + g(t) R = h(t) x(t),  R(0) = 0,
///     g = b^2 D2 - lambda_A b^2 C2 - a,  h = lambda_A b^2 C1 - b^2 D1,
/// i.e. R(t) = exp(-G(t)) int_0^t exp(G(u)) h(u) x(u) du with G' = g, using the
/// trapezoid rule on the path's own x values. Returns the largest
/// sup_t |R_euler - R_quad| / sup_t |R_quad| over paths (0 when both vanish).
inline double check_R_quadrature(const PathEnsemble& ens, const RiccatiTable& table) {
    const FeedbackSchedule sched(table, ens.grid);
    const auto& m = table.params;
    const double b2 = m.b * m.b;
    const double la = table.mult.lambda_A();
    const std::size_t nn = ens.grid.n_nodes();
    std::vector<double> G(nn, 0.0), h(nn);
    auto g_at = [&](std::size_t i) {
        const auto& c = sched.coeffs[i];
        return b2 * c[3] - la * b2 * c[1] - m.a;
    };
    for (std::size_t i = 0; i < nn; ++i) {
        const auto& c = sched.coeffs[i];
        h[i] = la * b2 * c[0] - b2 * c[2];
        if (i > 0) G[i] = G[i - 1] + 0.5 * (ens.grid.time(i) - ens.grid.time(i - 1)) * (g_at(i - 1) + g_at(i));
    }
    double worst = 0.0;
    for (std::size_t p = 0; p < ens.n_paths; ++p) {
        double integral = 0.0, dev = 0.0, scale = 0.0;
        double prev = h[0] * ens.x[ens.index(p, 0)];  // exp(G(0)) = 1
        for (std::size_t i = 1; i < nn; ++i) {
            const double cur = std::exp(G[i]) * h[i] * ens.x[ens.index(p, i)];
            integral += 0.5 * (ens.grid.time(i) - ens.grid.time(i - 1)) * (prev + cur);
            prev = cur;
            const double rq = std::exp(-G[i]) * integral;
            dev = std::max(dev, std::abs(ens.R[ens.index(p, i)] - rq));
            scale = std::max(scale, std::abs(rq));
        }
        if (dev > 0.0) worst = std::max(worst, scale > 0.0 ? dev / scale : INFINITY);
    }
    return worst;
}

/// Columns t,path_id,x,R,e,s.
inline void write_paths_csv(std::ostream& os, const PathEnsemble& ens) {
    csv::Writer w(os);
    w.header({"t", "path_id", "x", "R", "e", "s"});
    for (std::size_t p = 0; p < ens.n_paths; ++p)
        for (std::size_t i = 0; i < ens.grid.n_nodes(); ++i) {
            const std::size_t k = ens.index(p, i);
            w.row(ens.grid.time(i), p, ens.x[k], ens.R[k], ens.e[k], ens.s[k]);
        }
}

}  // namespace hcpa

#endif  // HCPA_SIMULATE_HPP
