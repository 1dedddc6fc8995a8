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

// Agent's problem in the strong formulation with dx = e dt + sigma dW and
// cost E[int e^2/2 - s(t, x) dt]. The optimal effort phi(t, x) solves the
// forced Burgers equation
//
//     phi_t + phi phi_x + (sigma^2 / 2) phi_xx + s_x = 0,   phi(T, x) = 0,
//
// and phi = sigma^2 d/dx log v with v_t = -(sigma^2 / 2) v_xx - s, v(T) = 1
// (Hopf-Cole). Two routes to phi are provided: Gauss-kernel quadrature of the
// heat-equation solution and an explicit finite-difference heat solver.

#ifndef HCPA_BURGERS_HPP
#define HCPA_BURGERS_HPP

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <istream>
#include <numbers>
#include <ostream>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "hcpa/csv.hpp"
#include "hcpa/errors.hpp"
#include "hcpa/model.hpp"

namespace hcpa {

/// Cash flow s(t, x) offered to the agent.
class CashFlowField {
public:
    enum class Kind { constant, linear, tabulated };

    /// s = value everywhere.
    static CashFlowField constant(double value) {
        CashFlowField f;
        f.kind_ = Kind::constant;
        f.intercept_ = value;
        return f;
    }

    /// s = intercept + slope x.
    static CashFlowField linear(double slope = 1.0, double intercept = 0.0) {
        CashFlowField f;
        f.kind_ = Kind::linear;
        f.slope_ = slope;
        f.intercept_ = intercept;
        return f;
    }

    /// Rectangular table, values[i * xs.size() + j] = s(ts[i], xs[j]). Bilinear
    /// inside, clamped to the edge values outside.
    static CashFlowField tabulated(std::vector<double> ts, std::vector<double> xs, std::vector<double> values) {
        if (ts.size() < 2 || xs.size() < 2) throw ConfigError("tabulated cash flow needs at least 2x2 nodes");
        if (values.size() != ts.size() * xs.size()) throw ConfigError("tabulated cash flow has wrong value count");
        if (!std::is_sorted(ts.begin(), ts.end()) || !std::is_sorted(xs.begin(), xs.end()) ||
            std::adjacent_find(ts.begin(), ts.end()) != ts.end() || std::adjacent_find(xs.begin(), xs.end()) != xs.end())
            throw ConfigError("tabulated cash flow axes must be strictly increasing");
        for (double v : values)
            if (!std::isfinite(v)) throw ConfigError("tabulated cash flow has a non-finite value");
        CashFlowField f;
        f.kind_ = Kind::tabulated;
        f.ts_ = std::move(ts);
        f.xs_ = std::move(xs);
        f.values_ = std::move(values);
        return f;
    }

    /// Reads columns t,x,s (any row order) on a rectangular grid.
    static CashFlowField from_csv(std::istream& is) {
        const auto tab = csv::read(is);
        const std::size_t ct = tab.column("t"), cx = tab.column("x"), cs = tab.column("s");
        std::vector<double> ts, xs;
        for (const auto& r : tab.rows) {
            ts.push_back(r[ct]);
            xs.push_back(r[cx]);
        }
        auto uniq = [](std::vector<double>& v) {
            std::sort(v.begin(), v.end());
            v.erase(std::unique(v.begin(), v.end()), v.end());
        };
        uniq(ts);
        uniq(xs);
        if (ts.size() * xs.size() != tab.rows.size()) throw ConfigError("cash-flow CSV is not a full rectangular grid");
        std::vector<double> values(ts.size() * xs.size(), NAN);
        for (const auto& r : tab.rows) {
            const auto i = static_cast<std::size_t>(std::lower_bound(ts.begin(), ts.end(), r[ct]) - ts.begin());
            const auto j = static_cast<std::size_t>(std::lower_bound(xs.begin(), xs.end(), r[cx]) - xs.begin());
            values[i * xs.size() + j] = r[cs];
        }
        return tabulated(std::move(ts), std::move(xs), std::move(values));
    }

    Kind kind() const noexcept { return kind_; }

    double operator()(double t, double x) const {
        switch (kind_) {
            case Kind::constant: return intercept_;
            case Kind::linear: return intercept_ + slope_ * x;
            case Kind::tabulated: break;
        }
        const auto [i, wt] = locate(ts_, t);
        const auto [j, wx] = locate(xs_, x);
        const std::size_t nx = xs_.size();
        const double v00 = values_[i * nx + j], v01 = values_[i * nx + j + 1];
        const double v10 = values_[(i + 1) * nx + j], v11 = values_[(i + 1) * nx + j + 1];
        return (1.0 - wt) * ((1.0 - wx) * v00 + wx * v01) + wt * ((1.0 - wx) * v10 + wx * v11);
    }

    /// d s / d x (cell slope for tabulated fields).
    double dx(double t, double x) const {
        switch (kind_) {
            case Kind::constant: return 0.0;
            case Kind::linear: return slope_;
            case Kind::tabulated: break;
        }
        const auto [i, wt] = locate(ts_, t);
        const auto [j, wx] = locate(xs_, x);
        if (x < xs_.front() || x > xs_.back()) return 0.0;
        const std::size_t nx = xs_.size();
        const double h = xs_[j + 1] - xs_[j];
        const double lo = (values_[i * nx + j + 1] - values_[i * nx + j]) / h;
        const double hi = (values_[(i + 1) * nx + j + 1] - values_[(i + 1) * nx + j]) / h;
        return (1.0 - wt) * lo + wt * hi;
    }

private:
    /// Cell index and weight, clamped to the axis range.
    static std::pair<std::size_t, double> locate(const std::vector<double>& axis, double v) {
        if (v <= axis.front()) return {0, 0.0};
        if (v >= axis.back()) return {axis.size() - 2, 1.0};
        const auto it = std::upper_bound(axis.begin(), axis.end(), v);
        const auto i = static_cast<std::size_t>(it - axis.begin()) - 1;
        return {i, (v - axis[i]) / (axis[i + 1] - axis[i])};
    }

    Kind kind_ = Kind::constant;
    double slope_ = 0.0;
    double intercept_ = 0.0;
    std::vector<double> ts_, xs_, values_;
};

struct QuadratureConfig {
    double L = 8.0;            ///< half-width of the xi window in kernel standard deviations
    std::size_t nodes = 256;   ///< xi nodes
    std::size_t time_nodes = 256;

    void validate() const {
        if (!(L >= 6.0)) throw ConfigError("quadrature half-width L must be >= 6");
        if (nodes < 64) throw ConfigError("quadrature needs >= 64 xi nodes");
        if (time_nodes < 64) throw ConfigError("quadrature needs >= 64 time nodes");
    }
};

/// Closed-form effort for s = x: sigma^2 (T - t) / (1 + x (T - t)).
inline double linear_cashflow_effort(double t, double x, const ModelParams& m) {
    const double tau = m.T - t;
    return m.sigma * m.sigma * tau / (1.0 + x * tau);
}

/// Optimal effort phi(t, x) from the Gauss-kernel representation
///
///     phi = sigma^2 N / (1 + D),
///     N = int_t^T int (xi - x) / (sigma^2 (tau - t)) G s dxi dtau,
///     D = int_t^T int G s dxi dtau,
///
/// with G the heat kernel of variance sigma^2 (tau - t). The xi integral is
/// taken in the kernel's own scale, xi = x + sigma sqrt(tau - t) z with
/// z in [-L, L] (trapezoid, mirrored pairs so odd parts cancel exactly); the
/// tau integral uses the midpoint rule, so tau = t is never evaluated.
inline double effort_hopf_cole(double t, double x, const CashFlowField& s, const ModelParams& m,
                               const QuadratureConfig& q = {}) {
    q.validate();
    if (!(m.sigma > 0.0)) throw ConfigError("Hopf-Cole effort needs sigma > 0");
    if (t > m.T || t < 0.0) throw OutOfRange("effort_hopf_cole needs t in [0, T]");
    if (t == m.T) return 0.0;
    const double span = m.T - t;
    const double h_tau = span / static_cast<double>(q.time_nodes);
    const std::size_t nz = q.nodes;
    const double dz = 2.0 * q.L / static_cast<double>(nz - 1);
    const double center = 0.5 * static_cast<double>(nz - 1);
    const double inv_sqrt_2pi = 1.0 / std::sqrt(2.0 * std::numbers::pi);
    const double tail_density = inv_sqrt_2pi * std::exp(-0.5 * q.L * q.L);

    double N = 0.0, D = 0.0;
    for (std::size_t k = 0; k < q.time_nodes; ++k) {
        const double tau = t + (static_cast<double>(k) + 0.5) * h_tau;
        const double width = m.sigma * std::sqrt(tau - t);
        double num = 0.0, den = 0.0;
        // pairs (+z, -z); the center node (odd nz) contributes only to den
        for (std::size_t j = 0; 2 * j + 1 < nz; ++j) {
            const double z = (center - static_cast<double>(j)) * dz;
            const double w = (j == 0 ? 0.5 : 1.0) * dz * inv_sqrt_2pi * std::exp(-0.5 * z * z);
            const double sp = s(tau, x + width * z);
            const double sm = s(tau, x - width * z);
            num += w * z * (sp - sm);
            den += w * (sp + sm);
            if (j == 0) {
                const double tail = tail_density * std::max(std::abs(sp), std::abs(sm));
                if (!std::isfinite(sp) || !std::isfinite(sm) || tail > 1e-8) {
                    std::ostringstream os;
                    os << "cash flow is too large at the quadrature edge (tau = " << tau << ", |s| = "
                       << std::max(std::abs(sp), std::abs(sm)) << ")";
                    throw QuadratureDomain(os.str());
                }
            }
        }
        if (nz % 2 == 1) den += dz * inv_sqrt_2pi * s(tau, x);
        N += h_tau * num / width;
        D += h_tau * den;
    }
    return m.sigma * m.sigma * N / (1.0 + D);
}

/// Uniform space-time grid for the finite-difference heat route.
struct HeatGrid {
    double x_min = -2.0;
    double x_max = 4.0;
    std::size_t nx = 401;
    std::size_t n_time_steps = 4000;

    double dx() const { return (x_max - x_min) / static_cast<double>(nx - 1); }
    double x(std::size_t j) const { return x_min + dx() * static_cast<double>(j); }
};

/// Field sampled on a uniform (t, x) grid, values[i * nx + j] at (t_i, x_j).
struct SpaceTimeTable {
    double T = 0.0;
    std::size_t nt = 0;  ///< time steps; nt + 1 levels
    double x_min = 0.0, x_max = 0.0;
    std::size_t nx = 0;
    std::vector<double> values;

    double dt() const { return T / static_cast<double>(nt); }
    double dx() const { return (x_max - x_min) / static_cast<double>(nx - 1); }
    double t(std::size_t i) const { return i == nt ? T : T * static_cast<double>(i) / static_cast<double>(nt); }
    double x(std::size_t j) const { return x_min + dx() * static_cast<double>(j); }
    double at(std::size_t i, std::size_t j) const { return values[i * nx + j]; }

    /// Bilinear interpolation inside the grid.
    double interpolate(double tt, double xx) const {
        if (tt < 0.0 || tt > T || xx < x_min || xx > x_max) throw OutOfRange("interpolation point outside table");
        const double u = tt / dt(), w = (xx - x_min) / dx();
        const std::size_t i = std::min(static_cast<std::size_t>(u), nt - 1);
        const std::size_t j = std::min(static_cast<std::size_t>(w), nx - 2);
        const double a = u - static_cast<double>(i), c = w - static_cast<double>(j);
        return (1 - a) * ((1 - c) * at(i, j) + c * at(i, j + 1)) + a * ((1 - c) * at(i + 1, j) + c * at(i + 1, j + 1));
    }
};

struct HeatSolution {
    SpaceTimeTable v;
    SpaceTimeTable phi;
};

/// Explicit finite differences for v_t = -(sigma^2/2) v_xx - s, v(T) = 1,
/// marched backward from T (source averaged over each step), with
/// zero-curvature boundary nodes. phi = sigma^2 (log v)_x by centered
/// differences (one-sided at the two boundary columns).
/// Throws CflViolation if sigma^2 dt / dx^2 > 1 and NonPositiveV if v <= 0.
inline HeatSolution heat_solve_check(const CashFlowField& s, const ModelParams& m, const HeatGrid& g) {
    if (!(m.sigma > 0.0)) throw ConfigError("heat route needs sigma > 0");
    if (g.nx < 5 || g.n_time_steps < 2) throw ConfigError("heat grid too small");
    const std::size_t nx = g.nx, nt = g.n_time_steps;
    const double dx = g.dx();
    const double dt = m.T / static_cast<double>(nt);
    const double diff = 0.5 * m.sigma * m.sigma;
    const double courant = m.sigma * m.sigma * dt / (dx * dx);
    if (courant > 1.0) {
        std::ostringstream os;
        os << "heat step violates the stability bound (sigma^2 dt / dx^2 = " << courant << " > 1)";
        throw CflViolation(os.str());
    }
    HeatSolution out;
    out.v = SpaceTimeTable{m.T, nt, g.x_min, g.x_max, nx, std::vector<double>((nt + 1) * nx, 1.0)};
    auto& v = out.v.values;
    for (std::size_t i = nt; i > 0; --i) {
        const double t_hi = out.v.t(i), t_lo = out.v.t(i - 1);
        const double* cur = &v[i * nx];
        double* next = &v[(i - 1) * nx];
        for (std::size_t j = 1; j + 1 < nx; ++j) {
            const double x = g.x(j);
            const double src = 0.5 * (s(t_hi, x) + s(t_lo, x));
            next[j] = cur[j] + dt * (diff * (cur[j + 1] - 2.0 * cur[j] + cur[j - 1]) / (dx * dx) + src);
        }
        next[0] = 2.0 * next[1] - next[2];
        next[nx - 1] = 2.0 * next[nx - 2] - next[nx - 3];
        for (std::size_t j = 0; j < nx; ++j) {
            if (!(next[j] > 0.0)) {
                std::ostringstream os;
                os << "v = " << next[j] << " <= 0 at t = " << t_lo << ", x = " << g.x(j);
                throw NonPositiveV(os.str());
            }
        }
    }
    out.phi = out.v;
    const double s2 = m.sigma * m.sigma;
    for (std::size_t i = 0; i <= nt; ++i) {
        const double* row = &v[i * nx];
        double* ph = &out.phi.values[i * nx];
        for (std::size_t j = 1; j + 1 < nx; ++j) ph[j] = s2 * (std::log(row[j + 1]) - std::log(row[j - 1])) / (2.0 * dx);
        ph[0] = s2 * (std::log(row[1]) - std::log(row[0])) / dx;
        ph[nx - 1] = s2 * (std::log(row[nx - 1]) - std::log(row[nx - 2])) / dx;
    }
    return out;
}

/// Max over interior nodes of |phi_t + phi phi_x + (sigma^2/2) phi_xx + forcing(t, x)|,
/// derivatives of phi by centered differences.
template <class Forcing>
double burgers_residual_with(const SpaceTimeTable& phi, Forcing&& forcing, const ModelParams& m) {
    if (phi.nt < 2 || phi.nx < 3) throw ConfigError("Burgers residual needs at least 3 x 3 nodes");
    const double dt = phi.dt(), dx = phi.dx();
    const double diff = 0.5 * m.sigma * m.sigma;
    double worst = 0.0;
    for (std::size_t i = 1; i < phi.nt; ++i) {
        for (std::size_t j = 1; j + 1 < phi.nx; ++j) {
            const double f = phi.at(i, j);
            const double ft = (phi.at(i + 1, j) - phi.at(i - 1, j)) / (2.0 * dt);
            const double fx = (phi.at(i, j + 1) - phi.at(i, j - 1)) / (2.0 * dx);
            const double fxx = (phi.at(i, j + 1) - 2.0 * f + phi.at(i, j - 1)) / (dx * dx);
            worst = std::max(worst, std::abs(ft + f * fx + diff * fxx + forcing(i, j)));
        }
    }
    return worst;
}

/// Residual of the forced Burgers equation phi_t + phi phi_x + (sigma^2/2) phi_xx + s_x = 0.
inline double burgers_residual(const SpaceTimeTable& phi, const CashFlowField& s, const ModelParams& m) {
    return burgers_residual_with(phi, [&](std::size_t i, std::size_t j) { return s.dx(phi.t(i), phi.x(j)); }, m);
}

/// Residual of the Burgers equation that phi = sigma^2 (log v)_x satisfies when
/// v solves the additive-source heat equation v_t = -(sigma^2/2) v_xx - s:
/// the forcing is sigma^2 (s / v)_x (centered difference on v's grid), which
/// coincides with s_x only where v is constant in x.
inline double hopf_cole_residual(const SpaceTimeTable& phi, const SpaceTimeTable& v, const CashFlowField& s,
                                 const ModelParams& m) {
    if (v.nt != phi.nt || v.nx != phi.nx) throw ConfigError("phi and v tables must share a grid");
    const double s2 = m.sigma * m.sigma;
    const double dx = phi.dx();
    return burgers_residual_with(
        phi,
        [&](std::size_t i, std::size_t j) {
            const double t = phi.t(i);
            const double hi = s(t, phi.x(j + 1)) / v.at(i, j + 1);
            const double lo = s(t, phi.x(j - 1)) / v.at(i, j - 1);
            return s2 * (hi - lo) / (2.0 * dx);
        },
        m);
}

/// Samples f(t, x) on a uniform grid.
template <class F>
SpaceTimeTable tabulate(F&& f, double T, std::size_t nt, double x_min, double x_max, std::size_t nx) {
    SpaceTimeTable tab{T, nt, x_min, x_max, nx, std::vector<double>((nt + 1) * nx)};
    for (std::size_t i = 0; i <= nt; ++i)
        for (std::size_t j = 0; j < nx; ++j) tab.values[i * nx + j] = f(tab.t(i), tab.x(j));
    return tab;
}

/// Columns t,x,effort.
inline void write_effort_csv(std::ostream& os, const SpaceTimeTable& effort) {
    csv::Writer w(os);
    w.header({"t", "x", "effort"});
    for (std::size_t i = 0; i <= effort.nt; ++i)
        for (std::size_t j = 0; j < effort.nx; ++j) w.row(effort.t(i), effort.x(j), effort.at(i, j));
}

}  // namespace hcpa

#endif  // HCPA_BURGERS_HPP
