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

// Finite-difference solution of the semilinear parabolic system for the
// feedback fields phi(t, x, y) (agent costate) and psi(t, x, y) (principal
// costate):
//
//     phi_t + a phi + v_x phi_x + v_y phi_y + (sigma^2 / 2) phi_xx = 0
//     psi_t + a psi + v_x psi_x + v_y psi_y + (sigma^2 / 2) psi_xx = 0
//     v_x = a x + b^2 phi + (b^2 / lambda_P) psi
//     v_y = a y + lambda_A b^2 phi - b^2 psi
//     phi(T) = alpha x,  psi(T) = -alpha y + (alpha lambda_A + beta lambda_P) x
//
// Method of lines: first-order upwinding of the transport terms, centered
// second differences in x, Dirichlet boundary data from the linear Riccati
// ansatz, classical RK4 backward in time. Used as an independent check of
// that ansatz.

#ifndef HCPA_FEEDBACK_PDE_HPP
#define HCPA_FEEDBACK_PDE_HPP

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <sstream>
#include <vector>

#include "hcpa/errors.hpp"
#include "hcpa/model.hpp"
#include "hcpa/riccati.hpp"

namespace hcpa {

struct SpaceGrid2D {
    double x_min = -3.0;
    double x_max = 3.0;
    std::size_t nx = 201;
    double y_min = -3.0;
    double y_max = 3.0;
    std::size_t ny = 201;
    std::size_t n_time_steps = 2000;

    double dx() const { return (x_max - x_min) / static_cast<double>(nx - 1); }
    double dy() const { return (y_max - y_min) / static_cast<double>(ny - 1); }
    double x(std::size_t i) const { return x_min + dx() * static_cast<double>(i); }
    double y(std::size_t j) const { return y_min + dy() * static_cast<double>(j); }
};

struct FeedbackPdeSolution {
    SpaceGrid2D grid;
    RiccatiTable ansatz;        ///< coefficients on the same time grid (boundary data)
    std::vector<double> phi0;   ///< phi(0, x_i, y_j) at index i * ny + j
    std::vector<double> psi0;
    std::vector<double> phiT;   ///< terminal data, same layout
    std::vector<double> psiT;
    double max_cfl = 0.0;       ///< largest Courant sum observed

    /// Max |phi - (C1 x + C2 y)| and |psi - (D1 x + D2 y)| at t = 0 over nodes
    /// at least `margin` cells from the boundary.
    double max_ansatz_deviation(std::size_t margin = 1) const {
        const auto c = ansatz.node(0);
        double worst = 0.0;
        for (std::size_t i = margin; i + margin < grid.nx; ++i) {
            for (std::size_t j = margin; j + margin < grid.ny; ++j) {
                const double x = grid.x(i), y = grid.y(j);
                const std::size_t k = i * grid.ny + j;
                worst = std::max(worst, std::abs(phi0[k] - (c[0] * x + c[1] * y)));
                worst = std::max(worst, std::abs(psi0[k] - (c[2] * x + c[3] * y)));
            }
        }
        return worst;
    }
};

/// Throws CflViolation when dt (T / n_time_steps) exceeds the explicit
/// stability bound at any step; BlowUp from the boundary-data Riccati solve.
inline FeedbackPdeSolution solve_feedback_pde(const ModelParams& m, const Multipliers& mult,
                                              const SpaceGrid2D& g) {
    if (g.nx < 3 || g.ny < 3) throw ConfigError("feedback PDE grid needs at least 3 nodes per axis");
    const TimeGrid tgrid(0.0, m.T, g.n_time_steps);
    FeedbackPdeSolution out{g, solve_riccati(m, mult, tgrid), {}, {}, {}, {}, 0.0};

    const std::size_t nx = g.nx, ny = g.ny;
    const double dx = g.dx(), dy = g.dy(), dt = tgrid.dt();
    const double b2 = m.b * m.b;
    const double k = b2 / mult.lambda_P();
    const double la = mult.lambda_A();
    const double diff = 0.5 * m.sigma * m.sigma;

    // boundary data at full and half steps
    const RiccatiTable fine = solve_riccati(m, mult, TimeGrid(0.0, m.T, 2 * g.n_time_steps));

    const std::size_t cells = nx * ny;
    std::vector<double> phi(cells), psi(cells);
    auto fill_boundary = [&](std::vector<double>& f, std::vector<double>& h, const RiccatiState& c, bool all) {
        for (std::size_t i = 0; i < nx; ++i) {
            for (std::size_t j = 0; j < ny; ++j) {
                if (!all && i != 0 && j != 0 && i != nx - 1 && j != ny - 1) continue;
                const double x = g.x(i), y = g.y(j);
                f[i * ny + j] = c[0] * x + c[1] * y;
                h[i * ny + j] = c[2] * x + c[3] * y;
            }
        }
    };
    // terminal data: phi = alpha x, psi = -alpha y + (alpha lambda_A + beta lambda_P) x
    fill_boundary(phi, psi, riccati_terminal(m, mult), true);
    out.phiT = phi;
    out.psiT = psi;

    // Rate in reversed time: a f + v_x f_x + v_y f_y + (sigma^2/2) f_xx at interior nodes.
    auto rate = [&](const std::vector<double>& f_in, const std::vector<double>& h_in, std::vector<double>& df,
                    std::vector<double>& dh) {
        double cfl = 0.0;
        for (std::size_t i = 1; i + 1 < nx; ++i) {
            const double x = g.x(i);
            for (std::size_t j = 1; j + 1 < ny; ++j) {
                const double y = g.y(j);
                const std::size_t c = i * ny + j;
                const double f = f_in[c], h = h_in[c];
                const double vx = m.a * x + b2 * f + k * h;
                const double vy = m.a * y + la * b2 * f - b2 * h;
                cfl = std::max(cfl, dt * (2.0 * diff / (dx * dx) + std::abs(vx) / dx + std::abs(vy) / dy));
                // reversed time transports along +v, so difference toward +v
                const std::size_t cx = vx >= 0.0 ? c + ny : c - ny;
                const std::size_t cy = vy >= 0.0 ? c + 1 : c - 1;
                const double sx = vx >= 0.0 ? 1.0 : -1.0;
                const double sy = vy >= 0.0 ? 1.0 : -1.0;
                const double fx = sx * (f_in[cx] - f) / dx, fy = sy * (f_in[cy] - f) / dy;
                const double hx = sx * (h_in[cx] - h) / dx, hy = sy * (h_in[cy] - h) / dy;
                const double fxx = (f_in[c + ny] - 2.0 * f + f_in[c - ny]) / (dx * dx);
                const double hxx = (h_in[c + ny] - 2.0 * h + h_in[c - ny]) / (dx * dx);
                df[c] = m.a * f + vx * fx + vy * fy + diff * fxx;
                dh[c] = m.a * h + vx * hx + vy * hy + diff * hxx;
            }
        }
        return cfl;
    };

    // classical RK4 in reversed time (method of lines)
    std::vector<double> k1f(cells), k1h(cells), k2f(cells), k2h(cells), k3f(cells), k3h(cells), k4f(cells),
        k4h(cells), sf(cells), sh(cells);
    auto stage = [&](const std::vector<double>& kf, const std::vector<double>& kh, double w,
                     const RiccatiState& boundary) {
        sf = phi;
        sh = psi;
        for (std::size_t c = 0; c < cells; ++c) {
            sf[c] += w * kf[c];
            sh[c] += w * kh[c];
        }
        fill_boundary(sf, sh, boundary, false);
    };
    for (std::size_t n = tgrid.n_steps(); n > 0; --n) {
        const double cfl = rate(phi, psi, k1f, k1h);
        if (cfl > 1.0) {
            std::ostringstream os;
            os << "explicit step violates the stability bound (Courant sum " << cfl << " > 1) at t = "
               << tgrid.time(n) << "; increase n_time_steps";
            throw CflViolation(os.str());
        }
        out.max_cfl = std::max(out.max_cfl, cfl);
        const RiccatiState half = fine.node(2 * n - 1);
        const RiccatiState next = fine.node(2 * n - 2);
        stage(k1f, k1h, 0.5 * dt, half);
        rate(sf, sh, k2f, k2h);
        stage(k2f, k2h, 0.5 * dt, half);
        rate(sf, sh, k3f, k3h);
        stage(k3f, k3h, dt, next);
        rate(sf, sh, k4f, k4h);
        for (std::size_t c = 0; c < cells; ++c) {
            phi[c] += dt / 6.0 * (k1f[c] + 2.0 * k2f[c] + 2.0 * k3f[c] + k4f[c]);
            psi[c] += dt / 6.0 * (k1h[c] + 2.0 * k2h[c] + 2.0 * k3h[c] + k4h[c]);
        }
        fill_boundary(phi, psi, next, false);
    }
    for (double v : phi)
        if (!std::isfinite(v)) throw NonFinite("feedback PDE produced a non-finite value");
    out.phi0 = std::move(phi);
    out.psi0 = std::move(psi);
    return out;
}

}  // namespace hcpa

#endif  // HCPA_FEEDBACK_PDE_HPP
