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

// Feedback coefficients of the optimal contract.
//
// With the linear ansatz p = C1 x + C2 R and P = D1 x + D2 R, matching the
// Ito drifts of p and P against dp = -a p dt + q dW and dP = -a P dt + Q dW
// under the closed-loop forward drifts
//
//     dx = (a x + b^2 p + (b^2 / lambda_P) P) dt + sigma dW
//     dR = (a R + lambda_A b^2 p - b^2 P) dt
//
// gives dC/dt = -F(C), with F the quadratic map in riccati_rhs below and
// terminal data C1 = alpha, C2 = 0, D1 = alpha lambda_A + beta lambda_P,
// D2 = -alpha.

#ifndef HCPA_RICCATI_HPP
#define HCPA_RICCATI_HPP

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <istream>
#include <ostream>
#include <sstream>
#include <vector>

#include "hcpa/csv.hpp"
#include "hcpa/errors.hpp"
#include "hcpa/model.hpp"
#include "hcpa/ode.hpp"

namespace hcpa {

/// (C1, C2, D1, D2)
using RiccatiState = State<4>;

/// Time derivative of (C1, C2, D1, D2).
inline RiccatiState riccati_rhs(const RiccatiState& y, const ModelParams& m, const Multipliers& mult) noexcept {
    const auto [C1, C2, D1, D2] = y;
    const double b2 = m.b * m.b;
    const double k = b2 / mult.lambda_P();
    const double la = mult.lambda_A();
    const double two_a = 2.0 * m.a;
    return {
        -(two_a * C1 + b2 * C1 * C1 + k * C1 * D1 - b2 * C2 * D1 + la * b2 * C1 * C2),
        -(two_a * C2 + la * b2 * C2 * C2 - b2 * C2 * D2 + k * C1 * D2 + b2 * C1 * C2),
        -(two_a * D1 + k * D1 * D1 + b2 * C1 * D1 + la * b2 * C1 * D2 - b2 * D1 * D2),
        -(two_a * D2 - b2 * D2 * D2 + la * b2 * C2 * D2 + b2 * D1 * C2 + k * D1 * D2),
    };
}

inline RiccatiState riccati_terminal(const ModelParams& m, const Multipliers& mult) noexcept {
    return {m.alpha, 0.0, m.alpha * mult.lambda_A() + m.beta * mult.lambda_P(), -m.alpha};
}

/// Gridded Riccati solution. Immutable once built.
struct RiccatiTable {
    TimeGrid grid;
    std::vector<double> C1, C2, D1, D2;
    Multipliers mult;
    ModelParams params;

    RiccatiState node(std::size_t i) const { return {C1[i], C2[i], D1[i], D2[i]}; }

    /// Linear interpolation; t must lie in [t0, T].
    RiccatiState at(double t) const {
        const double t0 = grid.t0();
        const double T = grid.T();
        if (!(t >= t0 && t <= T)) {
            std::ostringstream os;
            os << "t = " << t << " outside [" << t0 << ", " << T << "]";
            throw OutOfRange(os.str());
        }
        const double u = (t - t0) / grid.dt();
        const std::size_t n = grid.n_steps();
        std::size_t i = std::min(static_cast<std::size_t>(u), n - 1);
        const double w = u - static_cast<double>(i);
        if (w == 0.0) return node(i);
        const RiccatiState lo = node(i);
        const RiccatiState hi = node(i + 1);
        RiccatiState out;
        for (std::size_t j = 0; j < 4; ++j) out[j] = (1.0 - w) * lo[j] + w * hi[j];
        return out;
    }
};

/// Backward RK4 solve on grid; terminal node is assigned exactly. Throws BlowUp.
inline RiccatiTable solve_riccati(const ModelParams& m, const Multipliers& mult, const TimeGrid& grid) {
    auto rhs = [&](double, const RiccatiState& y) { return riccati_rhs(y, m, mult); };
    auto sol = integrate_terminal<4>(rhs, riccati_terminal(m, mult), grid);
    RiccatiTable table{grid, {}, {}, {}, {}, mult, m};
    const std::size_t n = grid.n_nodes();
    table.C1.resize(n);
    table.C2.resize(n);
    table.D1.resize(n);
    table.D2.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        table.C1[i] = sol.values[i][0];
        table.C2[i] = sol.values[i][1];
        table.D1[i] = sol.values[i][2];
        table.D2[i] = sol.values[i][3];
    }
    return table;
}

/// Linear feedback gains of the optimal contract:
/// e = e_x x + e_R R and s = s_x x + s_R R.
struct FeedbackGains {
    double e_x = 0.0;
    double e_R = 0.0;
    double s_x = 0.0;
    double s_R = 0.0;
};

inline FeedbackGains gains_from(const RiccatiState& c, const ModelParams& m, const Multipliers& mult) noexcept {
    const double ratio = m.b / mult.lambda_P();
    FeedbackGains g;
    g.s_x = ratio * c[2];
    g.s_R = ratio * c[3];
    // e = b p + s
    g.e_x = m.b * c[0] + g.s_x;
    g.e_R = m.b * c[1] + g.s_R;
    return g;
}

/// Throws OutOfRange if t is outside [0, T].
inline FeedbackGains feedback_coefficients(const RiccatiTable& table, double t) {
    return gains_from(table.at(t), table.params, table.mult);
}

namespace detail {

inline std::size_t node_index(const TimeGrid& grid, double t) {
    const double u = (t - grid.t0()) / grid.dt();
    const double r = std::round(u);
    if (!(r >= 0.0) || r > static_cast<double>(grid.n_steps()) || std::abs(u - r) > 1e-6) {
        std::ostringstream os;
        os << "t = " << t << " is not a grid node";
        throw OutOfRange(os.str());
    }
    return static_cast<std::size_t>(r);
}

/// Fourth-order centered first derivative at node i (needs 2 <= i <= n - 2).
inline RiccatiState stencil_derivative(const RiccatiTable& table, std::size_t i) {
    const double h = table.grid.dt();
    const RiccatiState m2 = table.node(i - 2), m1 = table.node(i - 1);
    const RiccatiState p1 = table.node(i + 1), p2 = table.node(i + 2);
    RiccatiState d;
    for (std::size_t j = 0; j < 4; ++j) d[j] = (m2[j] - 8.0 * m1[j] + 8.0 * p1[j] - p2[j]) / (12.0 * h);
    return d;
}

}  // namespace detail

/// Drift residuals of the adjoint BSDEs under the linear ansatz at grid node t:
/// res_p = drift(p) + a p and res_P = drift(P) + a P, where the time derivatives of
/// the coefficients come from finite differences of the table. Both vanish for
/// every (x, R) up to solver error when the table solves the correct system.
struct DriftResidual {
    double res_p = 0.0;
    double res_P = 0.0;
};

inline DriftResidual drift_identity_residual(const RiccatiTable& table, double t, double x, double R) {
    const std::size_t i = detail::node_index(table.grid, t);
    if (i < 2 || i + 2 > table.grid.n_steps())
        throw OutOfRange("drift_identity_residual needs an interior node at least two steps from each end");
    const auto& m = table.params;
    const auto& mult = table.mult;
    const auto [C1, C2, D1, D2] = table.node(i);
    const auto d = detail::stencil_derivative(table, i);
    const double b2 = m.b * m.b;
    const double p = C1 * x + C2 * R;
    const double P = D1 * x + D2 * R;
    const double s = m.b / mult.lambda_P() * P;
    const double mu_x = m.a * x + b2 * p + m.b * s;
    const double mu_R = m.a * R + mult.lambda_A() * b2 * p - b2 * P;
    DriftResidual r;
    r.res_p = d[0] * x + d[1] * R + C1 * mu_x + C2 * mu_R + m.a * p;
    r.res_P = d[2] * x + d[3] * R + D1 * mu_x + D2 * mu_R + m.a * P;
    return r;
}

/// Largest |d/dt - rhs| over interior nodes 3..n-3, per component, with the
/// time derivative from the sixth-order centered stencil.
inline RiccatiState max_ode_residual(const RiccatiTable& table) {
    RiccatiState worst{0.0, 0.0, 0.0, 0.0};
    const double h = table.grid.dt();
    for (std::size_t i = 3; i + 3 <= table.grid.n_steps(); ++i) {
        const auto f = riccati_rhs(table.node(i), table.params, table.mult);
        const RiccatiState m3 = table.node(i - 3), m2 = table.node(i - 2), m1 = table.node(i - 1);
        const RiccatiState p1 = table.node(i + 1), p2 = table.node(i + 2), p3 = table.node(i + 3);
        for (std::size_t j = 0; j < 4; ++j) {
            const double d = (-m3[j] + 9.0 * m2[j] - 45.0 * m1[j] + 45.0 * p1[j] - 9.0 * p2[j] + p3[j]) / (60.0 * h);
            worst[j] = std::max(worst[j], std::abs(d - f[j]));
        }
    }
    return worst;
}

/// Columns t,C1,C2,D1,D2 with one header line.
inline void write_riccati_csv(std::ostream& os, const RiccatiTable& table) {
    csv::Writer w(os);
    w.header({"t", "C1", "C2", "D1", "D2"});
    for (std::size_t i = 0; i < table.grid.n_nodes(); ++i)
        w.row(table.grid.time(i), table.C1[i], table.C2[i], table.D1[i], table.D2[i]);
}

/// Inverse of write_riccati_csv. The grid is rebuilt from the first and last t.
inline RiccatiTable read_riccati_csv(std::istream& is, const ModelParams& m, const Multipliers& mult) {
    const auto tab = csv::read(is);
    const std::size_t ct = tab.column("t"), c1 = tab.column("C1"), c2 = tab.column("C2"),
                      d1 = tab.column("D1"), d2 = tab.column("D2");
    if (tab.rows.size() < 3) throw ConfigError("Riccati CSV needs at least 3 rows");
    TimeGrid grid(tab.rows.front()[ct], tab.rows.back()[ct], tab.rows.size() - 1);
    RiccatiTable table{grid, {}, {}, {}, {}, mult, m};
    for (std::size_t i = 0; i < tab.rows.size(); ++i) {
        const auto& r = tab.rows[i];
        if (std::abs(r[ct] - grid.time(i)) > 1e-9 * (1.0 + std::abs(grid.T())))
            throw ConfigError("Riccati CSV time column is not uniform");
        table.C1.push_back(r[c1]);
        table.C2.push_back(r[c2]);
        table.D1.push_back(r[d1]);
        table.D2.push_back(r[d2]);
    }
    return table;
}

}  // namespace hcpa

#endif  // HCPA_RICCATI_HPP
