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

// Fixed-step classical Runge-Kutta integration on uniform grids, with
// terminal-value problems solved by marching backward in time.

#ifndef HCPA_ODE_HPP
#define HCPA_ODE_HPP

#include <array>
#include <cmath>
#include <cstddef>
#include <sstream>
#include <vector>

#include "hcpa/errors.hpp"

namespace hcpa {

inline constexpr double kBlowUpThreshold = 1e8;

/// Uniform grid t_i = t0 + i (T - t0) / n_steps, i = 0..n_steps.
class TimeGrid {
public:
    TimeGrid(double t0, double T, std::size_t n_steps) : t0_(t0), T_(T), n_(n_steps) {
        if (!(T > t0)) throw ConfigError("time grid needs T > t0");
        if (n_steps < 2) throw ConfigError("time grid needs n_steps >= 2");
    }

    double t0() const noexcept { return t0_; }
    double T() const noexcept { return T_; }
    std::size_t n_steps() const noexcept { return n_; }
    std::size_t n_nodes() const noexcept { return n_ + 1; }
    double dt() const noexcept { return (T_ - t0_) / static_cast<double>(n_); }

    double time(std::size_t i) const noexcept {
        if (i == n_) return T_;
        return t0_ + (T_ - t0_) * static_cast<double>(i) / static_cast<double>(n_);
    }

    bool operator==(const TimeGrid&) const = default;

private:
    double t0_;
    double T_;
    std::size_t n_;
};

template <std::size_t N>
using State = std::array<double, N>;

template <std::size_t N>
struct OdeSolution {
    TimeGrid grid;
    std::vector<State<N>> values;  ///< one state per grid node
};

namespace detail {

template <std::size_t N>
State<N> axpy(const State<N>& y, double h, const State<N>& k) {
    State<N> out;
    for (std::size_t j = 0; j < N; ++j) out[j] = y[j] + h * k[j];
    return out;
}

template <std::size_t N, class Rhs>
State<N> rk4_step(const Rhs& rhs, double t, const State<N>& y, double h) {
    const State<N> k1 = rhs(t, y);
    const State<N> k2 = rhs(t + 0.5 * h, axpy(y, 0.5 * h, k1));
    const State<N> k3 = rhs(t + 0.5 * h, axpy(y, 0.5 * h, k2));
    const State<N> k4 = rhs(t + h, axpy(y, h, k3));
    State<N> out;
    for (std::size_t j = 0; j < N; ++j) out[j] = y[j] + h / 6.0 * (k1[j] + 2.0 * k2[j] + 2.0 * k3[j] + k4[j]);
    return out;
}

template <std::size_t N>
void check_state(const State<N>& y, double t) {
    for (double v : y) {
        if (!std::isfinite(v)) {
            std::ostringstream os;
            os << "non-finite ODE state at t = " << t;
            throw NonFinite(os.str());
        }
        if (std::abs(v) > kBlowUpThreshold) {
            std::ostringstream os;
            os << "ODE state exceeded " << kBlowUpThreshold << " at t = " << t;
            throw BlowUp(os.str(), t);
        }
    }
}

}  // namespace detail

/// Solves y' = rhs(t, y) with y(T) given, marching from T down to t0 with step -dt.
/// rhs is callable as State<N>(double t, const State<N>& y).
template <std::size_t N, class Rhs>
OdeSolution<N> integrate_terminal(const Rhs& rhs, const State<N>& terminal_value, const TimeGrid& grid) {
    detail::check_state(terminal_value, grid.T());
    OdeSolution<N> sol{grid, std::vector<State<N>>(grid.n_nodes())};
    const std::size_t n = grid.n_steps();
    sol.values[n] = terminal_value;
    for (std::size_t i = n; i > 0; --i) {
        const double t = grid.time(i);
        const double h = grid.time(i - 1) - t;
        sol.values[i - 1] = detail::rk4_step<N>(rhs, t, sol.values[i], h);
        detail::check_state(sol.values[i - 1], grid.time(i - 1));
    }
    return sol;
}

/// Solves y' = rhs(t, y) with y(t0) given, marching forward.
template <std::size_t N, class Rhs>
OdeSolution<N> integrate_initial(const Rhs& rhs, const State<N>& initial_value, const TimeGrid& grid) {
    detail::check_state(initial_value, grid.t0());
    OdeSolution<N> sol{grid, std::vector<State<N>>(grid.n_nodes())};
    sol.values[0] = initial_value;
    for (std::size_t i = 0; i < grid.n_steps(); ++i) {
        const double t = grid.time(i);
        const double h = grid.time(i + 1) - t;
        sol.values[i + 1] = detail::rk4_step<N>(rhs, t, sol.values[i], h);
        detail::check_state(sol.values[i + 1], grid.time(i + 1));
    }
    return sol;
}

}  // namespace hcpa

#endif  // HCPA_ODE_HPP
