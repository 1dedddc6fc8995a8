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

// Linear-quadratic principal-agent model: parameters, Lagrange multipliers,
// and the agent/principal Hamiltonians with their pointwise optimizers.
// All functionals are costs (to be minimized).

#ifndef HCPA_MODEL_HPP
#define HCPA_MODEL_HPP

#include <cmath>
#include <sstream>

#include "hcpa/errors.hpp"

namespace hcpa {

struct ModelParams {
    double a = 1.0;      ///< drift coefficient of production
    double b = 1.0;      ///< effort gain
    double sigma = 1.0;  ///< volatility
    double alpha = 0.2;  ///< agent terminal bonus factor
    double beta = 1.0;   ///< principal terminal bonus factor
    double T = 0.35;     ///< horizon
    double W0 = -0.1;    ///< participation threshold, J_A <= W0
    double lambda_min = 0.05;  ///< floor on lambda_P

    /// Throws ConfigError when an invariant is violated. sigma = 0 is accepted
    /// as a deterministic degenerate case.
    void validate() const {
        std::ostringstream err;
        if (!(std::isfinite(a) && std::isfinite(b))) err << "a and b must be finite; ";
        if (!(sigma >= 0.0) || !std::isfinite(sigma)) err << "sigma must be >= 0; ";
        if (!(T > 0.0) || !std::isfinite(T)) err << "T must be > 0; ";
        if (!(alpha > 0.0)) err << "alpha must be > 0; ";
        if (!(beta > 0.0)) err << "beta must be > 0; ";
        if (!(W0 < 0.0)) err << "W0 must be < 0; ";
        if (!(lambda_min > 0.0 && lambda_min < 1.0)) err << "lambda_min must lie in (0, 1); ";
        if (const auto msg = err.str(); !msg.empty()) throw ConfigError("invalid model parameters: " + msg);
    }
};

/// Lagrange pair on the upper half of the unit circle, parameterized by lambda_A.
class Multipliers {
public:
    Multipliers() = default;

    /// lambda_P = +sqrt(1 - lambda_A^2). Throws MultiplierFloor if lambda_P < lambda_min.
    static Multipliers from_lambda_A(double lambda_A, double lambda_min = 0.05) {
        if (!(lambda_A > -1.0 && lambda_A < 1.0))
            throw ConfigError("lambda_A must lie in (-1, 1)");
        const double lambda_P = std::sqrt((1.0 - lambda_A) * (1.0 + lambda_A));
        if (lambda_P < lambda_min) {
            std::ostringstream os;
            os << "lambda_P = " << lambda_P << " is below the floor " << lambda_min
               << " (lambda_A = " << lambda_A << ")";
            throw MultiplierFloor(os.str());
        }
        return Multipliers(lambda_A, lambda_P);
    }

    /// Largest |lambda_A| compatible with the floor.
    static double lambda_A_cap(double lambda_min) { return std::sqrt(1.0 - lambda_min * lambda_min); }

    double lambda_A() const noexcept { return lambda_A_; }
    double lambda_P() const noexcept { return lambda_P_; }

private:
    Multipliers(double la, double lp) : lambda_A_(la), lambda_P_(lp) {}

    double lambda_A_ = 0.0;
    double lambda_P_ = 1.0;
};

/// Agent and principal adjoint values at one instant.
struct AdjointState {
    double p = 0.0;
    double q = 0.0;
    double R = 0.0;
    double P = 0.0;
    double Q = 0.0;
};

/// H_A = p (a x + b e) + q sigma - (s - e)^2 / 2
inline double agent_hamiltonian(double x, double e, double p, double q, double s,
                                const ModelParams& m) noexcept {
    const double gap = s - e;
    return p * (m.a * x + m.b * e) + q * m.sigma - 0.5 * gap * gap;
}

/// Maximizer of agent_hamiltonian in e.
inline double agent_optimal_effort(double p, double s, const ModelParams& m) noexcept {
    return m.b * p + s;
}

/// Maximizer of principal_hamiltonian in s: (b / lambda_P) P.
inline double principal_optimal_cashflow(double P, const Multipliers& mult, const ModelParams& m) {
    if (mult.lambda_P() < m.lambda_min) {
        std::ostringstream os;
        os << "lambda_P = " << mult.lambda_P() << " below floor " << m.lambda_min;
        throw MultiplierFloor(os.str());
    }
    return m.b / mult.lambda_P() * P;
}

/// H_P = P (a x + b^2 p + b s) - R a p + Q sigma - lambda_A b^2 p^2 / 2 - lambda_P s^2 / 2
inline double principal_hamiltonian(double x, double p, double /*q*/, double s, double R, double P,
                                    double Q, const Multipliers& mult, const ModelParams& m) noexcept {
    const double b2 = m.b * m.b;
    return P * (m.a * x + b2 * p + m.b * s) - R * m.a * p + Q * m.sigma -
           mult.lambda_A() * 0.5 * b2 * p * p - mult.lambda_P() * 0.5 * s * s;
}

}  // namespace hcpa

#endif  // HCPA_MODEL_HPP
