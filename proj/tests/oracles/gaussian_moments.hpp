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

// Test oracle: exact second moments of the closed-loop Gaussian state.
//
// Under the linear feedback p = c . z and P = d . z with z = (x, R), the
// closed loop is z' = A(c, d) z + (sigma dW, 0). The adjoint drifts
// dp = -a p dt and dP = -a P dt force c' = -a c - A^T c and d' = -a d - A^T d,
// which are integrated backward here in this form, independently of the
// library's coefficient equations. The covariance obeys
// S' = A S + S A^T + diag(sigma^2, 0), so the expected costs follow without
// sampling.

#ifndef HCPA_TESTS_GAUSSIAN_MOMENTS_HPP
#define HCPA_TESTS_GAUSSIAN_MOMENTS_HPP

#include <array>
#include <cstddef>
#include <vector>

namespace oracle {

struct Params {
    double a, b, sigma, alpha, beta, T, lambda_A, lambda_P;
};

struct Moments {
    double JA;
    double JP;
    double ExT2;                     // E[x(T)^2]
    std::array<double, 4> coeff_t0;  // (c1, c2, d1, d2) at t = 0
};

namespace detail {

using Vec4 = std::array<double, 4>;

struct Closed {
    double a11, a12, a21, a22;
};

inline Closed closed_loop(const Params& p, const Vec4& cd) {
    const double b2 = p.b * p.b, k = b2 / p.lambda_P;
    return {p.a + b2 * cd[0] + k * cd[2], b2 * cd[1] + k * cd[3], p.lambda_A * b2 * cd[0] - b2 * cd[2],
            p.a + p.lambda_A * b2 * cd[1] - b2 * cd[3]};
}

inline Vec4 coeff_rate(const Params& p, const Vec4& cd) {
    const auto A = closed_loop(p, cd);
    const double c1 = cd[0], c2 = cd[1], d1 = cd[2], d2 = cd[3];
    return {-p.a * c1 - (A.a11 * c1 + A.a21 * c2), -p.a * c2 - (A.a12 * c1 + A.a22 * c2),
            -p.a * d1 - (A.a11 * d1 + A.a21 * d2), -p.a * d2 - (A.a12 * d1 + A.a22 * d2)};
}

// Augmented forward state: (S11, S12, S22, running JA, running JP).
using Vec5 = std::array<double, 5>;

inline Vec5 moment_rate(const Params& p, const Vec4& cd, const Vec5& s) {
    const auto A = closed_loop(p, cd);
    const double s11 = s[0], s12 = s[1], s22 = s[2];
    const double q_c = cd[0] * cd[0] * s11 + 2.0 * cd[0] * cd[1] * s12 + cd[1] * cd[1] * s22;
    const double q_d = cd[2] * cd[2] * s11 + 2.0 * cd[2] * cd[3] * s12 + cd[3] * cd[3] * s22;
    const double r = p.b / p.lambda_P;
    return {2.0 * (A.a11 * s11 + A.a12 * s12) + p.sigma * p.sigma,
            A.a11 * s12 + A.a12 * s22 + A.a21 * s11 + A.a22 * s12,
            2.0 * (A.a21 * s12 + A.a22 * s22),
            0.5 * p.b * p.b * q_c,  // (s - e)^2 / 2 = (b p)^2 / 2
            0.5 * r * r * q_d};
}

template <class V, class F>
V rk4(const F& f, const V& y, double h) {
    auto add = [](const V& u, double w, const V& v) {
        V o;
        for (std::size_t i = 0; i < u.size(); ++i) o[i] = u[i] + w * v[i];
        return o;
    };
    const V k1 = f(0, y);
    const V k2 = f(1, add(y, 0.5 * h, k1));
    const V k3 = f(1, add(y, 0.5 * h, k2));
    const V k4 = f(2, add(y, h, k3));
    V o;
    for (std::size_t i = 0; i < y.size(); ++i) o[i] = y[i] + h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
    return o;
}

}  // namespace detail

inline Moments gaussian_moments(const Params& p, std::size_t n = 4000) {
    using namespace detail;
    const double h = p.T / static_cast<double>(n);
    // coefficients at half-steps: index k <-> t = k h / 2
    std::vector<Vec4> cd(2 * n + 1);
    cd[2 * n] = {p.alpha, 0.0, p.alpha * p.lambda_A + p.beta * p.lambda_P, -p.alpha};
    for (std::size_t k = 2 * n; k > 0; --k)
        cd[k - 1] = rk4<Vec4>([&](int, const Vec4& y) { return coeff_rate(p, y); }, cd[k], -0.5 * h);

    Vec5 s{0.0, 0.0, 0.0, 0.0, 0.0};
    for (std::size_t i = 0; i < n; ++i) {
        // stage 0 at t_i, stage 1 at t_i + h/2, stage 2 at t_{i+1}
        s = rk4<Vec5>([&](int stage, const Vec5& y) { return moment_rate(p, cd[2 * i + static_cast<std::size_t>(stage)], y); },
                      s, h);
    }
    Moments out;
    out.ExT2 = s[0];
    out.JA = s[3] - 0.5 * p.alpha * s[0];
    out.JP = s[4] - 0.5 * p.beta * s[0];
    out.coeff_t0 = cd[0];
    return out;
}

}  // namespace oracle

#endif  // HCPA_TESTS_GAUSSIAN_MOMENTS_HPP
