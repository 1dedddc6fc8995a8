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

#include <gtest/gtest.h>

#include <cmath>
#include <random>
#include <sstream>

#include "support.hpp"

using namespace hcpa;
using testing_support::reference;
using testing_support::reference_mult;

namespace {

RiccatiTable reference_table(std::size_t n = 2000) { return solve_riccati(reference(), reference_mult(), TimeGrid(0.0, 0.35, n)); }

double max_residual(const RiccatiTable& t) {
    const auto r = max_ode_residual(t);
    return *std::max_element(r.begin(), r.end());
}

/// Max over 100 random (x, R) of the normalized drift residual, at nodes of a
/// 100-step grid (which are also nodes of any refinement of it).
double max_drift_residual(const RiccatiTable& t, std::uint64_t seed) {
    std::mt19937_64 gen(seed);
    std::uniform_real_distribution<double> u(-5.0, 5.0);
    std::uniform_int_distribution<std::size_t> node(2, 98);
    double worst = 0.0;
    for (int k = 0; k < 100; ++k) {
        const double x = u(gen), R = u(gen);
        const double time = t.grid.T() * static_cast<double>(node(gen)) / 100.0;
        const auto r = drift_identity_residual(t, time, x, R);
        worst = std::max(worst, std::max(std::abs(r.res_p), std::abs(r.res_P)) / (1.0 + std::abs(x) + std::abs(R)));
    }
    return worst;
}

}  // namespace

TEST(Riccati, TerminalRowIsExact) {
    const auto t = reference_table();
    const std::size_t n = t.grid.n_steps();
    EXPECT_EQ(t.C1[n], 0.2);
    EXPECT_EQ(t.C2[n], 0.0);
    EXPECT_EQ(t.D1[n], 0.2 * testing_support::kLambdaA + 1.0 * reference_mult().lambda_P());
    EXPECT_EQ(t.D2[n], -0.2);
    EXPECT_NEAR(t.D1[n], 0.2 * std::sqrt(0.75) + 0.5, 1e-15);
}

TEST(Riccati, InteriorResidualAt2000Steps) { EXPECT_LT(max_residual(reference_table()), 1e-8); }

TEST(Riccati, ResidualShrinksWithStep) {
    const double coarse = max_residual(reference_table(1000)), fine = max_residual(reference_table(2000));
    EXPECT_GT(coarse / fine, 8.0);
}

TEST(Riccati, NoEffortGainGivesExponentials) {
    auto m = reference();
    m.b = 0.0;
    const auto mult = reference_mult();
    const auto t = solve_riccati(m, mult, TimeGrid(0.0, m.T, 2000));
    for (std::size_t i = 0; i < t.grid.n_nodes(); i += 50) {
        const double g = std::exp(2.0 * m.a * (m.T - t.grid.time(i)));
        EXPECT_NEAR(t.C1[i], m.alpha * g, 1e-8);
        EXPECT_NEAR(t.C2[i], 0.0, 1e-8);
        EXPECT_NEAR(t.D1[i], (m.alpha * mult.lambda_A() + m.beta * mult.lambda_P()) * g, 1e-8);
        EXPECT_NEAR(t.D2[i], -m.alpha * g, 1e-8);
        const auto fb = feedback_coefficients(t, t.grid.time(i));
        EXPECT_EQ(fb.e_x - fb.s_x, 0.0);  // b p = 0
    }
}

TEST(Riccati, ZeroAgentBonusGivesScalarRiccati) {
    auto m = reference();
    m.alpha = 0.0;
    const auto mult = Multipliers::from_lambda_A(-0.4);
    const auto t = solve_riccati(m, mult, TimeGrid(0.0, m.T, 2000));
    const double k = m.b * m.b / mult.lambda_P();
    for (std::size_t i = 0; i < t.grid.n_nodes(); i += 25) {
        const double s = t.grid.time(i);
        const double inv = (1.0 / (m.beta * mult.lambda_P()) + k / (2.0 * m.a)) * std::exp(2.0 * m.a * (s - m.T)) -
                           k / (2.0 * m.a);
        EXPECT_NEAR(t.D1[i], 1.0 / inv, 1e-7);
        EXPECT_LE(std::abs(t.C1[i]) + std::abs(t.C2[i]) + std::abs(t.D2[i]), 1e-10);
    }
}

TEST(Riccati, FeedbackCoefficientsAtHorizon) {
    const auto fb = feedback_coefficients(reference_table(), 0.35);
    EXPECT_NEAR(fb.s_x, 1.346410, 1e-6);
    EXPECT_NEAR(fb.e_x, 1.546410, 1e-6);
    EXPECT_NEAR(fb.s_R, -0.4, 1e-15);
    EXPECT_NEAR(fb.e_R, -0.4, 1e-15);
}

TEST(Riccati, MatchesIndependentAdjointOracle) {
    for (double la : {-0.9, -0.3, 0.0, 0.5, testing_support::kLambdaA}) {
        const auto mult = Multipliers::from_lambda_A(la);
        const auto t = solve_riccati(reference(), mult, TimeGrid(0.0, 0.35, 2000));
        const auto o = oracle::gaussian_moments(testing_support::to_oracle(reference(), mult));
        for (std::size_t j = 0; j < 4; ++j) EXPECT_NEAR(t.node(0)[j], o.coeff_t0[j], 1e-9) << "lambda_A " << la;
    }
}

TEST(Riccati, DriftIdentityHoldsAtRandomPoints) { EXPECT_LT(max_drift_residual(reference_table(), 11), 1e-6); }

TEST(Riccati, DriftIdentityConvergesAtFourthOrder) {
    const double coarse = max_drift_residual(reference_table(200), 5);
    const double fine = max_drift_residual(reference_table(400), 5);
    EXPECT_NEAR(coarse / fine, 16.0, 16.0 * 0.2);
}

TEST(Riccati, DriftIdentityDetectsWrongSign) {
    // integrate the opposite time direction: the identity must fail visibly
    const auto m = reference();
    const auto mult = reference_mult();
    const TimeGrid g(0.0, m.T, 2000);
    auto flipped = [&](double, const RiccatiState& y) {
        auto f = riccati_rhs(y, m, mult);
        for (double& v : f) v = -v;
        return f;
    };
    const auto sol = integrate_terminal<4>(flipped, riccati_terminal(m, mult), g);
    RiccatiTable t{g, {}, {}, {}, {}, mult, m};
    for (const auto& v : sol.values) {
        t.C1.push_back(v[0]);
        t.C2.push_back(v[1]);
        t.D1.push_back(v[2]);
        t.D2.push_back(v[3]);
    }
    EXPECT_GT(max_drift_residual(t, 3), 1e-2);
}

TEST(Riccati, CsvRoundTrip) {
    const auto t = reference_table(300);
    std::stringstream ss;
    write_riccati_csv(ss, t);
    const auto back = read_riccati_csv(ss, t.params, t.mult);
    ASSERT_EQ(back.grid.n_nodes(), t.grid.n_nodes());
    for (std::size_t i = 0; i < t.grid.n_nodes(); ++i)
        for (std::size_t j = 0; j < 4; ++j) EXPECT_EQ(back.node(i)[j], t.node(i)[j]);
}

TEST(Riccati, InterpolationAndRangeChecks) {
    const auto t = reference_table(100);
    const double mid = 0.5 * (t.grid.time(10) + t.grid.time(11));
    EXPECT_NEAR(t.at(mid)[2], 0.5 * (t.D1[10] + t.D1[11]), 1e-14);
    EXPECT_THROW(t.at(-0.01), OutOfRange);
    EXPECT_THROW(feedback_coefficients(t, 0.36), OutOfRange);
    EXPECT_THROW(drift_identity_residual(t, t.grid.time(1), 0.0, 0.0), OutOfRange);
    EXPECT_THROW(drift_identity_residual(t, mid, 0.0, 0.0), OutOfRange);
}

TEST(Riccati, BlowUpIsReported) {
    auto m = reference();
    m.T = 5.0;
    EXPECT_THROW(solve_riccati(m, Multipliers::from_lambda_A(0.9), TimeGrid(0.0, m.T, 2000)), BlowUp);
}
