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
#include <sstream>

#include "support.hpp"

using namespace hcpa;
using testing_support::reference;
using testing_support::reference_mult;

namespace {

MonteCarloConfig small_mc(std::size_t n_paths = 4000, std::size_t n_steps = 100) {
    MonteCarloConfig mc;
    mc.n_paths = n_paths;
    mc.n_steps = n_steps;
    mc.seed = 77;
    return mc;
}

}  // namespace

TEST(Estimate, MeanAndStandardError) {
    const auto e = estimate({1.0, 2.0, 3.0, 4.0});
    EXPECT_DOUBLE_EQ(e.mean, 2.5);
    EXPECT_DOUBLE_EQ(e.std_error, std::sqrt(5.0 / 3.0 / 4.0));
    EXPECT_EQ(e.n_paths, 4u);
    const auto d = paired_difference({1.0, 2.0, 4.0}, {0.5, 1.5, 3.5});
    EXPECT_DOUBLE_EQ(d.mean, 0.5);
    EXPECT_EQ(d.std_error, 0.0);
    EXPECT_THROW(paired_difference({1.0}, {}), ConfigError);
}

TEST(Costs, VanishWithoutNoiseOrEffortGain) {
    auto m = reference();
    m.b = 0.0;
    m.sigma = 0.0;
    const auto pc = costs_at(m, 0.3, small_mc(10));
    for (double v : pc.ja) EXPECT_EQ(v, 0.0);
    for (double v : pc.jp) EXPECT_EQ(v, 0.0);
}

TEST(Costs, AgentPaysOnlyTerminalBonusWithoutEffortGain) {
    auto m = reference();
    m.b = 0.0;
    const auto table = solve_riccati(m, reference_mult(), TimeGrid(0.0, m.T, 2000));
    const auto ens = simulate_closed_loop(table, 50, 3, TimeGrid(0.0, m.T, 100));
    const auto pc = path_costs(ens);
    for (std::size_t p = 0; p < ens.n_paths; ++p) {
        const double xT = ens.x[ens.index(p, 100)];
        EXPECT_EQ(ens.e[ens.index(p, 40)], ens.s[ens.index(p, 40)]);
        EXPECT_NEAR(pc.ja[p], -0.5 * m.alpha * xT * xT, 1e-15);
    }
}

TEST(Costs, StoredAndStreamedRoutesAgree) {
    const auto m = reference();
    const auto mc = small_mc(200, 100);
    const auto table = solve_riccati(m, reference_mult(), TimeGrid(0.0, m.T, mc.riccati_steps));
    const auto streamed = simulate_path_costs(table, mc);
    const auto stored = path_costs(simulate_closed_loop(table, mc.n_paths, mc.seed, TimeGrid(0.0, m.T, mc.n_steps)));
    EXPECT_EQ(streamed.ja, stored.ja);
    EXPECT_EQ(streamed.jp, stored.jp);
    auto other = m;
    other.alpha = 0.4;
    const auto ens = simulate_closed_loop(table, 20, 1, TimeGrid(0.0, m.T, 50));
    const auto base = estimate_costs(ens), over = estimate_costs(ens, other);
    EXPECT_LT(over.JA.mean, base.JA.mean);
    EXPECT_EQ(over.JP.mean, base.JP.mean);
}

// Monte-Carlo costs against the exact Gaussian moments, with the O(dt) bias
// removed by Richardson extrapolation over two grids sharing their noise.
TEST(Costs, MatchExactGaussianMoments) {
    for (double la : {-0.5, testing_support::kLambdaA}) {
        const auto m = reference();
        const auto mult = Multipliers::from_lambda_A(la);
        auto coarse = small_mc(20000, 250);
        coarse.noise_substeps = 2;
        auto fine = small_mc(20000, 500);
        const auto pc = costs_at(m, la, coarse);
        const auto pf = costs_at(m, la, fine);
        std::vector<double> ja(pc.ja.size()), jp(pc.jp.size());
        for (std::size_t i = 0; i < ja.size(); ++i) {
            ja[i] = 2.0 * pf.ja[i] - pc.ja[i];
            jp[i] = 2.0 * pf.jp[i] - pc.jp[i];
        }
        const auto eja = estimate(ja), ejp = estimate(jp);
        const auto exact = oracle::gaussian_moments(testing_support::to_oracle(m, mult));
        EXPECT_NEAR(eja.mean, exact.JA, 3.0 * eja.std_error) << "lambda_A " << la;
        EXPECT_NEAR(ejp.mean, exact.JP, 3.0 * ejp.std_error) << "lambda_A " << la;
    }
}

TEST(Costs, StandardErrorScalesAsInverseRoot) {
    auto mc = small_mc(4000);
    const double se1 = estimate(costs_at(reference(), 0.2, mc).ja).std_error;
    mc.n_paths = 16000;
    const double se4 = estimate(costs_at(reference(), 0.2, mc).ja).std_error;
    EXPECT_NEAR(se1 / se4, 2.0, 0.4);
}

TEST(Sweep, SinglePoint) {
    const auto res = sweep_multipliers(reference(), {0.1}, small_mc(100));
    ASSERT_EQ(res.rows.size(), 1u);
    EXPECT_TRUE(res.rows[0].feasible);
    EXPECT_TRUE(res.ja_steps.empty());
    EXPECT_TRUE(res.jp_mirror.empty());
}

TEST(Sweep, CommonRandomNumbersAreBitwiseReproducible) {
    const auto mc = small_mc(300);
    const auto res = sweep_multipliers(reference(), {-0.4, 0.4}, mc);
    const auto direct = costs_at(reference(), 0.4, mc);
    EXPECT_EQ(res.rows[1].JA.mean, estimate(direct.ja).mean);
    EXPECT_EQ(res.rows[1].JP.std_error, estimate(direct.jp).std_error);
    ASSERT_EQ(res.jp_mirror.size(), 1u);
    EXPECT_DOUBLE_EQ(res.jp_mirror[0].abs_lambda_A, 0.4);
}

TEST(Sweep, AgentCostDecreasesAndNegativeBranchIsCheaper) {
    const auto res = sweep_multipliers(reference(), linspace(-0.9, 0.9, 7), small_mc());
    ASSERT_EQ(res.ja_steps.size(), 6u);
    for (const auto& d : res.ja_steps) EXPECT_LT(d.diff.mean, 2.0 * d.diff.std_error);
    for (const auto& d : res.ja_steps) EXPECT_LT(d.diff.mean, 0.0);
    ASSERT_EQ(res.jp_mirror.size(), 3u);
    for (const auto& d : res.jp_mirror) EXPECT_LT(d.diff.mean, 2.0 * d.diff.std_error);
}

TEST(Sweep, MatchesExactMomentsInShape) {
    // the exact costs show the same ordering the sweep is checked for
    double prev = INFINITY;
    for (double la : linspace(-0.95, 0.95, 41)) {
        const auto mult = Multipliers::from_lambda_A(la);
        const auto o = oracle::gaussian_moments(testing_support::to_oracle(reference(), mult), 1000);
        EXPECT_LT(o.JA, prev);
        prev = o.JA;
        if (la > 0.0) {
            const auto mirror = oracle::gaussian_moments(
                testing_support::to_oracle(reference(), Multipliers::from_lambda_A(-la)), 1000);
            EXPECT_LT(mirror.JP, o.JP);
        }
    }
}

TEST(Sweep, CsvLeavesInfeasibleCellsEmpty) {
    SweepResult res;
    SweepRow ok;
    ok.lambda_A = 0.0;
    ok.JA = {-0.1, 0.01, 10};
    SweepRow bad;
    bad.lambda_A = 0.5;
    bad.lambda_P = std::sqrt(0.75);
    bad.feasible = false;
    res.rows = {ok, bad};
    std::stringstream ss;
    write_sweep_csv(ss, res);
    std::string header, first, second;
    std::getline(ss, header);
    std::getline(ss, first);
    std::getline(ss, second);
    EXPECT_EQ(header, "lambda_A,lambda_P,JA_mean,JA_se,JP_mean,JP_se");
    EXPECT_EQ(second.substr(second.size() - 4), ",,,,");
}

TEST(Calibration, RecoversMultiplierFromItsOwnCost) {
    const auto m0 = reference();
    const auto mc = small_mc(4000, 100);
    const double target = 0.3;
    auto m = m0;
    m.W0 = estimate(costs_at(m0, target, mc).ja).mean;
    const auto cal = calibrate_participation(m, mc, 1e-4);
    EXPECT_LE(cal.iterations, 60u);
    EXPECT_LT(std::abs(cal.JA.mean - m.W0), std::max(1e-4, 2.0 * cal.JA.std_error));
    // the stopping rule allows |J_A - W0| up to 2 stderr; convert to a multiplier bound via the local slope
    const double slope = (estimate(costs_at(m0, target + 0.05, mc).ja).mean -
                          estimate(costs_at(m0, target - 0.05, mc).ja).mean) / 0.1;
    EXPECT_LT(std::abs(cal.lambda_A0 - target), 1.5 * std::max(1e-4, 2.0 * cal.JA.std_error) / std::abs(slope));
    EXPECT_NEAR(cal.lambda_P0, std::sqrt(1.0 - cal.lambda_A0 * cal.lambda_A0), 1e-15);
}

TEST(Calibration, UnreachableThresholdIsNotBracketed) {
    auto m = reference();
    m.W0 = -1e6;
    try {
        calibrate_participation(m, small_mc(500, 50), 1e-3);
        FAIL() << "expected NotBracketed";
    } catch (const NotBracketed& e) {
        EXPECT_GT(e.ja_low(), m.W0);
    }
}

TEST(WinWin, BothPartiesBenefitAboveThreshold) {
    const auto rep = win_win_report(reference(), small_mc(20000, 200), 1e-3);
    ASSERT_TRUE(rep.informative);
    ASSERT_TRUE(rep.calibration.has_value());
    EXPECT_LT(rep.W_c, rep.W0);
    EXPECT_LT(rep.calibration->lambda_A0, 0.0);
    EXPECT_TRUE(rep.agent_benefits);
    EXPECT_TRUE(rep.principal_benefits);
    EXPECT_LT(rep.JP_gap.mean, 0.0);
}

TEST(WinWin, ThresholdBelowAgentCostAtZeroIsRejected) {
    auto m = reference();
    m.W0 = -0.2;
    EXPECT_THROW(win_win_report(m, small_mc(2000, 100), 1e-3), ThresholdBelowWc);
}

TEST(WinWin, NoEffortGainIsNotInformative) {
    auto m = reference();
    m.b = 0.0;
    const auto rep = win_win_report(m, small_mc(1000, 50), 1e-3);
    EXPECT_FALSE(rep.informative);
    EXPECT_FALSE(rep.calibration.has_value());
}
