// Copyright 2026 The lanegame Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <array>
#include <chrono>

#include <gtest/gtest.h>

#include "lanegame/aggressiveness.hpp"

namespace lg = lanegame;
using lg::AggLabel;

namespace
{

// Points where exactly one input set is fully active.
constexpr std::array<double, 5> kVelocityCores = {0.0, 6.0, 10.0, 14.0, 19.0};
constexpr std::array<double, 5> kYawRateCores = {0.0, 0.15, 0.25, 0.35, 0.45};

// Expected rule base, written out independently of the library table.
constexpr char kExpected[5][6] = {"CCCNN", "CCNNA", "CNNAA", "NNAAA", "NAAAA"};

AggLabel label(char c) { return c == 'C' ? AggLabel::C : (c == 'N' ? AggLabel::N : AggLabel::A); }

}  // namespace

TEST(Membership, ZeroVelocityIsVerySmall)
{
  const auto cfg = lg::FuzzyConfig::defaults();
  const auto d = lg::membership_eval(cfg.velocity_sets, 0.0, cfg.velocity_max);
  EXPECT_EQ(d, (lg::Degrees5{1, 0, 0, 0, 0}));
}

TEST(Membership, MiddleApex)
{
  const auto cfg = lg::FuzzyConfig::defaults();
  const double apex = cfg.velocity_sets[2].breakpoints[1];
  EXPECT_EQ(lg::membership_eval(cfg.velocity_sets, apex, cfg.velocity_max)[2], 1.0);
}

TEST(Membership, AboveUniverseIsVeryLarge)
{
  const auto cfg = lg::FuzzyConfig::defaults();
  EXPECT_EQ(lg::membership_eval(cfg.velocity_sets, 35.0, cfg.velocity_max), (lg::Degrees5{0, 0, 0, 0, 1}));
  EXPECT_EQ(lg::membership_eval(cfg.yaw_rate_sets, 3.0, cfg.yaw_rate_max), (lg::Degrees5{0, 0, 0, 0, 1}));
}

TEST(Membership, UniverseCoveredAndBounded)
{
  const auto cfg = lg::FuzzyConfig::defaults();
  for (int k = 0; k <= 400; ++k) {
    const double v = cfg.velocity_max * k / 400.0;
    const double r = cfg.yaw_rate_max * k / 400.0;
    for (const auto & d : {lg::membership_eval(cfg.velocity_sets, v, cfg.velocity_max),
                           lg::membership_eval(cfg.yaw_rate_sets, r, cfg.yaw_rate_max)}) {
      double best = 0.0;
      for (double x : d) {
        EXPECT_GE(x, 0.0);
        EXPECT_LE(x, 1.0);
        best = std::max(best, x);
      }
      EXPECT_GE(best, 0.5);
    }
  }
}

TEST(Membership, ShapesAndValidation)
{
  const auto z = lg::MembershipFunction::z(1.0, 3.0);
  EXPECT_EQ(z(0.5), 1.0);
  EXPECT_EQ(z(2.0), 0.5);
  EXPECT_EQ(z(3.5), 0.0);
  const auto s = lg::MembershipFunction::s(1.0, 3.0);
  EXPECT_EQ(s(0.5), 0.0);
  EXPECT_EQ(s(3.5), 1.0);
  EXPECT_THROW(lg::MembershipFunction::tri(1.0, 1.0, 2.0).validate(), std::invalid_argument);
  EXPECT_THROW((lg::MembershipFunction{lg::MembershipShape::z_shaped, {1.0}}.validate()), std::invalid_argument);
}

TEST(Rules, AllCellsByCrispProbes)
{
  const lg::FuzzyEstimator est;
  const auto & cfg = est.config();
  for (std::size_t i = 0; i < 5; ++i) {
    for (std::size_t j = 0; j < 5; ++j) {
      const auto vd = lg::membership_eval(cfg.velocity_sets, kVelocityCores[i], cfg.velocity_max);
      const auto rd = lg::membership_eval(cfg.yaw_rate_sets, kYawRateCores[j], cfg.yaw_rate_max);
      ASSERT_EQ(vd[i], 1.0);
      ASSERT_EQ(rd[j], 1.0);
      const auto act = lg::rule_infer(vd, rd, cfg.rules);
      const auto want = static_cast<std::size_t>(label(kExpected[i][j]));
      for (std::size_t l = 0; l < 3; ++l) {
        EXPECT_EQ(act[l], l == want ? 1.0 : 0.0) << "cell (" << i << ", " << j << ")";
      }
    }
  }
}

TEST(Rules, NamedCells)
{
  const auto & t = lg::kAggressivenessRules;
  EXPECT_EQ(t[0][4], AggLabel::N);  // (VS, VL)
  EXPECT_EQ(t[4][4], AggLabel::A);  // (VL, VL)
  EXPECT_EQ(t[2][1], AggLabel::N);  // (M, S)
}

TEST(Estimate, SaturatesAtMaxima)
{
  const lg::FuzzyEstimator est;
  EXPECT_EQ(est.estimate(25.0, 0.0).value(), 1.0);
  EXPECT_EQ(est.estimate(20.0, 0.0).value(), 1.0);
  EXPECT_EQ(est.estimate(5.0, 0.5).value(), 1.0);
  EXPECT_EQ(est.estimate(5.0, -0.7).value(), 1.0);
}

TEST(Estimate, StandstillIsConservativeCentroid)
{
  // Trapezoidal centroid of the conservative set over [0, 1] with 1e4 intervals.
  const auto c = lg::FuzzyConfig::defaults().output_sets[0];
  const int n = 10001;
  double num = 0.0, den = 0.0;
  for (int k = 0; k < n; ++k) {
    const double x = static_cast<double>(k) / (n - 1);
    const double w = (k == 0 || k == n - 1) ? 0.5 : 1.0;
    num += w * c(x) * x;
    den += w * c(x);
  }
  const double oracle = num / den;
  EXPECT_NEAR(oracle, 0.17051281538461524, 1e-12);

  const lg::FuzzyEstimator est;
  EXPECT_NEAR(est.estimate(0.0, 0.0).value(), oracle, 1e-5);
}

TEST(Estimate, MonotoneGrid)
{
  const lg::FuzzyEstimator est;
  const auto & cfg = est.config();
  const auto t0 = std::chrono::steady_clock::now();
  double k[41][41];
  for (int i = 0; i <= 40; ++i) {
    for (int j = 0; j <= 40; ++j) {
      k[i][j] = est.estimate(cfg.velocity_max * i / 40.0, cfg.yaw_rate_max * j / 40.0).value();
    }
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  // Plateaus come out equal only up to a few ulps.
  constexpr double round_off = 1e-12;
  for (int i = 0; i <= 40; ++i) {
    for (int j = 0; j <= 40; ++j) {
      if (i > 0) {
        EXPECT_LE(k[i - 1][j], k[i][j] + round_off) << i << "," << j;
      }
      if (j > 0) {
        EXPECT_LE(k[i][j - 1], k[i][j] + round_off) << i << "," << j;
      }
    }
  }
  EXPECT_LT(secs, 1.0);
}

TEST(Estimate, KeepsPreviousWhenNothingFires)
{
  lg::FuzzyConfig cfg = lg::FuzzyConfig::defaults();
  // Leave a hole in the velocity universe.
  cfg.velocity_sets[0] = lg::MembershipFunction::z(0.5, 1.0);
  cfg.velocity_sets[1] = lg::MembershipFunction::tri(4.0, 6.0, 10.0);
  const lg::FuzzyEstimator est(cfg);
  EXPECT_EQ(est.estimate(2.0, 0.0, lg::Aggressiveness{0.3}).value(), 0.3);
}

TEST(Aggressiveness, ClampedToUnitInterval)
{
  EXPECT_EQ(lg::Aggressiveness{1.7}.value(), 1.0);
  EXPECT_EQ(lg::Aggressiveness{-0.2}.value(), 0.0);
}
