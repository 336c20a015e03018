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

#include <cmath>
#include <vector>

#include <gtest/gtest.h>

#include "lanegame/risk_apf.hpp"

namespace lg = lanegame;

TEST(Ttc, RatioOfGapAndClosingSpeed)
{
  // centres 24.5 m apart, 4.5 m long cars: 20 m gap, closing at 4 m/s
  const lg::VehicleState hv{14.0, 0.0, 0.0, 0.0};
  const lg::VehicleState nv{10.0, 0.0, 24.5, 0.0};
  EXPECT_NEAR(lg::time_to_collision(hv, 4.5, nv, 4.5, 10.0), 5.0, 1e-12);
}

TEST(Ttc, SeparatingGivesMax)
{
  const lg::VehicleState hv{10.0, 0.0, 0.0, 0.0};
  const lg::VehicleState nv{14.0, 0.0, 24.5, 0.0};
  EXPECT_EQ(lg::time_to_collision(hv, 4.5, nv, 4.5, 10.0), 10.0);
}

TEST(Ttc, OverlapUsesGapFloor)
{
  const lg::VehicleState hv{12.0, 0.0, 0.0, 0.0};
  const lg::VehicleState nv{10.0, 0.0, 3.0, 0.0};
  EXPECT_NEAR(lg::time_to_collision(hv, 4.5, nv, 4.5, 10.0), lg::kMinGap / 2.0, 1e-12);
}

TEST(Field, CentreEqualsMagnitude)
{
  const lg::ApfParams p;
  const lg::VehicleState nv{10.0, 0.0, 5.0, -3.0};
  for (double kappa : {0.0, 0.3, 1.0}) {
    for (double ttc : {0.0, 0.5, 3.0}) {
      const double lambda = lg::field_magnitude(lg::Aggressiveness{kappa}, ttc, p);
      EXPECT_NEAR(lg::field_value(5.0, -3.0, nv, 4.5, 1.8, lg::Aggressiveness{kappa}, ttc, p), lambda, 1e-12);
    }
  }
}

TEST(Field, MagnitudeWorkedExample)
{
  lg::ApfParams p;
  p.lambda_0 = 1.0;
  p.epsilon = 0.1;
  EXPECT_NEAR(lg::field_magnitude(lg::Aggressiveness{0.0}, 0.9, p), 1.0, 1e-15);
}

TEST(Field, EvenSymmetry)
{
  const lg::ApfParams p;
  const lg::VehicleState nv{};
  const lg::Aggressiveness k{0.4};
  for (double dx : {0.3, 2.0, 7.5}) {
    for (double dy : {0.1, 1.0, 2.5}) {
      const double f = lg::field_value(dx, dy, nv, 4.5, 1.8, k, 1.0, p);
      EXPECT_DOUBLE_EQ(f, lg::field_value(-dx, dy, nv, 4.5, 1.8, k, 1.0, p));
      EXPECT_DOUBLE_EQ(f, lg::field_value(dx, -dy, nv, 4.5, 1.8, k, 1.0, p));
    }
  }
}

TEST(Field, AggressivenessNeverLowersField)
{
  const lg::ApfParams p;
  const lg::VehicleState nv{};
  for (double dx : {0.0, 1.0, 4.0, 9.0}) {
    for (double dy : {0.0, 0.8, 2.0}) {
      double prev = 0.0;
      for (int k = 0; k <= 20; ++k) {
        const double f = lg::field_value(dx, dy, nv, 4.5, 1.8, lg::Aggressiveness{k / 20.0}, 0.7, p);
        EXPECT_GE(f, prev);
        prev = f;
      }
    }
  }
}

TEST(Field, NegativeTtcRejected)
{
  EXPECT_THROW(
    lg::field_value(0, 0, {}, 4.5, 1.8, lg::Aggressiveness{}, -0.1, lg::ApfParams{}), std::invalid_argument);
}

TEST(Trigger, StrictThreshold)
{
  const lg::ApfParams p;
  EXPECT_FALSE(lg::check_trigger(p.upsilon_sf, p, 0.0, {}).triggered);
  EXPECT_TRUE(lg::check_trigger(std::nextafter(p.upsilon_sf, 1.0), p, 0.0, {}).triggered);
}

TEST(Trigger, SingleRisingEdge)
{
  lg::ApfParams p;
  p.upsilon_sf = 0.5;
  lg::RiskAssessment r;
  const std::vector<double> seq = {0.1, 0.9, 0.2};
  for (std::size_t k = 0; k < seq.size(); ++k) r = lg::check_trigger(seq[k], p, static_cast<double>(k), r);
  EXPECT_EQ(r.events, 1);
  ASSERT_TRUE(r.trigger_time);
  EXPECT_EQ(*r.trigger_time, 1.0);
  EXPECT_FALSE(r.triggered);
}

TEST(Params, Validation)
{
  lg::ApfParams p;
  p.epsilon = 0.0;
  EXPECT_THROW(p.validate(), std::invalid_argument);
}
