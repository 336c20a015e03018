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

#ifndef LANEGAME__RISK_APF_HPP_
#define LANEGAME__RISK_APF_HPP_

#include <algorithm>
#include <cmath>
#include <optional>
#include <stdexcept>

#include "lanegame/aggressiveness.hpp"
#include "lanegame/kinematics.hpp"

namespace lanegame
{

struct ApfParams
{
  double a = 1.0;  // shape exponent
  double b_x = 0.5;
  double b_y = 0.5;
  double lambda_0 = 1.0;
  double epsilon = 0.1;  // [s]
  double ttc_max = 10.0;  // [s]
  double upsilon_sf = 0.08;

  void validate() const
  {
    if (!(a > 0.0 && b_x > 0.0 && b_y > 0.0 && lambda_0 > 0.0 && epsilon > 0.0 && ttc_max > 0.0 &&
          upsilon_sf > 0.0)) {
      throw std::invalid_argument("apf: all parameters must be positive");
    }
  }

  bool operator==(const ApfParams &) const = default;
};

struct RiskAssessment
{
  double upsilon = 0.0;
  double ttc = 0.0;
  bool triggered = false;
  std::optional<double> trigger_time;  // time of the latest rising edge
  int events = 0;                      // rising edges seen so far
};

inline constexpr double kMinGap = 0.1;          // [m]
inline constexpr double kMinClosingSpeed = 0.05;  // [m/s]

/// Time to collision along the line of centres. Gaps are centre distance
/// minus half of both lengths; non-closing pairs get ttc_max.
inline double time_to_collision(
  const VehicleState & hv, double hv_length, const VehicleState & nv, double nv_length,
  double ttc_max)
{
  const double dx = nv.x - hv.x;
  const double dy = nv.y - hv.y;
  const double dist = std::hypot(dx, dy);
  const double gap = std::max(dist - 0.5 * (hv_length + nv_length), kMinGap);
  if (dist <= 0.0) {
    return 0.0;
  }
  const double dvx = nv.v_x * std::cos(nv.yaw) - hv.v_x * std::cos(hv.yaw);
  const double dvy = nv.v_x * std::sin(nv.yaw) - hv.v_x * std::sin(hv.yaw);
  const double closing = -(dx * dvx + dy * dvy) / dist;
  if (closing <= kMinClosingSpeed) {
    return ttc_max;
  }
  return std::clamp(gap / closing, 0.0, ttc_max);
}

/// Peak magnitude of the field: lambda_0 e^kappa / (ttc + eps)^2.
inline double field_magnitude(Aggressiveness kappa, double ttc, const ApfParams & p)
{
  const double d = ttc + p.epsilon;
  return p.lambda_0 * std::exp(kappa.value()) / (d * d);
}

/// Field of a neighbour vehicle evaluated at (x, y).
inline double field_value(
  double x, double y, const VehicleState & nv, double nv_length, double nv_width,
  Aggressiveness kappa, double ttc, const ApfParams & p)
{
  if (ttc < 0.0) throw std::invalid_argument("field_value: ttc must be >= 0");
  const double sigma_x = p.b_x * std::exp(kappa.value()) * nv_length;
  const double sigma_y = p.b_y * nv_width;
  const double dx = x - nv.x;
  const double dy = y - nv.y;
  const double q = dx * dx / (2.0 * sigma_x * sigma_x) + dy * dy / (2.0 * sigma_y * sigma_y);
  const double shape = q > 0.0 ? std::exp(-std::pow(q, p.a)) : 1.0;
  return field_magnitude(kappa, ttc, p) * shape;
}

/// Event-triggered gate: strict threshold, rising edges time-stamped.
inline RiskAssessment check_trigger(
  double upsilon, const ApfParams & p, double t, const RiskAssessment & prior)
{
  RiskAssessment r = prior;
  r.upsilon = upsilon;
  r.triggered = upsilon > p.upsilon_sf;
  if (r.triggered && !prior.triggered) {
    r.trigger_time = t;
    ++r.events;
  }
  return r;
}

}  // namespace lanegame

#endif  // LANEGAME__RISK_APF_HPP_
