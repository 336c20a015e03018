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

#ifndef LANEGAME__KINEMATICS_HPP_
#define LANEGAME__KINEMATICS_HPP_

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

namespace lanegame
{

/// Single-track geometry and actuator limits.
struct VehicleParams
{
  double b_f = 1.4;  // CoG to front axle [m]
  double b_r = 1.4;  // CoG to rear axle [m]
  double length = 4.5;
  double width = 1.8;
  double delta_max = 0.5;  // [rad]
  double a_min = -6.0;     // [m/s^2]
  double a_max = 3.0;      // [m/s^2]

  double wheelbase() const { return b_f + b_r; }

  void validate() const
  {
    auto require = [](bool ok, const char * what) {
      if (!ok) {
        throw std::invalid_argument(std::string("VehicleParams: ") + what);
      }
    };
    require(b_f > 0.0, "b_f must be > 0");
    require(b_r > 0.0, "b_r must be > 0");
    require(length > 0.0, "length must be > 0");
    require(width > 0.0, "width must be > 0");
    require(delta_max > 0.0 && delta_max < std::numbers::pi / 2.0, "delta_max must be in (0, pi/2)");
    require(a_min < 0.0 && a_max > 0.0, "a_min < 0 < a_max required");
  }
};

/// Kinematic state x = [v_x, yaw, X, Y].
struct VehicleState
{
  double v_x = 0.0;
  double yaw = 0.0;
  double x = 0.0;
  double y = 0.0;
};

struct ControlInput
{
  double a_x = 0.0;
  double delta_f = 0.0;
};

struct VehicleStateRate
{
  double dv_x = 0.0;
  double dyaw = 0.0;
  double dx = 0.0;
  double dy = 0.0;
};

/// First-order actuator lag 1 / (1 + tau s).
struct LagState
{
  double current = 0.0;
  double tau = 0.0;
};

inline ControlInput clamp_control(ControlInput u, const VehicleParams & p)
{
  u.a_x = std::clamp(u.a_x, p.a_min, p.a_max);
  u.delta_f = std::clamp(u.delta_f, -p.delta_max, p.delta_max);
  return u;
}

/// Sideslip angle at the CoG for a front steering angle.
inline double sideslip(double delta_f, const VehicleParams & p)
{
  return std::atan(p.b_r / (p.b_f + p.b_r) * std::tan(delta_f));
}

/// Heading of the velocity vector: yaw + sideslip.
inline double heading(const VehicleState & s, double delta_f, const VehicleParams & p)
{
  return s.yaw + sideslip(delta_f, p);
}

inline double yaw_rate(const VehicleState & s, double delta_f, const VehicleParams & p)
{
  return std::max(s.v_x, 0.0) * std::tan(sideslip(delta_f, p)) / p.b_r;
}

// Position rates use the heading yaw + beta; the state carries yaw.
inline VehicleStateRate derivatives(
  const VehicleState & s, const ControlInput & u, const VehicleParams & p)
{
  const double beta = sideslip(u.delta_f, p);
  const double v = std::max(s.v_x, 0.0);
  const double cos_beta = std::cos(beta);
  VehicleStateRate r;
  r.dv_x = u.a_x;
  r.dyaw = v * std::tan(beta) / p.b_r;
  r.dx = v * std::cos(s.yaw + beta) / cos_beta;
  r.dy = v * std::sin(s.yaw + beta) / cos_beta;
  return r;
}

namespace detail
{
inline VehicleState advance(const VehicleState & s, const VehicleStateRate & r, double h)
{
  return {s.v_x + h * r.dv_x, s.yaw + h * r.dyaw, s.x + h * r.dx, s.y + h * r.dy};
}
}  // namespace detail

/// One RK4 step. The control is held constant over dt; v_x never goes negative.
inline VehicleState step(
  const VehicleState & s, const ControlInput & u_in, double dt, const VehicleParams & p)
{
  if (!(dt > 0.0)) {
    throw std::invalid_argument("step: dt must be > 0");
  }
  ControlInput u = clamp_control(u_in, p);

  // Braking to a stop inside the step: integrate only up to the stop time.
  double h = dt;
  bool stops = false;
  if (u.a_x < 0.0 && s.v_x + u.a_x * dt < 0.0) {
    h = std::max(s.v_x, 0.0) / -u.a_x;
    stops = true;
  }

  VehicleState out = s;
  if (h > 0.0) {
    const auto k1 = derivatives(s, u, p);
    const auto k2 = derivatives(detail::advance(s, k1, h / 2.0), u, p);
    const auto k3 = derivatives(detail::advance(s, k2, h / 2.0), u, p);
    const auto k4 = derivatives(detail::advance(s, k3, h), u, p);
    out.v_x = s.v_x + h / 6.0 * (k1.dv_x + 2.0 * k2.dv_x + 2.0 * k3.dv_x + k4.dv_x);
    out.yaw = s.yaw + h / 6.0 * (k1.dyaw + 2.0 * k2.dyaw + 2.0 * k3.dyaw + k4.dyaw);
    out.x = s.x + h / 6.0 * (k1.dx + 2.0 * k2.dx + 2.0 * k3.dx + k4.dx);
    out.y = s.y + h / 6.0 * (k1.dy + 2.0 * k2.dy + 2.0 * k3.dy + k4.dy);
  }
  if (stops || out.v_x < 0.0) {
    out.v_x = 0.0;
  }
  return out;
}

/// Exact zero-order-hold discretisation of the first-order lag.
inline double lag_step(LagState & lag, double target, double dt)
{
  if (lag.tau <= 0.0) {
    lag.current = target;
  } else {
    lag.current += (1.0 - std::exp(-dt / lag.tau)) * (target - lag.current);
  }
  return lag.current;
}

}  // namespace lanegame

#endif  // LANEGAME__KINEMATICS_HPP_
