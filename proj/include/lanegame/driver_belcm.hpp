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

#ifndef LANEGAME__DRIVER_BELCM_HPP_
#define LANEGAME__DRIVER_BELCM_HPP_

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

#include "lanegame/kinematics.hpp"

namespace lanegame
{

/// Near/far preview errors perceived by the driver.
struct PreviewSignals
{
  double e_n = 0.0;          // lateral error at the near point [m]
  double theta_n = 0.0;      // near-point preview angle [rad]
  double theta_f = 0.0;      // far-point preview angle [rad]
  double theta_f_dot = 0.0;  // [rad/s]
  bool speed_clamped = false;
};

struct CurvatureSegment
{
  double x_begin = 0.0;
  double x_end = 0.0;
  double curvature = 0.0;  // [1/m]
};

/// Target-lane centreline. Straight unless curvature segments are given.
struct ReferencePath
{
  double center_y = 0.0;
  std::vector<CurvatureSegment> curves;

  double curvature_at(double x) const
  {
    for (const auto & c : curves) {
      if (x >= c.x_begin && x < c.x_end) return c.curvature;
    }
    return 0.0;
  }
};

/// Stimulus (eta) and emotion-signal (varpi) weights plus preview/delay times.
struct DriverGains
{
  std::array<double, 3> eta{};
  std::array<double, 4> varpi{};
  double tau_n = 1.0;          // near-point preview time [s]
  double tau_d = 0.15;         // neuromuscular delay [s]
  double far_distance = 15.0;  // far-point look-ahead [m]

  void validate() const
  {
    if (!(tau_n > 0.0)) throw std::invalid_argument("driver: tau_n must be > 0");
    if (!(tau_d >= 0.0)) throw std::invalid_argument("driver: tau_d must be >= 0");
    if (!(far_distance > 0.0)) throw std::invalid_argument("driver: far_distance must be > 0");
  }
};

/// Amygdala weights [W_A1, W_A2, W_A3, W_Ath], prefrontal weights [W_P1..3].
struct BelcmState
{
  std::array<double, 4> w_a{};
  std::array<double, 3> w_p{};
  double alpha_a = 0.1;
  double alpha_p = 0.1;

  void validate() const
  {
    auto in_unit = [](double a) { return a >= 0.0 && a < 1.0; };
    if (!in_unit(alpha_a) || !in_unit(alpha_p)) {
      throw std::invalid_argument("belcm: learning rates must lie in [0, 1)");
    }
  }
};

inline constexpr double kMinPreviewSpeed = 0.1;
inline constexpr double kWeightCap = 1e6;

inline PreviewSignals compute_previews(
  const VehicleState & state, const ReferencePath & ref, double tau_n, const PreviewSignals & prev,
  double dt, double far_distance = 15.0)
{
  PreviewSignals out;
  double v = state.v_x;
  if (v <= kMinPreviewSpeed) {
    v = kMinPreviewSpeed;
    out.speed_clamped = true;
  }
  const double look = tau_n * v;
  const double dy = ref.center_y - state.y;
  out.e_n = dy - look * state.yaw;
  out.theta_n = std::atan(dy / look) - state.yaw;

  const double k_d = ref.curvature_at(state.x);
  const double k_f = ref.curvature_at(state.x + far_distance);
  if (k_d != 0.0 && k_f != 0.0) {
    const double ratio = std::abs(k_d) / std::abs(k_f);  // R_F / R_D
    out.theta_f = std::acos(std::clamp(ratio, -1.0, 1.0));
  }
  out.theta_f_dot = dt > 0.0 ? (out.theta_f - prev.theta_f) / dt : 0.0;
  return out;
}

struct BelcmOutput
{
  double k = 0.0;  // controller output, from pre-update weights
  BelcmState state;
  bool weight_capped = false;
};

/// One emotional-learning tick: output K = A - P, then adapt the weights.
/// Amygdala increments are floored at zero so W_A never decreases.
inline BelcmOutput belcm_step(const std::array<double, 3> & si, double es, const BelcmState & st)
{
  const double a_th = std::max({si[0], si[1], si[2]});
  double sum_a = 0.0;
  double sum_p = 0.0;
  for (std::size_t i = 0; i < 3; ++i) {
    sum_a += st.w_a[i] * si[i];
    sum_p += st.w_p[i] * si[i];
  }
  BelcmOutput out;
  out.k = sum_a + st.w_a[3] * a_th - sum_p;
  out.state = st;

  const double gate = std::max(0.0, es - a_th - sum_a);
  const double pf_err = sum_a - sum_p - es;
  for (std::size_t i = 0; i < 3; ++i) {
    out.state.w_a[i] += std::max(0.0, st.alpha_a * si[i] * gate);
    out.state.w_p[i] += st.alpha_p * si[i] * pf_err;
  }
  out.state.w_a[3] += std::max(0.0, st.alpha_a * a_th * gate);

  auto cap = [&out](double & w) {
    if (std::abs(w) > kWeightCap) {
      w = std::copysign(kWeightCap, w);
      out.weight_capped = true;
    }
  };
  for (auto & w : out.state.w_a) cap(w);
  for (auto & w : out.state.w_p) cap(w);
  return out;
}

/// Linear-feedback gains xi_i = eta_i (W_Ai - W_Pi) the controller reduces to
/// when learning is frozen.
inline std::array<double, 3> equivalent_gains(const DriverGains & g, const BelcmState & st)
{
  return {
    g.eta[0] * (st.w_a[0] - st.w_p[0]), g.eta[1] * (st.w_a[1] - st.w_p[1]),
    g.eta[2] * (st.w_a[2] - st.w_p[2])};
}

struct DriverStepResult
{
  double delta_f = 0.0;
  double delta_star = 0.0;
  PreviewSignals previews;
  bool warning = false;
};

/// Lateral driver: two-point preview stimuli into BELCM, then the
/// neuromuscular lag and the steering limit.
class BelcmDriver
{
public:
  BelcmDriver() = default;
  BelcmDriver(DriverGains gains, BelcmState belcm) : gains_(gains), belcm_(belcm)
  {
    gains_.validate();
    belcm_.validate();
    lag_.tau = gains_.tau_d;
  }

  DriverStepResult step(
    const VehicleState & state, const ReferencePath & ref, double dt, const VehicleParams & params)
  {
    if (!(dt > 0.0)) throw std::invalid_argument("driver step: dt must be > 0");
    DriverStepResult r;
    r.previews = compute_previews(state, ref, gains_.tau_n, previews_, dt, gains_.far_distance);
    const auto & pv = r.previews;

    const std::array<double, 3> si = {
      gains_.eta[0] * pv.e_n, gains_.eta[1] * pv.theta_n, gains_.eta[2] * pv.theta_f_dot};
    const double delta_prev = lag_.current;
    const double es = gains_.varpi[0] * pv.e_n + gains_.varpi[1] * pv.theta_n +
                      gains_.varpi[2] * pv.theta_f_dot + gains_.varpi[3] * delta_prev;

    const auto out = belcm_step(si, es, belcm_);
    r.warning = out.weight_capped || pv.speed_clamped;
    if (!std::isfinite(out.k)) {
      r.warning = true;
      r.delta_star = delta_prev;
      r.delta_f = delta_prev;
      previews_ = pv;
      return r;
    }
    belcm_ = out.state;
    r.delta_star = out.k;
    const double target = std::clamp(out.k, -params.delta_max, params.delta_max);
    r.delta_f = std::clamp(lag_step(lag_, target, dt), -params.delta_max, params.delta_max);
    lag_.current = r.delta_f;
    previews_ = pv;
    return r;
  }

  const DriverGains & gains() const { return gains_; }
  const BelcmState & belcm() const { return belcm_; }
  const LagState & lag() const { return lag_; }
  double steering() const { return lag_.current; }

private:
  DriverGains gains_;
  BelcmState belcm_;
  LagState lag_;
  PreviewSignals previews_;
};

}  // namespace lanegame

#endif  // LANEGAME__DRIVER_BELCM_HPP_
