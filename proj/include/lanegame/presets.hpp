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

#ifndef LANEGAME__PRESETS_HPP_
#define LANEGAME__PRESETS_HPP_

#include <array>
#include <stdexcept>
#include <string>

#include "lanegame/decision_game.hpp"
#include "lanegame/driver_belcm.hpp"

namespace lanegame
{

/// Everything that distinguishes one human-like driver from another.
struct HlmPreset
{
  std::string name;
  DriverGains gains;
  double alpha_a = 0.1;
  double alpha_p = 0.1;
  std::array<double, 4> w_a_init{};
  std::array<double, 3> w_p_init{};
  CostWeights weights;
  double kappa = 0.5;  // persona aggressiveness used in the own cost

  BelcmState belcm() const
  {
    BelcmState s;
    s.w_a = w_a_init;
    s.w_p = w_p_init;
    s.alpha_a = alpha_a;
    s.alpha_p = alpha_p;
    return s;
  }

  void validate() const
  {
    gains.validate();
    belcm().validate();
    weights.validate();
    if (!(kappa >= 0.0 && kappa <= 1.0)) throw std::invalid_argument("preset: kappa must be in [0, 1]");
  }

  bool operator==(const HlmPreset & o) const
  {
    return name == o.name && gains.eta == o.gains.eta && gains.varpi == o.gains.varpi &&
           gains.tau_n == o.gains.tau_n && gains.tau_d == o.gains.tau_d &&
           gains.far_distance == o.gains.far_distance && alpha_a == o.alpha_a &&
           alpha_p == o.alpha_p && w_a_init == o.w_a_init && w_p_init == o.w_p_init &&
           weights == o.weights && kappa == o.kappa;
  }
};

/// Cautious driver (about three years of experience).
inline HlmPreset hlm_a()
{
  HlmPreset p;
  p.name = "hlm_a";
  p.gains.eta = {2e-6, 5e-5, 0.3};
  p.gains.varpi = {5.0, 3e-3, 6e-3, 1500.0};
  p.gains.tau_n = 2.5;
  p.gains.tau_d = 0.15;
  p.alpha_a = 0.2;
  p.alpha_p = 0.2;
  p.w_a_init = {2500.0, 4000.0, 0.0, 0.0};
  p.w_p_init = {0.0, 0.0, 0.0};
  p.weights.k_s_log = 10.0;
  p.weights.k_s_lat = 80.0;
  p.weights.k_e = 8.0;
  p.weights.omega_v_log = 3.0;
  p.weights.omega_s_log = 8.0;
  p.weights.omega_v_lat = 3.0;
  p.weights.omega_s_lat = 8.0;
  p.kappa = 0.05;
  return p;
}

/// Aggressive driver (about ten years of experience).
inline HlmPreset hlm_b()
{
  HlmPreset p;
  p.name = "hlm_b";
  p.gains.eta = {1e-5, 1e-4, 0.1};
  p.gains.varpi = {1.0, 1e-3, 1e-3, 1000.0};
  p.gains.tau_n = 2.0;
  p.gains.tau_d = 0.15;
  p.alpha_a = 0.1;
  p.alpha_p = 0.1;
  p.w_a_init = {500.0, 3000.0, 0.0, 0.0};
  p.w_p_init = {0.0, 0.0, 0.0};
  p.weights.k_s_log = 6.0;
  p.weights.k_s_lat = 50.0;
  p.weights.k_e = 15.0;
  p.weights.omega_v_log = 2.0;
  p.weights.omega_s_log = 5.0;
  p.weights.omega_v_lat = 2.0;
  p.weights.omega_s_lat = 5.0;
  p.kappa = 0.6;
  return p;
}

inline HlmPreset builtin_preset(const std::string & name)
{
  if (name == "hlm_a") return hlm_a();
  if (name == "hlm_b") return hlm_b();
  throw std::invalid_argument("unknown preset '" + name + "' (expected hlm_a or hlm_b)");
}

}  // namespace lanegame

#endif  // LANEGAME__PRESETS_HPP_
