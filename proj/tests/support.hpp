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

#ifndef LANEGAME__TESTS__SUPPORT_HPP_
#define LANEGAME__TESTS__SUPPORT_HPP_

#include <cstddef>
#include <optional>
#include <string>

#include "lanegame/scenario.hpp"
#include "lanegame/simulation.hpp"

// Helpers shared by the unit tests and the acceptance binary.
namespace lanegame::testing
{

inline std::string scenario_path(const std::string & name)
{
  return std::string(LANEGAME_SOURCE_DIR) + "/scenarios/" + name + ".json";
}

inline ScenarioConfig scenario(const std::string & name) { return load_scenario(scenario_path(name)); }

inline std::size_t index_of(const Trace & tr, const std::string & id)
{
  for (std::size_t k = 0; k < tr.ids.size(); ++k) {
    if (tr.ids[k] == id) return k;
  }
  throw std::out_of_range("no vehicle '" + id + "' in trace");
}

/// First time `id` is ahead of the HV (centre to centre), if ever.
inline std::optional<double> pass_time(const Trace & tr, const std::string & id)
{
  const auto k = index_of(tr, id);
  for (const auto & r : tr.records) {
    if (r.vehicles[k].x > r.vehicles[tr.hv].x) return r.t;
  }
  return std::nullopt;
}

/// First time the HV reference lane leaves its starting lane.
inline std::optional<double> first_lane_change(const Trace & tr)
{
  const int origin = tr.lanes.lane_of(tr.records.front().vehicles[tr.hv].y);
  for (const auto & r : tr.records) {
    if (r.hv_ref_lane != origin) return r.t;
  }
  return std::nullopt;
}

/// Number of samples inside a triggered interval that carry a lane change.
inline std::size_t alpha_while_triggered(const Trace & tr)
{
  std::size_t n = 0;
  for (const auto & r : tr.records) {
    if (r.triggered && r.alpha != 0) ++n;
  }
  return n;
}

inline std::size_t triggered_samples(const Trace & tr)
{
  std::size_t n = 0;
  for (const auto & r : tr.records) n += r.triggered ? 1 : 0;
  return n;
}

/// Smallest HV time to collision against any other vehicle.
inline double min_ttc(const Trace & tr, const ScenarioConfig & c)
{
  double best = c.apf.ttc_max;
  for (const auto & r : tr.records) {
    const auto & h = r.vehicles[tr.hv];
    for (std::size_t k = 0; k < r.vehicles.size(); ++k) {
      if (k == tr.hv) continue;
      const auto & o = r.vehicles[k];
      best = std::min(
        best, time_to_collision(
                {h.v_x, h.yaw, h.x, h.y}, c.vehicles[tr.hv].params.length, {o.v_x, o.yaw, o.x, o.y},
                c.vehicles[k].params.length, c.apf.ttc_max));
    }
  }
  return best;
}

/// Runs the scenario step by step and reports whether any amygdala
/// weight of any driver ever decreased.
inline bool amygdala_monotone(const ScenarioConfig & c, Trace * out = nullptr)
{
  Simulation sim(c);
  std::vector<std::array<double, 4>> last;
  for (const auto & a : sim.agents()) last.push_back(a.driver ? a.driver->belcm().w_a : std::array<double, 4>{});
  bool ok = true;
  while (!sim.done()) {
    sim.step();
    for (std::size_t k = 0; k < sim.agents().size(); ++k) {
      const auto & a = sim.agents()[k];
      if (!a.driver) continue;
      const auto & w = a.driver->belcm().w_a;
      for (std::size_t i = 0; i < 4; ++i) ok = ok && w[i] >= last[k][i];
      last[k] = w;
    }
  }
  if (out) *out = sim.take_trace();
  return ok;
}

/// Bitwise equality of two traces, including the stop reason.
inline bool identical(const Trace & a, const Trace & b)
{
  if (a.ids != b.ids || a.reason != b.reason || a.records.size() != b.records.size()) return false;
  for (std::size_t n = 0; n < a.records.size(); ++n) {
    const auto & p = a.records[n];
    const auto & q = b.records[n];
    if (p.t != q.t || p.alpha != q.alpha || p.a_star != q.a_star || p.hv_ref_lane != q.hv_ref_lane ||
        p.upsilon != q.upsilon || p.triggered != q.triggered || p.vehicles.size() != q.vehicles.size()) {
      return false;
    }
    for (std::size_t k = 0; k < p.vehicles.size(); ++k) {
      const auto & u = p.vehicles[k];
      const auto & v = q.vehicles[k];
      if (u.x != v.x || u.y != v.y || u.yaw != v.yaw || u.v_x != v.v_x || u.delta_f != v.delta_f ||
          u.a_x != v.a_x || u.kappa != v.kappa) {
        return false;
      }
    }
  }
  return true;
}

}  // namespace lanegame::testing

#endif  // LANEGAME__TESTS__SUPPORT_HPP_
