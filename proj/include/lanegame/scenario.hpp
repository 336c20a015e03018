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

#ifndef LANEGAME__SCENARIO_HPP_
#define LANEGAME__SCENARIO_HPP_

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <numbers>
#include <optional>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "lanegame/aggressiveness.hpp"
#include "lanegame/decision_game.hpp"
#include "lanegame/kinematics.hpp"
#include "lanegame/presets.hpp"
#include "lanegame/risk_apf.hpp"

namespace lanegame
{

inline constexpr const char * kScenarioSchema = "lanegame.scenario/1";

/// Invalid scenario or preset document; the message names the offending field.
class ConfigError : public std::runtime_error
{
public:
  using std::runtime_error::runtime_error;
};

enum class PolicyType { hlm, constant, scripted, external };
enum class ScriptProfile { constant, aggressive, yielding, piecewise };
enum class HlmMode { game, command, keep };

/// Piecewise profile knot: from time t on apply a_x (and steer).
struct ScriptKnot
{
  double t = 0.0;
  double a_x = 0.0;
  double steer = 0.0;
  bool operator==(const ScriptKnot &) const = default;
};

struct PolicySpec
{
  PolicyType type = PolicyType::constant;

  // hlm
  HlmPreset preset = hlm_b();
  HlmMode mode = HlmMode::game;
  double command_time = 1.0;  // command mode: reference switch time [s]
  int command_lane = 1;

  // scripted
  ScriptProfile profile = ScriptProfile::constant;
  double profile_accel = 1.5;  // magnitude for aggressive / yielding [m/s^2]
  double v_max = 16.67;        // aggressive speed cap [m/s]
  std::vector<ScriptKnot> knots;

  bool operator==(const PolicySpec &) const = default;
};

struct AgentSpec
{
  std::string id;
  bool hv = false;
  VehicleState state;
  VehicleParams params;
  PolicySpec policy;

  bool operator==(const AgentSpec & o) const
  {
    return id == o.id && hv == o.hv && state.v_x == o.state.v_x && state.yaw == o.state.yaw &&
           state.x == o.state.x && state.y == o.state.y && params.b_f == o.params.b_f &&
           params.b_r == o.params.b_r && params.length == o.params.length &&
           params.width == o.params.width && params.delta_max == o.params.delta_max &&
           params.a_min == o.params.a_min && params.a_max == o.params.a_max && policy == o.policy;
  }
};

struct ScenarioConfig
{
  std::string name = "scenario";
  double duration = 20.0;
  double dt = 0.01;
  double decision_rate = 10.0;
  std::uint64_t seed = 0;
  double perturb = 0.0;      // relative initial-state jitter, 0 disables
  double commit_time = 1.0;  // no re-decision this long after a lane-change command [s]
  double gate_hold = 0.5;    // gate stays closed this long after the field drops [s]
  LaneGeometry lanes;
  FuzzyConfig fuzzy = FuzzyConfig::defaults();
  ApfParams apf;
  GameConfig game;
  std::vector<AgentSpec> vehicles;

  bool operator==(const ScenarioConfig &) const = default;

  std::size_t hv_index() const
  {
    for (std::size_t k = 0; k < vehicles.size(); ++k) {
      if (vehicles[k].hv) return k;
    }
    return 0;
  }

  /// Decision period in integration steps.
  std::size_t decision_stride() const
  {
    return static_cast<std::size_t>(std::llround(1.0 / (decision_rate * dt)));
  }
};

// --- geometry ---------------------------------------------------------------

struct Box
{
  double x = 0.0;
  double y = 0.0;
  double yaw = 0.0;
  double length = 4.5;
  double width = 1.8;
};

/// Separating-axis test for two oriented rectangles.
inline bool boxes_overlap(const Box & a, const Box & b)
{
  const std::array<double, 4> axes_yaw = {a.yaw, a.yaw + std::numbers::pi / 2, b.yaw,
                                          b.yaw + std::numbers::pi / 2};
  const double dx = b.x - a.x;
  const double dy = b.y - a.y;
  auto radius = [](const Box & box, double ux, double uy) {
    const double c = std::cos(box.yaw);
    const double s = std::sin(box.yaw);
    return 0.5 * box.length * std::abs(c * ux + s * uy) +
           0.5 * box.width * std::abs(-s * ux + c * uy);
  };
  for (double th : axes_yaw) {
    const double ux = std::cos(th);
    const double uy = std::sin(th);
    if (std::abs(dx * ux + dy * uy) > radius(a, ux, uy) + radius(b, ux, uy)) return false;
  }
  return true;
}

// --- enum names ---------------------------------------------------------------

inline const char * to_string(PolicyType p)
{
  switch (p) {
    case PolicyType::hlm: return "hlm";
    case PolicyType::constant: return "constant";
    case PolicyType::scripted: return "scripted";
    case PolicyType::external: return "external";
  }
  return "?";
}

inline const char * to_string(ScriptProfile p)
{
  switch (p) {
    case ScriptProfile::constant: return "constant";
    case ScriptProfile::aggressive: return "aggressive";
    case ScriptProfile::yielding: return "yielding";
    case ScriptProfile::piecewise: return "piecewise";
  }
  return "?";
}

inline const char * to_string(HlmMode m)
{
  switch (m) {
    case HlmMode::game: return "game";
    case HlmMode::command: return "command";
    case HlmMode::keep: return "keep";
  }
  return "?";
}

inline const char * to_string(AggLabel l)
{
  switch (l) {
    case AggLabel::C: return "C";
    case AggLabel::N: return "N";
    case AggLabel::A: return "A";
  }
  return "?";
}

// --- JSON reading -----------------------------------------------------------

namespace detail
{
using json = nlohmann::json;

inline std::string join(const std::string & path, const std::string & key)
{
  return path.empty() ? key : path + "." + key;
}

inline std::string join(const std::string & path, std::size_t idx)
{
  return path + "[" + std::to_string(idx) + "]";
}

[[noreturn]] inline void fail(const std::string & path, const std::string & what)
{
  throw ConfigError(path + ": " + what);
}

inline void require_object(const json & j, const std::string & path)
{
  if (!j.is_object()) fail(path.empty() ? "<root>" : path, "expected an object");
}

inline double as_number(const json & j, const std::string & path)
{
  if (!j.is_number()) fail(path, "expected a number");
  const double v = j.get<double>();
  if (!std::isfinite(v)) fail(path, "must be finite");
  return v;
}

inline double number(const json & obj, const char * key, const std::string & path, double def)
{
  const auto it = obj.find(key);
  if (it == obj.end()) return def;
  return as_number(*it, join(path, key));
}

inline double required_number(const json & obj, const char * key, const std::string & path)
{
  const auto it = obj.find(key);
  if (it == obj.end()) fail(join(path, key), "required field missing");
  return as_number(*it, join(path, key));
}

inline std::string string(
  const json & obj, const char * key, const std::string & path, const std::string & def)
{
  const auto it = obj.find(key);
  if (it == obj.end()) return def;
  if (!it->is_string()) fail(join(path, key), "expected a string");
  return it->get<std::string>();
}

template <std::size_t N>
std::array<double, N> number_array(
  const json & obj, const char * key, const std::string & path, const std::array<double, N> & def)
{
  const auto it = obj.find(key);
  if (it == obj.end()) return def;
  const auto p = join(path, key);
  if (!it->is_array() || it->size() != N) {
    fail(p, "expected an array of " + std::to_string(N) + " numbers");
  }
  std::array<double, N> out{};
  for (std::size_t k = 0; k < N; ++k) out[k] = as_number((*it)[k], join(p, k));
  return out;
}

inline std::vector<double> number_vector(
  const json & obj, const char * key, const std::string & path, const std::vector<double> & def)
{
  const auto it = obj.find(key);
  if (it == obj.end()) return def;
  const auto p = join(path, key);
  if (!it->is_array()) fail(p, "expected an array of numbers");
  std::vector<double> out;
  for (std::size_t k = 0; k < it->size(); ++k) out.push_back(as_number((*it)[k], join(p, k)));
  return out;
}

/// Run a validate() and re-throw its message tagged with the field path.
template <class F>
void checked(const std::string & path, F && f)
{
  try {
    f();
  } catch (const ConfigError &) {
    throw;
  } catch (const std::exception & e) {
    fail(path, e.what());
  }
}

inline MembershipFunction membership_from_json(const json & j, const std::string & path)
{
  require_object(j, path);
  MembershipFunction m;
  const auto shape = string(j, "shape", path, "");
  checked(join(path, "shape"), [&] { m.shape = membership_shape_from_string(shape); });
  m.breakpoints = number_vector(j, "breakpoints", path, {});
  checked(path, [&] { m.validate(); });
  return m;
}

template <std::size_t N>
std::array<MembershipFunction, N> sets_from_json(
  const json & obj, const char * key, const std::string & path,
  const std::array<MembershipFunction, N> & def)
{
  const auto it = obj.find(key);
  if (it == obj.end()) return def;
  const auto p = join(path, key);
  if (!it->is_array() || it->size() != N) fail(p, "expected " + std::to_string(N) + " sets");
  std::array<MembershipFunction, N> out;
  for (std::size_t k = 0; k < N; ++k) out[k] = membership_from_json((*it)[k], join(p, k));
  return out;
}

inline FuzzyConfig fuzzy_from_json(const json & j, const std::string & path)
{
  require_object(j, path);
  FuzzyConfig c = FuzzyConfig::defaults();
  c.velocity_max = number(j, "velocity_max", path, c.velocity_max);
  c.yaw_rate_max = number(j, "yaw_rate_max", path, c.yaw_rate_max);
  c.velocity_sets = sets_from_json(j, "velocity_sets", path, c.velocity_sets);
  c.yaw_rate_sets = sets_from_json(j, "yaw_rate_sets", path, c.yaw_rate_sets);
  c.output_sets = sets_from_json(j, "output_sets", path, c.output_sets);
  if (const auto it = j.find("rules"); it != j.end()) {
    const auto p = join(path, "rules");
    if (!it->is_array() || it->size() != 5) fail(p, "expected 5 rows");
    for (std::size_t r = 0; r < 5; ++r) {
      const auto & row = (*it)[r];
      if (!row.is_array() || row.size() != 5) fail(join(p, r), "expected 5 labels");
      for (std::size_t k = 0; k < 5; ++k) {
        const auto cell = join(join(p, r), k);
        if (!row[k].is_string()) fail(cell, "expected C, N or A");
        const auto s = row[k].get<std::string>();
        if (s == "C") c.rules[r][k] = AggLabel::C;
        else if (s == "N") c.rules[r][k] = AggLabel::N;
        else if (s == "A") c.rules[r][k] = AggLabel::A;
        else fail(cell, "expected C, N or A");
      }
    }
  }
  checked(path, [&] { c.validate(); });
  return c;
}

inline ApfParams apf_from_json(const json & j, const std::string & path)
{
  require_object(j, path);
  ApfParams p;
  p.a = number(j, "a", path, p.a);
  p.b_x = number(j, "b_x", path, p.b_x);
  p.b_y = number(j, "b_y", path, p.b_y);
  p.lambda_0 = number(j, "lambda_0", path, p.lambda_0);
  p.epsilon = number(j, "epsilon", path, p.epsilon);
  p.ttc_max = number(j, "ttc_max", path, p.ttc_max);
  p.upsilon_sf = number(j, "upsilon_sf", path, p.upsilon_sf);
  checked(path, [&] { p.validate(); });
  return p;
}

inline GameConfig game_from_json(const json & j, const std::string & path)
{
  require_object(j, path);
  GameConfig g;
  g.accel_grid = number_vector(j, "accel_grid", path, g.accel_grid);
  g.horizon = number(j, "horizon", path, g.horizon);
  g.lane_change_time = number(j, "lane_change_time", path, g.lane_change_time);
  g.sample_dt = number(j, "sample_dt", path, g.sample_dt);
  g.sensor_range = number(j, "sensor_range", path, g.sensor_range);
  g.infeasible_penalty = number(j, "infeasible_penalty", path, g.infeasible_penalty);
  g.min_gap = number(j, "min_gap", path, g.min_gap);
  checked(path, [&] { g.validate(); });
  return g;
}

inline VehicleParams params_from_json(const json & j, const std::string & path)
{
  require_object(j, path);
  VehicleParams p;
  p.b_f = number(j, "b_f", path, p.b_f);
  p.b_r = number(j, "b_r", path, p.b_r);
  p.length = number(j, "length", path, p.length);
  p.width = number(j, "width", path, p.width);
  p.delta_max = number(j, "delta_max", path, p.delta_max);
  p.a_min = number(j, "a_min", path, p.a_min);
  p.a_max = number(j, "a_max", path, p.a_max);
  checked(path, [&] { p.validate(); });
  return p;
}

}  // namespace detail

/// Preset document. Fields not given keep the values of `base`.
inline HlmPreset preset_from_json(
  const nlohmann::json & j, const std::string & path, const HlmPreset & base)
{
  using namespace detail;
  require_object(j, path);
  HlmPreset p = base;
  p.name = string(j, "name", path, p.name);
  p.gains.eta = number_array(j, "eta", path, p.gains.eta);
  p.gains.varpi = number_array(j, "varpi", path, p.gains.varpi);
  p.gains.tau_n = number(j, "tau_n", path, p.gains.tau_n);
  p.gains.tau_d = number(j, "tau_d", path, p.gains.tau_d);
  p.gains.far_distance = number(j, "far_distance", path, p.gains.far_distance);
  p.alpha_a = number(j, "alpha_a", path, p.alpha_a);
  p.alpha_p = number(j, "alpha_p", path, p.alpha_p);
  p.w_a_init = number_array(j, "w_a_init", path, p.w_a_init);
  p.w_p_init = number_array(j, "w_p_init", path, p.w_p_init);
  auto & w = p.weights;
  w.k_s_log = number(j, "k_s_log", path, w.k_s_log);
  w.k_s_lat = number(j, "k_s_lat", path, w.k_s_lat);
  w.k_e = number(j, "k_e", path, w.k_e);
  w.omega_v_log = number(j, "omega_v_log", path, w.omega_v_log);
  w.omega_s_log = number(j, "omega_s_log", path, w.omega_s_log);
  w.omega_v_lat = number(j, "omega_v_lat", path, w.omega_v_lat);
  w.omega_s_lat = number(j, "omega_s_lat", path, w.omega_s_lat);
  w.vartheta = number(j, "vartheta", path, w.vartheta);
  w.v_x_max = number(j, "v_x_max", path, w.v_x_max);
  w.epsilon = number(j, "epsilon", path, w.epsilon);
  p.kappa = number(j, "kappa", path, p.kappa);
  checked(path, [&] { p.validate(); });
  return p;
}

inline nlohmann::json preset_to_json(const HlmPreset & p)
{
  const auto & w = p.weights;
  return {
    {"name", p.name},
    {"eta", p.gains.eta},
    {"varpi", p.gains.varpi},
    {"alpha_a", p.alpha_a},
    {"alpha_p", p.alpha_p},
    {"k_s_log", w.k_s_log},
    {"k_s_lat", w.k_s_lat},
    {"k_e", w.k_e},
    {"omega_v_log", w.omega_v_log},
    {"omega_s_log", w.omega_s_log},
    {"omega_v_lat", w.omega_v_lat},
    {"omega_s_lat", w.omega_s_lat},
    {"vartheta", w.vartheta},
    {"v_x_max", w.v_x_max},
    {"epsilon", w.epsilon},
    {"tau_n", p.gains.tau_n},
    {"tau_d", p.gains.tau_d},
    {"far_distance", p.gains.far_distance},
    {"w_a_init", p.w_a_init},
    {"w_p_init", p.w_p_init},
    {"kappa", p.kappa}};
}

// --- scenario I/O -----------------------------------------------------------

namespace detail
{
inline PolicySpec policy_from_json(const json & j, const std::string & path)
{
  require_object(j, path);
  PolicySpec p;
  const auto type = string(j, "type", path, "constant");
  if (type == "hlm") p.type = PolicyType::hlm;
  else if (type == "constant") p.type = PolicyType::constant;
  else if (type == "scripted") p.type = PolicyType::scripted;
  else if (type == "external") p.type = PolicyType::external;
  else fail(join(path, "type"), "expected hlm, constant, scripted or external");

  if (p.type == PolicyType::hlm) {
    const auto name = string(j, "preset", path, "hlm_b");
    const auto it = j.find("overrides");
    if (it == j.end() || name == "hlm_a" || name == "hlm_b") {
      checked(join(path, "preset"), [&] { p.preset = builtin_preset(name); });
    }
    if (it != j.end()) {
      p.preset = preset_from_json(*it, join(path, "overrides"), p.preset);
    }
    p.preset.kappa = number(j, "kappa", path, p.preset.kappa);
    if (!(p.preset.kappa >= 0.0 && p.preset.kappa <= 1.0)) {
      fail(join(path, "kappa"), "must be in [0, 1]");
    }
    const auto mode = string(j, "mode", path, "game");
    if (mode == "game") p.mode = HlmMode::game;
    else if (mode == "command") p.mode = HlmMode::command;
    else if (mode == "keep") p.mode = HlmMode::keep;
    else fail(join(path, "mode"), "expected game, command or keep");
    p.command_time = number(j, "command_time", path, p.command_time);
    p.command_lane = static_cast<int>(number(j, "command_lane", path, p.command_lane));
  }

  if (p.type == PolicyType::scripted) {
    const auto prof = string(j, "profile", path, "constant");
    if (prof == "constant") p.profile = ScriptProfile::constant;
    else if (prof == "aggressive") p.profile = ScriptProfile::aggressive;
    else if (prof == "yielding") p.profile = ScriptProfile::yielding;
    else if (prof == "piecewise") p.profile = ScriptProfile::piecewise;
    else fail(join(path, "profile"), "expected constant, aggressive, yielding or piecewise");
    p.profile_accel = number(j, "profile_accel", path, p.profile_accel);
    if (!(p.profile_accel >= 0.0)) fail(join(path, "profile_accel"), "must be >= 0");
    p.v_max = number(j, "v_max", path, p.v_max);
    if (!(p.v_max > 0.0)) fail(join(path, "v_max"), "must be > 0");
    if (const auto it = j.find("knots"); it != j.end()) {
      const auto kp = join(path, "knots");
      if (!it->is_array()) fail(kp, "expected an array");
      for (std::size_t k = 0; k < it->size(); ++k) {
        const auto & e = (*it)[k];
        const auto ep = join(kp, k);
        require_object(e, ep);
        ScriptKnot knot;
        knot.t = required_number(e, "t", ep);
        knot.a_x = number(e, "a_x", ep, 0.0);
        knot.steer = number(e, "steer", ep, 0.0);
        if (!p.knots.empty() && !(knot.t > p.knots.back().t)) {
          fail(join(ep, "t"), "knot times must be strictly increasing");
        }
        p.knots.push_back(knot);
      }
    }
    if (p.profile == ScriptProfile::piecewise && p.knots.empty()) {
      fail(join(path, "knots"), "piecewise profile needs at least one knot");
    }
  }
  return p;
}

inline AgentSpec agent_from_json(const json & j, const std::string & path)
{
  require_object(j, path);
  AgentSpec a;
  a.id = string(j, "id", path, "");
  if (a.id.empty()) fail(join(path, "id"), "required non-empty string");
  const auto role = string(j, "role", path, "traffic");
  if (role == "hv") a.hv = true;
  else if (role != "traffic") fail(join(path, "role"), "expected hv or traffic");

  const auto sp = join(path, "state");
  const auto it = j.find("state");
  if (it == j.end()) fail(sp, "required field missing");
  require_object(*it, sp);
  a.state.x = required_number(*it, "x", sp);
  a.state.y = required_number(*it, "y", sp);
  a.state.yaw = number(*it, "yaw", sp, 0.0);
  a.state.v_x = required_number(*it, "v", sp);
  if (a.state.v_x < 0.0) fail(join(sp, "v"), "must be >= 0");

  if (const auto pit = j.find("params"); pit != j.end()) {
    a.params = params_from_json(*pit, join(path, "params"));
  }
  if (const auto pit = j.find("policy"); pit != j.end()) {
    a.policy = policy_from_json(*pit, join(path, "policy"));
  }
  return a;
}
}  // namespace detail

/// Structural checks that need the whole document.
inline void validate_scenario(const ScenarioConfig & c)
{
  using detail::fail;
  if (!(c.duration > 0.0)) fail("duration", "must be > 0");
  if (!(c.dt > 0.0)) fail("dt", "must be > 0");
  if (!(c.decision_rate > 0.0)) fail("decision_rate", "must be > 0");
  const double ratio = 1.0 / (c.decision_rate * c.dt);
  if (std::abs(ratio - std::round(ratio)) > 1e-6 || std::round(ratio) < 1.0) {
    fail("dt", "must divide 1/decision_rate");
  }
  if (!(c.perturb >= 0.0 && c.perturb < 0.5)) fail("perturb", "must be in [0, 0.5)");
  if (!(c.commit_time >= 0.0)) fail("commit_time", "must be >= 0");
  if (!(c.gate_hold >= 0.0)) fail("gate_hold", "must be >= 0");
  detail::checked("lanes", [&] { c.lanes.validate(); });
  if (c.vehicles.empty()) fail("vehicles", "at least one vehicle required");

  std::set<std::string> ids;
  int hv = 0;
  int external = 0;
  for (std::size_t k = 0; k < c.vehicles.size(); ++k) {
    const auto & a = c.vehicles[k];
    const auto p = detail::join("vehicles", k);
    if (!ids.insert(a.id).second) fail(detail::join(p, "id"), "duplicate id '" + a.id + "'");
    if (a.hv) ++hv;
    if (a.policy.type == PolicyType::external) ++external;
    const int lane = c.lanes.lane_of(a.state.y);
    if (std::abs(a.state.y - c.lanes.center(lane)) > c.lanes.width / 2) {
      fail(detail::join(p, "state.y"), "vehicle starts outside the lanes");
    }
    if (a.policy.type == PolicyType::hlm) {
      if (a.policy.mode == HlmMode::command && !c.lanes.valid(a.policy.command_lane)) {
        fail(detail::join(p, "policy.command_lane"), "no such lane");
      }
      if (a.policy.mode == HlmMode::game && c.lanes.count() < 2) {
        fail("lanes.centers", "game-mode agents need at least 2 lanes");
      }
    }
  }
  if (hv != 1) fail("vehicles", "exactly one vehicle must have role 'hv'");
  if (external > 1) fail("vehicles", "at most one external agent per session");

  for (std::size_t i = 0; i < c.vehicles.size(); ++i) {
    for (std::size_t j = i + 1; j < c.vehicles.size(); ++j) {
      const auto & a = c.vehicles[i];
      const auto & b = c.vehicles[j];
      const Box ba{a.state.x, a.state.y, a.state.yaw, a.params.length, a.params.width};
      const Box bb{b.state.x, b.state.y, b.state.yaw, b.params.length, b.params.width};
      if (boxes_overlap(ba, bb)) {
        fail("vehicles", "initial positions of '" + a.id + "' and '" + b.id + "' overlap");
      }
    }
  }
}

inline ScenarioConfig scenario_from_json(const nlohmann::json & j)
{
  using namespace detail;
  require_object(j, "");
  const auto schema = string(j, "schema", "", kScenarioSchema);
  if (schema != kScenarioSchema) fail("schema", "unsupported schema '" + schema + "'");
  ScenarioConfig c;
  c.name = string(j, "name", "", c.name);
  c.duration = number(j, "duration", "", c.duration);
  c.dt = number(j, "dt", "", c.dt);
  c.decision_rate = number(j, "decision_rate", "", c.decision_rate);
  if (const auto it = j.find("seed"); it != j.end()) {
    if (!it->is_number_unsigned() && !(it->is_number_integer() && it->get<std::int64_t>() >= 0)) {
      fail("seed", "expected a non-negative integer");
    }
    c.seed = it->get<std::uint64_t>();
  }
  c.perturb = number(j, "perturb", "", c.perturb);
  c.commit_time = number(j, "commit_time", "", c.commit_time);
  c.gate_hold = number(j, "gate_hold", "", c.gate_hold);
  if (const auto it = j.find("lanes"); it != j.end()) {
    require_object(*it, "lanes");
    c.lanes.centers = number_vector(*it, "centers", "lanes", c.lanes.centers);
    c.lanes.width = number(*it, "width", "lanes", c.lanes.width);
  }
  if (const auto it = j.find("fuzzy"); it != j.end()) c.fuzzy = fuzzy_from_json(*it, "fuzzy");
  if (const auto it = j.find("apf"); it != j.end()) c.apf = apf_from_json(*it, "apf");
  if (const auto it = j.find("game"); it != j.end()) c.game = game_from_json(*it, "game");
  const auto it = j.find("vehicles");
  if (it == j.end()) fail("vehicles", "required field missing");
  if (!it->is_array()) fail("vehicles", "expected an array");
  for (std::size_t k = 0; k < it->size(); ++k) {
    c.vehicles.push_back(agent_from_json((*it)[k], join("vehicles", k)));
  }
  validate_scenario(c);
  return c;
}

inline nlohmann::json membership_to_json(const MembershipFunction & m)
{
  return {{"shape", to_string(m.shape)}, {"breakpoints", m.breakpoints}};
}

/// Canonical form: every field materialised, so re-loading reproduces the run.
inline nlohmann::json scenario_to_json(const ScenarioConfig & c)
{
  using json = nlohmann::json;
  json fuzzy = {{"velocity_max", c.fuzzy.velocity_max}, {"yaw_rate_max", c.fuzzy.yaw_rate_max}};
  for (const auto * key : {"velocity_sets", "yaw_rate_sets"}) {
    const auto & sets =
      std::string(key) == "velocity_sets" ? c.fuzzy.velocity_sets : c.fuzzy.yaw_rate_sets;
    json arr = json::array();
    for (const auto & m : sets) arr.push_back(membership_to_json(m));
    fuzzy[key] = arr;
  }
  json out_sets = json::array();
  for (const auto & m : c.fuzzy.output_sets) out_sets.push_back(membership_to_json(m));
  fuzzy["output_sets"] = out_sets;
  json rules = json::array();
  for (const auto & row : c.fuzzy.rules) {
    json r = json::array();
    for (auto l : row) r.push_back(to_string(l));
    rules.push_back(r);
  }
  fuzzy["rules"] = rules;

  json vehicles = json::array();
  for (const auto & a : c.vehicles) {
    json policy = {{"type", to_string(a.policy.type)}};
    if (a.policy.type == PolicyType::hlm) {
      policy["preset"] = a.policy.preset.name;
      policy["overrides"] = preset_to_json(a.policy.preset);
      policy["kappa"] = a.policy.preset.kappa;
      policy["mode"] = to_string(a.policy.mode);
      policy["command_time"] = a.policy.command_time;
      policy["command_lane"] = a.policy.command_lane;
    }
    if (a.policy.type == PolicyType::scripted) {
      policy["profile"] = to_string(a.policy.profile);
      policy["profile_accel"] = a.policy.profile_accel;
      policy["v_max"] = a.policy.v_max;
      json knots = json::array();
      for (const auto & k : a.policy.knots) {
        knots.push_back({{"t", k.t}, {"a_x", k.a_x}, {"steer", k.steer}});
      }
      policy["knots"] = knots;
    }
    vehicles.push_back({
      {"id", a.id},
      {"role", a.hv ? "hv" : "traffic"},
      {"state", {{"x", a.state.x}, {"y", a.state.y}, {"yaw", a.state.yaw}, {"v", a.state.v_x}}},
      {"params",
       {{"b_f", a.params.b_f},
        {"b_r", a.params.b_r},
        {"length", a.params.length},
        {"width", a.params.width},
        {"delta_max", a.params.delta_max},
        {"a_min", a.params.a_min},
        {"a_max", a.params.a_max}}},
      {"policy", policy}});
  }

  return {
    {"schema", kScenarioSchema},
    {"name", c.name},
    {"duration", c.duration},
    {"dt", c.dt},
    {"decision_rate", c.decision_rate},
    {"seed", c.seed},
    {"perturb", c.perturb},
    {"commit_time", c.commit_time},
    {"gate_hold", c.gate_hold},
    {"lanes", {{"centers", c.lanes.centers}, {"width", c.lanes.width}}},
    {"fuzzy", fuzzy},
    {"apf",
     {{"a", c.apf.a},
      {"b_x", c.apf.b_x},
      {"b_y", c.apf.b_y},
      {"lambda_0", c.apf.lambda_0},
      {"epsilon", c.apf.epsilon},
      {"ttc_max", c.apf.ttc_max},
      {"upsilon_sf", c.apf.upsilon_sf}}},
    {"game",
     {{"accel_grid", c.game.accel_grid},
      {"horizon", c.game.horizon},
      {"lane_change_time", c.game.lane_change_time},
      {"sample_dt", c.game.sample_dt},
      {"sensor_range", c.game.sensor_range},
      {"infeasible_penalty", c.game.infeasible_penalty},
      {"min_gap", c.game.min_gap}}},
    {"vehicles", vehicles}};
}

inline nlohmann::json read_json_file(const std::string & path)
{
  std::ifstream in(path);
  if (!in) throw ConfigError(path + ": cannot open file");
  try {
    return nlohmann::json::parse(in);
  } catch (const nlohmann::json::parse_error & e) {
    throw ConfigError(path + ": " + e.what());
  }
}

inline ScenarioConfig load_scenario(const std::string & path)
{
  const auto j = read_json_file(path);
  try {
    return scenario_from_json(j);
  } catch (const ConfigError & e) {
    throw ConfigError(path + ": " + e.what());
  }
}

inline HlmPreset load_preset(const std::string & path)
{
  const auto j = read_json_file(path);
  const auto name = j.is_object() ? j.value("name", std::string()) : std::string();
  const auto base = name == "hlm_a" ? hlm_a() : hlm_b();
  try {
    return preset_from_json(j, "", base);
  } catch (const ConfigError & e) {
    throw ConfigError(path + ": " + e.what());
  }
}

inline void save_scenario(const ScenarioConfig & c, const std::string & path)
{
  std::ofstream out(path);
  if (!out) throw std::runtime_error(path + ": cannot write file");
  out << scenario_to_json(c).dump(2) << '\n';
}

}  // namespace lanegame

#endif  // LANEGAME__SCENARIO_HPP_
