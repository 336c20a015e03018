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

#ifndef LANEGAME__SIMULATION_HPP_
#define LANEGAME__SIMULATION_HPP_

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "lanegame/aggressiveness.hpp"
#include "lanegame/decision_game.hpp"
#include "lanegame/driver_belcm.hpp"
#include "lanegame/kinematics.hpp"
#include "lanegame/metrics.hpp"
#include "lanegame/risk_apf.hpp"
#include "lanegame/scenario.hpp"

namespace lanegame
{

inline constexpr const char * kTraceSchema = "lanegame.trace/1";

enum class StopReason { running, completed, collision };

inline const char * to_string(StopReason r)
{
  switch (r) {
    case StopReason::running: return "running";
    case StopReason::completed: return "completed";
    case StopReason::collision: return "collision";
  }
  return "?";
}

struct VehicleSample
{
  double x = 0.0;
  double y = 0.0;
  double yaw = 0.0;
  double v_x = 0.0;
  double delta_f = 0.0;
  double a_x = 0.0;
  double kappa = 0.5;  // as estimated from speed and yaw rate
};

/// Game bookkeeping of one decision tick, kept with --debug-game.
struct DecisionDiagnostics
{
  std::string opponent;  // empty for a single-player decision
  std::size_t row = 0;
  std::size_t col = 0;
  bool is_nash = false;
  bool fallback_used = false;
  bool gated = false;
  std::vector<double> cost_i;
  std::vector<double> cost_j;
};

struct TraceRecord
{
  double t = 0.0;
  std::vector<VehicleSample> vehicles;
  int alpha = 0;         // HV lane decision in force
  double a_star = 0.0;   // HV commanded acceleration
  int hv_ref_lane = 0;
  double hv_ref_y = 0.0;
  double upsilon = 0.0;  // field at the HV
  bool triggered = false;
  bool decision_tick = false;
  std::optional<DecisionDiagnostics> diagnostics;
};

struct Trace
{
  std::string schema = kTraceSchema;
  std::string scenario;
  std::vector<std::string> ids;
  std::size_t hv = 0;
  double dt = 0.01;
  LaneGeometry lanes;
  std::vector<TraceRecord> records;
  StopReason reason = StopReason::running;
  std::string collision_with;

  /// HV path as (t, X, Y, v) samples.
  Trajectory hv_trajectory() const
  {
    Trajectory out;
    out.reserve(records.size());
    for (const auto & r : records) {
      const auto & v = r.vehicles[hv];
      out.push_back({r.t, v.x, v.y, v.v_x});
    }
    return out;
  }
};

/// First switch of the HV reference away from its starting lane, with the
/// lane it switched to. An overtake that later returns still counts.
struct LaneCommand
{
  double t = 0.0;
  int origin = 0;
  int target = 0;
};

inline std::optional<LaneCommand> first_lane_command(const Trace & tr)
{
  if (tr.records.empty()) return std::nullopt;
  const int origin = tr.lanes.lane_of(tr.records.front().vehicles[tr.hv].y);
  for (const auto & r : tr.records) {
    if (r.hv_ref_lane != origin) return LaneCommand{r.t, origin, r.hv_ref_lane};
  }
  return std::nullopt;
}

inline std::optional<double> command_time(const Trace & tr)
{
  const auto c = first_lane_command(tr);
  return c ? std::optional<double>(c->t) : std::nullopt;
}

/// Lane-change statistics of the HV in a finished trace.
inline LaneChangeStats hv_lane_change_stats(const Trace & tr, const LaneChangeSpec & base = {})
{
  LaneChangeSpec spec = base;
  const auto c = first_lane_command(tr);
  if (c) {
    spec.origin_y = tr.lanes.center(c->origin);
    spec.target_y = tr.lanes.center(c->target);
    spec.boundary_y = tr.lanes.boundary(c->origin, c->target);
  }
  auto path = tr.hv_trajectory();
  if (c) {
    // The manoeuvre ends when the reference leaves the target lane again.
    for (std::size_t k = 0; k < tr.records.size(); ++k) {
      if (tr.records[k].t > c->t && tr.records[k].hv_ref_lane != c->target) {
        path.resize(std::max<std::size_t>(k, 2));
        break;
      }
    }
  }
  return lane_change_stats(path, spec, c ? std::optional<double>(c->t) : std::nullopt);
}

struct SimOptions
{
  bool debug_game = false;
};

/// Per-vehicle runtime state.
struct AgentRuntime
{
  AgentSpec spec;
  VehicleState state;
  std::optional<BelcmDriver> driver;
  LagState accel_lag;
  int ref_lane = 0;
  int origin_lane = 0;
  int alpha = 0;
  double a_cmd = 0.0;
  double a_applied = 0.0;
  double delta = 0.0;
  double yaw_rate = 0.0;
  Aggressiveness kappa_est{0.5};
  RiskAssessment risk;
  double commit_until = -1.0;
  double gate_until = -1.0;
  bool commanded = false;
};

/// Closed-loop runner: one fixed-step loop over all agents in id order.
class Simulation
{
public:
  explicit Simulation(ScenarioConfig config, SimOptions options = {})
  : config_(std::move(config)), options_(options), estimator_(config_.fuzzy)
  {
    validate_scenario(config_);
    hv_ = config_.hv_index();
    stride_ = config_.decision_stride();
    steps_ = static_cast<std::size_t>(std::llround(config_.duration / config_.dt));

    std::mt19937_64 rng(config_.seed);
    std::uniform_real_distribution<double> jitter(-1.0, 1.0);
    for (const auto & spec : config_.vehicles) {
      AgentRuntime a;
      a.spec = spec;
      a.state = spec.state;
      if (config_.perturb > 0.0) {
        a.state.x += config_.perturb * std::abs(a.state.x) * jitter(rng);
        a.state.y += config_.perturb * std::abs(a.state.y) * jitter(rng);
        a.state.v_x = std::max(0.0, a.state.v_x + config_.perturb * a.state.v_x * jitter(rng));
      }
      a.ref_lane = config_.lanes.lane_of(a.state.y);
      a.origin_lane = a.ref_lane;
      if (spec.policy.type == PolicyType::hlm) {
        a.driver.emplace(spec.policy.preset.gains, spec.policy.preset.belcm());
        a.accel_lag.tau = spec.policy.preset.gains.tau_d;
      }
      a.kappa_est = estimator_.estimate(a.state.v_x, 0.0);
      agents_.push_back(std::move(a));
    }

    trace_.scenario = config_.name;
    trace_.hv = hv_;
    trace_.dt = config_.dt;
    trace_.lanes = config_.lanes;
    for (const auto & a : agents_) trace_.ids.push_back(a.spec.id);
    trace_.reason = StopReason::running;
  }

  const ScenarioConfig & config() const { return config_; }
  const Trace & trace() const { return trace_; }
  Trace take_trace() { return std::move(trace_); }
  const std::vector<AgentRuntime> & agents() const { return agents_; }
  double time() const { return static_cast<double>(step_) * config_.dt; }
  std::size_t step_index() const { return step_; }
  bool done() const { return trace_.reason != StopReason::running; }

  /// Latest human input for the external agent (held until replaced).
  void set_external_control(double steer, double accel)
  {
    external_steer_ = steer;
    external_accel_ = accel;
  }

  /// Advance by one dt. The first call also records the initial sample.
  void step()
  {
    if (done()) return;
    const double t = time();
    const bool decision_tick = step_ % stride_ == 0;

    update_risk(t);
    std::optional<DecisionDiagnostics> diag;
    if (decision_tick) {
      for (auto & a : agents_) a.kappa_est = estimator_.estimate(a.state.v_x, a.yaw_rate, a.kappa_est);
      for (std::size_t i = 0; i < agents_.size(); ++i) {
        auto d = decide_for(i, t);
        if (i == hv_ && d) diag = std::move(d);
      }
    }
    compute_controls(t);
    record(t, decision_tick, std::move(diag));

    for (auto & a : agents_) {
      const ControlInput u{a.a_applied, a.delta};
      a.yaw_rate = lanegame::yaw_rate(a.state, a.delta, a.spec.params);
      a.state = lanegame::step(a.state, u, config_.dt, a.spec.params);
    }
    ++step_;

    if (check_collision()) {
      record(time(), false, std::nullopt);
      trace_.reason = StopReason::collision;
      return;
    }
    if (step_ >= steps_) {
      update_risk(time());
      record(time(), false, std::nullopt);
      trace_.reason = StopReason::completed;
    }
  }

  void run_to_end()
  {
    while (!done()) step();
  }

private:
  bool gate_active(const AgentRuntime & a, double t) const
  {
    return a.risk.triggered || t < a.gate_until - 1e-9;
  }

  /// Field at each HLM agent: the largest contribution of all other vehicles.
  void update_risk(double t)
  {
    for (std::size_t i = 0; i < agents_.size(); ++i) {
      auto & a = agents_[i];
      double ups = 0.0;
      for (std::size_t j = 0; j < agents_.size(); ++j) {
        if (j == i) continue;
        const auto & o = agents_[j];
        const double ttc = time_to_collision(
          a.state, a.spec.params.length, o.state, o.spec.params.length, config_.apf.ttc_max);
        ups = std::max(
          ups, field_value(
                 a.state.x, a.state.y, o.state, o.spec.params.length, o.spec.params.width,
                 o.kappa_est, ttc, config_.apf));
      }
      a.risk = check_trigger(ups, config_.apf, t, a.risk);
      if (a.spec.policy.type != PolicyType::hlm) continue;
      if (a.risk.triggered) a.gate_until = t + config_.gate_hold;
      if (gate_active(a, t)) {
        a.alpha = 0;
        a.commit_until = -1.0;
        const int occupied = config_.lanes.lane_of(a.state.y);
        if (a.ref_lane != a.origin_lane && occupied == a.origin_lane) a.ref_lane = a.origin_lane;
      }
    }
  }

  Participant participant(const AgentRuntime & a) const
  {
    Participant p;
    p.state = a.state;
    p.length = a.spec.params.length;
    p.width = a.spec.params.width;
    p.lane = a.spec.policy.type == PolicyType::hlm ? a.ref_lane : config_.lanes.lane_of(a.state.y);
    return p;
  }

  /// Nearest vehicle in an adjacent lane that is not already fully ahead.
  /// While a lane change is under way the target lane counts as well.
  std::optional<std::size_t> find_opponent(std::size_t i) const
  {
    const auto & me = agents_[i];
    const int lane = me.ref_lane;
    const bool moving = config_.lanes.lane_of(me.state.y) != lane;
    std::optional<std::size_t> best;
    double best_d = 0.0;
    for (std::size_t j = 0; j < agents_.size(); ++j) {
      if (j == i) continue;
      const auto & o = agents_[j];
      const int ol = participant(o).lane;
      if (std::abs(ol - lane) != 1 && !(moving && ol == lane)) continue;
      const double reach = 0.5 * (me.spec.params.length + o.spec.params.length);
      if (o.state.x >= me.state.x + reach) continue;
      const double d = std::abs(o.state.x - me.state.x);
      if (d > config_.game.sensor_range) continue;
      if (!best || d < best_d) {
        best = j;
        best_d = d;
      }
    }
    return best;
  }

  std::optional<DecisionDiagnostics> decide_for(std::size_t i, double t)
  {
    auto & a = agents_[i];
    if (a.spec.policy.type != PolicyType::hlm) return std::nullopt;
    const auto & pol = a.spec.policy;

    if (pol.mode == HlmMode::keep) {
      a.a_cmd = 0.0;
      a.alpha = 0;
      return std::nullopt;
    }
    if (pol.mode == HlmMode::command) {
      a.a_cmd = 0.0;
      if (!a.commanded && t >= pol.command_time - 1e-9 && !gate_active(a, t)) {
        a.commanded = true;
        a.origin_lane = a.ref_lane;
        a.alpha = std::clamp(a.ref_lane - pol.command_lane, -1, 1);
        a.ref_lane = pol.command_lane;
      } else if (a.commanded) {
        a.alpha = 0;
      }
      return std::nullopt;
    }
    if (t < a.commit_until - 1e-9) return std::nullopt;

    DecisionContext ctx;
    ctx.lanes = config_.lanes;
    ctx.game = config_.game;
    static_cast<Participant &>(ctx.hv) = participant(a);
    ctx.hv.kappa = Aggressiveness{pol.preset.kappa};
    ctx.hv.weights = pol.preset.weights;
    const auto opp = find_opponent(i);
    if (opp) {
      Player nv;
      static_cast<Participant &>(nv) = participant(agents_[*opp]);
      nv.kappa = agents_[*opp].kappa_est;
      nv.weights = pol.preset.weights;
      ctx.nv = nv;
    }
    for (std::size_t j = 0; j < agents_.size(); ++j) {
      if (j == i || (opp && j == *opp)) continue;
      ctx.traffic.push_back(participant(agents_[j]));
    }

    const bool gated = gate_active(a, t);
    const auto res = decide(ctx, gated);
    a.a_cmd = res.u_i_star.a_x;
    a.alpha = res.u_i_star.alpha;
    if (a.alpha != 0) {
      a.origin_lane = a.ref_lane;
      a.ref_lane = LaneGeometry::target_lane(a.ref_lane, a.alpha);
      a.commit_until = t + config_.commit_time;
    }

    if (!options_.debug_game) return std::nullopt;
    DecisionDiagnostics d;
    if (opp) d.opponent = agents_[*opp].spec.id;
    d.row = res.row;
    d.col = res.col;
    d.is_nash = res.is_nash;
    d.fallback_used = res.fallback_used;
    d.gated = res.gated;
    d.cost_i = res.table.costs.cost_i;
    d.cost_j = res.table.costs.cost_j;
    return d;
  }

  bool hv_signalling() const
  {
    const auto & h = agents_[hv_];
    return h.ref_lane != config_.lanes.lane_of(h.state.y);
  }

  void compute_controls(double t)
  {
    for (auto & a : agents_) {
      const auto & p = a.spec.params;
      switch (a.spec.policy.type) {
        case PolicyType::hlm: {
          ReferencePath ref;
          ref.center_y = config_.lanes.center(a.ref_lane);
          const auto out = a.driver->step(a.state, ref, config_.dt, p);
          a.delta = out.delta_f;
          const double target = std::clamp(a.a_cmd, p.a_min, p.a_max);
          a.a_applied = std::clamp(lag_step(a.accel_lag, target, config_.dt), p.a_min, p.a_max);
          a.accel_lag.current = a.a_applied;
          break;
        }
        case PolicyType::constant:
          a.a_applied = 0.0;
          a.delta = 0.0;
          break;
        case PolicyType::scripted:
          scripted_control(a, t);
          break;
        case PolicyType::external:
          a.a_applied = std::clamp(external_accel_, p.a_min, p.a_max);
          a.delta = std::clamp(external_steer_, -p.delta_max, p.delta_max);
          break;
      }
    }
  }

  void scripted_control(AgentRuntime & a, double t) const
  {
    const auto & pol = a.spec.policy;
    const auto & p = a.spec.params;
    double acc = 0.0;
    double steer = 0.0;
    switch (pol.profile) {
      case ScriptProfile::constant:
        break;
      case ScriptProfile::aggressive:
        if (hv_signalling() && a.state.v_x < pol.v_max) {
          acc = std::min(pol.profile_accel, (pol.v_max - a.state.v_x) / config_.dt);
        }
        break;
      case ScriptProfile::yielding:
        if (hv_signalling()) acc = -pol.profile_accel;
        break;
      case ScriptProfile::piecewise:
        for (const auto & k : pol.knots) {
          if (t >= k.t - 1e-9) {
            acc = k.a_x;
            steer = k.steer;
          }
        }
        break;
    }
    a.a_applied = std::clamp(acc, p.a_min, p.a_max);
    a.delta = std::clamp(steer, -p.delta_max, p.delta_max);
  }

  void record(double t, bool decision_tick, std::optional<DecisionDiagnostics> diag)
  {
    TraceRecord r;
    r.t = t;
    r.decision_tick = decision_tick;
    r.vehicles.reserve(agents_.size());
    for (const auto & a : agents_) {
      r.vehicles.push_back(
        {a.state.x, a.state.y, a.state.yaw, a.state.v_x, a.delta, a.a_applied, a.kappa_est.value()});
    }
    const auto & h = agents_[hv_];
    r.alpha = h.alpha;
    r.a_star = h.spec.policy.type == PolicyType::hlm ? h.a_cmd : h.a_applied;
    r.hv_ref_lane = h.ref_lane;
    r.hv_ref_y = config_.lanes.center(h.ref_lane);
    r.upsilon = h.risk.upsilon;
    r.triggered = h.risk.triggered;
    r.diagnostics = std::move(diag);
    trace_.records.push_back(std::move(r));
  }

  bool check_collision()
  {
    for (std::size_t i = 0; i < agents_.size(); ++i) {
      for (std::size_t j = i + 1; j < agents_.size(); ++j) {
        const auto & a = agents_[i];
        const auto & b = agents_[j];
        const Box ba{a.state.x, a.state.y, a.state.yaw, a.spec.params.length, a.spec.params.width};
        const Box bb{b.state.x, b.state.y, b.state.yaw, b.spec.params.length, b.spec.params.width};
        if (boxes_overlap(ba, bb)) {
          trace_.collision_with = a.spec.id + "/" + b.spec.id;
          return true;
        }
      }
    }
    return false;
  }

  ScenarioConfig config_;
  SimOptions options_;
  FuzzyEstimator estimator_;
  std::vector<AgentRuntime> agents_;
  Trace trace_;
  std::size_t hv_ = 0;
  std::size_t stride_ = 1;
  std::size_t steps_ = 0;
  std::size_t step_ = 0;
  double external_steer_ = 0.0;
  double external_accel_ = 0.0;
};

inline Trace run(const ScenarioConfig & config, SimOptions options = {})
{
  Simulation sim(config, options);
  sim.run_to_end();
  return sim.take_trace();
}

}  // namespace lanegame

#endif  // LANEGAME__SIMULATION_HPP_
