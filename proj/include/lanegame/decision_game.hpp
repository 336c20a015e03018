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

#ifndef LANEGAME__DECISION_GAME_HPP_
#define LANEGAME__DECISION_GAME_HPP_

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "lanegame/aggressiveness.hpp"
#include "lanegame/kinematics.hpp"
#include "lanegame/nash.hpp"
#include "lanegame/risk_apf.hpp"

namespace lanegame
{

/// Safety/efficiency weights of one player.
struct CostWeights
{
  double k_s_log = 10.0;
  double k_s_lat = 80.0;
  double k_e = 8.0;
  double omega_v_log = 3.0;
  double omega_s_log = 8.0;
  double omega_v_lat = 3.0;
  double omega_s_lat = 8.0;
  double vartheta = 0.02;  // efficiency normalisation
  double v_x_max = 16.67;  // [m/s]
  double epsilon = 0.1;    // [m^2]

  void validate() const
  {
    const bool ok = k_s_log >= 0 && k_s_lat >= 0 && k_e >= 0 && omega_v_log >= 0 &&
                    omega_s_log >= 0 && omega_v_lat >= 0 && omega_s_lat >= 0 && vartheta >= 0;
    if (!ok) throw std::invalid_argument("cost weights must be non-negative");
    if (!(v_x_max > 0.0)) throw std::invalid_argument("cost weights: v_x_max must be > 0");
    if (!(epsilon > 0.0)) throw std::invalid_argument("cost weights: epsilon must be > 0");
  }

  bool operator==(const CostWeights &) const = default;
};

/// alpha: -1 left (towards +Y), 0 keep, +1 right.
struct Action
{
  int alpha = 0;
  double a_x = 0.0;
  bool operator==(const Action &) const = default;
};

/// Parallel straight lanes; index 0 is the lowest centreline Y.
struct LaneGeometry
{
  std::vector<double> centers{-3.0, 1.0};
  double width = 4.0;

  int count() const { return static_cast<int>(centers.size()); }
  bool valid(int lane) const { return lane >= 0 && lane < count(); }
  double center(int lane) const { return centers.at(static_cast<std::size_t>(lane)); }

  int lane_of(double y) const
  {
    int best = 0;
    for (int k = 1; k < count(); ++k) {
      if (std::abs(y - center(k)) < std::abs(y - center(best))) best = k;
    }
    return best;
  }

  /// Left is +Y, so a left change (alpha = -1) moves one index up.
  static int target_lane(int lane, int alpha) { return lane - alpha; }

  double boundary(int a, int b) const { return 0.5 * (center(a) + center(b)); }

  double road_min() const { return *std::min_element(centers.begin(), centers.end()) - width / 2; }
  double road_max() const { return *std::max_element(centers.begin(), centers.end()) + width / 2; }

  void validate() const
  {
    if (centers.empty()) throw std::invalid_argument("lanes: at least one lane required");
    if (!(width > 0.0)) throw std::invalid_argument("lanes: width must be > 0");
    for (std::size_t k = 1; k < centers.size(); ++k) {
      if (!(centers[k] > centers[k - 1])) {
        throw std::invalid_argument("lanes: centers must be strictly increasing");
      }
    }
  }

  bool operator==(const LaneGeometry &) const = default;
};

struct GameConfig
{
  std::vector<double> accel_grid{-4.0, -2.0, -1.0, 0.0, 1.0, 2.0};
  double horizon = 3.0;           // [s]
  double lane_change_time = 4.0;  // quintic transition duration [s]
  double sample_dt = 0.1;         // rollout resolution [s]
  double sensor_range = 200.0;    // virtual leader distance [m]
  double infeasible_penalty = 1e6;
  double min_gap = 1.0;  // bumper clearance below which a rollout counts as a collision [m]

  std::vector<Action> actions() const
  {
    std::vector<Action> out;
    for (int alpha : {-1, 0, 1}) {
      for (double a : accel_grid) out.push_back({alpha, a});
    }
    return out;
  }

  void validate() const
  {
    if (accel_grid.empty()) throw std::invalid_argument("game: accel_grid must not be empty");
    if (!(horizon > 0.0)) throw std::invalid_argument("game: horizon must be > 0");
    if (!(lane_change_time > 0.0)) throw std::invalid_argument("game: lane_change_time must be > 0");
    if (!(sample_dt > 0.0)) throw std::invalid_argument("game: sample_dt must be > 0");
    if (!(sensor_range > 0.0)) throw std::invalid_argument("game: sensor_range must be > 0");
    if (!(infeasible_penalty > 0.0)) throw std::invalid_argument("game: infeasible_penalty must be > 0");
    if (!(min_gap >= 0.0)) throw std::invalid_argument("game: min_gap must be >= 0");
  }

  bool operator==(const GameConfig &) const = default;
};

/// Lateral quintic from (y0, y0_dot, 0) to (y1, 0, 0) over duration T.
struct QuinticLateral
{
  double c0 = 0, c1 = 0, c3 = 0, c4 = 0, c5 = 0, T = 1, y_end = 0;

  QuinticLateral(double y0, double y0_dot, double y1, double duration)
  : c0(y0), c1(y0_dot), T(duration), y_end(y1)
  {
    const double d = y1 - y0;
    const double t2 = T * T;
    c3 = (20.0 * d - 12.0 * y0_dot * T) / (2.0 * t2 * T);
    c4 = (-30.0 * d + 16.0 * y0_dot * T) / (2.0 * t2 * t2);
    c5 = (12.0 * d - 6.0 * y0_dot * T) / (2.0 * t2 * t2 * T);
  }

  double y(double t) const
  {
    if (t >= T) return y_end;
    return c0 + t * (c1 + t * t * (c3 + t * (c4 + t * c5)));
  }

  double y_dot(double t) const
  {
    if (t >= T) return 0.0;
    return c1 + t * t * (3.0 * c3 + t * (4.0 * c4 + t * 5.0 * c5));
  }
};

/// Forward prediction of a vehicle under a constant candidate action:
/// constant a_x along the road, quintic lateral move to target_y.
/// Samples are at k * sample_dt for k = 0..round(horizon / sample_dt).
inline std::vector<VehicleState> predict_rollout(
  const VehicleState & s, double a_x, double target_y, double horizon, double lane_change_time,
  double sample_dt)
{
  if (!(horizon > 0.0)) throw std::invalid_argument("predict_rollout: horizon must be > 0");
  const auto n = static_cast<std::size_t>(std::llround(horizon / sample_dt));
  const double v0 = std::max(s.v_x, 0.0);
  const double v_lat0 = v0 * std::sin(s.yaw);
  const double v_lon0 = v0 * std::cos(s.yaw);
  const QuinticLateral lat(s.y, v_lat0, target_y, lane_change_time);
  const double t_stop = a_x < 0.0 ? v_lon0 / -a_x : std::numeric_limits<double>::infinity();

  std::vector<VehicleState> out;
  out.reserve(n + 1);
  for (std::size_t k = 0; k <= n; ++k) {
    const double t = static_cast<double>(k) * sample_dt;
    const double tm = std::min(t, t_stop);
    VehicleState p;
    p.v_x = std::max(v_lon0 + a_x * tm, 0.0);
    p.x = s.x + v_lon0 * tm + 0.5 * a_x * tm * tm;
    p.y = lat.y(t);
    p.yaw = std::atan2(lat.y_dot(t), std::max(p.v_x, 1e-6));
    out.push_back(p);
  }
  return out;
}

inline std::vector<VehicleState> predict_rollout(
  const VehicleState & s, const Action & action, double target_y, const GameConfig & g)
{
  return predict_rollout(s, action.a_x, target_y, g.horizon, g.lane_change_time, g.sample_dt);
}

/// Breakdown of one player's cost at a predicted state.
struct StageCost
{
  double safety_log = 0.0;  // Gamma_s-log
  double safety_lat = 0.0;  // Gamma_s-lat
  double safety = 0.0;      // Gamma_s
  double efficiency = 0.0;  // Gamma_e
  double total = 0.0;       // Gamma
};

struct StageInputs
{
  VehicleState self;
  int alpha = 0;
  std::optional<VehicleState> leader;    // LV in the lane the action leads to
  std::optional<VehicleState> conflict;  // NV for a lane change
  bool conflict_ahead = false;           // conflict is a leader in the target lane
};

/// Safety/efficiency trade-off of one player for one candidate action.
/// A missing leader (or, for a lane change, a missing conflict vehicle) is
/// replaced by a virtual one at sensor range with no speed penalty.
inline StageCost stage_cost(
  const StageInputs & in, const CostWeights & w, Aggressiveness kappa, double sensor_range = 200.0)
{
  StageCost c;
  const double a2 = static_cast<double>(in.alpha * in.alpha);

  double dv_log = 0.0;
  double ds_log = sensor_range;
  if (in.leader) {
    dv_log = in.leader->v_x - in.self.v_x;
    ds_log = std::hypot(in.leader->x - in.self.x, in.leader->y - in.self.y);
  }
  const double zeta_log = dv_log < 0.0 ? 1.0 : 0.0;
  c.safety_log =
    w.omega_v_log * zeta_log * dv_log * dv_log + w.omega_s_log / (ds_log * ds_log + w.epsilon);

  if (in.conflict) {
    // A leader is a hazard when slower, a follower when faster.
    const double dv_lat =
      in.conflict_ahead ? in.conflict->v_x - in.self.v_x : in.self.v_x - in.conflict->v_x;
    const double ds_lat = std::hypot(in.conflict->x - in.self.x, in.conflict->y - in.self.y);
    const double zeta_lat = dv_lat < 0.0 ? 1.0 : 0.0;
    c.safety_lat =
      w.omega_v_lat * zeta_lat * dv_lat * dv_lat + w.omega_s_lat / (ds_lat * ds_lat + w.epsilon);
  } else if (in.alpha != 0) {
    c.safety_lat = w.omega_s_lat / (sensor_range * sensor_range + w.epsilon);
  }

  c.safety = w.k_s_log * (1.0 - a2) * c.safety_log + w.k_s_lat * a2 * c.safety_lat;
  const double dv_e = in.self.v_x - w.v_x_max;
  c.efficiency = w.k_e * dv_e * dv_e;
  const double k = kappa.value();
  c.total = (1.0 - k) * c.safety + k * w.vartheta * c.efficiency;
  return c;
}

/// A vehicle as seen by the decision maker.
struct Participant
{
  VehicleState state;
  double length = 4.5;
  double width = 1.8;
  int lane = 0;  // lane the vehicle is travelling in (or heading to)
};

/// A game player: a participant with its own cost model.
struct Player : Participant
{
  Aggressiveness kappa{0.5};
  CostWeights weights;
};

struct DecisionContext
{
  Player hv;
  std::optional<Player> nv;             // opponent; empty for a single-player decision
  std::vector<Participant> traffic;     // everyone else, predicted at constant velocity
  LaneGeometry lanes;
  GameConfig game;
};

struct GameTable
{
  std::vector<Action> hv_actions;
  std::vector<Action> nv_actions;  // empty without an opponent
  CostTable costs;
};

struct EquilibriumResult
{
  Action u_i_star;
  std::optional<Action> u_j_star;
  bool is_nash = false;
  bool fallback_used = false;
  bool gated = false;  // lane change suppressed by the risk gate
  std::size_t row = 0;
  std::size_t col = 0;
  GameTable table;
};

namespace detail
{
struct Rolled
{
  std::vector<VehicleState> path;
  int lane = 0;
  bool feasible = true;
};

inline Rolled roll(const Participant & p, const Action & a, const LaneGeometry & lanes, const GameConfig & g)
{
  Rolled r;
  r.lane = LaneGeometry::target_lane(p.lane, a.alpha);
  if (!lanes.valid(r.lane)) {
    r.feasible = false;
    r.lane = p.lane;
  }
  r.path = predict_rollout(p.state, a, lanes.center(r.lane), g);
  return r;
}

inline std::vector<VehicleState> constant_velocity(const VehicleState & s, const GameConfig & g)
{
  const auto n = static_cast<std::size_t>(std::llround(g.horizon / g.sample_dt));
  std::vector<VehicleState> out;
  out.reserve(n + 1);
  for (std::size_t k = 0; k <= n; ++k) {
    const double t = static_cast<double>(k) * g.sample_dt;
    VehicleState p = s;
    p.x += s.v_x * std::cos(s.yaw) * t;
    p.y += s.v_x * std::sin(s.yaw) * t;
    out.push_back(p);
  }
  return out;
}

/// Mean intrusion into the clearance box over the horizon, in box lengths.
/// The gap is signed by the ordering at decision time, so running through
/// the other car counts deeper than stopping short of it. 0 when the paths
/// never come too close.
inline double conflict_depth(
  const std::vector<VehicleState> & a, const Participant & pa, const std::vector<VehicleState> & b,
  const Participant & pb, double min_gap)
{
  const double lat = 0.5 * (pa.width + pb.width);
  const double lon = 0.5 * (pa.length + pb.length) + min_gap;
  const std::size_t n = std::min(a.size(), b.size());
  if (n < 2) return 0.0;
  const double side = b[0].x >= a[0].x ? 1.0 : -1.0;
  double sum = 0.0;
  for (std::size_t k = 1; k < n; ++k) {
    const double gap = side * (b[k].x - a[k].x);
    if (std::abs(a[k].y - b[k].y) < lat && gap < lon) sum += (lon - gap) / lon;
  }
  return sum / static_cast<double>(n - 1);
}

inline bool paths_conflict(
  const std::vector<VehicleState> & a, const Participant & pa, const std::vector<VehicleState> & b,
  const Participant & pb, double min_gap)
{
  return conflict_depth(a, pa, b, pb, min_gap) > 0.0;
}

struct Predicted
{
  const Participant * who = nullptr;
  const std::vector<VehicleState> * path = nullptr;
};

/// Nearest vehicle ahead in `lane` at decision time.
inline std::optional<std::size_t> leader_index(
  const VehicleState & self, int lane, const std::vector<Predicted> & others)
{
  std::optional<std::size_t> best;
  for (std::size_t k = 0; k < others.size(); ++k) {
    const auto & o = *others[k].who;
    if (o.lane != lane || o.state.x <= self.x) continue;
    if (!best || o.state.x < others[*best].who->state.x) best = k;
  }
  return best;
}

inline std::vector<ActionPreference> preferences(const std::vector<Action> & actions)
{
  std::vector<ActionPreference> p;
  p.reserve(actions.size());
  for (const auto & a : actions) {
    p.push_back({static_cast<double>(std::abs(a.alpha)), std::abs(a.a_x)});
  }
  return p;
}

/// Cost of one player; `opponent` is the other player's rollout if any.
/// Roles are fixed from the positions at decision time, costs are taken
/// at the end of the horizon. A lane change must also clear the opponent
/// holding its current speed (`opponent_cv`), not only its rollout.
inline double player_cost(
  const Player & self, const Action & a, const Rolled & mine, const Predicted * opponent,
  const Rolled * opponent_roll, const std::vector<Predicted> & traffic, const GameConfig & g,
  const std::vector<VehicleState> * opponent_cv = nullptr)
{
  std::vector<Predicted> others = traffic;
  if (opponent) others.push_back(*opponent);
  // Leaving the road is worse than any conflict.
  if (!mine.feasible) return 2.0 * g.infeasible_penalty;
  // Graded so that, with no safe action left, the shallowest intrusion
  // (usually the hardest braking) is still preferred.
  double depth = 0.0;
  for (const auto & o : others) {
    depth = std::max(depth, conflict_depth(mine.path, self, *o.path, *o.who, g.min_gap));
  }
  if (a.alpha != 0 && opponent && opponent_cv) {
    depth = std::max(depth, conflict_depth(mine.path, self, *opponent_cv, *opponent->who, g.min_gap));
  }
  if (depth > 0.0) return g.infeasible_penalty * (1.0 + depth);

  StageInputs in;
  in.self = mine.path.back();
  in.alpha = a.alpha;
  // Leader of the lane the action leads to; the opponent counts with the
  // lane it ends up in.
  std::vector<Predicted> lane_view;
  std::vector<Participant> moved;
  moved.reserve(others.size());
  for (const auto & o : others) {
    Participant q = *o.who;
    if (opponent && o.who == opponent->who && opponent_roll) q.lane = opponent_roll->lane;
    moved.push_back(q);
  }
  for (std::size_t k = 0; k < others.size(); ++k) lane_view.push_back({&moved[k], others[k].path});
  if (const auto lv = leader_index(self.state, mine.lane, lane_view)) {
    in.leader = lane_view[*lv].path->back();
  }
  // Without an opponent the merge is judged against the target-lane leader.
  if (a.alpha != 0) {
    in.conflict = opponent ? std::optional(opponent->path->back()) : in.leader;
    in.conflict_ahead = !opponent && in.leader;
  }
  return stage_cost(in, self.weights, self.kappa, g.sensor_range).total;
}
}  // namespace detail

/// Both players' costs over the joint action grid.
inline GameTable build_cost_table(const DecisionContext & ctx)
{
  const auto & g = ctx.game;
  GameTable t;
  t.hv_actions = g.actions();
  if (ctx.nv) t.nv_actions = g.actions();

  std::vector<std::vector<VehicleState>> traffic_paths;
  traffic_paths.reserve(ctx.traffic.size());
  for (const auto & p : ctx.traffic) traffic_paths.push_back(detail::constant_velocity(p.state, g));
  std::vector<detail::Predicted> traffic;
  for (std::size_t k = 0; k < ctx.traffic.size(); ++k) {
    traffic.push_back({&ctx.traffic[k], &traffic_paths[k]});
  }

  std::vector<detail::Rolled> hv_roll;
  for (const auto & a : t.hv_actions) hv_roll.push_back(detail::roll(ctx.hv, a, ctx.lanes, g));

  if (!ctx.nv) {
    t.costs = CostTable(t.hv_actions.size(), 1);
    for (std::size_t r = 0; r < t.hv_actions.size(); ++r) {
      t.costs.gi(r, 0) =
        detail::player_cost(ctx.hv, t.hv_actions[r], hv_roll[r], nullptr, nullptr, traffic, g);
    }
    return t;
  }

  std::vector<detail::Rolled> nv_roll;
  for (const auto & a : t.nv_actions) nv_roll.push_back(detail::roll(*ctx.nv, a, ctx.lanes, g));
  const auto hv_cv = detail::constant_velocity(ctx.hv.state, g);
  const auto nv_cv = detail::constant_velocity(ctx.nv->state, g);

  t.costs = CostTable(t.hv_actions.size(), t.nv_actions.size());
  for (std::size_t r = 0; r < t.hv_actions.size(); ++r) {
    for (std::size_t c = 0; c < t.nv_actions.size(); ++c) {
      const detail::Predicted as_nv{&*ctx.nv, &nv_roll[c].path};
      const detail::Predicted as_hv{&ctx.hv, &hv_roll[r].path};
      t.costs.gi(r, c) =
        detail::player_cost(ctx.hv, t.hv_actions[r], hv_roll[r], &as_nv, &nv_roll[c], traffic, g, &nv_cv);
      t.costs.gj(r, c) =
        detail::player_cost(*ctx.nv, t.nv_actions[c], nv_roll[c], &as_hv, &hv_roll[r], traffic, g, &hv_cv);
    }
  }
  return t;
}

/// Solve the lane-change game for the HV. With the risk gate raised only
/// lane keeping is admissible for the HV and the game is re-solved on
/// that restricted set.
inline EquilibriumResult decide(const DecisionContext & ctx, bool risk_triggered)
{
  EquilibriumResult res;
  res.table = build_cost_table(ctx);
  const auto & t = res.table;

  std::vector<std::size_t> rows;
  for (std::size_t r = 0; r < t.hv_actions.size(); ++r) {
    if (!risk_triggered || t.hv_actions[r].alpha == 0) rows.push_back(r);
  }
  res.gated = risk_triggered;

  CostTable sub(rows.size(), t.costs.cols);
  std::vector<Action> sub_actions;
  for (std::size_t k = 0; k < rows.size(); ++k) {
    sub_actions.push_back(t.hv_actions[rows[k]]);
    for (std::size_t c = 0; c < t.costs.cols; ++c) {
      sub.gi(k, c) = t.costs.gi(rows[k], c);
      sub.gj(k, c) = t.costs.gj(rows[k], c);
    }
  }
  const auto col_prefs = ctx.nv ? detail::preferences(t.nv_actions)
                                : std::vector<ActionPreference>(1);
  const auto sol = nash_solve(sub, detail::preferences(sub_actions), col_prefs);
  res.row = rows[sol.row];
  res.col = sol.col;
  res.u_i_star = t.hv_actions[res.row];
  if (ctx.nv) res.u_j_star = t.nv_actions[res.col];
  res.is_nash = sol.is_nash;
  res.fallback_used = sol.fallback_used;
  return res;
}

}  // namespace lanegame

#endif  // LANEGAME__DECISION_GAME_HPP_
