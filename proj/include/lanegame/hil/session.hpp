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

#ifndef LANEGAME__HIL__SESSION_HPP_
#define LANEGAME__HIL__SESSION_HPP_

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <iostream>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <variant>

#include "lanegame/hil/protocol.hpp"
#include "lanegame/scenario.hpp"
#include "lanegame/simulation.hpp"
#include "lanegame/trace_io.hpp"

namespace lanegame::hil
{

using Logger = std::function<void(const std::string &)>;

inline void stderr_logger(const std::string & line) { std::cerr << "[session] " << line << "\n"; }

enum class HandleResult { ignored, control, command };

struct SessionOptions
{
  double broadcast_rate = 20.0;  // [Hz]
  std::string trace_path;        // empty: keep the trace in memory only
  TraceFormat trace_format = TraceFormat::csv;
};

/// Transport-free session logic: owns the simulation, the latest human
/// input and the run/pause state. The server only moves bytes.
class SessionEngine
{
public:
  explicit SessionEngine(ScenarioConfig config, SessionOptions options = {}, Logger log = stderr_logger)
  : config_(std::move(config)), options_(std::move(options)), log_(std::move(log))
  {
    const auto n = std::count_if(config_.vehicles.begin(), config_.vehicles.end(), [](const AgentSpec & a) {
      return a.policy.type == PolicyType::external;
    });
    if (n != 1) throw ConfigError("session: scenario needs exactly one external vehicle");
    if (!(options_.broadcast_rate > 0.0)) throw ConfigError("session: broadcast_rate must be > 0");
    for (std::size_t k = 0; k < config_.vehicles.size(); ++k) {
      if (config_.vehicles[k].policy.type == PolicyType::external) external_ = k;
    }
    stride_ = std::max<std::size_t>(
      1, static_cast<std::size_t>(std::llround(1.0 / (options_.broadcast_rate * config_.dt))));
    reset();
  }

  const ScenarioConfig & config() const { return config_; }
  bool running() const { return running_; }
  bool done() const { return sim_->done(); }
  double time() const { return sim_->time(); }
  const Trace & trace() const { return sim_->trace(); }
  const ControlMessage & control() const { return control_; }
  const std::optional<std::string> & persisted_path() const { return persisted_; }
  std::size_t broadcast_stride() const { return stride_; }

  void start()
  {
    if (!done()) running_ = true;
  }
  void pause() { running_ = false; }

  void reset()
  {
    sim_ = std::make_unique<Simulation>(config_);
    running_ = false;
    control_ = {};
    persisted_.reset();
  }

  /// Store the latest input, clamped to the external vehicle's limits.
  void set_control(const ControlMessage & c)
  {
    const auto & p = config_.vehicles[external_].params;
    control_.steer = std::clamp(c.steer, -p.delta_max, p.delta_max);
    control_.accel = std::clamp(c.accel, p.a_min, p.a_max);
  }

  /// A lost controller pauses the run; the last input is kept.
  void client_disconnected()
  {
    if (running_) log_("controller disconnected, pausing");
    pause();
  }

  /// Apply one client frame. Malformed frames are logged and dropped.
  /// Spectators may not steer or drive the session.
  HandleResult handle_text(std::string_view text, bool controller = true)
  {
    Message m;
    try {
      m = decode(text);
    } catch (const std::exception & e) {
      log_(std::string("ignored message: ") + e.what());
      return HandleResult::ignored;
    }
    if (!controller) {
      log_("ignored message from spectator");
      return HandleResult::ignored;
    }
    if (const auto * c = std::get_if<ControlMessage>(&m)) {
      set_control(*c);
      return HandleResult::control;
    }
    if (const auto * c = std::get_if<CommandMessage>(&m)) {
      switch (c->command) {
        case SessionCommand::start: start(); break;
        case SessionCommand::pause: pause(); break;
        case SessionCommand::reset: reset(); break;
      }
      return HandleResult::command;
    }
    log_("ignored server-only message type from client");
    return HandleResult::ignored;
  }

  /// Advance one dt if running. Returns a state message on broadcast ticks
  /// and always on the final step.
  std::optional<StateMessage> tick()
  {
    if (!running_ || done()) return std::nullopt;
    sim_->set_external_control(control_.steer, control_.accel);
    sim_->step();
    if (done()) {
      running_ = false;
      persist();
      return state_message();
    }
    if (sim_->step_index() % stride_ == 0) return state_message();
    return std::nullopt;
  }

  ConfigMessage config_message() const
  {
    ConfigMessage m;
    m.scenario = config_.name;
    m.lane_centers = config_.lanes.centers;
    m.lane_width = config_.lanes.width;
    m.dt = config_.dt;
    for (const auto & a : config_.vehicles) {
      const char * role = a.hv ? "hv" : (a.policy.type == PolicyType::external ? "external" : "traffic");
      m.vehicles.push_back({a.id, role, a.params.length, a.params.width});
    }
    return m;
  }

  /// Latest recorded sample, or the initial state before the first step.
  StateMessage state_message() const
  {
    StateMessage m;
    const auto & tr = sim_->trace();
    if (tr.records.empty()) {
      for (const auto & a : sim_->agents()) {
        m.vehicles.push_back({a.spec.id, a.state.x, a.state.y, a.state.yaw, a.state.v_x, a.kappa_est.value()});
      }
    } else {
      const auto & r = tr.records.back();
      m.t = r.t;
      for (std::size_t k = 0; k < r.vehicles.size(); ++k) {
        const auto & v = r.vehicles[k];
        m.vehicles.push_back({tr.ids[k], v.x, v.y, v.yaw, v.v_x, v.kappa});
      }
      m.decision = {r.alpha, r.a_star};
      m.upsilon = r.upsilon;
      m.triggered = r.triggered;
    }
    m.done = done();
    m.reason = to_string(tr.reason);
    return m;
  }

private:
  void persist()
  {
    if (options_.trace_path.empty()) return;
    try {
      export_trace(sim_->trace(), options_.trace_path, options_.trace_format);
      persisted_ = options_.trace_path;
      log_("trace written to " + options_.trace_path);
    } catch (const std::exception & e) {
      log_(std::string("could not write trace: ") + e.what());
    }
  }

  ScenarioConfig config_;
  SessionOptions options_;
  Logger log_;
  std::unique_ptr<Simulation> sim_;
  std::size_t external_ = 0;
  std::size_t stride_ = 5;
  bool running_ = false;
  ControlMessage control_;
  std::optional<std::string> persisted_;
};

}  // namespace lanegame::hil

#endif  // LANEGAME__HIL__SESSION_HPP_
