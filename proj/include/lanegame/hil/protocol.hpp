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

#ifndef LANEGAME__HIL__PROTOCOL_HPP_
#define LANEGAME__HIL__PROTOCOL_HPP_

#include <cmath>
#include <stdexcept>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include <json.hpp>

namespace lanegame::hil
{

class ProtocolError : public std::runtime_error
{
public:
  using std::runtime_error::runtime_error;
};

struct VehicleView
{
  std::string id;
  double x = 0.0;
  double y = 0.0;
  double yaw = 0.0;
  double v_x = 0.0;
  double kappa = 0.0;
  bool operator==(const VehicleView &) const = default;
};

struct DecisionView
{
  int alpha = 0;
  double a_x = 0.0;
  bool operator==(const DecisionView &) const = default;
};

struct StateMessage
{
  double t = 0.0;
  std::vector<VehicleView> vehicles;
  DecisionView decision;
  double upsilon = 0.0;
  bool triggered = false;
  bool done = false;
  std::string reason = "running";
  bool operator==(const StateMessage &) const = default;
};

struct VehicleInfo
{
  std::string id;
  std::string role;  // hv, traffic or external
  double length = 4.5;
  double width = 1.8;
  bool operator==(const VehicleInfo &) const = default;
};

struct ConfigMessage
{
  std::string scenario;
  std::vector<double> lane_centers;
  double lane_width = 4.0;
  std::vector<VehicleInfo> vehicles;
  double dt = 0.01;
  bool operator==(const ConfigMessage &) const = default;
};

struct ControlMessage
{
  double steer = 0.0;  // [rad]
  double accel = 0.0;  // [m/s^2]
  bool operator==(const ControlMessage &) const = default;
};

enum class SessionCommand { start, pause, reset };

struct CommandMessage
{
  SessionCommand command = SessionCommand::start;
  bool operator==(const CommandMessage &) const = default;
};

using Message = std::variant<StateMessage, ConfigMessage, ControlMessage, CommandMessage>;

inline const char * to_string(SessionCommand c)
{
  switch (c) {
    case SessionCommand::start: return "start";
    case SessionCommand::pause: return "pause";
    case SessionCommand::reset: return "reset";
  }
  return "?";
}

namespace detail
{

using json = nlohmann::json;

inline double finite(double v, const char * field)
{
  if (!std::isfinite(v)) throw ProtocolError(std::string("non-finite value in '") + field + "'");
  return v;
}

inline const json & field(const json & j, const char * key)
{
  const auto it = j.find(key);
  if (it == j.end()) throw ProtocolError(std::string("missing field '") + key + "'");
  return *it;
}

inline double get_number(const json & j, const char * key)
{
  const auto & v = field(j, key);
  if (!v.is_number()) throw ProtocolError(std::string("field '") + key + "' must be a number");
  return finite(v.get<double>(), key);
}

inline int get_int(const json & j, const char * key)
{
  const auto & v = field(j, key);
  if (!v.is_number_integer()) throw ProtocolError(std::string("field '") + key + "' must be an integer");
  return v.get<int>();
}

inline bool get_bool(const json & j, const char * key)
{
  const auto & v = field(j, key);
  if (!v.is_boolean()) throw ProtocolError(std::string("field '") + key + "' must be a boolean");
  return v.get<bool>();
}

inline std::string get_string(const json & j, const char * key)
{
  const auto & v = field(j, key);
  if (!v.is_string()) throw ProtocolError(std::string("field '") + key + "' must be a string");
  return v.get<std::string>();
}

inline const json & get_array(const json & j, const char * key)
{
  const auto & v = field(j, key);
  if (!v.is_array()) throw ProtocolError(std::string("field '") + key + "' must be an array");
  return v;
}

inline const json & get_object(const json & j, const char * key)
{
  const auto & v = field(j, key);
  if (!v.is_object()) throw ProtocolError(std::string("field '") + key + "' must be an object");
  return v;
}

inline json to_json(const StateMessage & m)
{
  json vs = json::array();
  for (const auto & v : m.vehicles) {
    vs.push_back({{"id", v.id}, {"x", finite(v.x, "x")}, {"y", finite(v.y, "y")},
                  {"yaw", finite(v.yaw, "yaw")}, {"v_x", finite(v.v_x, "v_x")},
                  {"kappa", finite(v.kappa, "kappa")}});
  }
  return {{"type", "state"},
          {"t", finite(m.t, "t")},
          {"vehicles", std::move(vs)},
          {"decision", {{"alpha", m.decision.alpha}, {"a_x", finite(m.decision.a_x, "a_x")}}},
          {"upsilon", finite(m.upsilon, "upsilon")},
          {"triggered", m.triggered},
          {"done", m.done},
          {"reason", m.reason}};
}

inline json to_json(const ConfigMessage & m)
{
  json centers = json::array();
  for (double c : m.lane_centers) centers.push_back(finite(c, "centers"));
  json vs = json::array();
  for (const auto & v : m.vehicles) {
    vs.push_back({{"id", v.id}, {"role", v.role}, {"length", finite(v.length, "length")},
                  {"width", finite(v.width, "width")}});
  }
  return {{"type", "config"},
          {"scenario", m.scenario},
          {"lanes", {{"centers", std::move(centers)}, {"width", finite(m.lane_width, "width")}}},
          {"vehicles", std::move(vs)},
          {"dt", finite(m.dt, "dt")}};
}

inline json to_json(const ControlMessage & m)
{
  return {{"type", "control"}, {"steer", finite(m.steer, "steer")}, {"accel", finite(m.accel, "accel")}};
}

inline json to_json(const CommandMessage & m) { return {{"type", to_string(m.command)}}; }

inline StateMessage state_from_json(const json & j)
{
  StateMessage m;
  m.t = get_number(j, "t");
  for (const auto & v : get_array(j, "vehicles")) {
    if (!v.is_object()) throw ProtocolError("vehicles entries must be objects");
    m.vehicles.push_back({get_string(v, "id"), get_number(v, "x"), get_number(v, "y"),
                          get_number(v, "yaw"), get_number(v, "v_x"), get_number(v, "kappa")});
  }
  const auto & d = get_object(j, "decision");
  m.decision.alpha = get_int(d, "alpha");
  m.decision.a_x = get_number(d, "a_x");
  m.upsilon = get_number(j, "upsilon");
  m.triggered = get_bool(j, "triggered");
  m.done = get_bool(j, "done");
  m.reason = get_string(j, "reason");
  return m;
}

inline ConfigMessage config_from_json(const json & j)
{
  ConfigMessage m;
  if (j.contains("scenario")) m.scenario = get_string(j, "scenario");
  const auto & lanes = get_object(j, "lanes");
  for (const auto & c : get_array(lanes, "centers")) {
    if (!c.is_number()) throw ProtocolError("lane centers must be numbers");
    m.lane_centers.push_back(finite(c.get<double>(), "centers"));
  }
  m.lane_width = get_number(lanes, "width");
  for (const auto & v : get_array(j, "vehicles")) {
    if (!v.is_object()) throw ProtocolError("vehicles entries must be objects");
    m.vehicles.push_back(
      {get_string(v, "id"), get_string(v, "role"), get_number(v, "length"), get_number(v, "width")});
  }
  m.dt = get_number(j, "dt");
  return m;
}

}  // namespace detail

/// One message as a single line of JSON (newline terminated).
inline std::string encode(const Message & m)
{
  const auto j = std::visit([](const auto & v) { return detail::to_json(v); }, m);
  return j.dump() + "\n";
}

/// Unknown fields are ignored; wrong types, missing fields and non-finite
/// numbers are rejected with ProtocolError.
inline Message decode(std::string_view text)
{
  const auto j = nlohmann::json::parse(text.begin(), text.end(), nullptr, false);
  if (j.is_discarded()) throw ProtocolError("malformed JSON");
  if (!j.is_object()) throw ProtocolError("message must be a JSON object");
  const auto type = detail::get_string(j, "type");
  if (type == "state") return detail::state_from_json(j);
  if (type == "config") return detail::config_from_json(j);
  if (type == "control") return ControlMessage{detail::get_number(j, "steer"), detail::get_number(j, "accel")};
  if (type == "start") return CommandMessage{SessionCommand::start};
  if (type == "pause") return CommandMessage{SessionCommand::pause};
  if (type == "reset") return CommandMessage{SessionCommand::reset};
  throw ProtocolError("unknown message type '" + type + "'");
}

}  // namespace lanegame::hil

#endif  // LANEGAME__HIL__PROTOCOL_HPP_
