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

#ifndef LANEGAME__TRACE_IO_HPP_
#define LANEGAME__TRACE_IO_HPP_

#include <charconv>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <system_error>
#include <vector>

#include <json.hpp>

#include "lanegame/simulation.hpp"

namespace lanegame
{

enum class TraceFormat { csv, jsonl };

inline TraceFormat trace_format_from_string(const std::string & s)
{
  if (s == "csv") return TraceFormat::csv;
  if (s == "jsonl") return TraceFormat::jsonl;
  throw std::invalid_argument("unknown trace format '" + s + "' (expected csv or jsonl)");
}

inline constexpr const char * kVehicleColumns[] = {"x", "y", "yaw", "v_x", "delta_f", "a_x", "kappa"};

namespace detail
{
/// Shortest text that parses back to the same double.
inline std::string fmt(double v)
{
  char buf[32];
  const auto r = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, r.ptr);
}

inline double parse_double(const std::string & s, const std::string & where)
{
  double v = 0.0;
  const auto r = std::from_chars(s.data(), s.data() + s.size(), v);
  if (r.ec != std::errc() || r.ptr != s.data() + s.size()) {
    throw std::runtime_error(where + ": not a number '" + s + "'");
  }
  return v;
}

inline std::vector<std::string> split(const std::string & s, char sep)
{
  std::vector<std::string> out;
  std::string cur;
  std::istringstream in(s);
  while (std::getline(in, cur, sep)) out.push_back(cur);
  if (!s.empty() && s.back() == sep) out.emplace_back();
  return out;
}
}  // namespace detail

inline std::vector<std::string> csv_header(const Trace & tr)
{
  std::vector<std::string> h = {"t", "alpha", "a_star", "hv_ref_lane", "hv_ref_y", "upsilon", "triggered"};
  for (const auto & id : tr.ids) {
    for (const auto * c : kVehicleColumns) h.push_back(id + "." + c);
  }
  return h;
}

/// First line is a comment carrying the metadata, second the column names.
inline void write_csv(const Trace & tr, std::ostream & out)
{
  using detail::fmt;
  out << "# schema=" << tr.schema << " scenario=" << tr.scenario << " hv=" << tr.ids.at(tr.hv)
      << " dt=" << fmt(tr.dt) << " lanes=";
  for (std::size_t k = 0; k < tr.lanes.centers.size(); ++k) {
    out << (k ? ";" : "") << fmt(tr.lanes.centers[k]);
  }
  out << " width=" << fmt(tr.lanes.width) << " reason=" << to_string(tr.reason) << '\n';
  const auto h = csv_header(tr);
  for (std::size_t k = 0; k < h.size(); ++k) out << (k ? "," : "") << h[k];
  out << '\n';
  for (const auto & r : tr.records) {
    out << fmt(r.t) << ',' << r.alpha << ',' << fmt(r.a_star) << ',' << r.hv_ref_lane << ','
        << fmt(r.hv_ref_y) << ',' << fmt(r.upsilon) << ',' << (r.triggered ? 1 : 0);
    for (const auto & v : r.vehicles) {
      out << ',' << fmt(v.x) << ',' << fmt(v.y) << ',' << fmt(v.yaw) << ',' << fmt(v.v_x) << ','
          << fmt(v.delta_f) << ',' << fmt(v.a_x) << ',' << fmt(v.kappa);
    }
    out << '\n';
  }
}

inline nlohmann::json record_to_json(const Trace & tr, const TraceRecord & r)
{
  nlohmann::json veh = nlohmann::json::array();
  for (std::size_t k = 0; k < r.vehicles.size(); ++k) {
    const auto & v = r.vehicles[k];
    veh.push_back(
      {{"id", tr.ids[k]},
       {"x", v.x},
       {"y", v.y},
       {"yaw", v.yaw},
       {"v_x", v.v_x},
       {"delta_f", v.delta_f},
       {"a_x", v.a_x},
       {"kappa", v.kappa}});
  }
  nlohmann::json j = {
    {"type", "tick"},
    {"t", r.t},
    {"alpha", r.alpha},
    {"a_star", r.a_star},
    {"hv_ref_lane", r.hv_ref_lane},
    {"hv_ref_y", r.hv_ref_y},
    {"upsilon", r.upsilon},
    {"triggered", r.triggered},
    {"decision_tick", r.decision_tick},
    {"vehicles", veh}};
  if (r.diagnostics) {
    const auto & d = *r.diagnostics;
    j["game"] = {
      {"opponent", d.opponent},
      {"row", d.row},
      {"col", d.col},
      {"is_nash", d.is_nash},
      {"fallback_used", d.fallback_used},
      {"gated", d.gated},
      {"cost_i", d.cost_i},
      {"cost_j", d.cost_j}};
  }
  return j;
}

/// Header line, one line per tick, then an end line with the stop reason.
inline void write_jsonl(const Trace & tr, std::ostream & out)
{
  out << nlohmann::json{
           {"type", "header"},
           {"schema", tr.schema},
           {"scenario", tr.scenario},
           {"ids", tr.ids},
           {"hv", tr.ids.at(tr.hv)},
           {"dt", tr.dt},
           {"lanes", {{"centers", tr.lanes.centers}, {"width", tr.lanes.width}}}}
           .dump()
      << '\n';
  for (const auto & r : tr.records) out << record_to_json(tr, r).dump() << '\n';
  out << nlohmann::json{{"type", "end"}, {"reason", to_string(tr.reason)}, {"collision_with", tr.collision_with}}
           .dump()
      << '\n';
}

inline void export_trace(const Trace & tr, const std::string & path, TraceFormat format)
{
  if (tr.records.empty()) throw std::invalid_argument("export: trace is empty");
  std::ofstream out(path);
  if (!out) throw std::runtime_error(path + ": cannot write file");
  if (format == TraceFormat::csv) write_csv(tr, out);
  else write_jsonl(tr, out);
  out.flush();
  if (!out) throw std::runtime_error(path + ": write failed");
}

inline StopReason stop_reason_from_string(const std::string & s)
{
  if (s == "completed") return StopReason::completed;
  if (s == "collision") return StopReason::collision;
  return StopReason::running;
}

inline Trace read_csv(std::istream & in, const std::string & name = "trace")
{
  using detail::parse_double;
  Trace tr;
  std::string line;
  if (!std::getline(in, line) || line.rfind("# ", 0) != 0) {
    throw std::runtime_error(name + ": missing metadata line");
  }
  std::string hv_id;
  for (const auto & tok : detail::split(line.substr(2), ' ')) {
    const auto eq = tok.find('=');
    if (eq == std::string::npos) continue;
    const auto key = tok.substr(0, eq);
    const auto val = tok.substr(eq + 1);
    if (key == "schema") tr.schema = val;
    else if (key == "scenario") tr.scenario = val;
    else if (key == "hv") hv_id = val;
    else if (key == "dt") tr.dt = parse_double(val, name + ": dt");
    else if (key == "width") tr.lanes.width = parse_double(val, name + ": width");
    else if (key == "reason") tr.reason = stop_reason_from_string(val);
    else if (key == "lanes") {
      tr.lanes.centers.clear();
      for (const auto & c : detail::split(val, ';')) tr.lanes.centers.push_back(parse_double(c, name + ": lanes"));
    }
  }
  if (tr.schema != kTraceSchema) throw std::runtime_error(name + ": unsupported schema '" + tr.schema + "'");

  if (!std::getline(in, line)) throw std::runtime_error(name + ": missing header row");
  const auto header = detail::split(line, ',');
  constexpr std::size_t fixed = 7;
  constexpr std::size_t per = std::size(kVehicleColumns);
  if (header.size() < fixed + per || (header.size() - fixed) % per != 0) {
    throw std::runtime_error(name + ": unexpected column layout");
  }
  for (std::size_t k = fixed; k < header.size(); k += per) {
    const auto dot = header[k].rfind('.');
    tr.ids.push_back(header[k].substr(0, dot));
  }
  tr.hv = 0;
  for (std::size_t k = 0; k < tr.ids.size(); ++k) {
    if (tr.ids[k] == hv_id) tr.hv = k;
  }

  std::size_t row = 2;
  while (std::getline(in, line)) {
    ++row;
    if (line.empty()) continue;
    const auto cells = detail::split(line, ',');
    const auto where = name + ": row " + std::to_string(row);
    if (cells.size() != header.size()) throw std::runtime_error(where + ": wrong column count");
    TraceRecord r;
    r.t = parse_double(cells[0], where);
    r.alpha = static_cast<int>(parse_double(cells[1], where));
    r.a_star = parse_double(cells[2], where);
    r.hv_ref_lane = static_cast<int>(parse_double(cells[3], where));
    r.hv_ref_y = parse_double(cells[4], where);
    r.upsilon = parse_double(cells[5], where);
    r.triggered = parse_double(cells[6], where) != 0.0;
    for (std::size_t k = fixed; k < cells.size(); k += per) {
      VehicleSample v;
      v.x = parse_double(cells[k], where);
      v.y = parse_double(cells[k + 1], where);
      v.yaw = parse_double(cells[k + 2], where);
      v.v_x = parse_double(cells[k + 3], where);
      v.delta_f = parse_double(cells[k + 4], where);
      v.a_x = parse_double(cells[k + 5], where);
      v.kappa = parse_double(cells[k + 6], where);
      r.vehicles.push_back(v);
    }
    tr.records.push_back(std::move(r));
  }
  if (tr.records.empty()) throw std::runtime_error(name + ": no samples");
  return tr;
}

inline Trace read_jsonl(std::istream & in, const std::string & name = "trace")
{
  Trace tr;
  std::string line;
  std::string hv_id;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto j = nlohmann::json::parse(line);
    const auto type = j.at("type").get<std::string>();
    if (type == "header") {
      tr.schema = j.at("schema").get<std::string>();
      if (tr.schema != kTraceSchema) throw std::runtime_error(name + ": unsupported schema");
      tr.scenario = j.value("scenario", std::string());
      tr.ids = j.at("ids").get<std::vector<std::string>>();
      hv_id = j.at("hv").get<std::string>();
      tr.dt = j.at("dt").get<double>();
      tr.lanes.centers = j.at("lanes").at("centers").get<std::vector<double>>();
      tr.lanes.width = j.at("lanes").at("width").get<double>();
    } else if (type == "tick") {
      TraceRecord r;
      r.t = j.at("t").get<double>();
      r.alpha = j.at("alpha").get<int>();
      r.a_star = j.at("a_star").get<double>();
      r.hv_ref_lane = j.at("hv_ref_lane").get<int>();
      r.hv_ref_y = j.at("hv_ref_y").get<double>();
      r.upsilon = j.at("upsilon").get<double>();
      r.triggered = j.at("triggered").get<bool>();
      r.decision_tick = j.value("decision_tick", false);
      for (const auto & v : j.at("vehicles")) {
        r.vehicles.push_back(
          {v.at("x").get<double>(), v.at("y").get<double>(), v.at("yaw").get<double>(),
           v.at("v_x").get<double>(), v.at("delta_f").get<double>(), v.at("a_x").get<double>(),
           v.at("kappa").get<double>()});
      }
      if (const auto it = j.find("game"); it != j.end()) {
        DecisionDiagnostics d;
        d.opponent = it->at("opponent").get<std::string>();
        d.row = it->at("row").get<std::size_t>();
        d.col = it->at("col").get<std::size_t>();
        d.is_nash = it->at("is_nash").get<bool>();
        d.fallback_used = it->at("fallback_used").get<bool>();
        d.gated = it->at("gated").get<bool>();
        d.cost_i = it->at("cost_i").get<std::vector<double>>();
        d.cost_j = it->at("cost_j").get<std::vector<double>>();
        r.diagnostics = d;
      }
      tr.records.push_back(std::move(r));
    } else if (type == "end") {
      tr.reason = stop_reason_from_string(j.at("reason").get<std::string>());
      tr.collision_with = j.value("collision_with", std::string());
    }
  }
  for (std::size_t k = 0; k < tr.ids.size(); ++k) {
    if (tr.ids[k] == hv_id) tr.hv = k;
  }
  if (tr.records.empty()) throw std::runtime_error(name + ": no samples");
  return tr;
}

/// Load a trace written by export_trace; the format follows the extension.
inline Trace load_trace(const std::string & path)
{
  std::ifstream in(path);
  if (!in) throw std::runtime_error(path + ": cannot open file");
  const bool jsonl = path.size() >= 6 && path.substr(path.size() - 6) == ".jsonl";
  return jsonl ? read_jsonl(in, path) : read_csv(in, path);
}

}  // namespace lanegame

#endif  // LANEGAME__TRACE_IO_HPP_
