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

#include <algorithm>
#include <csignal>
#include <filesystem>
#include <fstream>
#include <future>
#include <iomanip>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>

#include "lanegame/aggressiveness.hpp"
#include "lanegame/hil/server.hpp"
#include "lanegame/metrics.hpp"
#include "lanegame/risk_apf.hpp"
#include "lanegame/scenario.hpp"
#include "lanegame/simulation.hpp"
#include "lanegame/trace_io.hpp"

#ifndef LANEGAME_DEFAULT_WWW
#define LANEGAME_DEFAULT_WWW "www"
#endif

namespace fs = std::filesystem;
using namespace lanegame;

namespace
{

constexpr int kExitOk = 0;
constexpr int kExitConfig = 1;
constexpr int kExitCollision = 2;

std::string opt_str(const std::optional<double> & v)
{
  if (!v) return "--";
  std::ostringstream ss;
  ss << std::fixed << std::setprecision(3) << *v;
  return ss.str();
}

std::string num(double v, int prec = 3)
{
  std::ostringstream ss;
  ss << std::fixed << std::setprecision(prec) << v;
  return ss.str();
}

int exit_code(const Trace & tr) { return tr.reason == StopReason::collision ? kExitCollision : kExitOk; }

void print_summary(const Trace & tr, std::ostream & out)
{
  const auto s = hv_lane_change_stats(tr);
  int events = 0;
  bool prev = false;
  for (const auto & r : tr.records) {
    if (r.triggered && !prev) ++events;
    prev = r.triggered;
  }
  out << "scenario " << tr.scenario << ": " << to_string(tr.reason);
  if (!tr.collision_with.empty()) out << " (" << tr.collision_with << ")";
  out << ", t_end " << num(tr.records.empty() ? 0.0 : tr.records.back().t, 2) << " s\n";
  out << "  hv " << tr.ids[tr.hv] << ": TTL " << opt_str(s.ttl) << "  LCT " << opt_str(s.lct) << "  SY "
      << opt_str(s.sy) << "  v_max " << num(s.v_max) << "  v_avg " << num(s.v_avg) << "  risk events "
      << events << "\n";
}

struct RunResult
{
  std::string file;
  std::string name;
  std::string error;
  Trace trace;
};

// --- simulate ---------------------------------------------------------------

struct SimulateArgs
{
  std::string scenario;
  std::string out;
  std::string format;
  bool debug_game = false;
  std::optional<std::uint64_t> seed;
  std::optional<double> perturb;
};

int cmd_simulate(const SimulateArgs & a)
{
  auto config = load_scenario(a.scenario);
  if (a.seed) config.seed = *a.seed;
  if (a.perturb) config.perturb = *a.perturb;
  validate_scenario(config);
  for (const auto & v : config.vehicles) {
    if (v.policy.type == PolicyType::external) {
      std::cerr << "note: external vehicle '" << v.id << "' coasts with zero input in headless mode\n";
    }
  }
  const auto tr = run(config, SimOptions{a.debug_game});
  if (!a.out.empty()) {
    const auto fmt = a.format.empty()
                       ? (fs::path(a.out).extension() == ".jsonl" ? TraceFormat::jsonl : TraceFormat::csv)
                       : trace_format_from_string(a.format);
    export_trace(tr, a.out, fmt);
  }
  print_summary(tr, std::cout);
  return exit_code(tr);
}

// --- batch ------------------------------------------------------------------

int cmd_batch(const std::string & dir, const std::string & out_dir, unsigned jobs)
{
  std::vector<fs::path> files;
  for (const auto & e : fs::directory_iterator(dir)) {
    if (e.is_regular_file() && e.path().extension() == ".json") files.push_back(e.path());
  }
  std::sort(files.begin(), files.end());
  if (files.empty()) throw ConfigError(dir + ": no scenario files");
  fs::create_directories(out_dir);

  // Independent runs; each task owns its trace.
  auto task = [](fs::path p) {
    RunResult r;
    r.file = p.string();
    try {
      const auto c = load_scenario(p.string());
      r.name = c.name;
      r.trace = run(c);
    } catch (const std::exception & e) {
      r.error = e.what();
    }
    return r;
  };
  std::vector<RunResult> results(files.size());
  jobs = std::max(1u, jobs);
  for (std::size_t base = 0; base < files.size(); base += jobs) {
    std::vector<std::future<RunResult>> pending;
    for (std::size_t k = base; k < std::min(files.size(), base + jobs); ++k) {
      pending.push_back(std::async(std::launch::async, task, files[k]));
    }
    for (std::size_t k = 0; k < pending.size(); ++k) results[base + k] = pending[k].get();
  }

  std::ofstream summary(fs::path(out_dir) / "summary.csv");
  summary << "file,scenario,reason,ttl,lct,sy,v_max,v_avg\n";
  int rc = kExitOk;
  for (const auto & r : results) {
    const auto stem = fs::path(r.file).stem().string();
    if (!r.error.empty()) {
      std::cerr << "error: " << r.error << "\n";
      summary << stem << ",,config_error,,,,,\n";
      rc = kExitConfig;
      continue;
    }
    export_trace(r.trace, (fs::path(out_dir) / (stem + ".csv")).string(), TraceFormat::csv);
    const auto s = hv_lane_change_stats(r.trace);
    auto cell = [](const std::optional<double> & v) { return v ? num(*v, 4) : std::string(); };
    summary << stem << "," << r.name << "," << to_string(r.trace.reason) << "," << cell(s.ttl) << ","
            << cell(s.lct) << "," << cell(s.sy) << "," << num(s.v_max, 4) << "," << num(s.v_avg, 4) << "\n";
    print_summary(r.trace, std::cout);
    if (rc == kExitOk && r.trace.reason == StopReason::collision) rc = kExitCollision;
  }
  return rc;
}

// --- analyze ----------------------------------------------------------------

int cmd_analyze(const std::vector<std::string> & files, double eps, bool csv)
{
  if (files.empty() || files.size() > 2) throw ConfigError("analyze: expected one or two trace files");
  std::vector<Trace> traces;
  for (const auto & f : files) traces.push_back(load_trace(f));

  struct Row
  {
    std::string name;
    LaneChangeStats s;
    std::string reason;
  };
  std::vector<Row> rows;
  for (std::size_t k = 0; k < traces.size(); ++k) {
    rows.push_back({fs::path(files[k]).filename().string(), hv_lane_change_stats(traces[k]),
                    to_string(traces[k].reason)});
  }
  std::optional<double> ts;
  if (traces.size() == 2) {
    ts = trajectory_similarity(traces[0].hv_trajectory(), traces[1].hv_trajectory(), eps);
  }

  if (csv) {
    std::cout << "run,reason,ttl,lct,sy,v_max,v_avg" << (ts ? ",ts" : "") << "\n";
    for (const auto & r : rows) {
      auto cell = [](const std::optional<double> & v) { return v ? num(*v, 4) : std::string("--"); };
      std::cout << r.name << "," << r.reason << "," << cell(r.s.ttl) << "," << cell(r.s.lct) << ","
                << cell(r.s.sy) << "," << num(r.s.v_max, 4) << "," << num(r.s.v_avg, 4);
      if (ts) std::cout << "," << num(*ts, 4);
      std::cout << "\n";
    }
    return kExitOk;
  }
  std::cout << std::left << std::setw(28) << "run" << std::setw(11) << "reason" << std::right << std::setw(9)
            << "TTL[s]" << std::setw(9) << "LCT[s]" << std::setw(9) << "SY[m]" << std::setw(11) << "vmax[m/s]"
            << std::setw(11) << "vavg[m/s]" << "\n";
  for (const auto & r : rows) {
    std::cout << std::left << std::setw(28) << r.name << std::setw(11) << r.reason << std::right
              << std::setw(9) << opt_str(r.s.ttl) << std::setw(9) << opt_str(r.s.lct) << std::setw(9)
              << opt_str(r.s.sy) << std::setw(11) << num(r.s.v_max) << std::setw(11) << num(r.s.v_avg) << "\n";
  }
  if (ts) std::cout << "TS(eps=" << eps << ") = " << num(*ts, 4) << "\n";
  return kExitOk;
}

// --- aggmap / apfmap --------------------------------------------------------

int cmd_aggmap(const std::string & scenario, int steps, const std::string & out_path)
{
  if (steps < 2) throw ConfigError("aggmap: --steps must be >= 2");
  const auto fuzzy = scenario.empty() ? FuzzyConfig::defaults() : load_scenario(scenario).fuzzy;
  const FuzzyEstimator est(fuzzy);
  std::ofstream file;
  if (!out_path.empty()) {
    file.open(out_path);
    if (!file) throw std::runtime_error(out_path + ": cannot write file");
  }
  std::ostream & out = out_path.empty() ? std::cout : file;
  out << "v,yaw_rate,kappa\n" << std::setprecision(10);
  for (int i = 0; i < steps; ++i) {
    const double v = fuzzy.velocity_max * i / (steps - 1);
    for (int j = 0; j < steps; ++j) {
      const double r = fuzzy.yaw_rate_max * j / (steps - 1);
      out << v << "," << r << "," << est.estimate(v, r).value() << "\n";
    }
  }
  return kExitOk;
}

struct ApfMapArgs
{
  std::string scenario;
  double kappa = 0.5;
  double ttc = 1.0;
  double x_half = 20.0;
  double y_half = 6.0;
  double step = 0.25;
  double length = 4.5;
  double width = 1.8;
  std::string out;
};

int cmd_apfmap(const ApfMapArgs & a)
{
  if (!(a.step > 0.0) || !(a.x_half > 0.0) || !(a.y_half > 0.0)) throw ConfigError("apfmap: extents must be > 0");
  if (a.ttc < 0.0) throw ConfigError("apfmap: --ttc must be >= 0");
  const auto apf = a.scenario.empty() ? ApfParams{} : load_scenario(a.scenario).apf;
  const VehicleState nv{};
  const Aggressiveness kappa{a.kappa};
  std::ofstream file;
  if (!a.out.empty()) {
    file.open(a.out);
    if (!file) throw std::runtime_error(a.out + ": cannot write file");
  }
  std::ostream & out = a.out.empty() ? std::cout : file;
  out << "x,y,upsilon\n" << std::setprecision(10);
  const int nx = static_cast<int>(std::floor(2.0 * a.x_half / a.step + 1e-9));
  const int ny = static_cast<int>(std::floor(2.0 * a.y_half / a.step + 1e-9));
  for (int i = 0; i <= nx; ++i) {
    const double x = -a.x_half + i * a.step;
    for (int j = 0; j <= ny; ++j) {
      const double y = -a.y_half + j * a.step;
      out << x << "," << y << "," << field_value(x, y, nv, a.length, a.width, kappa, a.ttc, apf) << "\n";
    }
  }
  return kExitOk;
}

// --- serve ------------------------------------------------------------------

int cmd_serve(const std::string & scenario, std::uint16_t port, double speed, const std::string & www,
              const std::string & out)
{
  const auto config = load_scenario(scenario);
  hil::SessionOptions so;
  so.trace_path = out;
  if (!out.empty() && fs::path(out).extension() == ".jsonl") so.trace_format = TraceFormat::jsonl;
  hil::SessionEngine engine(config, so);
  hil::ServerOptions opt;
  opt.port = port;
  opt.speed = speed;
  opt.www_root = www;
  hil::SessionServer server(engine, opt);
  boost::asio::signal_set signals(server.io(), SIGINT, SIGTERM);
  signals.async_wait([&server](const boost::system::error_code &, int) { server.stop(); });
  std::cout << "serving " << config.name << " on http://" << opt.address << ":" << server.port()
            << "/ (websocket /session, static " << www << ")" << std::endl;
  server.run();
  return kExitOk;
}

}  // namespace

int main(int argc, char ** argv)
{
  CLI::App app{"lanegame: game-theoretic lane-change simulation"};
  app.require_subcommand(1);

  SimulateArgs sim;
  auto * simulate = app.add_subcommand("simulate", "run one scenario headless");
  simulate->add_option("--scenario", sim.scenario, "scenario JSON")->required()->check(CLI::ExistingFile);
  simulate->add_option("--out", sim.out, "trace output (.csv or .jsonl)");
  simulate->add_option("--format", sim.format, "csv or jsonl (default: from --out extension)")
    ->check(CLI::IsMember({"csv", "jsonl"}));
  simulate->add_flag("--debug-game", sim.debug_game, "record game tables at decision ticks");
  simulate->add_option("--seed", sim.seed, "override the scenario seed");
  simulate->add_option("--perturb", sim.perturb, "relative initial-state jitter in [0, 0.2]");

  std::string batch_dir, batch_out = "results";
  unsigned jobs = std::max(1u, std::thread::hardware_concurrency());
  auto * batch = app.add_subcommand("batch", "run every scenario in a directory");
  batch->add_option("--dir", batch_dir, "scenario directory")->required()->check(CLI::ExistingDirectory);
  batch->add_option("--out", batch_out, "output directory for traces and summary.csv");
  batch->add_option("--jobs", jobs, "parallel runs");

  std::vector<std::string> analyze_files;
  double eps = 0.5;
  bool analyze_csv = false;
  auto * analyze = app.add_subcommand("analyze", "lane-change metrics and similarity of traces");
  analyze->add_option("traces", analyze_files, "one or two trace files")->required()->expected(1, 2)
    ->check(CLI::ExistingFile);
  analyze->add_option("--eps", eps, "LCSS match radius [m]")->check(CLI::PositiveNumber);
  analyze->add_flag("--csv", analyze_csv, "CSV instead of aligned text");

  std::string agg_scenario, agg_out;
  int agg_steps = 41;
  auto * aggmap = app.add_subcommand("aggmap", "dump the aggressiveness grid as CSV");
  aggmap->add_option("--scenario", agg_scenario, "take membership sets from this scenario")
    ->check(CLI::ExistingFile);
  aggmap->add_option("--steps", agg_steps, "grid points per axis");
  aggmap->add_option("--out", agg_out, "output file (default stdout)");

  ApfMapArgs apf;
  auto * apfmap = app.add_subcommand("apfmap", "dump the risk field around a vehicle at the origin as CSV");
  apfmap->add_option("--scenario", apf.scenario, "take field parameters from this scenario")
    ->check(CLI::ExistingFile);
  apfmap->add_option("--kappa", apf.kappa, "aggressiveness of the field source")->check(CLI::Range(0.0, 1.0));
  apfmap->add_option("--ttc", apf.ttc, "time to collision [s]");
  apfmap->add_option("--x-half", apf.x_half, "half extent along X [m]");
  apfmap->add_option("--y-half", apf.y_half, "half extent along Y [m]");
  apfmap->add_option("--step", apf.step, "grid spacing [m]");
  apfmap->add_option("--out", apf.out, "output file (default stdout)");

  std::string serve_scenario, serve_out;
  std::uint16_t port = 8700;
  double speed = 1.0;
  std::string www = LANEGAME_DEFAULT_WWW;
  auto * serve = app.add_subcommand("serve", "real-time session for the browser cockpit");
  serve->add_option("--scenario", serve_scenario, "scenario with one external vehicle")->required()
    ->check(CLI::ExistingFile);
  serve->add_option("--port", port, "TCP port");
  serve->add_option("--speed", speed, "wall-clock pacing factor")->check(CLI::PositiveNumber);
  serve->add_option("--www", www, "static file root");
  serve->add_option("--out", serve_out, "persist the finished trace here");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError & e) {
    return app.exit(e) == 0 ? kExitOk : kExitConfig;
  }

  try {
    if (*simulate) return cmd_simulate(sim);
    if (*batch) return cmd_batch(batch_dir, batch_out, jobs);
    if (*analyze) return cmd_analyze(analyze_files, eps, analyze_csv);
    if (*aggmap) return cmd_aggmap(agg_scenario, agg_steps, agg_out);
    if (*apfmap) return cmd_apfmap(apf);
    if (*serve) return cmd_serve(serve_scenario, port, speed, www, serve_out);
  } catch (const std::exception & e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitConfig;
  }
  return kExitOk;
}
