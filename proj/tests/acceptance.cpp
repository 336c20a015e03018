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

// Acceptance checks: one PASS/FAIL line per criterion, exit status 1 if any
// criterion fails. Tolerances are fixed here and nowhere else.

#include <array>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <sstream>
#include <string>

#include "lanegame/aggressiveness.hpp"
#include "lanegame/driver_belcm.hpp"
#include "lanegame/metrics.hpp"
#include "lanegame/nash.hpp"
#include "lanegame/risk_apf.hpp"
#include "lanegame/simulation.hpp"
#include "support.hpp"

namespace lg = lanegame;
namespace lt = lanegame::testing;

namespace
{

constexpr double kFuzzyBudget = 1.0;        // [s]
constexpr double kRoundOff = 1e-12;         // plateau noise, not a drop
constexpr double kBelcmTol = 1e-12;
constexpr int kBelcmDraws = 1000;
constexpr double kSteadyYTol = 0.05;        // [m]
constexpr double kLctMin = 3.0;             // [s]
constexpr double kLctMax = 9.0;             // [s]
constexpr int kNashDraws = 10000;
constexpr double kNashBudget = 5.0;         // [s]
constexpr double kInteractionBudget = 30.0; // [s]
constexpr double kCutInTtc = 1.0;           // [s]
constexpr double kCentreTol = 1e-12;
constexpr std::size_t kLcssMaxLen = 8;

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0)
{
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

struct Result
{
  bool ok = true;
  std::ostringstream why;
  void fail(const std::string & s)
  {
    if (!ok) why << "; ";
    ok = false;
    why << s;
  }
};

int failures = 0;

void report(const char * id, const char * title, const std::function<void(Result &, std::ostringstream &)> & check)
{
  Result r;
  std::ostringstream info;
  try {
    check(r, info);
  } catch (const std::exception & e) {
    r.fail(std::string("exception: ") + e.what());
  }
  if (!r.ok) ++failures;
  std::printf("%s %s %s: %s\n", r.ok ? "PASS" : "FAIL", id, title, (r.ok ? info.str() : r.why.str() + " | " + info.str()).c_str());
  std::fflush(stdout);
}

// ---------------------------------------------------------------------------

void fuzzy(Result & r, std::ostringstream & info)
{
  const auto t0 = Clock::now();
  const lg::FuzzyEstimator est;
  const auto & cfg = est.config();
  double k[41][41];
  for (int i = 0; i <= 40; ++i) {
    for (int j = 0; j <= 40; ++j) {
      k[i][j] = est.estimate(cfg.velocity_max * i / 40.0, cfg.yaw_rate_max * j / 40.0).value();
    }
  }
  int violations = 0;
  for (int i = 0; i <= 40; ++i) {
    for (int j = 0; j <= 40; ++j) {
      if (i > 0 && k[i - 1][j] > k[i][j] + kRoundOff) ++violations;
      if (j > 0 && k[i][j - 1] > k[i][j] + kRoundOff) ++violations;
    }
  }
  if (violations) r.fail(std::to_string(violations) + " monotonicity violations");
  for (double v : {20.0, 25.0}) {
    if (est.estimate(v, 0.1).value() != 1.0) r.fail("kappa != 1 at v=" + std::to_string(v));
  }
  for (double w : {0.5, 0.8, -0.6}) {
    if (est.estimate(8.0, w).value() != 1.0) r.fail("kappa != 1 at r=" + std::to_string(w));
  }

  // Crisp-corner probes of every rule cell.
  const std::array<double, 5> vc = {0.0, 6.0, 10.0, 14.0, 19.0};
  const std::array<double, 5> rc = {0.0, 0.15, 0.25, 0.35, 0.45};
  const char * expected[5] = {"CCCNN", "CCNNA", "CNNAA", "NNAAA", "NAAAA"};
  int cells = 0;
  for (std::size_t i = 0; i < 5; ++i) {
    for (std::size_t j = 0; j < 5; ++j) {
      const auto act = lg::rule_infer(
        lg::membership_eval(cfg.velocity_sets, vc[i], cfg.velocity_max),
        lg::membership_eval(cfg.yaw_rate_sets, rc[j], cfg.yaw_rate_max), cfg.rules);
      const char c = expected[i][j];
      const std::size_t want = c == 'C' ? 0 : (c == 'N' ? 1 : 2);
      bool good = true;
      for (std::size_t l = 0; l < 3; ++l) good = good && act[l] == (l == want ? 1.0 : 0.0);
      if (good) ++cells;
      else r.fail("rule cell (" + std::to_string(i) + "," + std::to_string(j) + ")");
    }
  }
  const double secs = seconds_since(t0);
  if (secs >= kFuzzyBudget) r.fail("runtime " + std::to_string(secs) + " s");
  info << "41x41 grid monotone, " << cells << "/25 rule cells, " << secs << " s";
}

void belcm(Result & r, std::ostringstream & info)
{
  std::mt19937_64 rng(20260101);
  std::uniform_real_distribution<double> w(-2.0, 2.0);
  std::uniform_real_distribution<double> sig(-1.0, 1.0);
  double worst = 0.0;
  for (int n = 0; n < kBelcmDraws; ++n) {
    lg::DriverGains g;
    g.eta = {w(rng), w(rng), w(rng)};
    lg::BelcmState st;
    st.w_a = {w(rng), w(rng), w(rng), w(rng)};
    st.w_p = {w(rng), w(rng), w(rng)};
    st.alpha_a = 0.0;
    st.alpha_p = 0.0;
    const double e_n = sig(rng), theta_n = sig(rng), theta_f_dot = sig(rng);
    const std::array<double, 3> si = {g.eta[0] * e_n, g.eta[1] * theta_n, g.eta[2] * theta_f_dot};
    const auto xi = lg::equivalent_gains(g, st);
    const double closed = xi[0] * e_n + xi[1] * theta_n + xi[2] * theta_f_dot +
                          st.w_a[3] * std::max({si[0], si[1], si[2]});
    worst = std::max(worst, std::abs(lg::belcm_step(si, sig(rng), st).k - closed));
  }
  if (!(worst <= kBelcmTol)) r.fail("closed-form error " + std::to_string(worst));

  int runs = 0;
  for (const auto * name : {"lane_change_hlm_a", "lane_change_hlm_b", "interaction_case1_hlm_a",
                            "interaction_case3_hlm_b", "cutin", "case5"}) {
    if (!lt::amygdala_monotone(lt::scenario(name))) r.fail(std::string("W_A decreased in ") + name);
    ++runs;
  }
  info << "max |K - closed form| = " << worst << " over " << kBelcmDraws << " states; W_A monotone in " << runs
       << " runs";
}

void lane_change(Result & r, std::ostringstream & info)
{
  for (const auto * name : {"lane_change_hlm_a", "lane_change_hlm_b"}) {
    const auto tr = lg::run(lt::scenario(name));
    const auto s = lg::hv_lane_change_stats(tr);
    if (tr.reason != lg::StopReason::completed) r.fail(std::string(name) + " did not complete");
    if (!s.sy || !s.lct) {
      r.fail(std::string(name) + " never settled");
      continue;
    }
    const double target = tr.lanes.center(tr.records.back().hv_ref_lane);
    if (std::abs(*s.sy - target) > kSteadyYTol) r.fail(std::string(name) + " SY off target");
    if (*s.lct < kLctMin || *s.lct > kLctMax) r.fail(std::string(name) + " LCT outside bracket");
    info << name << ": SY=" << *s.sy << " LCT=" << *s.lct << " s; ";
  }
}

void nash(Result & r, std::ostringstream & info)
{
  const auto t0 = Clock::now();
  std::mt19937_64 rng(99);
  std::uniform_int_distribution<int> cost(0, 5);
  int pure = 0, fallback = 0, bad = 0;
  for (int n = 0; n < kNashDraws; ++n) {
    lg::CostTable t(3, 3);
    for (auto & v : t.cost_i) v = cost(rng);
    for (auto & v : t.cost_j) v = cost(rng);
    // independent brute force
    auto stable = [&t](std::size_t a, std::size_t b) {
      for (std::size_t k = 0; k < 3; ++k) {
        if (t.cost_i[k * 3 + b] < t.cost_i[a * 3 + b]) return false;
        if (t.cost_j[a * 3 + k] < t.cost_j[a * 3 + b]) return false;
      }
      return true;
    };
    bool exists = false;
    for (std::size_t a = 0; a < 3; ++a) {
      for (std::size_t b = 0; b < 3; ++b) exists = exists || stable(a, b);
    }
    const auto s = lg::nash_solve(t);
    if (s.is_nash && !stable(s.row, s.col)) ++bad;
    if (s.fallback_used == exists || s.is_nash != exists) ++bad;
    pure += s.is_nash ? 1 : 0;
    fallback += s.fallback_used ? 1 : 0;
  }
  const double secs = seconds_since(t0);
  if (bad) r.fail(std::to_string(bad) + " disagreements");
  if (secs >= kNashBudget) r.fail("runtime " + std::to_string(secs) + " s");
  info << kNashDraws << " tables, " << pure << " pure, " << fallback << " fallback, " << secs << " s";
}

void interaction(Result & r, std::ostringstream & info)
{
  const auto t0 = Clock::now();
  for (int k = 1; k <= 3; ++k) {
    for (const auto * p : {"hlm_a", "hlm_b"}) {
      const auto name = "interaction_case" + std::to_string(k) + "_" + p;
      const auto tr = lg::run(lt::scenario(name));
      if (tr.reason != lg::StopReason::completed) r.fail(name + " " + to_string(tr.reason));
      const auto s = lg::hv_lane_change_stats(tr);
      const bool yields = k == 3 && std::string(p) == "hlm_a";
      if (yields) {
        const auto pass = lt::pass_time(tr, "V2");
        const auto change = lt::first_lane_change(tr);
        if (!pass) r.fail(name + ": V2 never passed");
        else if (change && *change <= *pass) r.fail(name + ": lane change before V2 passed");
        info << name << ": V2 passes at " << (pass ? *pass : -1.0) << " s, first change "
             << (change ? std::to_string(*change) : std::string("none")) << "; ";
      } else {
        if (!s.lct) r.fail(name + ": no completed lane change");
        info << name << ": LCT=" << (s.lct ? *s.lct : -1.0) << "; ";
      }
    }
  }
  const double secs = seconds_since(t0);
  if (secs >= kInteractionBudget) r.fail("runtime " + std::to_string(secs) + " s");
  info << secs << " s";
}

void apf(Result & r, std::ostringstream & info)
{
  const auto c = lt::scenario("cutin");
  const auto tr = lg::run(c);
  const double ttc = lt::min_ttc(tr, c);
  const auto trig = lt::triggered_samples(tr);
  const auto bad = lt::alpha_while_triggered(tr);
  if (tr.reason != lg::StopReason::completed) r.fail("cut-in run " + std::string(to_string(tr.reason)));
  if (ttc > kCutInTtc) r.fail("min TTC " + std::to_string(ttc) + " s");
  if (trig == 0) r.fail("trigger never raised");
  if (bad) r.fail(std::to_string(bad) + " triggered samples with alpha != 0");

  double worst = 0.0;
  const lg::VehicleState nv{10.0, 0.3, 12.0, -4.0};
  for (double kappa : {0.0, 0.25, 0.6, 1.0}) {
    for (double t : {0.0, 0.4, 2.0, 9.0}) {
      const double lambda = lg::field_magnitude(lg::Aggressiveness{kappa}, t, c.apf);
      worst = std::max(worst, std::abs(lg::field_value(nv.x, nv.y, nv, 4.5, 1.8, lg::Aggressiveness{kappa}, t, c.apf) - lambda));
    }
  }
  if (!(worst <= kCentreTol)) r.fail("field at centre differs from lambda by " + std::to_string(worst));
  info << "min TTC " << ttc << " s, " << trig << " triggered samples, " << bad << " with alpha != 0, |centre - lambda| = "
       << worst;
}

std::size_t lcss_naive(const lg::Trajectory & a, std::size_t m, const lg::Trajectory & b, std::size_t n, double eps)
{
  if (m == 0 || n == 0) return 0;
  if (std::hypot(a[m - 1].x - b[n - 1].x, a[m - 1].y - b[n - 1].y) <= eps) {
    return 1 + lcss_naive(a, m - 1, b, n - 1, eps);
  }
  return std::max(lcss_naive(a, m - 1, b, n, eps), lcss_naive(a, m, b, n - 1, eps));
}

void lcss(Result & r, std::ostringstream & info)
{
  std::mt19937_64 rng(8);
  std::uniform_int_distribution<int> d(0, 3);
  auto path = [&](std::size_t n) {
    lg::Trajectory t;
    for (std::size_t k = 0; k < n; ++k) t.push_back({0.1 * static_cast<double>(k), 0.4 * d(rng), 0.4 * d(rng), 0.0});
    return t;
  };
  int pairs = 0, mismatches = 0, prop = 0;
  for (std::size_t m = 0; m <= kLcssMaxLen; ++m) {
    for (std::size_t n = 0; n <= kLcssMaxLen; ++n) {
      for (int rep = 0; rep < 25; ++rep) {
        const auto a = path(m);
        const auto b = path(n);
        ++pairs;
        if (lg::lcss_length(a, b, 0.5) != lcss_naive(a, m, b, n, 0.5)) ++mismatches;
        if (m == 0 || n == 0) continue;
        if (lg::trajectory_similarity(a, a) != 1.0) ++prop;
        double prev = 0.0;
        for (double eps : {0.1, 0.5, 1.0, 3.0}) {
          const double s = lg::trajectory_similarity(a, b, eps);
          if (s != lg::trajectory_similarity(b, a, eps) || s < prev) ++prop;
          prev = s;
        }
      }
    }
  }
  if (mismatches) r.fail(std::to_string(mismatches) + " DP/recursion mismatches");
  if (prop) r.fail(std::to_string(prop) + " similarity property violations");

  int runs = 0, differing = 0;
  for (const auto * name : {"case2", "interaction_case3_hlm_a", "interaction_case3_hlm_b", "cutin", "lane_change_hlm_a"}) {
    for (std::uint64_t seed : {0ull, 7ull}) {
      auto c = lt::scenario(name);
      c.seed = seed;
      c.perturb = seed ? 0.01 : 0.0;
      ++runs;
      if (!lt::identical(lg::run(c), lg::run(c))) ++differing;
    }
  }
  if (differing) r.fail(std::to_string(differing) + " non-reproducible runs");
  info << pairs << " length pairs up to " << kLcssMaxLen << ", " << runs << " (config, seed) pairs bit-identical";
}

}  // namespace

int main()
{
  report("AC1", "fuzzy estimator", fuzzy);
  report("AC2", "BELCM closed form and W_A monotonicity", belcm);
  report("AC3", "commanded lane change (SY, LCT)", lane_change);
  report("AC4", "Nash solver vs brute force", nash);
  report("AC5", "persona interaction cases", interaction);
  report("AC6", "APF gate on cut-in", apf);
  report("AC7", "LCSS/TS and determinism", lcss);
  std::printf("%d of 7 criteria failed\n", failures);
  return failures == 0 ? 0 : 1;
}
