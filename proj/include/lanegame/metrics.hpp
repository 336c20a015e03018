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

#ifndef LANEGAME__METRICS_HPP_
#define LANEGAME__METRICS_HPP_

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <optional>
#include <stdexcept>
#include <vector>

namespace lanegame
{

struct TrajectoryPoint
{
  double t = 0.0;
  double x = 0.0;
  double y = 0.0;
  double v = 0.0;
};

using Trajectory = std::vector<TrajectoryPoint>;

/// Length of the longest common subsequence where two points match when
/// their planar distance is at most eps. O(m n) time, O(n) memory.
inline std::size_t lcss_length(const Trajectory & a, const Trajectory & b, double eps)
{
  if (!(eps > 0.0)) throw std::invalid_argument("lcss: eps must be > 0");
  const std::size_t n = b.size();
  std::vector<std::size_t> prev(n + 1, 0), cur(n + 1, 0);
  for (std::size_t i = 1; i <= a.size(); ++i) {
    cur[0] = 0;
    for (std::size_t j = 1; j <= n; ++j) {
      const double d = std::hypot(a[i - 1].x - b[j - 1].x, a[i - 1].y - b[j - 1].y);
      cur[j] = d <= eps ? prev[j - 1] + 1 : std::max(prev[j], cur[j - 1]);
    }
    std::swap(prev, cur);
  }
  return prev[n];
}

/// Similarity in [0, 1]: LCSS normalised by the shorter trajectory.
inline double trajectory_similarity(const Trajectory & a, const Trajectory & b, double eps = 0.5)
{
  if (!(eps > 0.0)) throw std::invalid_argument("trajectory_similarity: eps must be > 0");
  if (a.empty() || b.empty()) return 0.0;
  return static_cast<double>(lcss_length(a, b, eps)) /
         static_cast<double>(std::min(a.size(), b.size()));
}

struct LaneChangeStats
{
  std::optional<double> ttl;  // time to lane line [s]
  std::optional<double> lct;  // lane-change time [s]
  std::optional<double> sy;   // steady Y [m]
  double v_max = 0.0;
  double v_avg = 0.0;
};

struct LaneChangeSpec
{
  double origin_y = -3.0;
  double target_y = 1.0;
  double boundary_y = -1.0;
  double settle_band = 0.15;  // [m]
  double settle_dwell = 1.0;  // [s]
  double steady_window = 2.0;  // [s]
};

/// Timing statistics of one lane change commanded at t_c. Without t_c
/// (no change commanded) only the speed statistics are filled in.
inline LaneChangeStats lane_change_stats(
  const Trajectory & tr, const LaneChangeSpec & spec, std::optional<double> t_c)
{
  LaneChangeStats s;
  if (tr.size() < 2) throw std::invalid_argument("lane_change_stats: need at least 2 samples");

  auto speed_stats = [&s, &tr](double t0, double t1) {
    double sum = 0.0;
    std::size_t n = 0;
    s.v_max = 0.0;
    for (const auto & p : tr) {
      if (p.t < t0 - 1e-9 || p.t > t1 + 1e-9) continue;
      s.v_max = std::max(s.v_max, p.v);
      sum += p.v;
      ++n;
    }
    s.v_avg = n > 0 ? sum / static_cast<double>(n) : 0.0;
  };

  if (!t_c) {
    speed_stats(tr.front().t, tr.back().t);
    return s;
  }

  const double side0 = spec.origin_y - spec.boundary_y;
  for (const auto & p : tr) {
    if (p.t < *t_c - 1e-9) continue;
    if ((p.y - spec.boundary_y) * side0 <= 0.0) {
      s.ttl = p.t - *t_c;
      break;
    }
  }

  // Settled: inside the band from some sample on for at least the dwell time.
  std::optional<double> band_entry;
  for (const auto & p : tr) {
    if (p.t < *t_c - 1e-9) continue;
    const bool inside = std::abs(p.y - spec.target_y) <= spec.settle_band;
    if (!inside) {
      band_entry.reset();
      continue;
    }
    if (!band_entry) band_entry = p.t;
    if (p.t - *band_entry >= spec.settle_dwell - 1e-9) {
      s.lct = *band_entry - *t_c;
      break;
    }
  }
  if (s.ttl && s.lct && *s.lct < *s.ttl) s.lct.reset();

  if (s.ttl) {
    const double t_end = tr.back().t;
    double sum = 0.0;
    std::size_t n = 0;
    for (const auto & p : tr) {
      if (p.t >= t_end - spec.steady_window - 1e-9) {
        sum += p.y;
        ++n;
      }
    }
    s.sy = sum / static_cast<double>(n);
  }
  if (s.lct) {
    speed_stats(*t_c, *t_c + *s.lct);
  } else {
    speed_stats(tr.front().t, tr.back().t);
  }
  return s;
}

}  // namespace lanegame

#endif  // LANEGAME__METRICS_HPP_
