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

#ifndef LANEGAME__NASH_HPP_
#define LANEGAME__NASH_HPP_

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <stdexcept>
#include <tuple>
#include <vector>

namespace lanegame
{

/// Bimatrix of costs for a two-player game, row-major (row = player i).
struct CostTable
{
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<double> cost_i;
  std::vector<double> cost_j;

  CostTable() = default;
  CostTable(std::size_t r, std::size_t c) : rows(r), cols(c), cost_i(r * c, 0.0), cost_j(r * c, 0.0)
  {
  }

  std::size_t index(std::size_t r, std::size_t c) const { return r * cols + c; }
  double & gi(std::size_t r, std::size_t c) { return cost_i[index(r, c)]; }
  double & gj(std::size_t r, std::size_t c) { return cost_j[index(r, c)]; }
  double gi(std::size_t r, std::size_t c) const { return cost_i[index(r, c)]; }
  double gj(std::size_t r, std::size_t c) const { return cost_j[index(r, c)]; }
};

/// Secondary ordering used to break ties between otherwise equal choices;
/// smaller is preferred. For the lane game: (|alpha|, |a_x|).
struct ActionPreference
{
  double primary = 0.0;
  double secondary = 0.0;
};

struct NashSolution
{
  std::size_t row = 0;
  std::size_t col = 0;
  bool is_nash = false;
  bool fallback_used = false;
  std::size_t equilibria = 0;
};

/// Pure-strategy equilibrium check: neither player can strictly lower its
/// own cost by a unilateral deviation.
inline bool is_pure_nash(const CostTable & t, std::size_t r, std::size_t c)
{
  const double ci = t.gi(r, c);
  const double cj = t.gj(r, c);
  for (std::size_t rr = 0; rr < t.rows; ++rr) {
    if (t.gi(rr, c) < ci) return false;
  }
  for (std::size_t cc = 0; cc < t.cols; ++cc) {
    if (t.gj(r, cc) < cj) return false;
  }
  return true;
}

namespace detail
{
inline std::vector<ActionPreference> neutral_prefs(std::size_t n)
{
  return std::vector<ActionPreference>(n);
}

/// Security strategy: minimise the worst case over the opponent's choices.
template <class WorstCase>
std::size_t security_choice(
  std::size_t n, const std::vector<ActionPreference> & prefs, WorstCase worst)
{
  std::size_t best = 0;
  auto key = [&](std::size_t k) {
    return std::make_tuple(worst(k), prefs[k].primary, prefs[k].secondary, k);
  };
  for (std::size_t k = 1; k < n; ++k) {
    if (key(k) < key(best)) best = k;
  }
  return best;
}
}  // namespace detail

/// Exhaustive pure-Nash search. Among several equilibria the one with the
/// smallest joint cost wins, then the smallest summed preference keys. When
/// no pure equilibrium exists both players fall back to security strategies.
inline NashSolution nash_solve(
  const CostTable & t, const std::vector<ActionPreference> & row_prefs,
  const std::vector<ActionPreference> & col_prefs)
{
  if (t.rows == 0 || t.cols == 0) throw std::invalid_argument("nash_solve: empty table");
  if (row_prefs.size() != t.rows || col_prefs.size() != t.cols) {
    throw std::invalid_argument("nash_solve: preference size mismatch");
  }
  for (std::size_t k = 0; k < t.cost_i.size(); ++k) {
    if (!std::isfinite(t.cost_i[k]) || !std::isfinite(t.cost_j[k])) {
      throw std::invalid_argument("nash_solve: cost tables must be finite");
    }
  }

  NashSolution best;
  auto key = [&](std::size_t r, std::size_t c) {
    return std::make_tuple(
      t.gi(r, c) + t.gj(r, c), row_prefs[r].primary + col_prefs[c].primary,
      row_prefs[r].secondary + col_prefs[c].secondary, r, c);
  };
  for (std::size_t r = 0; r < t.rows; ++r) {
    for (std::size_t c = 0; c < t.cols; ++c) {
      if (!is_pure_nash(t, r, c)) continue;
      ++best.equilibria;
      if (!best.is_nash || key(r, c) < key(best.row, best.col)) {
        best.row = r;
        best.col = c;
        best.is_nash = true;
      }
    }
  }
  if (best.is_nash) return best;

  best.fallback_used = true;
  best.row = detail::security_choice(t.rows, row_prefs, [&](std::size_t r) {
    double w = -std::numeric_limits<double>::infinity();
    for (std::size_t c = 0; c < t.cols; ++c) w = std::max(w, t.gi(r, c));
    return w;
  });
  best.col = detail::security_choice(t.cols, col_prefs, [&](std::size_t c) {
    double w = -std::numeric_limits<double>::infinity();
    for (std::size_t r = 0; r < t.rows; ++r) w = std::max(w, t.gj(r, c));
    return w;
  });
  return best;
}

inline NashSolution nash_solve(const CostTable & t)
{
  return nash_solve(t, detail::neutral_prefs(t.rows), detail::neutral_prefs(t.cols));
}

}  // namespace lanegame

#endif  // LANEGAME__NASH_HPP_
