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

#ifndef LANEGAME__AGGRESSIVENESS_HPP_
#define LANEGAME__AGGRESSIVENESS_HPP_

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace lanegame
{

/// Driving aggressiveness kappa in [0, 1].
class Aggressiveness
{
public:
  constexpr Aggressiveness() = default;
  constexpr explicit Aggressiveness(double kappa) : kappa_(std::clamp(kappa, 0.0, 1.0)) {}
  constexpr double value() const { return kappa_; }
  constexpr bool operator==(const Aggressiveness &) const = default;

private:
  double kappa_ = 0.5;
};

enum class MembershipShape { z_shaped, triangular, s_shaped };

inline const char * to_string(MembershipShape s)
{
  switch (s) {
    case MembershipShape::z_shaped:
      return "z";
    case MembershipShape::triangular:
      return "tri";
    case MembershipShape::s_shaped:
      return "s";
  }
  return "?";
}

inline MembershipShape membership_shape_from_string(const std::string & s)
{
  if (s == "z") return MembershipShape::z_shaped;
  if (s == "tri") return MembershipShape::triangular;
  if (s == "s") return MembershipShape::s_shaped;
  throw std::invalid_argument("unknown membership shape '" + s + "' (expected z, tri or s)");
}

/// Z and S sets are linear shoulders (1 -> 0 and 0 -> 1 between the two
/// breakpoints), so they add up to one with a neighbouring triangle that
/// shares the breakpoints. Triangle apex sits at the middle breakpoint.
struct MembershipFunction
{
  MembershipShape shape = MembershipShape::triangular;
  std::vector<double> breakpoints;

  static MembershipFunction z(double a, double b) { return {MembershipShape::z_shaped, {a, b}}; }
  static MembershipFunction s(double a, double b) { return {MembershipShape::s_shaped, {a, b}}; }
  static MembershipFunction tri(double a, double b, double c)
  {
    return {MembershipShape::triangular, {a, b, c}};
  }

  void validate() const
  {
    const std::size_t expected = shape == MembershipShape::triangular ? 3 : 2;
    if (breakpoints.size() != expected) {
      throw std::invalid_argument(
        std::string("membership '") + to_string(shape) + "' needs " + std::to_string(expected) +
        " breakpoints");
    }
    for (std::size_t i = 1; i < breakpoints.size(); ++i) {
      if (!(breakpoints[i] > breakpoints[i - 1])) {
        throw std::invalid_argument("membership breakpoints must be strictly increasing");
      }
    }
  }

  double operator()(double x) const
  {
    switch (shape) {
      case MembershipShape::z_shaped:
        return 1.0 - ramp(x, breakpoints[0], breakpoints[1]);
      case MembershipShape::s_shaped:
        return ramp(x, breakpoints[0], breakpoints[1]);
      case MembershipShape::triangular: {
        const double a = breakpoints[0];
        const double b = breakpoints[1];
        const double c = breakpoints[2];
        if (x <= a || x >= c) return 0.0;
        if (x <= b) return (x - a) / (b - a);
        return (c - x) / (c - b);
      }
    }
    return 0.0;
  }

  bool operator==(const MembershipFunction &) const = default;

private:
  static double ramp(double x, double a, double b)
  {
    if (x <= a) return 0.0;
    if (x >= b) return 1.0;
    return (x - a) / (b - a);
  }
};

/// Linguistic labels: very small .. very large.
enum class InputLabel : std::size_t { VS = 0, S, M, L, VL };
/// Output labels: conservative, normal, aggressive.
enum class AggLabel : std::size_t { C = 0, N = 1, A = 2 };

using FiveSets = std::array<MembershipFunction, 5>;
using OutputSets = std::array<MembershipFunction, 3>;
/// rules[velocity label][yaw-rate label]
using RuleTable = std::array<std::array<AggLabel, 5>, 5>;
using Degrees5 = std::array<double, 5>;
using Activations = std::array<double, 3>;

inline constexpr RuleTable kAggressivenessRules = {{
  {AggLabel::C, AggLabel::C, AggLabel::C, AggLabel::N, AggLabel::N},
  {AggLabel::C, AggLabel::C, AggLabel::N, AggLabel::N, AggLabel::A},
  {AggLabel::C, AggLabel::N, AggLabel::N, AggLabel::A, AggLabel::A},
  {AggLabel::N, AggLabel::N, AggLabel::A, AggLabel::A, AggLabel::A},
  {AggLabel::N, AggLabel::A, AggLabel::A, AggLabel::A, AggLabel::A},
}};

struct FuzzyConfig
{
  double velocity_max = 20.0;  // [m/s]
  double yaw_rate_max = 0.5;   // [rad/s]
  FiveSets velocity_sets;
  FiveSets yaw_rate_sets;
  OutputSets output_sets;
  RuleTable rules = kAggressivenessRules;

  static FuzzyConfig defaults()
  {
    using MF = MembershipFunction;
    FuzzyConfig c;
    c.velocity_sets = {
      MF::z(2, 6), MF::tri(2, 6, 10), MF::tri(6, 10, 14), MF::tri(10, 14, 18), MF::s(14, 18)};
    c.yaw_rate_sets = {
      MF::z(0.05, 0.15), MF::tri(0.05, 0.15, 0.25), MF::tri(0.15, 0.25, 0.35),
      MF::tri(0.25, 0.35, 0.45), MF::s(0.35, 0.45)};
    c.output_sets = {MF::z(0.2, 0.45), MF::tri(0.3, 0.5, 0.7), MF::s(0.55, 0.8)};
    return c;
  }

  void validate() const
  {
    if (!(velocity_max > 0.0) || !(yaw_rate_max > 0.0)) {
      throw std::invalid_argument("fuzzy universes must have positive maxima");
    }
    for (const auto & m : velocity_sets) m.validate();
    for (const auto & m : yaw_rate_sets) m.validate();
    for (const auto & m : output_sets) m.validate();
  }

  bool operator==(const FuzzyConfig &) const = default;
};

/// Degrees of membership of x (clamped to [0, universe_max]) in each set.
inline Degrees5 membership_eval(const FiveSets & sets, double x, double universe_max)
{
  const double xc = std::clamp(x, 0.0, universe_max);
  Degrees5 d{};
  for (std::size_t i = 0; i < sets.size(); ++i) {
    d[i] = std::clamp(sets[i](xc), 0.0, 1.0);
  }
  return d;
}

/// Rule firing is min(v, r). Rules sharing a consequent are accumulated
/// with the bounded sum min(1, a + b) rather than max: with max, a label
/// whose support crosses two input sets dips to 0.5 at the crossover and
/// the clipped centroid wobbles, breaking monotonicity of the map.
inline Activations rule_infer(const Degrees5 & v_deg, const Degrees5 & r_deg, const RuleTable & table)
{
  Activations act{};
  for (std::size_t i = 0; i < 5; ++i) {
    for (std::size_t j = 0; j < 5; ++j) {
      const double firing = std::min(v_deg[i], r_deg[j]);
      auto & slot = act[static_cast<std::size_t>(table[i][j])];
      slot = std::min(1.0, slot + firing);
    }
  }
  return act;
}

/// Fuzzy aggressiveness estimator; immutable after construction.
class FuzzyEstimator
{
public:
  static constexpr std::size_t kCentroidSamples = 2001;

  FuzzyEstimator() : FuzzyEstimator(FuzzyConfig::defaults()) {}
  explicit FuzzyEstimator(FuzzyConfig config) : config_(std::move(config)) { config_.validate(); }

  const FuzzyConfig & config() const { return config_; }

  /// Centroid of the union of output sets clipped at their activations.
  /// Empty when every activation is zero.
  std::optional<double> defuzzify(const Activations & act) const
  {
    const double h = 1.0 / static_cast<double>(kCentroidSamples - 1);
    double num = 0.0;
    double den = 0.0;
    for (std::size_t k = 0; k < kCentroidSamples; ++k) {
      const double x = static_cast<double>(k) * h;
      double mu = 0.0;
      for (std::size_t l = 0; l < 3; ++l) {
        mu = std::max(mu, std::min(act[l], config_.output_sets[l](x)));
      }
      const double w = (k == 0 || k + 1 == kCentroidSamples) ? 0.5 : 1.0;
      num += w * mu * x;
      den += w * mu;
    }
    if (den <= 0.0) {
      return std::nullopt;
    }
    return std::clamp(num / den, 0.0, 1.0);
  }

  /// Estimate kappa from speed and yaw rate (sign of the yaw rate is ignored).
  /// `previous` is returned when no rule fires.
  Aggressiveness estimate(
    double v, double yaw_rate, Aggressiveness previous = Aggressiveness{0.5}) const
  {
    const double r = std::abs(yaw_rate);
    if (v >= config_.velocity_max || r >= config_.yaw_rate_max) {
      return Aggressiveness{1.0};
    }
    const auto v_deg = membership_eval(config_.velocity_sets, v, config_.velocity_max);
    const auto r_deg = membership_eval(config_.yaw_rate_sets, r, config_.yaw_rate_max);
    const auto kappa = defuzzify(rule_infer(v_deg, r_deg, config_.rules));
    return kappa ? Aggressiveness{*kappa} : previous;
  }

private:
  FuzzyConfig config_;
};

}  // namespace lanegame

#endif  // LANEGAME__AGGRESSIVENESS_HPP_
