#pragma once

#include <cstdint>
#include <optional>
#include <utility>

#include "hftkin/spread_law.hpp"

namespace hftkin {

/// Full parameterization of a micro-engine run. Unset optional fields take
/// their defaults in resolve().
struct SimConfig {
  int n_traders = 100;
  double trend_strength = 0.0;   // c
  double trend_threshold = 1.0;  // dp*
  double noise_std = 1.0;        // sigma
  SpreadLaw spread_law = SpreadLaw::gamma(1.0);
  std::optional<double> dt;                 // default 0.01 L*^2 / (sigma^2 N)
  std::optional<double> warmup;             // default 10 L*^2 / sigma^2
  std::optional<double> sampling_interval;  // default tau*/2
  std::int64_t tick_budget = 100000;
  std::uint64_t seed = 1;
  // Starvation guard: abort when this many consecutive steps pass without a trade.
  std::int64_t max_idle_steps = 50'000'000;

  friend bool operator==(const SimConfig&, const SimConfig&) = default;
};

/// Throws ConfigError when an invariant is violated.
void validate(const SimConfig& cfg);

/// Copy with every optional field filled in.
SimConfig resolve(const SimConfig& cfg);

/// Time unit L*^2 / (sigma^2 N).
double time_unit(const SpreadLaw& law, int n_traders, double sigma);

struct DimensionlessParams {
  double c_tilde = 0.0;
  std::optional<double> dp_tilde;  // undefined when c = 0
  double tau_star = 0.0;
  double l_rho_sq = 0.0;
};

DimensionlessParams dimensionless(const SimConfig& cfg);

struct TrendParams {
  double c = 0.0;
  double dp_star = 1.0;
};

/// Solve (c, dp*) from (c~, dp~*). c~ = 0 with a requested dp~* throws
/// DomainError; c~ = 0 alone yields c = 0 and a placeholder dp* of L*.
TrendParams trend_from_dimensionless(double c_tilde, std::optional<double> dp_tilde, const SpreadLaw& law,
                                     int n_traders, double sigma);

/// cfg with c and dp* set from dimensionless targets.
SimConfig with_dimensionless_trend(SimConfig cfg, double c_tilde, std::optional<double> dp_tilde);

}  // namespace hftkin
