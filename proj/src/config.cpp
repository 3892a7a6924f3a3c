#include "hftkin/config.hpp"

#include <cmath>

#include "hftkin/errors.hpp"

namespace hftkin {

void validate(const SimConfig& cfg) {
  if (cfg.n_traders < 2) throw ConfigError("config: n_traders must be >= 2");
  if (!(cfg.noise_std > 0.0)) throw ConfigError("config: noise_std must be positive");
  if (cfg.dt && !(*cfg.dt > 0.0)) throw ConfigError("config: dt must be positive");
  if (cfg.warmup && !(*cfg.warmup >= 0.0)) throw ConfigError("config: warmup must be non-negative");
  if (cfg.sampling_interval && !(*cfg.sampling_interval > 0.0))
    throw ConfigError("config: sampling_interval must be positive");
  if (cfg.trend_strength != 0.0 && !(cfg.trend_threshold > 0.0))
    throw ConfigError("config: trend_threshold must be positive when trend_strength != 0");
  if (!std::isfinite(cfg.trend_strength)) throw ConfigError("config: trend_strength must be finite");
  if (cfg.tick_budget < 1) throw ConfigError("config: tick_budget must be >= 1");
  if (cfg.max_idle_steps < 1) throw ConfigError("config: max_idle_steps must be >= 1");
  validate(cfg.spread_law);
}

double time_unit(const SpreadLaw& law, int n_traders, double sigma) {
  return law.l_star * law.l_star / (sigma * sigma * n_traders);
}

SimConfig resolve(const SimConfig& cfg) {
  validate(cfg);
  SimConfig out = cfg;
  const double l2 = cfg.spread_law.l_star * cfg.spread_law.l_star;
  const double s2 = cfg.noise_std * cfg.noise_std;
  if (!out.dt) out.dt = 0.01 * time_unit(cfg.spread_law, cfg.n_traders, cfg.noise_std);
  if (!out.warmup) out.warmup = 10.0 * l2 / s2;
  if (!out.sampling_interval) {
    const auto k = derived_constants(cfg.spread_law, cfg.n_traders, cfg.noise_std);
    out.sampling_interval = 0.5 * k.tau_star;
  }
  return out;
}

DimensionlessParams dimensionless(const SimConfig& cfg) {
  validate(cfg);
  const auto k = derived_constants(cfg.spread_law, cfg.n_traders, cfg.noise_std);
  DimensionlessParams d;
  d.tau_star = k.tau_star;
  d.l_rho_sq = k.l_rho_sq;
  const double s2 = cfg.noise_std * cfg.noise_std;
  d.c_tilde = cfg.trend_strength * std::sqrt(k.l_rho_sq) / (s2 * std::sqrt(2.0 * cfg.n_traders));
  if (cfg.trend_strength != 0.0) d.dp_tilde = cfg.trend_threshold / (cfg.trend_strength * k.tau_star);
  return d;
}

TrendParams trend_from_dimensionless(double c_tilde, std::optional<double> dp_tilde, const SpreadLaw& law,
                                     int n_traders, double sigma) {
  const auto k = derived_constants(law, n_traders, sigma);
  TrendParams t;
  if (c_tilde == 0.0) {
    if (dp_tilde) throw DomainError("dp~* is undefined when c~ = 0");
    t.dp_star = law.l_star;
    return t;
  }
  if (!dp_tilde) throw ConfigError("dp~* is required when c~ != 0");
  t.c = c_tilde * sigma * sigma * std::sqrt(2.0 * n_traders) / std::sqrt(k.l_rho_sq);
  t.dp_star = *dp_tilde * t.c * k.tau_star;
  if (!(t.dp_star > 0.0)) throw ConfigError("c~ and dp~* must give a positive dp*");
  return t;
}

SimConfig with_dimensionless_trend(SimConfig cfg, double c_tilde, std::optional<double> dp_tilde) {
  const auto t = trend_from_dimensionless(c_tilde, dp_tilde, cfg.spread_law, cfg.n_traders, cfg.noise_std);
  cfg.trend_strength = t.c;
  cfg.trend_threshold = t.dp_star;
  return cfg;
}

}  // namespace hftkin
