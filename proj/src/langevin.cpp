#include "hftkin/langevin.hpp"

#include <cmath>

#include <boost/random/exponential_distribution.hpp>
#include <boost/random/normal_distribution.hpp>

#include "hftkin/errors.hpp"

namespace hftkin {

LangevinParams make_langevin_params(double c, double dp_star, double sigma, int n_traders, const SpreadLaw& law,
                                    TrendVariant variant, double tau_ema, oracle::IntervalMode mode) {
  if (c != 0.0 && !(dp_star > 0.0)) throw ConfigError("langevin: dp* must be positive when c != 0");
  if (variant == TrendVariant::ema && !(tau_ema >= 0.0)) throw ConfigError("langevin: tau_ema must be >= 0");
  const auto k = derived_constants(law, n_traders, sigma);
  LangevinParams p;
  p.c = c;
  p.dp_star = dp_star;
  p.sigma = sigma;
  p.n_traders = n_traders;
  p.law = law;
  p.variant = variant;
  p.tau_ema = tau_ema;
  p.interval_mode = mode;
  p.tau_star = k.tau_star;
  p.l_rho_sq = k.l_rho_sq;
  return p;
}

double sample_tau(double tau_star, oracle::IntervalMode mode, Xoshiro256pp& rng) {
  if (mode == oracle::IntervalMode::plain) {
    boost::random::exponential_distribution<double> e(1.0 / tau_star);
    return e(rng);
  }
  boost::random::exponential_distribution<double> e(1.5 / tau_star);
  const double a = e(rng);
  const double b = e(rng);
  return std::max(a, b);
}

double sample_nu(const SpreadLaw& law, Xoshiro256pp& rng) {
  if (law.is_point_mass()) return 0.0;
  const double l1 = sample_collision_weighted_spread(law, rng);
  const double l2 = sample_collision_weighted_spread(law, rng);
  return 0.5 * (l2 - l1);
}

NoiseDraw draw_noise(const LangevinParams& prm, Xoshiro256pp& rng) {
  boost::random::normal_distribution<double> normal;
  NoiseDraw d;
  d.tau = sample_tau(prm.tau_star, prm.interval_mode, rng);
  d.xi = normal(rng);
  d.mu = normal(rng);
  d.nu = sample_nu(prm.law, rng);
  return d;
}

double trend_signal(const LangevinState& s, const LangevinParams& prm) {
  return prm.variant == TrendVariant::ema ? s.ema : s.dp;
}

double friction_coefficient(const LangevinParams& prm, double tau) { return 1.0 - prm.c * tau / prm.dp_star; }

double tick(LangevinState& s, const LangevinParams& prm, const NoiseDraw& d) {
  const double n = prm.n_traders;
  double trend = 0.0;
  if (prm.c != 0.0) {
    const double x = trend_signal(s, prm) / prm.dp_star;
    trend = prm.c * d.tau * (prm.variant == TrendVariant::linear ? x : std::tanh(x));
  }
  const double zigzag = std::sqrt(prm.l_rho_sq / (4.0 * n)) * (d.xi - s.xi_prev);
  const double diffusion = std::sqrt(prm.sigma * prm.sigma * d.tau / n) * d.mu;
  const double next = trend + zigzag + diffusion + d.nu / n;

  s.dp = next;
  s.p += next;
  s.t += d.tau;
  s.xi_prev = d.xi;
  ++s.tick;
  if (prm.variant == TrendVariant::ema) {
    const double lambda = prm.tau_ema > 0.0 ? std::exp(-1.0 / prm.tau_ema) : 0.0;
    s.ema = (1.0 - lambda) * next + lambda * s.ema;
  }
  return next;
}

LangevinSimulator::LangevinSimulator(const LangevinParams& prm, std::uint64_t seed, std::uint64_t replica)
    : prm_(prm), rng_(make_stream(seed, StreamTag::langevin, replica)) {
  boost::random::normal_distribution<double> normal;
  state_.xi_prev = normal(rng_);
  step();
}

TickRow LangevinSimulator::step() {
  last_ = draw_noise(prm_, rng_);
  TickRow row{state_.tick, state_.t, state_.p, state_.dp, last_.tau, -1, -1};
  last_zigzag_ = std::sqrt(prm_.l_rho_sq / (4.0 * prm_.n_traders)) * (last_.xi - state_.xi_prev);
  tick(state_, prm_, last_);
  return row;
}

void run_meanfield(const LangevinParams& prm, std::int64_t t_max, std::uint64_t seed,
                   const std::vector<Collector*>& collectors, std::uint64_t replica) {
  LangevinSimulator sim(prm, seed, replica);
  for (std::int64_t k = 0; k < t_max; ++k) {
    const TickRow row = sim.step();
    for (auto* c : collectors) c->on_tick(row);
  }
}

void run_meanfield_ensemble(const LangevinParams& prm, std::int64_t t_max, std::uint64_t seed, int replicas,
                            int workers, const std::vector<Collector*>& prototypes) {
  run_replicated(replicas, workers, prototypes, [&](int r, const std::vector<Collector*>& sinks) {
    run_meanfield(prm, t_max, seed, sinks, static_cast<std::uint64_t>(r));
  });
}

}  // namespace hftkin
