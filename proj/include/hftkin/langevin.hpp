#pragma once

#include <cstdint>
#include <vector>

#include "hftkin/oracle.hpp"
#include "hftkin/random.hpp"
#include "hftkin/spread_law.hpp"
#include "hftkin/state.hpp"

namespace hftkin {

enum class TrendVariant { hyperbolic, ema, linear };

struct LangevinParams {
  double c = 0.0;
  double dp_star = 1.0;
  double sigma = 1.0;
  int n_traders = 100;
  SpreadLaw law = SpreadLaw::gamma(1.0);
  TrendVariant variant = TrendVariant::hyperbolic;
  double tau_ema = 1.0;  // ticks, EMA variant only
  oracle::IntervalMode interval_mode = oracle::IntervalMode::plain;
  // Derived; filled by make_langevin_params.
  double tau_star = 0.0;
  double l_rho_sq = 0.0;
};

LangevinParams make_langevin_params(double c, double dp_star, double sigma, int n_traders, const SpreadLaw& law,
                                    TrendVariant variant = TrendVariant::hyperbolic, double tau_ema = 1.0,
                                    oracle::IntervalMode mode = oracle::IntervalMode::plain);

struct LangevinState {
  double dp = 0.0;
  double xi_prev = 0.0;
  double ema = 0.0;
  double p = 0.0;
  double t = 0.0;
  std::int64_t tick = 0;
};

struct NoiseDraw {
  double tau = 0.0;
  double xi = 0.0;
  double mu = 0.0;
  double nu = 0.0;
};

/// Plain: Exp(mean tau*). Improved: max of two Exp(mean 2 tau*/3), whose CCDF
/// is 1 - (1 - exp(-3 tau / 2 tau*))^2.
double sample_tau(double tau_star, oracle::IntervalMode mode, Xoshiro256pp& rng);

/// CM jump: 0 for a point mass, otherwise (L' - L)/2 with L, L' drawn
/// independently from the collision-weighted law rho(L)/L^2.
double sample_nu(const SpreadLaw& law, Xoshiro256pp& rng);

NoiseDraw draw_noise(const LangevinParams& prm, Xoshiro256pp& rng);

/// The trend signal fed to the drift: dp (hyperbolic, linear) or the EMA.
double trend_signal(const LangevinState& s, const LangevinParams& prm);

/// Advances one tick; returns the new movement. The EMA (when used) is
/// updated with the new movement.
double tick(LangevinState& s, const LangevinParams& prm, const NoiseDraw& d);

/// Linear-variant friction 1 - c tau / dp*.
double friction_coefficient(const LangevinParams& prm, double tau);

/// Tick-time simulator; xi[-1] starts as a fresh normal and the first tick is
/// not reported.
class LangevinSimulator {
 public:
  LangevinSimulator(const LangevinParams& prm, std::uint64_t seed, std::uint64_t replica = 0);

  /// Advance one tick, returning the row of the tick just completed (with its
  /// interval to the next tick).
  TickRow step();
  const LangevinState& state() const { return state_; }
  const NoiseDraw& last_draw() const { return last_; }
  /// sqrt(L_rho^2/4N) (xi[T] - xi[T-1]) of the last step.
  double last_zigzag() const { return last_zigzag_; }

 private:
  LangevinParams prm_;
  Xoshiro256pp rng_;
  LangevinState state_;
  NoiseDraw last_;
  double last_zigzag_ = 0.0;
};

/// Feeds t_max ticks to the collectors.
void run_meanfield(const LangevinParams& prm, std::int64_t t_max, std::uint64_t seed,
                   const std::vector<Collector*>& collectors, std::uint64_t replica = 0);

/// Independent replicas (seed, replica r), merged in replica order.
void run_meanfield_ensemble(const LangevinParams& prm, std::int64_t t_max, std::uint64_t seed, int replicas,
                            int workers, const std::vector<Collector*>& prototypes);

}  // namespace hftkin
