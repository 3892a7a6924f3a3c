#pragma once

#include <optional>
#include <vector>

#include "hftkin/boltzmann.hpp"
#include "hftkin/config.hpp"
#include "hftkin/estimators.hpp"
#include "hftkin/langevin.hpp"
#include "hftkin/oracle.hpp"

namespace hftkin {

/// What to collect from an ensemble of micro-engine replicas. cfg.tick_budget
/// is per replica.
struct MicroStudy {
  SimConfig cfg;
  int replicas = 1;
  int workers = 1;
  int k_max = 10;
  double book_bin = 0.0;  // 0 disables the book profile
  double book_half_range = 0.0;
  BookReference book_ref = BookReference::cm;
  int tick_msd_max_lag = 0;  // 0 disables
  double rt_msd_step = 0.0;  // 0 disables
  int rt_msd_max_lag = 0;
  bool keep_samples = false;
};

struct StudyResult {
  MovementCollector movement{1};
  std::optional<BookProfileCollector> book;
  std::optional<TickMsdCollector> tick_msd;
  std::optional<RealTimeMsdCollector> rt_msd;
  std::optional<ReplicaSamples> samples;
};

StudyResult run_micro_study(const MicroStudy& study);

/// Same collectors fed by the mean-field simulator (book options ignored).
struct MeanfieldStudy {
  LangevinParams params;
  std::int64_t ticks = 100000;  // per replica
  std::uint64_t seed = 1;
  int replicas = 1;
  int workers = 1;
  int k_max = 10;
  int tick_msd_max_lag = 0;
  double rt_msd_step = 0.0;
  int rt_msd_max_lag = 0;
  bool keep_samples = false;
};

StudyResult run_meanfield_study(const MeanfieldStudy& study);

/// OLS line through (lag * step, MSD[lag]) for lag * step in [lo, hi].
LineFit msd_line(const MsdAccumulator& acc, double step, double lo, double hi);

/// (lag * step, MSD[lag]) for every lag.
std::pair<std::vector<double>, std::vector<double>> msd_curve(const MsdAccumulator& acc, double step);

/// L1 distance of the ask-side book estimate from the closed-form profile.
double book_l1(const BookProfileCollector& book, const SpreadLaw& law);

/// Solver settings for a steady state from the gaussian start.
struct SteadyStudy {
  SpreadLaw law = SpreadLaw::point_mass(1.0);
  int n_traders = 800;
  double sigma = 1.0;
  double h = 1.0 / 64;
  int bins = 32;
  double tolerance = 1e-5;
  double max_time = 10.0;
};

SteadyResult run_steady(const SteadyStudy& s);

/// L1 of f_A from the steady grid against the closed-form book.
double steady_book_l1(const ProfileGrid& g, const SpreadLaw& law);

/// Relative L1 of a point-mass steady profile against the finite-N edge form
/// over |r| in [L/2 - w, L/2 + w], w = 2 L_rho / sqrt(2N).
double nlo_window_l1(const ProfileGrid& g, oracle::NloForm form);

}  // namespace hftkin
