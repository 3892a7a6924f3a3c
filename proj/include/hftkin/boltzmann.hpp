#pragma once

#include <cstdint>
#include <optional>

#include <Eigen/Dense>

#include "hftkin/spread_law.hpp"

namespace hftkin {

struct SpreadBins {
  Eigen::VectorXd L;       // representative spread of each bin
  Eigen::VectorXd weight;  // rho_k, sums to 1
};

/// Equal-mass quantile bins, each represented by its conditional mean.
/// A point mass gives one bin.
SpreadBins discretize(const SpreadLaw& law, int bins = 32);

/// phi(m, k) = phi^{L_k}(r_m) on cell centers r_m = r_min + (m + 1/2) h.
struct ProfileGrid {
  double r_min = 0.0;
  double h = 0.0;
  SpreadBins bins;
  Eigen::MatrixXd phi;
  int n_traders = 0;  // 0 switches the collision term off
  double sigma = 1.0;

  int cells() const { return static_cast<int>(phi.rows()); }
  int nbins() const { return static_cast<int>(phi.cols()); }
  double r(int m) const { return r_min + (m + 0.5) * h; }
  Eigen::VectorXd r_grid() const;
  double mass(int k) const { return phi.col(k).sum() * h; }
};

/// Grid on [-L_cut/2, L_cut/2] with L_cut defaulting to 3 max_k L_k.
ProfileGrid make_grid(const SpreadLaw& law, int n_traders, double sigma, double h, int bins = 32,
                      std::optional<double> l_cut = std::nullopt);

enum class InitialGuess { tent, gaussian, uniform };

/// Fills every column and normalizes it to unit mass.
void set_initial(ProfileGrid& g, InitialGuess guess);

/// Unit-mass normalization of every column.
void normalize(ProfileGrid& g);

enum class SlopeScheme {
  central_kink,  // central difference; max one-sided magnitude where the one-sided slopes disagree in sign
  upwind,        // max(D-phi, -D+phi, 0): monotone, used by the time stepper
};

/// |d phi_k / dr| on the grid (zero-gradient ghosts at both ends).
Eigen::MatrixXd slope_magnitude(const ProfileGrid& g, SlopeScheme scheme);

/// Pairwise flux (sigma^2/2)[|d phi^L(r)| phi^{L'}(r') + phi^L(r) |d phi^{L'}(r')|],
/// r' = r - s (L + L')/2, with L = L_k, L' = L_{k2}. Off-grid values are
/// interpolated linearly; points outside the grid contribute 0.
double collision_flux(const ProfileGrid& g, int k, int k2, int s, double r,
                      SlopeScheme scheme = SlopeScheme::central_kink);

struct StepReport {
  double dt = 0.0;
  double dt_limit = 0.0;           // stability bound at the pre-step state
  double max_mass_change = 0.0;    // max_k |mass after - mass before|, before clipping
  double clipped_mass = 0.0;       // total negative mass removed
  std::int64_t clipped_cells = 0;
  double residual = 0.0;           // sum_k rho_k int |d phi_k/dt| dr
};

/// Largest explicit step keeping the update monotone at the current state.
double stable_dt(const ProfileGrid& g);

/// One explicit Euler step. dt <= 0 selects safety * stable_dt. Throws
/// StabilityError if dt exceeds the bound.
StepReport step(ProfileGrid& g, double dt, double safety = 0.9);

struct SteadyResult {
  ProfileGrid grid;
  bool converged = false;
  double time = 0.0;
  std::int64_t steps = 0;
  double residual = 0.0;
  double max_mass_change = 0.0;
  double clipped_mass = 0.0;
  std::int64_t clip_events = 0;
};

/// Steps until the weighted L1 norm of d phi/dt drops below tolerance, or
/// max_time elapses (then converged = false and the last iterate is returned).
SteadyResult solve_steady(ProfileGrid grid0, double tolerance, double max_time);

/// f_A(r_m) = sum_k rho_k phi_k(r_m - L_k/2) and f_B(r_m) = sum_k rho_k phi_k(r_m + L_k/2).
Eigen::VectorXd ask_book(const ProfileGrid& g);
Eigen::VectorXd bid_book(const ProfileGrid& g);

/// Linear interpolation of a column-like array sampled at cell centers;
/// zero outside the grid.
double interpolate(const ProfileGrid& g, const Eigen::Ref<const Eigen::VectorXd>& f, double x);

}  // namespace hftkin
