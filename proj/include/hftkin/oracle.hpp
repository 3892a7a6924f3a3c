#pragma once

#include <cmath>
#include <numbers>

#include <Eigen/Dense>

#include "hftkin/spread_law.hpp"

namespace hftkin::oracle {

// ---- order-book profiles -----------------------------------------------------

/// LO relative-price profile of a trader with spread L.
template <class T>
T tent_profile(double L, T r) {
  using std::abs, std::max;
  return 4.0 / (L * L) * max(T(0.5 * L) - abs(r), T(0.0));
}

/// Gamma(alpha = 3) ask-book shape, f_A(r) = psi(r/L*)/L*.
template <class T>
T psi(T x) {
  using std::exp, std::sinh;
  if (x <= T(0)) return T(0);
  return 4.0 / 3.0 * exp(-1.5 * x) * ((2.0 + x) * sinh(0.5 * x) - 0.5 * x * exp(-0.5 * x));
}

/// Ask-side average book f_A(r): closed forms for point-mass and the standard
/// gamma law, quadrature for any other law.
double book_profile(const SpreadLaw& law, double r);

/// Always integrates the tent superposition over the spread law.
double book_profile_quadrature(const SpreadLaw& law, double r);

inline double bid_book_profile(const SpreadLaw& law, double r) { return book_profile(law, -r); }

Eigen::ArrayXd book_profile(const SpreadLaw& law, const Eigen::ArrayXd& r);
Eigen::ArrayXd tent_profile(double L, const Eigen::ArrayXd& r);

enum class NloForm {
  derived,  // boundary-layer Gaussian exp(-2N x^2 / L_rho^2), consistent with the erfc term
  printed,  // exp(-N x^2 / L_rho^2)
};

/// Finite-N profile with smoothed edges; x = |r| - L/2.
double nlo_profile(double L, double r, int N, double l_rho_sq, NloForm form = NloForm::derived);

// ---- intervals ---------------------------------------------------------------------

enum class IntervalMode { plain, improved };

/// P(tau' >= tau): plain exp(-tau/tau*); improved 1 - (1 - exp(-3 tau / 2 tau*))^2.
double interval_ccdf(double tau, double tau_star, IntervalMode mode);
double interval_pdf(double tau, double tau_star, IntervalMode mode);
/// Decay rate of the CCDF tail in units of 1/tau*: 1 (plain) or 3/2 (improved).
double interval_tail_factor(IntervalMode mode);

// ---- weak-trend macroscopics ------------------------------------------------------------

/// D(N) = sigma^2/(2N) (1 + 2 alpha2 / L_rho^2).
double diffusion_coefficient(int N, double sigma, double l_rho_sq, double alpha2);
double diffusion_coefficient(const SpreadLaw& law, int N, double sigma);

enum class MsdMode { real_time, tick };

/// real_time: 2 D t. tick: L_rho^2/(2N) + 2 D tau* K.
double msd_theory(MsdMode mode, double x, const SpreadLaw& law, int N, double sigma);

/// Autocorrelation of the zigzag increments: 1, -1/2, then 0.
double zigzag_autocorr(int K);
/// Probability that consecutive zigzag movements share a sign.
inline constexpr double same_sign_prob() { return 1.0 / 3.0; }
inline constexpr double flip_prob() { return 2.0 / 3.0; }

/// N(0, L_rho^2 / 2N).
double dp_gaussian_pdf(double dp, double l_rho_sq, int N);

/// Two-sided Laplace density exp(-|dp|/kappa) / (2 kappa).
double dp_exponential_tail(double dp, double kappa);

/// Strong-trend decay length: c tau* (plain) or 2 c tau* / 3 (improved).
double strong_trend_kappa(double c, double tau_star, IntervalMode mode);

/// CCDF of |dp| for exponential tails whose decay lengths follow
/// P(kappa) ~ kappa^(-alpha-1) on [kappa_min, inf). Normalized to 1 at 0;
/// decays as |dp|^(-alpha).
double powerlaw_superposition_ccdf(double dp, double alpha, double kappa_min);

}  // namespace hftkin::oracle
