#include "hftkin/oracle.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/special_functions/gamma.hpp>

#include "hftkin/errors.hpp"

namespace hftkin::oracle {

namespace {

template <class F>
double integrate(F f, double a, double b) {
  if (b <= a) return 0.0;
  return boost::math::quadrature::gauss_kronrod<double, 61>::integrate(f, a, b, 15, 1e-13);
}

}  // namespace

double book_profile_quadrature(const SpreadLaw& law, double r) {
  if (r <= 0.0) return 0.0;
  // tent(L, r - L/2) = 4(L - r)/L^2 on (r, 2r], 4r/L^2 beyond 2r
  if (law.is_point_mass()) return tent_profile(law.l_star, r - 0.5 * law.l_star);
  const double lo = std::max(r, support_min(law));
  const double top = support_max(law, 1e-16);
  const double kink = std::min(2.0 * r, top);
  double acc = 0.0;
  if (kink > lo) acc += integrate([&](double l) { return density(law, l) * 4.0 * (l - r) / (l * l); }, lo, kink);
  const double lo2 = std::max(kink, lo);
  if (top > lo2) acc += integrate([&](double l) { return density(law, l) * 4.0 * r / (l * l); }, lo2, top);
  return acc;
}

double book_profile(const SpreadLaw& law, double r) {
  if (law.is_point_mass()) return tent_profile(law.l_star, r - 0.5 * law.l_star);
  if (law.is_standard_gamma()) return psi(r / law.l_star) / law.l_star;
  return book_profile_quadrature(law, r);
}

Eigen::ArrayXd book_profile(const SpreadLaw& law, const Eigen::ArrayXd& r) {
  return r.unaryExpr([&](double x) { return book_profile(law, x); });
}

Eigen::ArrayXd tent_profile(double L, const Eigen::ArrayXd& r) {
  return r.unaryExpr([L](double x) { return tent_profile(L, x); });
}

double nlo_profile(double L, double r, int N, double l_rho_sq, NloForm form) {
  if (N < 1) throw DomainError("nlo_profile: N must be >= 1");
  const double x = std::abs(r) - 0.5 * L;
  const double l_rho = std::sqrt(l_rho_sq);
  const double k = form == NloForm::derived ? 2.0 * N : static_cast<double>(N);
  const double gauss = std::exp(-k * x * x / l_rho_sq) / (2.0 * std::sqrt(2.0 * N * std::numbers::pi / l_rho_sq));
  const double ramp = 0.5 * x * std::erfc(std::sqrt(2.0 * N) * x / l_rho);
  return 4.0 / (L * L) * (gauss - ramp);
}

double interval_ccdf(double tau, double tau_star, IntervalMode mode) {
  if (tau < 0.0) throw DomainError("interval_ccdf: tau < 0");
  if (mode == IntervalMode::plain) return std::exp(-tau / tau_star);
  const double u = -std::expm1(-1.5 * tau / tau_star);
  return 1.0 - u * u;
}

double interval_pdf(double tau, double tau_star, IntervalMode mode) {
  if (tau < 0.0) return 0.0;
  if (mode == IntervalMode::plain) return std::exp(-tau / tau_star) / tau_star;
  const double e = std::exp(-1.5 * tau / tau_star);
  return 3.0 / tau_star * e * (1.0 - e);
}

double interval_tail_factor(IntervalMode mode) { return mode == IntervalMode::plain ? 1.0 : 1.5; }

double diffusion_coefficient(int N, double sigma, double l_rho_sq, double alpha2) {
  return sigma * sigma / (2.0 * N) * (1.0 + 2.0 * alpha2 / l_rho_sq);
}

double diffusion_coefficient(const SpreadLaw& law, int N, double sigma) {
  const auto k = derived_constants(law, N, sigma);
  return diffusion_coefficient(N, sigma, k.l_rho_sq, k.alpha2);
}

double msd_theory(MsdMode mode, double x, const SpreadLaw& law, int N, double sigma) {
  const auto k = derived_constants(law, N, sigma);
  const double D = diffusion_coefficient(N, sigma, k.l_rho_sq, k.alpha2);
  if (mode == MsdMode::real_time) return 2.0 * D * x;
  return k.l_rho_sq / (2.0 * N) + 2.0 * D * k.tau_star * x;
}

double zigzag_autocorr(int K) {
  if (K < 0) throw DomainError("zigzag_autocorr: K < 0");
  if (K == 0) return 1.0;
  return K == 1 ? -0.5 : 0.0;
}

double dp_gaussian_pdf(double dp, double l_rho_sq, int N) {
  const double var = l_rho_sq / (2.0 * N);
  return std::exp(-0.5 * dp * dp / var) / std::sqrt(2.0 * std::numbers::pi * var);
}

double dp_exponential_tail(double dp, double kappa) { return std::exp(-std::abs(dp) / kappa) / (2.0 * kappa); }

double strong_trend_kappa(double c, double tau_star, IntervalMode mode) {
  return (mode == IntervalMode::plain ? 1.0 : 2.0 / 3.0) * c * tau_star;
}

double powerlaw_superposition_ccdf(double dp, double alpha, double kappa_min) {
  if (!(alpha > 0.0) || !(kappa_min > 0.0)) throw DomainError("powerlaw_superposition_ccdf: alpha, kappa_min > 0");
  const double x = std::abs(dp);
  if (x == 0.0) return 1.0;
  // alpha kappa_min^alpha x^-alpha gamma_lower(alpha, x/kappa_min)
  const double y = x / kappa_min;
  return alpha * std::pow(y, -alpha) * boost::math::tgamma_lower(alpha, y);
}

}  // namespace hftkin::oracle
