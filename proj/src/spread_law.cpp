#include "hftkin/spread_law.hpp"

#include <cmath>
#include <sstream>

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/special_functions/gamma.hpp>
#include <boost/random/exponential_distribution.hpp>
#include <boost/random/uniform_01.hpp>

#include "hftkin/errors.hpp"

namespace hftkin {

namespace {

using boost::math::gamma_p;
using boost::math::gamma_p_inv;
using boost::math::gamma_q_inv;

template <class F>
double integrate(F f, double a, double b) {
  return boost::math::quadrature::gauss_kronrod<double, 61>::integrate(f, a, b, 15, 1e-14);
}

double shape(const SpreadLaw& law) { return law.alpha + 1.0; }

// Normalizer of the truncated law relative to the untruncated gamma.
double window_mass(const SpreadLaw& law) {
  if (!law.truncation) return 1.0;
  const auto& tr = *law.truncation;
  return gamma_p(shape(law), tr.l_max / law.l_star) - gamma_p(shape(law), tr.l_min / law.l_star);
}

double raw_gamma_density(const SpreadLaw& law, double l) {
  if (l <= 0.0) return 0.0;
  const double x = l / law.l_star;
  return std::exp(law.alpha * std::log(x) - x - std::lgamma(law.alpha + 1.0)) / law.l_star;
}

// Moments int rho(L) L^k dL, k in {-2, -1, 0}, for truncated laws by quadrature.
double truncated_moment(const SpreadLaw& law, int k) {
  const auto& tr = *law.truncation;
  const double z = window_mass(law);
  return integrate([&](double l) { return raw_gamma_density(law, l) * std::pow(l, k); }, tr.l_min, tr.l_max) / z;
}

double draw_gamma_shape(int k, double scale, Xoshiro256pp& rng) {
  boost::random::exponential_distribution<double> expo(1.0);
  double s = 0.0;
  for (int i = 0; i < k; ++i) s += expo(rng);
  return s * scale;
}

}  // namespace

void validate(const SpreadLaw& law) {
  if (!(law.l_star > 0.0) || !std::isfinite(law.l_star)) throw ConfigError("spread law: l_star must be positive");
  if (law.kind == SpreadLaw::Kind::point_mass) {
    if (law.truncation) throw ConfigError("spread law: point mass does not take a truncation");
    return;
  }
  if (law.alpha < 0) throw ConfigError("spread law: alpha must be >= 0");
  if (law.truncation) {
    const auto& tr = *law.truncation;
    if (!(tr.l_min > 0.0 && tr.l_min < tr.l_max) || !std::isfinite(tr.l_max))
      throw ConfigError("spread law: truncation needs 0 < l_min < l_max");
    if (!(window_mass(law) > 0.0)) throw ConfigError("spread law: truncation window carries no mass");
  }
}

std::string describe(const SpreadLaw& law) {
  std::ostringstream os;
  if (law.is_point_mass()) {
    os << "point_mass(l_star=" << law.l_star << ")";
  } else {
    os << "gamma(l_star=" << law.l_star << ", alpha=" << law.alpha;
    if (law.truncation) os << ", l_min=" << law.truncation->l_min << ", l_max=" << law.truncation->l_max;
    os << ")";
  }
  return os.str();
}

double density(const SpreadLaw& law, double spread) {
  if (law.is_point_mass()) throw DomainError("density: point-mass spread law has no density");
  if (law.truncation && (spread < law.truncation->l_min || spread > law.truncation->l_max)) return 0.0;
  return raw_gamma_density(law, spread) / window_mass(law);
}

double support_min(const SpreadLaw& law) {
  if (law.is_point_mass()) return law.l_star;
  return law.truncation ? law.truncation->l_min : 0.0;
}

double support_max(const SpreadLaw& law, double tail) {
  if (law.is_point_mass()) return law.l_star;
  if (law.truncation) return law.truncation->l_max;
  return gamma_q_inv(shape(law), tail) * law.l_star;
}

double quantile(const SpreadLaw& law, double q) {
  if (!(q >= 0.0 && q <= 1.0)) throw DomainError("quantile: q outside [0, 1]");
  if (law.is_point_mass()) return law.l_star;
  double lo = 0.0, hi = 1.0;
  if (law.truncation) {
    lo = gamma_p(shape(law), law.truncation->l_min / law.l_star);
    hi = gamma_p(shape(law), law.truncation->l_max / law.l_star);
  }
  const double p = lo + q * (hi - lo);
  if (p <= 0.0) return support_min(law);
  if (p >= 1.0) return support_max(law, 1e-16);
  return gamma_p_inv(shape(law), p) * law.l_star;
}

double mass_between(const SpreadLaw& law, double a, double b) {
  if (law.is_point_mass()) return (a <= law.l_star && law.l_star <= b) ? 1.0 : 0.0;
  a = std::max(a, support_min(law));
  if (law.truncation) b = std::min(b, law.truncation->l_max);
  if (b <= a) return 0.0;
  return (gamma_p(shape(law), b / law.l_star) - gamma_p(shape(law), a / law.l_star)) / window_mass(law);
}

double mean_between(const SpreadLaw& law, double a, double b) {
  if (law.is_point_mass()) return (a <= law.l_star && law.l_star <= b) ? law.l_star : 0.0;
  a = std::max(a, support_min(law));
  if (law.truncation) b = std::min(b, law.truncation->l_max);
  if (b <= a) return 0.0;
  // L rho_alpha(L) = (alpha+1) L* rho_{alpha+1}(L)
  const double s = shape(law) + 1.0;
  return shape(law) * law.l_star * (gamma_p(s, b / law.l_star) - gamma_p(s, a / law.l_star)) / window_mass(law);
}

double inverse_square_moment(const SpreadLaw& law) {
  validate(law);
  if (law.is_point_mass()) return 1.0 / (law.l_star * law.l_star);
  if (law.truncation) return truncated_moment(law, -2);
  if (law.alpha <= 1) throw DomainError("inverse_square_moment: int rho/L^2 diverges for alpha <= 1");
  return 1.0 / (law.alpha * (law.alpha - 1.0) * law.l_star * law.l_star);
}

double jump_second_moment(const SpreadLaw& law) {
  validate(law);
  if (law.is_point_mass()) return 0.0;
  if (!law.truncation) {
    if (law.alpha <= 1) throw DomainError("jump_second_moment: collision-weighted law not normalizable");
    // Collision-weighted law is gamma(shape alpha-1); alpha2 = Var/2.
    return (law.alpha - 1.0) * law.l_star * law.l_star / 2.0;
  }
  const double m0 = truncated_moment(law, -2);
  const double m1 = truncated_moment(law, -1);
  const double m2 = truncated_moment(law, 0);
  const double mean = m1 / m0;
  return (m2 / m0 - mean * mean) / 2.0;
}

SpreadConstants derived_constants(const SpreadLaw& law, int n_traders, double sigma) {
  if (n_traders < 2) throw ConfigError("derived_constants: N must be >= 2");
  if (!(sigma > 0.0)) throw ConfigError("derived_constants: sigma must be positive");
  const double inv = inverse_square_moment(law);
  if (!(inv > 0.0) || !std::isfinite(inv)) throw DomainError("derived_constants: int rho/L^2 did not converge");
  SpreadConstants out;
  out.l_rho_sq = 1.0 / inv;
  out.tau_star = out.l_rho_sq / (2.0 * n_traders * sigma * sigma);
  out.alpha2 = jump_second_moment(law);
  return out;
}

double jump_density(const SpreadLaw& law, double y) {
  validate(law);
  if (law.is_point_mass()) throw DomainError("jump_density: point mass has w = delta(y)");
  if (law.is_standard_gamma()) {
    const double a = std::abs(y);
    return (law.l_star + 2.0 * a) / (2.0 * law.l_star * law.l_star) * std::exp(-2.0 * a / law.l_star);
  }
  const double l_rho_sq = 1.0 / inverse_square_moment(law);
  const double lo = std::max(support_min(law), support_min(law) - 2.0 * y);
  const double hi = std::min(support_max(law, 1e-15), support_max(law, 1e-15) - 2.0 * y);
  if (hi <= lo) return 0.0;
  auto weighted = [&](double l) { return l > 0.0 ? density(law, l) / (l * l) : 0.0; };
  return 2.0 * l_rho_sq * l_rho_sq * integrate([&](double l) { return weighted(l) * weighted(l + 2.0 * y); }, lo, hi);
}

double sample_spread(const SpreadLaw& law, Xoshiro256pp& rng) {
  if (law.is_point_mass()) return law.l_star;
  if (!law.truncation) return draw_gamma_shape(law.alpha + 1, law.l_star, rng);
  if (window_mass(law) < 0.05) {
    boost::random::uniform_01<double> u;
    return quantile(law, u(rng));
  }
  const auto& tr = *law.truncation;
  for (;;) {
    const double l = draw_gamma_shape(law.alpha + 1, law.l_star, rng);
    if (l >= tr.l_min && l <= tr.l_max) return l;
  }
}

Eigen::VectorXd sample_spreads(const SpreadLaw& law, int n, Xoshiro256pp& rng) {
  Eigen::VectorXd out(n);
  for (int i = 0; i < n; ++i) out[i] = sample_spread(law, rng);
  return out;
}

double sample_collision_weighted_spread(const SpreadLaw& law, Xoshiro256pp& rng) {
  if (law.is_point_mass()) return law.l_star;
  if (!law.truncation) {
    if (law.alpha <= 1) throw DomainError("collision-weighted law not normalizable for alpha <= 1");
    return draw_gamma_shape(law.alpha - 1, law.l_star, rng);
  }
  // Propose from rho, accept with (l_min/L)^2.
  boost::random::uniform_01<double> u;
  const double l_min = law.truncation->l_min;
  for (;;) {
    const double l = sample_spread(law, rng);
    const double ratio = l_min / l;
    if (u(rng) < ratio * ratio) return l;
  }
}

}  // namespace hftkin
