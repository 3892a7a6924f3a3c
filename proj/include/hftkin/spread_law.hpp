#pragma once

#include <optional>
#include <string>

#include <Eigen/Dense>

#include "hftkin/random.hpp"

namespace hftkin {

struct Truncation {
  double l_min = 0.0;
  double l_max = 0.0;
  friend bool operator==(const Truncation&, const Truncation&) = default;
};

/// Distribution of the per-trader buy-sell spread.
///
/// PointMass puts every trader at L*. Gamma is
///   rho(L) = L^alpha exp(-L/L*) / (alpha! L*^(alpha+1)),
/// optionally renormalized on [l_min, l_max].
struct SpreadLaw {
  enum class Kind { point_mass, gamma };

  Kind kind = Kind::point_mass;
  double l_star = 1.0;
  int alpha = 3;
  std::optional<Truncation> truncation;

  static SpreadLaw point_mass(double l_star) { return {Kind::point_mass, l_star, 0, std::nullopt}; }
  static SpreadLaw gamma(double l_star, int alpha = 3, std::optional<Truncation> trunc = std::nullopt) {
    return {Kind::gamma, l_star, alpha, trunc};
  }

  bool is_point_mass() const { return kind == Kind::point_mass; }
  // Untruncated alpha = 3 gamma: the case with closed-form book profile and jump law.
  bool is_standard_gamma() const { return kind == Kind::gamma && alpha == 3 && !truncation; }

  friend bool operator==(const SpreadLaw&, const SpreadLaw&) = default;
};

/// Throws ConfigError on L* <= 0, a negative exponent, or a bad truncation window.
void validate(const SpreadLaw& law);

std::string describe(const SpreadLaw& law);

/// Density rho(L). Not defined for a point mass (throws DomainError).
double density(const SpreadLaw& law, double spread);

/// Lower/upper end of the support; an untruncated gamma law reports the
/// quantile at 1 - tail.
double support_min(const SpreadLaw& law);
double support_max(const SpreadLaw& law, double tail = 1e-9);

/// Inverse CDF; exact for the untruncated and truncated gamma laws.
double quantile(const SpreadLaw& law, double q);

/// Mass of the law on [a, b] and the partial first moment over [a, b].
double mass_between(const SpreadLaw& law, double a, double b);
double mean_between(const SpreadLaw& law, double a, double b);

struct SpreadConstants {
  double l_rho_sq = 0.0;  // 1 / <1/L^2>
  double tau_star = 0.0;  // mean transaction interval L_rho^2 / (2 N sigma^2)
  double alpha2 = 0.0;    // second Kramers-Moyal coefficient of the jump law
};

/// 1/L_rho^2 = int rho(L)/L^2 dL. Throws DomainError when the integral diverges
/// (untruncated gamma with alpha <= 1).
double inverse_square_moment(const SpreadLaw& law);

/// Second moment int y^2 w(y) dy of the rescaled CM jump law.
double jump_second_moment(const SpreadLaw& law);

SpreadConstants derived_constants(const SpreadLaw& law, int n_traders, double sigma);

/// Rescaled CM jump density w(y) = int 2 L_rho^4 rho(L) rho(L+2y) / (L^2 (L+2y)^2) dL.
/// Closed form (L* + 2|y|)/(2 L*^2) exp(-2|y|/L*) for the standard gamma law.
/// A point mass has w = delta(y); this function then throws DomainError.
double jump_density(const SpreadLaw& law, double y);

double sample_spread(const SpreadLaw& law, Xoshiro256pp& rng);
Eigen::VectorXd sample_spreads(const SpreadLaw& law, int n, Xoshiro256pp& rng);

/// Draw from the collision-weighted law rho(L)/L^2 (normalized).
double sample_collision_weighted_spread(const SpreadLaw& law, Xoshiro256pp& rng);

}  // namespace hftkin
