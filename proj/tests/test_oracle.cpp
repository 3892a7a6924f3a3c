#include <doctest.h>

#include <cmath>
#include <numbers>

#include "hftkin/oracle.hpp"
#include "hftkin/random.hpp"
#include "support.hpp"

#include <boost/random/normal_distribution.hpp>

using namespace hftkin;
using namespace hftkin::oracle;

TEST_SUITE("oracle") {

TEST_CASE("tent profile") {
  CHECK(tent_profile(2.0, 0.0) == 1.0);
  CHECK(tent_profile(2.0, 1.0) == 0.0);
  CHECK(tent_profile(2.0, -1.0) == 0.0);
  CHECK(tent_profile(2.0, 3.0) == 0.0);
  for (double L : {1.0, 2.0, 3.7}) {
    const double m = test::simpson_pieces([&](double r) { return tent_profile(L, r); }, 2000, -L, -0.5 * L, 0.0,
                                          0.5 * L, L);
    CHECK(std::abs(m - 1.0) < 1e-10);
  }
}

TEST_CASE("gamma book shape") {
  CHECK(psi(0.0) == 0.0);
  CHECK(psi(-1.0) == 0.0);
  // Direct evaluation of the closed form at x = 1, written out separately.
  const double x = 1.0;
  const double direct = 4.0 / 3.0 * std::exp(-1.5) * (3.0 * std::sinh(0.5) - 0.5 * std::exp(-0.5));
  CHECK(psi(x) == doctest::Approx(direct).epsilon(1e-15));
  CHECK(psi(1.0) == doctest::Approx(0.3749).epsilon(1e-4));
  CHECK(book_profile(SpreadLaw::gamma(1.0), 0.0) == 0.0);
  CHECK(book_profile(SpreadLaw::gamma(2.0), 2.0) == doctest::Approx(psi(1.0) / 2.0));
  const double m = test::simpson([](double r) { return psi(r); }, 0.0, 80.0, 200000);
  CHECK(std::abs(m - 1.0) < 1e-10);
}

TEST_CASE("quadrature book matches the closed forms") {
  for (double r : {0.05, 0.3, 0.5, 0.9, 1.0, 1.7, 3.2, 8.0}) {
    CHECK(std::abs(book_profile_quadrature(SpreadLaw::gamma(1.0), r) - psi(r)) < 1e-8);
    CHECK(std::abs(book_profile_quadrature(SpreadLaw::gamma(2.0), r) - psi(r / 2.0) / 2.0) < 1e-8);
    CHECK(std::abs(book_profile_quadrature(SpreadLaw::point_mass(1.0), r) - tent_profile(1.0, r - 0.5)) < 1e-8);
  }
}

TEST_CASE("bid book mirrors the ask book") {
  const auto law = SpreadLaw::gamma(1.0);
  for (double r : {0.2, 1.0, 2.5}) CHECK(bid_book_profile(law, -r) == book_profile(law, r));
}

TEST_CASE("finite-N edge profile") {
  const double L = 1.0, lrho2 = 1.0;
  const int N = 100;
  const double edge = 2.0 * std::sqrt(lrho2) / (L * L * std::sqrt(2.0 * N * std::numbers::pi));
  CHECK(nlo_profile(L, 0.5 * L, N, lrho2) == doctest::Approx(edge).epsilon(1e-14));
  CHECK(nlo_profile(L, 0.5 * L, N, lrho2, NloForm::printed) == doctest::Approx(edge).epsilon(1e-14));
  CHECK(std::abs(nlo_profile(L, 0.0, N, lrho2) - tent_profile(L, 0.0)) < 1e-6);
  CHECK(std::abs(nlo_profile(L, 0.1, N, lrho2) - tent_profile(L, 0.1)) < 1e-6);
  for (double r : {0.0, 0.2, 0.45, 0.5, 0.55, 0.8}) CHECK(std::abs(nlo_profile(L, r, 100'000'000, lrho2) - tent_profile(L, r)) < 1e-4);
  for (double r = -2.0; r <= 2.0; r += 0.01) CHECK(nlo_profile(L, r, 25, lrho2) >= 0.0);
  for (int n : {25, 100, 800}) {
    const double m = test::simpson([&](double r) { return nlo_profile(L, r, n, lrho2); }, -3.0, 3.0, 60000);
    CHECK(std::abs(m - 1.0) < 0.05);
  }
}

TEST_CASE("interval law") {
  CHECK(interval_ccdf(0.0, 1.0, IntervalMode::plain) == 1.0);
  CHECK(interval_ccdf(0.0, 1.0, IntervalMode::improved) == 1.0);
  CHECK(interval_ccdf(2.0, 2.0, IntervalMode::plain) == doctest::Approx(std::exp(-1.0)));
  for (auto mode : {IntervalMode::plain, IntervalMode::improved}) {
    const double tau_star = 0.03;
    const double mass = test::simpson([&](double t) { return interval_pdf(t, tau_star, mode); }, 0.0, 60 * tau_star);
    const double mean = test::simpson([&](double t) { return t * interval_pdf(t, tau_star, mode); }, 0.0, 60 * tau_star);
    CHECK(std::abs(mass - 1.0) < 1e-10);
    CHECK(mean == doctest::Approx(tau_star).epsilon(1e-10));
    // CCDF is the integrated pdf.
    const double tail = test::simpson([&](double t) { return interval_pdf(t, tau_star, mode); }, 0.7 * tau_star, 60 * tau_star);
    CHECK(interval_ccdf(0.7 * tau_star, tau_star, mode) == doctest::Approx(tail).epsilon(1e-10));
  }
  CHECK(interval_tail_factor(IntervalMode::improved) == 1.5);
}

TEST_CASE("diffusion coefficient") {
  CHECK(diffusion_coefficient(SpreadLaw::gamma(1.0), 100, 1.0) == doctest::Approx(1.0 / 150.0).epsilon(1e-12));
  CHECK(diffusion_coefficient(SpreadLaw::point_mass(1.3), 40, 1.0) == doctest::Approx(1.0 / 80.0).epsilon(1e-14));
  double prev_d = HUGE_VAL, prev_t = HUGE_VAL;
  for (int n : {2, 5, 25, 50, 100, 400, 800, 5000}) {
    const double d = diffusion_coefficient(SpreadLaw::gamma(1.0), n, 1.0);
    const double t = derived_constants(SpreadLaw::gamma(1.0), n, 1.0).tau_star;
    CHECK(d < prev_d);
    CHECK(t < prev_t);
    prev_d = d;
    prev_t = t;
  }
  CHECK(msd_theory(MsdMode::real_time, 3.0, SpreadLaw::gamma(1.0), 100, 1.0) == doctest::Approx(0.04));
  CHECK(msd_theory(MsdMode::tick, 0.0, SpreadLaw::gamma(1.0), 100, 1.0) == doctest::Approx(0.03));
}

TEST_CASE("zigzag statistics") {
  CHECK(zigzag_autocorr(0) == 1.0);
  CHECK(zigzag_autocorr(1) == -0.5);
  CHECK(zigzag_autocorr(2) == 0.0);
  CHECK(zigzag_autocorr(7) == 0.0);
  // Brute force: sign(x2 - x1) == sign(x3 - x2) for independent normals.
  auto rng = make_stream(11, StreamTag::test);
  boost::random::normal_distribution<double> g;
  const int n = 10'000'000;
  std::int64_t same = 0;
  for (int k = 0; k < n; ++k) {
    const double a = g(rng), b = g(rng), c = g(rng);
    same += ((b - a) > 0) == ((c - b) > 0);
  }
  const double p = static_cast<double>(same) / n;
  CHECK(std::abs(p - same_sign_prob()) < 5.0 * std::sqrt(p * (1 - p) / n));
  CHECK(flip_prob() == doctest::Approx(2.0 / 3.0));
}

TEST_CASE("movement densities") {
  const double lrho2 = 6.0;
  const int N = 100;
  const double s = std::sqrt(lrho2 / (2.0 * N));
  const double mass = test::simpson([&](double x) { return dp_gaussian_pdf(x, lrho2, N); }, -20 * s, 20 * s);
  const double var = test::simpson([&](double x) { return x * x * dp_gaussian_pdf(x, lrho2, N); }, -20 * s, 20 * s);
  CHECK(std::abs(mass - 1.0) < 1e-10);
  CHECK(var == doctest::Approx(lrho2 / (2.0 * N)).epsilon(1e-10));
  const double lap =
      test::simpson_pieces([](double x) { return dp_exponential_tail(x, 0.3); }, 20000, -15.0, 0.0, 15.0);
  CHECK(std::abs(lap - 1.0) < 1e-10);
  CHECK(strong_trend_kappa(2.0, 0.03, IntervalMode::improved) / strong_trend_kappa(2.0, 0.03, IntervalMode::plain) ==
        doctest::Approx(2.0 / 3.0));
}

TEST_CASE("power-law superposition") {
  CHECK(powerlaw_superposition_ccdf(0.0, 2.0, 1.0) == 1.0);
  // Independent check: alpha kmin^alpha int k^(-alpha-1) exp(-x/k) dk.
  const double alpha = 2.5, kmin = 0.4;
  for (double x : {0.1, 1.0, 5.0}) {
    // Substitute u = 1/k to get a finite range.
    const double ref = alpha * std::pow(kmin, alpha) *
                       test::simpson([&](double u) { return std::pow(u, alpha - 1.0) * std::exp(-x * u); }, 0.0,
                                     1.0 / kmin, 40000);
    CHECK(powerlaw_superposition_ccdf(x, alpha, kmin) == doctest::Approx(ref).epsilon(1e-8));
  }
  const double a = powerlaw_superposition_ccdf(200.0, alpha, kmin);
  const double b = powerlaw_superposition_ccdf(400.0, alpha, kmin);
  CHECK(std::log(a / b) / std::log(2.0) == doctest::Approx(alpha).epsilon(1e-6));
}

}  // TEST_SUITE
