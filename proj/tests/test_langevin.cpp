#include <doctest.h>

#include <cmath>

#include "hftkin/estimators.hpp"
#include "hftkin/langevin.hpp"
#include "support.hpp"

using namespace hftkin;

TEST_SUITE("langevin") {

TEST_CASE("tick by direct substitution") {
  auto prm = make_langevin_params(0.0, 1.0, 1.0, 100, SpreadLaw::gamma(1.0));
  LangevinState s;
  s.xi_prev = 0.0;
  NoiseDraw d{0.03, 1.0, 0.0, 0.0};
  CHECK(tick(s, prm, d) == doctest::Approx(std::sqrt(6.0 / 400.0)).epsilon(1e-15));
  CHECK(s.dp == doctest::Approx(0.12247).epsilon(1e-4));
  CHECK(s.t == 0.03);
  CHECK(s.tick == 1);

  LangevinState z;
  z.xi_prev = 0.4;
  CHECK(tick(z, prm, NoiseDraw{0.03, 0.4, 0.0, 0.0}) == 0.0);
}

TEST_CASE("trend term saturates") {
  auto prm = make_langevin_params(2.0, 0.5, 1.0, 100, SpreadLaw::point_mass(1.0));
  LangevinState s;
  s.dp = 1e6;
  s.xi_prev = 0.0;
  CHECK(tick(s, prm, NoiseDraw{0.25, 0.0, 0.0, 0.0}) == doctest::Approx(2.0 * 0.25));
}

TEST_CASE("interval sampling") {
  auto rng = make_stream(41, StreamTag::test);
  const double tau_star = 0.03;
  const int n = 1'000'000;
  for (auto mode : {oracle::IntervalMode::plain, oracle::IntervalMode::improved}) {
    double sum = 0.0;
    std::int64_t above = 0;
    for (int k = 0; k < n; ++k) {
      const double t = sample_tau(tau_star, mode, rng);
      REQUIRE(t > 0.0);
      sum += t;
      above += t >= tau_star;
    }
    CHECK(sum / n == doctest::Approx(tau_star).epsilon(0.003));
    const double ccdf = static_cast<double>(above) / n;
    CHECK(ccdf == doctest::Approx(oracle::interval_ccdf(tau_star, tau_star, mode)).epsilon(0.005));
  }
}

TEST_CASE("centre-of-mass jump sampling") {
  auto rng = make_stream(42, StreamTag::test);
  for (int k = 0; k < 100; ++k) CHECK(sample_nu(SpreadLaw::point_mass(1.0), rng) == 0.0);

  // Moments of w against Simpson integrals of the closed form.
  auto w = [](double y) { return (1.0 + 2.0 * std::abs(y)) / 2.0 * std::exp(-2.0 * std::abs(y)); };
  const double m2 = test::simpson_pieces([&](double y) { return y * y * w(y); }, 20000, -40.0, 0.0, 40.0);
  const double m4 = test::simpson_pieces([&](double y) { return y * y * y * y * w(y); }, 20000, -40.0, 0.0, 40.0);
  CHECK(m2 == doctest::Approx(1.0).epsilon(1e-10));

  const int n = 10'000'000;
  double s1 = 0.0, s2 = 0.0, s4 = 0.0;
  std::int64_t inside = 0;
  for (int k = 0; k < n; ++k) {
    const double y = sample_nu(SpreadLaw::gamma(1.0), rng);
    s1 += y;
    s2 += y * y;
    s4 += y * y * y * y;
    inside += std::abs(y) < 0.5;
  }
  CHECK(std::abs(s1 / n) < 0.002);
  CHECK(s2 / n == doctest::Approx(m2).epsilon(0.01));
  CHECK(s4 / n == doctest::Approx(m4).epsilon(0.02));
  const double p_inside = test::simpson(w, -0.5, 0.0, 2000) * 2.0;
  CHECK(static_cast<double>(inside) / n == doctest::Approx(p_inside).epsilon(0.002));
}

TEST_CASE("linear variant friction identity") {
  auto prm = make_langevin_params(3.0, 0.4, 1.0, 50, SpreadLaw::gamma(1.0), TrendVariant::linear);
  auto rng = make_stream(43, StreamTag::test);
  LangevinState s;
  s.dp = 0.05;
  for (int k = 0; k < 200; ++k) {
    const double before = s.dp;
    const double xi_prev = s.xi_prev;
    const auto d = draw_noise(prm, rng);
    const double after = tick(s, prm, d);
    const double noise = std::sqrt(prm.l_rho_sq / (4.0 * 50)) * (d.xi - xi_prev) + std::sqrt(d.tau / 50.0) * d.mu + d.nu / 50.0;
    CHECK(after - before == doctest::Approx(-friction_coefficient(prm, d.tau) * before + noise).epsilon(1e-12));
  }
}

TEST_CASE("EMA with vanishing memory reproduces the one-tick variant") {
  auto one = make_langevin_params(2.0, 0.3, 1.0, 100, SpreadLaw::gamma(1.0));
  auto ema = make_langevin_params(2.0, 0.3, 1.0, 100, SpreadLaw::gamma(1.0), TrendVariant::ema, 0.0);
  LangevinSimulator a(one, 5), b(ema, 5);
  for (int k = 0; k < 2000; ++k) {
    const auto ra = a.step();
    const auto rb = b.step();
    REQUIRE(ra.dp == rb.dp);
  }
  auto slow = make_langevin_params(2.0, 0.3, 1.0, 100, SpreadLaw::gamma(1.0), TrendVariant::ema, 5.0);
  LangevinSimulator c(slow, 5);
  double diff = 0.0;
  for (int k = 0; k < 100; ++k) diff += std::abs(c.step().dp - a.step().dp);
  CHECK(diff > 0.0);
}

TEST_CASE("telescoping without the diffusive terms") {
  auto prm = make_langevin_params(0.0, 1.0, 1.0, 100, SpreadLaw::point_mass(1.0));
  auto rng = make_stream(44, StreamTag::test);
  LangevinState s;
  s.xi_prev = 0.3;
  const double xi_start = s.xi_prev;
  for (int k = 0; k < 500; ++k) {
    auto d = draw_noise(prm, rng);
    d.mu = 0.0;
    tick(s, prm, d);
  }
  CHECK(s.p == doctest::Approx(std::sqrt(prm.l_rho_sq / 400.0) * (s.xi_prev - xi_start)).epsilon(1e-10));
}

TEST_CASE("weak-trend movement statistics") {
  auto prm = make_langevin_params(0.0, 1.0, 1.0, 100, SpreadLaw::gamma(1.0));
  MovementCollector mc(3);
  run_meanfield(prm, 400000, 17, {&mc});
  const double v = prm.l_rho_sq / 200.0;
  // Zigzag variance L_rho^2/2N plus the O(1/N^2) diffusion and jump terms.
  const double extra = prm.tau_star / 100.0 + 1.0 / (100.0 * 100.0);
  CHECK(mc.variance() == doctest::Approx(v + extra).epsilon(0.01));
  CHECK(mc.signs.p_diff() == doctest::Approx(2.0 / 3.0).epsilon(0.01));
  CHECK(mc.autocorr()[1] == doctest::Approx(-0.5 * v / (v + extra)).epsilon(0.02));
}

TEST_CASE("mean-field ensembles are worker independent") {
  auto prm = make_langevin_params(0.5, 1.0, 1.0, 50, SpreadLaw::gamma(1.0));
  MovementCollector a(4), b(4);
  run_meanfield_ensemble(prm, 5000, 3, 6, 1, {&a});
  run_meanfield_ensemble(prm, 5000, 3, 6, 4, {&b});
  CHECK(a.autocorr() == b.autocorr());
  CHECK(a.variance() == b.variance());
}

}  // TEST_SUITE
