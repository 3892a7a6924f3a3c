#include <doctest.h>

#include <cmath>
#include <numeric>

#include <boost/random/exponential_distribution.hpp>
#include <boost/random/normal_distribution.hpp>
#include <boost/random/uniform_01.hpp>

#include "hftkin/errors.hpp"
#include "hftkin/estimators.hpp"
#include "hftkin/oracle.hpp"

using namespace hftkin;

namespace {

TickRow row_with(double dp, double tau = 1.0) {
  TickRow r;
  r.dp = dp;
  r.tau = tau;
  return r;
}

}  // namespace

TEST_SUITE("estimators") {

TEST_CASE("histogram") {
  Histogram h(-1.0, 1.0, 0.25);
  CHECK(h.bins() == 8);
  for (double x : {-2.0, -0.9, -0.1, 0.0, 0.3, 0.99, 1.0, 5.0}) h.add(x);
  CHECK(h.underflow() == 1);
  CHECK(h.overflow() == 2);
  CHECK(h.in_range() == 5);
  CHECK(h.density().sum() * h.width() == doctest::Approx(1.0));

  Histogram g(-1.0, 1.0, 0.25);
  g.add(0.3, 4);
  h.merge(g);
  CHECK(h.in_range() == 9);
  CHECK(h.count(5) == 5);
  CHECK_THROWS(h.merge(Histogram(-1.0, 1.0, 0.5)));
}

TEST_CASE("tent samples reproduce the tent histogram") {
  auto rng = make_stream(51, StreamTag::test);
  boost::random::uniform_01<double> u;
  const double L = 2.0;
  Histogram h(-2.0, 2.0, 0.05);
  const int n = 400000;
  // Sum of two uniforms on [-L/4, L/4] is tent-distributed on [-L/2, L/2].
  for (int k = 0; k < n; ++k) h.add(0.5 * L * (u(rng) - 0.5) + 0.5 * L * (u(rng) - 0.5));
  const auto d = h.density();
  for (int k = 0; k < h.bins(); ++k) {
    const double c = h.center(k);
    // Bin average of the tent (exact for bins not straddling a kink).
    const double p = oracle::tent_profile(L, c);
    const double sd = std::sqrt(p * h.width() / n) / h.width();
    CHECK(std::abs(d[k] - p) < 5.0 * sd + 1e-12);
  }
  CHECK(l1_distance(h, [&](double r) { return oracle::tent_profile(L, r); }) < 0.02);
}

TEST_CASE("book collector mirrors symmetric states") {
  EnsembleState s;
  s.z = Eigen::VectorXd(4);
  s.z << -0.73, -0.21, 0.21, 0.73;
  s.L = Eigen::VectorXd(4);
  s.L << 1.0, 2.06, 2.06, 1.0;
  s.z_cm = 0.0;
  BookProfileCollector b(3.0, 0.1);
  b.on_snapshot(s, 0.0);
  for (int k = 0; k < b.ask.bins(); ++k) CHECK(b.ask.count(k) == b.bid.count(b.bid.bins() - 1 - k));
  const double l1 = l1_distance(b.ask, [](double) { return 0.0; });
  CHECK(l1 == doctest::Approx(1.0));
}

TEST_CASE("MSD") {
  std::vector<double> ramp(200);
  std::iota(ramp.begin(), ramp.end(), 0.0);
  const auto m = msd_tick(ramp, {1, 2, 5, 10});
  CHECK(m[0] == 1.0);
  CHECK(m[1] == 4.0);
  CHECK(m[2] == 25.0);
  CHECK(m[3] == 100.0);

  MsdAccumulator acc(10);
  for (double x : ramp) acc.push(x);
  for (int k = 1; k <= 10; ++k) CHECK(acc.msd(k) == doctest::Approx(k * k));

  // Independent increments of variance v.
  auto rng = make_stream(52, StreamTag::test);
  boost::random::normal_distribution<double> g(0.0, 0.5);
  MsdAccumulator walk(20);
  double x = 0.0;
  for (int k = 0; k < 400000; ++k) walk.push(x += g(rng));
  for (int k : {1, 5, 20}) CHECK(walk.msd(k) == doctest::Approx(0.25 * k).epsilon(0.03));
}

TEST_CASE("MSD accumulators merge like one long pass over separate streams") {
  MsdAccumulator a(3), b(3), both(3);
  const std::vector<double> s1{0, 1, 3, 2, 5}, s2{1, 1, 4, 0};
  for (double v : s1) a.push(v), both.push(v);
  both.reset_stream();
  for (double v : s2) b.push(v), both.push(v);
  a.merge(b);
  for (int k = 1; k <= 3; ++k) {
    CHECK(a.msd(k) == both.msd(k));
    CHECK(a.count(k) == both.count(k));
  }
}

TEST_CASE("real-time sampling holds the last price") {
  const std::vector<double> t{0.0, 0.25, 1.1, 1.9, 3.0};
  const std::vector<double> p{0.0, 1.0, 2.0, 3.0, 4.0};
  const auto grid = sample_on_grid(t, p, 0.5);
  CHECK(grid == std::vector<double>{0.0, 1.0, 1.0, 2.0, 3.0, 3.0, 4.0});

  RealTimeMsdCollector rt(0.5, 2);
  for (std::size_t k = 0; k < t.size(); ++k) {
    TickRow r;
    r.t = t[k];
    r.p = p[k];
    rt.on_tick(r);
  }
  // The streaming collector only emits grid points strictly before the last tick.
  const auto direct = msd_tick(std::vector<double>(grid.begin(), grid.end() - 1), {1, 2});
  CHECK(rt.acc.msd(1) == doctest::Approx(direct[0]));
  CHECK(rt.acc.msd(2) == doctest::Approx(direct[1]));
}

TEST_CASE("autocorrelation and signs") {
  std::vector<double> alt(100);
  for (int k = 0; k < 100; ++k) alt[k] = k % 2 ? -1.0 : 1.0;
  const auto c = autocorr(alt, 3);
  CHECK(c[0] == 1.0);
  CHECK(c[1] == -1.0);
  CHECK(c[2] == 1.0);
  const auto s = sign_stats(alt);
  CHECK(s.p_diff() == 1.0);

  MovementCollector mc(3);
  for (double v : alt) mc.on_tick(row_with(v));
  CHECK(mc.autocorr() == c);
  CHECK(mc.signs.p_diff() == 1.0);

  // Zeros are skipped by the sign statistics.
  const auto z = sign_stats({1.0, 0.0, 0.0, 1.0, -2.0, 0.0, -1.0});
  CHECK(z.same == 2);
  CHECK(z.diff == 1);
  CHECK_THROWS_AS(sign_stats({0.0, 1.0}), DomainError);
  CHECK_THROWS_AS(autocorr({0.0, 0.0, 0.0}, 1), DomainError);
}

TEST_CASE("movement statistics are shift and scale aware") {
  auto rng = make_stream(53, StreamTag::test);
  boost::random::normal_distribution<double> g;
  std::vector<double> x(5000);
  for (auto& v : x) v = g(rng);
  MovementCollector a(4), b(4);
  for (double v : x) {
    a.on_tick(row_with(v));
    b.on_tick(row_with(3.0 * v));
  }
  for (int k = 0; k <= 4; ++k) CHECK(a.autocorr()[k] == doctest::Approx(b.autocorr()[k]));
  CHECK(b.variance() == doctest::Approx(9.0 * a.variance()));
  CHECK(a.signs.same == b.signs.same);
}

TEST_CASE("movement collectors merge without crossing replica boundaries") {
  MovementCollector a(2), b(2);
  for (double v : {1.0, 2.0, 3.0}) a.on_tick(row_with(v));
  for (double v : {-1.0, 5.0}) b.on_tick(row_with(v));
  a.merge(b);
  // Lag-1 products: 1*2, 2*3, -1*5; the 3 -> -1 boundary is not a pair.
  const double c0 = (1 + 4 + 9 + 1 + 25) / 5.0;
  CHECK(a.autocorr()[1] == doctest::Approx((2.0 + 6.0 - 5.0) / 3.0 / c0));
  CHECK(a.signs.same == 2);
  CHECK(a.signs.diff == 1);
  CHECK(a.samples() == 5);
}

TEST_CASE("replica samples") {
  ReplicaSamples a, b;
  for (double t : {1.0, 3.0}) a.on_tick(row_with(0.5, t));
  for (double t : {4.0, 4.0, 4.0}) b.on_tick(row_with(1.0, t));
  a.merge(b);
  CHECK(a.replicas() == 2);
  CHECK(a.mean_tau(0) == 2.0);
  CHECK(a.mean_tau(1) == 4.0);
  CHECK(a.ensemble_mean_tau() == doctest::Approx(2.0 / (0.5 + 0.25)));
  CHECK(a.normalized_tau() == std::vector<double>{0.5, 1.5, 1.0, 1.0, 1.0});
  CHECK(a.dp_per_mean_tau(2.0) == std::vector<double>{0.125, 0.125, 0.125, 0.125, 0.125});
}

TEST_CASE("exponential tail fit") {
  auto rng = make_stream(54, StreamTag::test);
  boost::random::exponential_distribution<double> e(1.0);
  boost::random::uniform_01<double> u;
  std::vector<double> x(1'000'000);
  for (auto& v : x) v = (u(rng) < 0.5 ? -1.0 : 1.0) * e(rng);
  const auto f = tail_fit(x, FitModel::exponential_tail);
  CHECK(f.kappa() == doctest::Approx(1.0).epsilon(0.03));
  CHECK(f.samples_in_window > 1000);
  CHECK(tail_mass(x, 4.0) == doctest::Approx(std::exp(-4.0 * std::sqrt(2.0))).epsilon(0.05));

  boost::random::normal_distribution<double> g;
  std::vector<double> y(1'000'000);
  for (auto& v : y) v = g(rng);
  const auto q = tail_fit(y, FitModel::gaussian_tail);
  // log f = -(h0 + h1 x + h2 x^2) with h2 = 1/2 for a unit normal.
  CHECK(q.params[2] == doctest::Approx(0.5).epsilon(0.1));
  CHECK(tail_mass(y, 4.0) == doctest::Approx(std::erfc(4.0 / std::sqrt(2.0))).epsilon(0.15));
}

TEST_CASE("log-log fit") {
  std::vector<double> k, m;
  for (int i = 1; i <= 20; ++i) {
    k.push_back(i);
    m.push_back(0.3 * std::pow(i, 1.8));
  }
  const auto f = loglog_fit(k, m, 1.0, 10.0);
  CHECK(f.slope() == doctest::Approx(1.8).epsilon(1e-12));
  CHECK(f.hurst() == doctest::Approx(0.9).epsilon(1e-12));
  CHECK_THROWS_AS(loglog_fit(k, m, 30.0, 40.0), DomainError);

  const auto l = line_fit({0, 1, 2, 3}, {1, 3, 5, 7});
  CHECK(l.slope == doctest::Approx(2.0));
  CHECK(l.intercept == doctest::Approx(1.0));
}

}  // TEST_SUITE
