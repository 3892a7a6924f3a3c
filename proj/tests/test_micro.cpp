#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <tuple>

#include <boost/random/uniform_real_distribution.hpp>

#include "hftkin/errors.hpp"
#include "hftkin/estimators.hpp"
#include "hftkin/micro.hpp"

using namespace hftkin;

namespace {

EnsembleState make_state(std::vector<double> z, std::vector<double> l) {
  EnsembleState s;
  s.z = Eigen::Map<Eigen::VectorXd>(z.data(), static_cast<Eigen::Index>(z.size()));
  s.L = Eigen::Map<Eigen::VectorXd>(l.data(), static_cast<Eigen::Index>(l.size()));
  s.z_cm = s.recomputed_cm();
  return s;
}

using Pair = std::tuple<int, int>;

std::vector<Pair> pairs_of(const std::vector<CrossingEvent>& ev) {
  std::vector<Pair> out;
  for (const auto& e : ev) out.emplace_back(e.buyer, e.seller);
  std::sort(out.begin(), out.end());
  return out;
}

// Every ordered pair checked against the crossing condition directly.
std::vector<Pair> exhaustive(const EnsembleState& s) {
  std::vector<Pair> out;
  for (int i = 0; i < s.size(); ++i)
    for (int j = 0; j < s.size(); ++j)
      if (i != j && s.z[i] - 0.5 * s.L[i] >= s.z[j] + 0.5 * s.L[j]) out.emplace_back(i, j);
  return out;
}

bool any_crossing(const EnsembleState& s) { return !exhaustive(s).empty(); }

SimConfig small_config(int n, SpreadLaw law, std::int64_t ticks, std::uint64_t seed = 5) {
  SimConfig cfg;
  cfg.n_traders = n;
  cfg.spread_law = law;
  cfg.tick_budget = ticks;
  cfg.seed = seed;
  cfg.warmup = 2.0;
  return cfg;
}

}  // namespace

TEST_SUITE("micro") {

TEST_CASE("crossing detection examples") {
  auto s = make_state({1.05, -1.0}, {2, 2});
  auto ev = detect_crossings(s);
  REQUIRE(ev.size() == 1);
  CHECK(ev[0].buyer == 0);
  CHECK(ev[0].seller == 1);
  CHECK(ev[0].overlap == doctest::Approx(0.05));

  auto c = make_state({0, 0, 0, 0}, {2, 2, 2, 2});
  CHECK(detect_crossings(c).empty());
}

TEST_CASE("events come ordered by overlap") {
  auto s = make_state({3.0, 0.0, -1.0, 2.5}, {1, 1, 1, 1});
  const auto ev = detect_crossings(s);
  REQUIRE(ev.size() >= 2);
  for (std::size_t k = 1; k < ev.size(); ++k) CHECK(ev[k - 1].overlap >= ev[k].overlap);
}

TEST_CASE("crossing detection equals an exhaustive scan on fuzzed states") {
  auto rng = make_stream(21, StreamTag::test);
  boost::random::uniform_real_distribution<double> u(0.0, 1.0);
  int with_events = 0;
  for (int trial = 0; trial < 10000; ++trial) {
    const int n = 2 + static_cast<int>(u(rng) * 127);
    const double width = 0.5 + 4.0 * u(rng);
    EnsembleState s;
    s.z.resize(n);
    s.L.resize(n);
    for (int i = 0; i < n; ++i) {
      s.z[i] = width * (2.0 * u(rng) - 1.0);
      // Mix of equal and random spreads; equal spreads exercise ties.
      s.L[i] = trial % 3 == 0 ? 1.0 : 0.1 + 3.0 * u(rng);
    }
    const auto fast = detect_crossings(s);
    const auto ref = exhaustive(s);
    with_events += !ref.empty();
    REQUIRE(pairs_of(fast) == ref);
    REQUIRE(pairs_of(detect_crossings_bruteforce(s)) == ref);
    for (const auto& e : fast) CHECK(e.overlap == doctest::Approx(s.bid(e.buyer) - s.ask(e.seller)));
  }
  CHECK(with_events > 1000);
  CHECK(with_events < 9900);
}

TEST_CASE("settlement examples") {
  auto a = make_state({1.0, -1.0}, {2, 2});
  std::vector<TickRow> rows;
  settle(a, detect_crossings(a), rows);
  REQUIRE(rows.size() == 1);
  CHECK(a.p == 0.0);
  CHECK(a.z[0] == 0.0);
  CHECK(a.z[1] == 0.0);
  CHECK(a.z_cm == 0.0);
  CHECK(rows[0].buyer == 0);
  CHECK(rows[0].seller == 1);

  auto b = make_state({3.0, 0.0}, {2, 4});
  const double cm0 = b.z_cm;
  rows.clear();
  settle(b, detect_crossings(b), rows);
  REQUIRE(rows.size() == 1);
  CHECK(b.p == 2.0);
  CHECK(b.dp == 2.0);
  CHECK(b.z[0] == 2.0);
  CHECK(b.z[1] == 2.0);
  CHECK(b.z_cm - cm0 == doctest::Approx(1.0 / 2.0));
  CHECK(b.z_cm == doctest::Approx(b.recomputed_cm()));
  CHECK(detect_crossings(b).empty());
}

TEST_CASE("stale events are skipped") {
  // Trader 0 crosses both 1 and 2; after the first settlement the second pair is stale.
  auto s = make_state({1.2, -1.0, -0.9}, {2, 2, 2});
  auto ev = detect_crossings(s);
  REQUIRE(ev.size() == 2);
  std::vector<TickRow> rows;
  settle(s, ev, rows);
  CHECK(rows.size() == 1);
  CHECK(s.diag.stale_events == 1);
}

TEST_CASE("settle_all leaves no crossing and tracks the centre of mass") {
  auto rng = make_stream(22, StreamTag::test);
  boost::random::uniform_real_distribution<double> u(0.0, 1.0);
  for (int trial = 0; trial < 500; ++trial) {
    const int n = 2 + trial % 60;
    EnsembleState s;
    s.z.resize(n);
    s.L.resize(n);
    for (int i = 0; i < n; ++i) {
      s.z[i] = 3.0 * (2.0 * u(rng) - 1.0);
      s.L[i] = 0.5 + 2.0 * u(rng);
    }
    s.z_cm = s.recomputed_cm();
    std::vector<TickRow> rows;
    settle_all(s, rows);
    CHECK_FALSE(any_crossing(s));
    CHECK(std::abs(s.z_cm - s.recomputed_cm()) < 1e-9);
  }
}

TEST_CASE("equal spreads conserve the centre of mass in settlement") {
  auto rng = make_stream(23, StreamTag::test);
  boost::random::uniform_real_distribution<double> u(-4.0, 4.0);
  EnsembleState s;
  s.z.resize(50);
  s.L = Eigen::VectorXd::Constant(50, 1.0);
  for (int i = 0; i < 50; ++i) s.z[i] = u(rng);
  const double cm = s.recomputed_cm();
  std::vector<TickRow> rows;
  settle_all(s, rows);
  CHECK(rows.size() > 0);
  CHECK(std::abs(s.recomputed_cm() - cm) < 1e-12);
}

TEST_CASE("advance") {
  SimConfig cfg;
  cfg.n_traders = 3;
  cfg.trend_strength = 0.0;
  auto s = make_state({0.1, -0.2, 0.3}, {1, 1, 1});
  const Eigen::VectorXd z0 = s.z;
  advance(s, cfg, 0.01, Eigen::VectorXd::Zero(3));
  CHECK(s.z == z0);
  CHECK(s.t == 0.01);

  cfg.trend_strength = 5.0;
  cfg.trend_threshold = 0.2;
  s.dp = 0.0;
  advance(s, cfg, 0.01, Eigen::VectorXd::Zero(3));
  CHECK(s.z == z0);

  s.dp = 1e3;
  advance(s, cfg, 0.01, Eigen::VectorXd::Zero(3));
  for (int i = 0; i < 3; ++i) CHECK(s.z[i] - z0[i] == doctest::Approx(5.0 * 0.01).epsilon(1e-14));
  CHECK(s.z_cm == doctest::Approx(s.recomputed_cm()).epsilon(1e-14));

  CHECK_THROWS_AS(advance(s, cfg, 0.01, Eigen::VectorXd::Zero(2)), ConfigError);
}

TEST_CASE("initial state has no crossing") {
  auto rng = make_stream(24, StreamTag::test);
  auto cfg = small_config(2, SpreadLaw::point_mass(2.0), 10);
  const auto placed = place_traders(cfg, rng);
  for (int i = 0; i < 2; ++i) CHECK(std::abs(placed.z[i]) <= 1.0);
  for (int n : {2, 10, 200}) {
    cfg.n_traders = n;
    for (auto law : {SpreadLaw::point_mass(2.0), SpreadLaw::gamma(1.0)}) {
      cfg.spread_law = law;
      const auto s = init_state(cfg, rng);
      CHECK_FALSE(any_crossing(s));
      CHECK(s.t == 0.0);
      CHECK(s.tick == 0);
    }
  }
}

TEST_CASE("same seed replays bit-identically") {
  const auto cfg = small_config(40, SpreadLaw::gamma(1.0), 3000, 77);
  TickRecorder a, b;
  MicroEngine(cfg).run({&a});
  MicroEngine(cfg).run({&b});
  REQUIRE(a.series.size() == 3000);
  CHECK(a.series.t == b.series.t);
  CHECK(a.series.p == b.series.p);
  CHECK(a.series.buyer == b.series.buyer);

  auto other = cfg;
  other.seed = 78;
  TickRecorder c;
  MicroEngine(other).run({&c});
  CHECK(c.series.p != a.series.p);
}

TEST_CASE("ensemble results do not depend on the worker count") {
  const auto cfg = small_config(30, SpreadLaw::gamma(1.0), 1500, 9);
  TickRecorder r1, r8;
  MovementCollector m1(5), m8(5);
  run_ensemble(cfg, 8, 1, {&r1, &m1});
  run_ensemble(cfg, 8, 8, {&r8, &m8});
  CHECK(r1.series.size() == 8 * 1500);
  CHECK(r1.series.p == r8.series.p);
  CHECK(r1.series.tau == r8.series.tau);
  CHECK(m1.autocorr() == m8.autocorr());
  CHECK(m1.variance() == m8.variance());
  CHECK(m1.signs.same == m8.signs.same);
}

TEST_CASE("run invariants") {
  auto cfg = small_config(60, SpreadLaw::gamma(1.0), 4000, 31);
  TickRecorder rec;
  MicroEngine engine(cfg);
  engine.run({&rec});
  const auto& s = engine.state();
  CHECK(std::abs(s.z_cm - s.recomputed_cm()) < 1e-9);
  CHECK(s.diag.max_cm_drift < 1e-9);
  CHECK_FALSE(any_crossing(s));
  for (std::size_t k = 0; k < rec.series.size(); ++k) {
    CHECK(rec.series.tau[k] >= 0.0);
    CHECK(rec.series.T[k] == static_cast<std::int64_t>(k));
    if (k) CHECK(rec.series.p[k] - rec.series.p[k - 1] == doctest::Approx(rec.series.dp[k]));
  }
}

TEST_CASE("mean interval is insensitive to the time step") {
  auto cfg = small_config(50, SpreadLaw::point_mass(1.0), 40000, 12);
  const double dt = *resolve(cfg).dt;
  MovementCollector coarse(1), fine(1);
  MicroEngine(cfg).run({&coarse});
  cfg.dt = dt / 4.0;
  MicroEngine(cfg).run({&fine});
  CHECK(coarse.mean_tau() == doctest::Approx(fine.mean_tau()).epsilon(0.05));
}

TEST_CASE("two traders keep trading") {
  auto cfg = small_config(2, SpreadLaw::point_mass(2.0), 200, 3);
  TickRecorder rec;
  MicroEngine(cfg).run({&rec});
  CHECK(rec.series.size() == 200);
}

TEST_CASE("starvation guard") {
  auto cfg = small_config(2, SpreadLaw::point_mass(2.0), 10, 3);
  cfg.max_idle_steps = 5;
  TickRecorder rec;
  CHECK_THROWS_AS(MicroEngine(cfg).run({&rec}), StarvationError);
}

}  // TEST_SUITE
