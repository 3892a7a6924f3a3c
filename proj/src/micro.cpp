#include "hftkin/micro.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include <boost/random/normal_distribution.hpp>
#include <boost/random/uniform_real_distribution.hpp>

#include "hftkin/errors.hpp"

namespace hftkin {

namespace {

constexpr std::int64_t kReanchorEvery = 4096;

double drift(const EnsembleState& s, const SimConfig& cfg) {
  if (cfg.trend_strength == 0.0) return 0.0;
  return cfg.trend_strength * std::tanh(s.dp / cfg.trend_threshold);
}

bool event_before(const CrossingEvent& a, const CrossingEvent& b) {
  if (a.overlap != b.overlap) return a.overlap > b.overlap;
  if (a.buyer != b.buyer) return a.buyer < b.buyer;
  return a.seller < b.seller;
}

}  // namespace

EnsembleState place_traders(const SimConfig& cfg, Xoshiro256pp& rng) {
  validate(cfg);
  const int n = cfg.n_traders;
  EnsembleState s;
  s.L = sample_spreads(cfg.spread_law, n, rng);
  s.z.resize(n);
  const double half = 0.5 * s.L.maxCoeff();
  boost::random::uniform_real_distribution<double> u(-half, half);
  for (int i = 0; i < n; ++i) s.z[i] = u(rng);
  s.z_cm = s.recomputed_cm();
  s.p = s.z_cm;
  return s;
}

EnsembleState init_state(const SimConfig& cfg_in, Xoshiro256pp& rng) {
  const SimConfig cfg = resolve(cfg_in);
  EnsembleState s = place_traders(cfg, rng);
  std::vector<TickRow> rows;
  settle_all(s, rows);
  const double dt = *cfg.dt;
  const auto steps = static_cast<std::int64_t>(std::ceil(*cfg.warmup / dt - 1e-9));
  for (std::int64_t k = 0; k < steps; ++k) {
    if (advance(s, cfg, dt, rng)) {
      rows.clear();
      settle_all(s, rows);
    }
    if (s.diag.steps % kReanchorEvery == 0) reanchor_cm(s);
  }
  reanchor_cm(s);
  s.t = 0.0;
  s.tick = 0;
  s.diag = EngineDiagnostics{};
  return s;
}

bool advance(EnsembleState& s, const SimConfig& cfg, double dt, Xoshiro256pp& rng) {
  boost::random::normal_distribution<double> normal;
  const int n = s.size();
  const double shift = drift(s, cfg) * dt;
  const double amp = cfg.noise_std * std::sqrt(dt);
  double* z = s.z.data();
  const double* l = s.L.data();
  double gsum = 0.0;
  double max_bid = -HUGE_VAL, min_ask = HUGE_VAL;
  for (int i = 0; i < n; ++i) {
    const double g = normal(rng);
    gsum += g;
    z[i] += shift + amp * g;
    max_bid = std::max(max_bid, z[i] - 0.5 * l[i]);
    min_ask = std::min(min_ask, z[i] + 0.5 * l[i]);
  }
  s.z_cm += shift + amp * gsum / n;
  s.t += dt;
  ++s.diag.steps;
  return max_bid >= min_ask;
}

bool advance(EnsembleState& s, const SimConfig& cfg, double dt, const Eigen::VectorXd& g) {
  const int n = s.size();
  if (g.size() != n) throw ConfigError("advance: noise vector has the wrong size");
  const double shift = drift(s, cfg) * dt;
  const double amp = cfg.noise_std * std::sqrt(dt);
  s.z.array() += shift + amp * g.array();
  s.z_cm += shift + amp * g.sum() / n;
  s.t += dt;
  ++s.diag.steps;
  return (s.z - 0.5 * s.L).maxCoeff() >= (s.z + 0.5 * s.L).minCoeff();
}

std::vector<CrossingEvent> detect_crossings(const EnsembleState& s) {
  const int n = s.size();
  std::vector<int> by_bid(n), by_ask(n);
  std::iota(by_bid.begin(), by_bid.end(), 0);
  std::iota(by_ask.begin(), by_ask.end(), 0);
  std::sort(by_bid.begin(), by_bid.end(), [&](int a, int b) { return s.bid(a) > s.bid(b); });
  std::sort(by_ask.begin(), by_ask.end(), [&](int a, int b) { return s.ask(a) < s.ask(b); });
  std::vector<CrossingEvent> out;
  for (int i : by_bid) {
    const double b = s.bid(i);
    if (b < s.ask(by_ask[0])) break;
    for (int j : by_ask) {
      const double a = s.ask(j);
      if (a > b) break;
      if (j != i) out.push_back({i, j, b - a});
    }
  }
  std::sort(out.begin(), out.end(), event_before);
  return out;
}

std::vector<CrossingEvent> detect_crossings_bruteforce(const EnsembleState& s) {
  const int n = s.size();
  std::vector<CrossingEvent> out;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      if (i != j && s.z[i] - s.z[j] >= 0.5 * (s.L[i] + s.L[j])) out.push_back({i, j, s.bid(i) - s.ask(j)});
  std::sort(out.begin(), out.end(), event_before);
  return out;
}

void settle(EnsembleState& s, const std::vector<CrossingEvent>& events, std::vector<TickRow>& rows) {
  const int n = s.size();
  for (const auto& e : events) {
    const int i = e.buyer, j = e.seller;
    const double b = s.bid(i), a = s.ask(j);
    if (b < a) {
      ++s.diag.stale_events;
      continue;
    }
    const double price = 0.5 * (b + a);
    s.z[i] -= 0.5 * s.L[i];
    s.z[j] += 0.5 * s.L[j];
    s.z_cm -= (s.L[i] - s.L[j]) / (2.0 * n);
    s.dp = price - s.p;
    s.p = price;
    rows.push_back({s.tick, s.t, s.p, s.dp, 0.0, i, j});
    ++s.tick;
  }
}

void settle_all(EnsembleState& s, std::vector<TickRow>& rows) {
  const std::size_t before = rows.size();
  for (;;) {
    auto events = detect_crossings(s);
    if (events.empty()) break;
    settle(s, events, rows);
  }
  if (rows.size() - before > 1) ++s.diag.multi_settlements;
}

void reanchor_cm(EnsembleState& s) {
  const double exact = s.recomputed_cm();
  s.diag.max_cm_drift = std::max(s.diag.max_cm_drift, std::abs(exact - s.z_cm));
  s.z_cm = exact;
  ++s.diag.reanchors;
}

MicroEngine::MicroEngine(const SimConfig& cfg, std::uint64_t replica)
    : cfg_(resolve(cfg)), rng_(make_stream(cfg.seed, StreamTag::micro, replica)) {
  state_ = init_state(cfg_, rng_);
}

void MicroEngine::run(const std::vector<Collector*>& collectors) {
  const double dt = *cfg_.dt;
  const double interval = *cfg_.sampling_interval;
  std::int64_t delivered = 0;
  std::int64_t idle = 0;
  bool have_pending = false;
  TickRow pending;
  std::vector<TickRow> rows;
  double next_snapshot = interval;
  std::int64_t snapshot_index = 1;
  auto& s = state_;

  while (delivered < cfg_.tick_budget) {
    ++idle;
    if (advance(s, cfg_, dt, rng_)) {
      rows.clear();
      settle_all(s, rows);
      ++s.diag.screen_hits;
      for (const auto& r : rows) {
        idle = 0;
        if (have_pending && delivered < cfg_.tick_budget) {
          pending.tau = r.t - pending.t;
          for (auto* c : collectors) c->on_tick(pending);
          ++delivered;
        }
        pending = r;
        have_pending = true;
      }
    }
    if (s.diag.steps % kReanchorEvery == 0) reanchor_cm(s);
    if (s.t >= next_snapshot) {
      for (auto* c : collectors) c->on_snapshot(s, s.t);
      ++snapshot_index;
      next_snapshot = interval * static_cast<double>(snapshot_index);
    }
    if (idle > cfg_.max_idle_steps)
      throw StarvationError("micro engine: no transaction within " + std::to_string(cfg_.max_idle_steps) + " steps");
  }
}

void run_ensemble(const SimConfig& cfg, int replicas, int workers, const std::vector<Collector*>& prototypes) {
  validate(cfg);
  run_replicated(replicas, workers, prototypes, [&](int r, const std::vector<Collector*>& sinks) {
    MicroEngine engine(cfg, static_cast<std::uint64_t>(r));
    engine.run(sinks);
  });
}

}  // namespace hftkin
