#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <vector>

#include <Eigen/Dense>

namespace hftkin {

struct EngineDiagnostics {
  std::int64_t steps = 0;
  std::int64_t screen_hits = 0;       // steps where the O(N) screen found a crossing
  std::int64_t stale_events = 0;      // events dropped on re-validation
  std::int64_t multi_settlements = 0; // steps that settled more than one pair
  std::int64_t reanchors = 0;
  double max_cm_drift = 0.0;          // largest |incremental - recomputed| seen at re-anchoring
};

/// Mid-prices and spreads of all traders plus the market variables.
struct EnsembleState {
  Eigen::VectorXd z;  // mid-prices
  Eigen::VectorXd L;  // spreads, frozen after init
  double z_cm = 0.0;
  double p = 0.0;     // last transacted price
  double dp = 0.0;    // last price movement
  double t = 0.0;
  std::int64_t tick = 0;
  EngineDiagnostics diag;

  int size() const { return static_cast<int>(z.size()); }
  double bid(int i) const { return z[i] - 0.5 * L[i]; }
  double ask(int i) const { return z[i] + 0.5 * L[i]; }
  double recomputed_cm() const { return z.mean(); }
};

/// One transaction. tau is the interval to the next transaction.
struct TickRow {
  std::int64_t T = 0;
  double t = 0.0;
  double p = 0.0;
  double dp = 0.0;
  double tau = 0.0;
  int buyer = -1;  // -1 when the generator has no counterparties
  int seller = -1;
};

/// Column-oriented record of a run.
struct TickSeries {
  std::vector<std::int64_t> T;
  std::vector<double> t, p, dp, tau;
  std::vector<int> buyer, seller;

  std::size_t size() const { return T.size(); }
  void reserve(std::size_t n);
  void push_back(const TickRow& r);
  TickRow row(std::size_t k) const;
};

/// Sink fed by the generators. Replicas get their own instance from
/// clone_empty(); results combine through merge().
class Collector {
 public:
  virtual ~Collector() = default;
  virtual void on_tick(const TickRow& /*row*/) {}
  virtual void on_snapshot(const EnsembleState& /*state*/, double /*t*/) {}
  virtual std::unique_ptr<Collector> clone_empty() const = 0;
  virtual void merge(const Collector& other) = 0;
};

/// Stores every tick of a run. Merging appends (used for single-replica runs).
class TickRecorder : public Collector {
 public:
  void on_tick(const TickRow& row) override { series.push_back(row); }
  std::unique_ptr<Collector> clone_empty() const override { return std::make_unique<TickRecorder>(); }
  void merge(const Collector& other) override;

  TickSeries series;
};

/// Runs body(r, sinks) for r = 0..replicas-1 on `workers` threads, each
/// replica writing into fresh clones of the prototypes; the clones are merged
/// into the prototypes in replica order. The first exception is rethrown.
void run_replicated(int replicas, int workers, const std::vector<Collector*>& prototypes,
                    const std::function<void(int, const std::vector<Collector*>&)>& body);

}  // namespace hftkin
