#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <vector>

#include <Eigen/Dense>

#include "hftkin/config.hpp"
#include "hftkin/random.hpp"
#include "hftkin/state.hpp"

namespace hftkin {

struct CrossingEvent {
  int buyer = -1;   // higher mid
  int seller = -1;
  double overlap = 0.0;  // bid(buyer) - ask(seller) >= 0
};

/// Draws spreads, places z_i uniformly on [-L_max/2, L_max/2], settles any
/// crossing, then runs the warm-up and resets t and tick to zero.
EnsembleState init_state(const SimConfig& cfg, Xoshiro256pp& rng);

/// Placement only: no warm-up.
EnsembleState place_traders(const SimConfig& cfg, Xoshiro256pp& rng);

/// One Euler-Maruyama step. Returns true when max bid >= min ask after the
/// step, i.e. when detect_crossings can return a non-empty list.
bool advance(EnsembleState& s, const SimConfig& cfg, double dt, Xoshiro256pp& rng);

/// Same step with the standard normals supplied by the caller (size N).
bool advance(EnsembleState& s, const SimConfig& cfg, double dt, const Eigen::VectorXd& g);

/// All pairs with bid(i) >= ask(j), sorted by overlap descending, then by
/// (buyer, seller) ascending.
std::vector<CrossingEvent> detect_crossings(const EnsembleState& s);

/// Exhaustive O(N^2) reference scan, same ordering.
std::vector<CrossingEvent> detect_crossings_bruteforce(const EnsembleState& s);

/// Settles the given events in order, re-validating each against the current
/// state; stale events are skipped and counted. Appends one row per settled
/// pair (tau left at 0).
void settle(EnsembleState& s, const std::vector<CrossingEvent>& events, std::vector<TickRow>& rows);

/// Detect and settle until no pair crosses.
void settle_all(EnsembleState& s, std::vector<TickRow>& rows);

/// Recompute z_cm from z; records the drift in diagnostics.
void reanchor_cm(EnsembleState& s);

class MicroEngine {
 public:
  MicroEngine(const SimConfig& cfg, std::uint64_t replica = 0);

  /// Runs until cfg.tick_budget rows (each with its tau) reached the collectors.
  void run(const std::vector<Collector*>& collectors);

  const EnsembleState& state() const { return state_; }
  const SimConfig& config() const { return cfg_; }

 private:
  SimConfig cfg_;
  Xoshiro256pp rng_;
  EnsembleState state_;
};

/// Independent replicas (seed, replica index r) spread over `workers` threads.
/// Each replica feeds clones of the prototypes; the clones are merged into the
/// prototypes in replica order, so results do not depend on `workers`.
void run_ensemble(const SimConfig& cfg, int replicas, int workers, const std::vector<Collector*>& prototypes);

}  // namespace hftkin
