#pragma once

#include <cmath>
#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "hftkin/state.hpp"

namespace hftkin {

/// Uniform-bin histogram with integer counts (merging is exact).
class Histogram {
 public:
  Histogram() = default;
  Histogram(double lo, double hi, double width);

  void add(double x);
  void add(double x, std::int64_t times);
  void merge(const Histogram& other);

  int bins() const { return static_cast<int>(counts_.size()); }
  double lo() const { return lo_; }
  double hi() const { return lo_ + width_ * bins(); }
  double width() const { return width_; }
  double center(int k) const { return lo_ + (k + 0.5) * width_; }
  std::int64_t count(int k) const { return counts_[k]; }
  std::int64_t in_range() const { return in_range_; }
  std::int64_t underflow() const { return underflow_; }
  std::int64_t overflow() const { return overflow_; }

  /// Counts divided by (in-range total * width); integrates to 1 over [lo, hi).
  Eigen::VectorXd density() const;
  Eigen::VectorXd centers() const;

 private:
  double lo_ = 0.0, width_ = 1.0;
  std::vector<std::int64_t> counts_;
  std::int64_t in_range_ = 0, underflow_ = 0, overflow_ = 0;
};

enum class BookReference { cm, market_mid };

/// Pools the quote prices of every snapshot relative to the reference price:
/// asks a_i - ref into `ask`, bids b_i - ref into `bid`.
class BookProfileCollector : public Collector {
 public:
  BookProfileCollector(double half_range, double bin_width, BookReference ref = BookReference::cm);

  void on_snapshot(const EnsembleState& s, double t) override;
  std::unique_ptr<Collector> clone_empty() const override;
  void merge(const Collector& other) override;

  Histogram ask, bid;
  std::int64_t snapshots = 0;

 private:
  double half_range_, bin_width_;
  BookReference ref_;
};

/// Stores a_i - z_CM for every trader at every snapshot.
class SnapshotRecorder : public Collector {
 public:
  void on_snapshot(const EnsembleState& s, double t) override;
  std::unique_ptr<Collector> clone_empty() const override { return std::make_unique<SnapshotRecorder>(); }
  void merge(const Collector& other) override;

  std::vector<double> times;
  std::vector<Eigen::VectorXd> asks;
};

/// Density of ask-side relative prices pooled over snapshots (each row is one
/// snapshot of r_i + L_i/2).
Histogram book_profile_estimate(const std::vector<Eigen::VectorXd>& snapshots, double bin_width, double half_range);

/// L1 distance between a density histogram and a reference density evaluated
/// at bin centers; mass outside the histogram range counts as error.
template <class F>
double l1_distance(const Histogram& h, F&& reference) {
  const Eigen::VectorXd d = h.density();
  const double total = static_cast<double>(h.in_range() + h.underflow() + h.overflow());
  const double scale = total > 0 ? h.in_range() / total : 0.0;
  double acc = 0.0;
  for (int k = 0; k < h.bins(); ++k) acc += std::abs(scale * d[k] - reference(h.center(k))) * h.width();
  return acc + (1.0 - scale);
}

// ---- MSD ---------------------------------------------------------------

/// Tick-time MSD[K] = <(p[T+K] - p[T])^2> over all origins.
std::vector<double> msd_tick(const std::vector<double>& p, const std::vector<int>& lags);

/// p(t) sampled as the last transacted price on the grid t[0] + k*step.
std::vector<double> sample_on_grid(const std::vector<double>& t, const std::vector<double>& p, double step);

/// Real-time MSD at lags lag_steps[k] * step.
std::vector<double> msd_real_time(const std::vector<double>& t, const std::vector<double>& p, double step,
                                  const std::vector<int>& lag_steps);

/// Streaming MSD over an evenly indexed sequence with lags 1..max_lag.
/// Sufficient statistics (sums and counts) merge across replicas.
class MsdAccumulator {
 public:
  explicit MsdAccumulator(int max_lag = 1);
  void push(double x);
  void merge(const MsdAccumulator& other);
  void reset_stream();  // forget history (new replica), keep sums
  int max_lag() const { return max_lag_; }
  double msd(int lag) const { return sum_[lag] / static_cast<double>(count_[lag]); }
  std::int64_t count(int lag) const { return count_[lag]; }

 private:
  int max_lag_;
  std::vector<double> ring_;
  std::int64_t seen_ = 0;
  std::vector<double> sum_;
  std::vector<std::int64_t> count_;
};

class TickMsdCollector : public Collector {
 public:
  explicit TickMsdCollector(int max_lag);
  void on_tick(const TickRow& row) override { acc.push(row.p); }
  std::unique_ptr<Collector> clone_empty() const override;
  void merge(const Collector& other) override;
  MsdAccumulator acc;
};

/// Samples the last transacted price every `step` time units.
class RealTimeMsdCollector : public Collector {
 public:
  RealTimeMsdCollector(double step, int max_lag_steps);
  void on_tick(const TickRow& row) override;
  std::unique_ptr<Collector> clone_empty() const override;
  void merge(const Collector& other) override;
  double step() const { return step_; }
  MsdAccumulator acc;

 private:
  double step_;
  bool started_ = false;
  double next_t_ = 0.0;
  double last_p_ = 0.0;
};

// ---- correlations and signs ---------------------------------------------

/// C[K] = <x[T+K] x[T]> / <x[T]^2>, K = 0..k_max (not mean-subtracted).
std::vector<double> autocorr(const std::vector<double>& x, int k_max);

struct SignStats {
  std::int64_t same = 0;
  std::int64_t diff = 0;
  double p_same() const { return static_cast<double>(same) / static_cast<double>(same + diff); }
  double p_diff() const { return static_cast<double>(diff) / static_cast<double>(same + diff); }
};

/// Consecutive pairs among the non-zero entries of x.
SignStats sign_stats(const std::vector<double>& x);

/// Streaming lag products, zero-skipping sign statistics, and moments of dp.
class MovementCollector : public Collector {
 public:
  explicit MovementCollector(int k_max);
  void on_tick(const TickRow& row) override;
  std::unique_ptr<Collector> clone_empty() const override;
  void merge(const Collector& other) override;

  std::vector<double> autocorr() const;
  double variance() const { return sum_sq_ / n_; }  // <dp^2>
  double mean() const { return sum_ / n_; }
  double mean_tau() const { return sum_tau_ / n_; }
  std::int64_t samples() const { return n_; }
  SignStats signs;

 private:
  int k_max_;
  std::vector<double> ring_;
  std::int64_t seen_ = 0;
  std::vector<double> lag_sum_;
  std::vector<std::int64_t> lag_count_;
  double sum_ = 0.0, sum_sq_ = 0.0, sum_tau_ = 0.0;
  std::int64_t n_ = 0;
  double last_nonzero_ = 0.0;
};

/// Keeps every dp and tau, with replica boundaries. Merging appends in order.
class ReplicaSamples : public Collector {
 public:
  void on_tick(const TickRow& row) override;
  std::unique_ptr<Collector> clone_empty() const override { return std::make_unique<ReplicaSamples>(); }
  void merge(const Collector& other) override;

  int replicas() const { return static_cast<int>(offsets.size()) - 1; }
  /// Mean interval of replica r.
  double mean_tau(int r) const;
  /// 1 / mean_r(1 / mean_tau(r)): inverse of the replica-averaged tick rate.
  double ensemble_mean_tau() const;
  /// Every interval divided by the mean interval of its own replica.
  std::vector<double> normalized_tau() const;
  /// Every dp divided by scale times the mean interval of its replica.
  std::vector<double> dp_per_mean_tau(double scale) const;

  std::vector<double> dp, tau;
  std::vector<std::size_t> offsets{0};  // replica r spans [offsets[r], offsets[r+1])

 private:
  bool open_ = false;
};

// ---- fits ------------------------------------------------------------------

enum class FitModel { exponential_tail, gaussian_tail, loglog };

struct FitResult {
  FitModel model = FitModel::exponential_tail;
  std::vector<double> params;  // exponential: {kappa, log-amplitude}; gaussian: {h0, h1, h2}; loglog: {slope, intercept}
  double window_lo = 0.0, window_hi = 0.0;
  double residual = 0.0;       // weighted RMS residual of the log fit
  std::int64_t samples_in_window = 0;

  double kappa() const { return params.at(0); }
  double slope() const { return params.at(0); }
  double hurst() const { return params.at(0) / 2.0; }
};

std::string to_string(FitModel m);

/// Least squares on the log of a histogram density of |samples| (exponential:
/// log f = a - x/kappa; gaussian: log f = -(h0 + h1 x + h2 x^2)). The window
/// defaults to [2 s, 6 s] with s the RMS of the samples. Bins are weighted
/// by their counts. Throws DomainError on a degenerate window.
FitResult tail_fit(const std::vector<double>& samples, FitModel model, std::optional<double> lo = std::nullopt,
                   std::optional<double> hi = std::nullopt, int bins = 40);

/// Fraction of samples with |x| > k s, s the RMS of the samples.
double tail_mass(const std::vector<double>& samples, double k);

/// Weighted least squares of log y against log x for x in [lo, hi].
FitResult loglog_fit(const std::vector<double>& x, const std::vector<double>& y, double lo, double hi);

struct LineFit {
  double slope = 0.0, intercept = 0.0;
};

/// Ordinary least squares y = intercept + slope * x.
LineFit line_fit(const std::vector<double>& x, const std::vector<double>& y);

}  // namespace hftkin
