#include "hftkin/estimators.hpp"

#include <algorithm>
#include <numeric>

#include "hftkin/errors.hpp"

namespace hftkin {

Histogram::Histogram(double lo, double hi, double width) : lo_(lo), width_(width) {
  if (!(width > 0.0) || !(hi > lo)) throw ConfigError("histogram: need hi > lo and width > 0");
  counts_.assign(static_cast<std::size_t>(std::ceil((hi - lo) / width - 1e-9)), 0);
}

void Histogram::add(double x) { add(x, 1); }

void Histogram::add(double x, std::int64_t times) {
  const double u = (x - lo_) / width_;
  if (u < 0.0) {
    underflow_ += times;
  } else if (u >= bins()) {
    overflow_ += times;
  } else {
    counts_[static_cast<std::size_t>(u)] += times;
    in_range_ += times;
  }
}

void Histogram::merge(const Histogram& o) {
  if (o.counts_.size() != counts_.size() || o.lo_ != lo_ || o.width_ != width_)
    throw ConfigError("histogram: merging incompatible binnings");
  for (std::size_t k = 0; k < counts_.size(); ++k) counts_[k] += o.counts_[k];
  in_range_ += o.in_range_;
  underflow_ += o.underflow_;
  overflow_ += o.overflow_;
}

Eigen::VectorXd Histogram::density() const {
  Eigen::VectorXd d(bins());
  const double norm = in_range_ > 0 ? 1.0 / (static_cast<double>(in_range_) * width_) : 0.0;
  for (int k = 0; k < bins(); ++k) d[k] = static_cast<double>(counts_[k]) * norm;
  return d;
}

Eigen::VectorXd Histogram::centers() const {
  Eigen::VectorXd c(bins());
  for (int k = 0; k < bins(); ++k) c[k] = center(k);
  return c;
}

BookProfileCollector::BookProfileCollector(double half_range, double bin_width, BookReference ref)
    : ask(-half_range, half_range, bin_width),
      bid(-half_range, half_range, bin_width),
      half_range_(half_range),
      bin_width_(bin_width),
      ref_(ref) {}

void BookProfileCollector::on_snapshot(const EnsembleState& s, double) {
  double ref = s.z_cm;
  if (ref_ == BookReference::market_mid)
    ref = 0.5 * ((s.z - 0.5 * s.L).maxCoeff() + (s.z + 0.5 * s.L).minCoeff());
  for (int i = 0; i < s.size(); ++i) {
    ask.add(s.ask(i) - ref);
    bid.add(s.bid(i) - ref);
  }
  ++snapshots;
}

std::unique_ptr<Collector> BookProfileCollector::clone_empty() const {
  return std::make_unique<BookProfileCollector>(half_range_, bin_width_, ref_);
}

void BookProfileCollector::merge(const Collector& other) {
  const auto& o = dynamic_cast<const BookProfileCollector&>(other);
  ask.merge(o.ask);
  bid.merge(o.bid);
  snapshots += o.snapshots;
}

void SnapshotRecorder::on_snapshot(const EnsembleState& s, double t) {
  times.push_back(t);
  asks.emplace_back((s.z + 0.5 * s.L).array() - s.z_cm);
}

void SnapshotRecorder::merge(const Collector& other) {
  const auto& o = dynamic_cast<const SnapshotRecorder&>(other);
  times.insert(times.end(), o.times.begin(), o.times.end());
  asks.insert(asks.end(), o.asks.begin(), o.asks.end());
}

Histogram book_profile_estimate(const std::vector<Eigen::VectorXd>& snapshots, double bin_width, double half_range) {
  if (snapshots.empty()) throw DomainError("book_profile_estimate: no snapshots");
  Histogram h(-half_range, half_range, bin_width);
  for (const auto& snap : snapshots)
    for (Eigen::Index i = 0; i < snap.size(); ++i) h.add(snap[i]);
  return h;
}

// ---- MSD ---------------------------------------------------------------------

std::vector<double> msd_tick(const std::vector<double>& p, const std::vector<int>& lags) {
  std::vector<double> out;
  out.reserve(lags.size());
  const auto n = static_cast<std::int64_t>(p.size());
  for (int k : lags) {
    if (k < 0 || k >= n) throw DomainError("msd_tick: lag exceeds the series span");
    double acc = 0.0;
    for (std::int64_t T = 0; T + k < n; ++T) {
      const double d = p[T + k] - p[T];
      acc += d * d;
    }
    out.push_back(acc / static_cast<double>(n - k));
  }
  return out;
}

std::vector<double> sample_on_grid(const std::vector<double>& t, const std::vector<double>& p, double step) {
  if (t.empty()) return {};
  std::vector<double> out;
  const double t0 = t.front();
  std::size_t j = 0;
  for (std::int64_t k = 0;; ++k) {
    const double g = t0 + static_cast<double>(k) * step;
    if (g > t.back()) break;
    while (j + 1 < t.size() && t[j + 1] <= g) ++j;
    out.push_back(p[j]);
  }
  return out;
}

std::vector<double> msd_real_time(const std::vector<double>& t, const std::vector<double>& p, double step,
                                  const std::vector<int>& lag_steps) {
  return msd_tick(sample_on_grid(t, p, step), lag_steps);
}

MsdAccumulator::MsdAccumulator(int max_lag)
    : max_lag_(max_lag), ring_(max_lag, 0.0), sum_(max_lag + 1, 0.0), count_(max_lag + 1, 0) {
  if (max_lag < 1) throw ConfigError("msd: max_lag must be >= 1");
}

void MsdAccumulator::push(double x) {
  const std::int64_t reach = std::min<std::int64_t>(seen_, max_lag_);
  for (int lag = 1; lag <= reach; ++lag) {
    const double d = x - ring_[(seen_ - lag) % max_lag_];
    sum_[lag] += d * d;
    ++count_[lag];
  }
  ring_[seen_ % max_lag_] = x;
  ++seen_;
}

void MsdAccumulator::merge(const MsdAccumulator& o) {
  if (o.max_lag_ != max_lag_) throw ConfigError("msd: merging accumulators with different lags");
  for (int k = 0; k <= max_lag_; ++k) {
    sum_[k] += o.sum_[k];
    count_[k] += o.count_[k];
  }
}

void MsdAccumulator::reset_stream() { seen_ = 0; }

TickMsdCollector::TickMsdCollector(int max_lag) : acc(max_lag) {}

std::unique_ptr<Collector> TickMsdCollector::clone_empty() const {
  return std::make_unique<TickMsdCollector>(acc.max_lag());
}

void TickMsdCollector::merge(const Collector& other) { acc.merge(dynamic_cast<const TickMsdCollector&>(other).acc); }

RealTimeMsdCollector::RealTimeMsdCollector(double step, int max_lag_steps) : acc(max_lag_steps), step_(step) {
  if (!(step > 0.0)) throw ConfigError("real-time msd: step must be positive");
}

void RealTimeMsdCollector::on_tick(const TickRow& row) {
  if (!started_) {
    started_ = true;
    next_t_ = row.t;
  }
  while (next_t_ < row.t) {
    acc.push(last_p_);
    next_t_ += step_;
  }
  last_p_ = row.p;
}

std::unique_ptr<Collector> RealTimeMsdCollector::clone_empty() const {
  return std::make_unique<RealTimeMsdCollector>(step_, acc.max_lag());
}

void RealTimeMsdCollector::merge(const Collector& other) {
  acc.merge(dynamic_cast<const RealTimeMsdCollector&>(other).acc);
}

// ---- correlations --------------------------------------------------------------

std::vector<double> autocorr(const std::vector<double>& x, int k_max) {
  const auto n = static_cast<std::int64_t>(x.size());
  if (k_max < 0 || k_max >= n) throw DomainError("autocorr: k_max exceeds the series span");
  double c0 = 0.0;
  for (double v : x) c0 += v * v;
  c0 /= static_cast<double>(n);
  if (c0 == 0.0) throw DomainError("autocorr: all-zero series");
  std::vector<double> out(k_max + 1);
  out[0] = 1.0;
  for (int k = 1; k <= k_max; ++k) {
    double acc = 0.0;
    for (std::int64_t T = 0; T + k < n; ++T) acc += x[T] * x[T + k];
    out[k] = acc / static_cast<double>(n - k) / c0;
  }
  return out;
}

SignStats sign_stats(const std::vector<double>& x) {
  SignStats s;
  double prev = 0.0;
  for (double v : x) {
    if (v == 0.0) continue;
    if (prev != 0.0) ((prev > 0.0) == (v > 0.0) ? s.same : s.diff)++;
    prev = v;
  }
  if (s.same + s.diff == 0) throw DomainError("sign_stats: fewer than two non-zero movements");
  return s;
}

MovementCollector::MovementCollector(int k_max)
    : k_max_(k_max), ring_(std::max(k_max, 1), 0.0), lag_sum_(k_max + 1, 0.0), lag_count_(k_max + 1, 0) {}

void MovementCollector::on_tick(const TickRow& row) {
  const double x = row.dp;
  const std::int64_t reach = std::min<std::int64_t>(seen_, k_max_);
  for (int lag = 1; lag <= reach; ++lag) {
    lag_sum_[lag] += x * ring_[(seen_ - lag) % k_max_];
    ++lag_count_[lag];
  }
  if (k_max_ > 0) ring_[seen_ % k_max_] = x;
  ++seen_;
  sum_ += x;
  sum_sq_ += x * x;
  sum_tau_ += row.tau;
  ++n_;
  if (x != 0.0) {
    if (last_nonzero_ != 0.0) ((last_nonzero_ > 0.0) == (x > 0.0) ? signs.same : signs.diff)++;
    last_nonzero_ = x;
  }
}

std::unique_ptr<Collector> MovementCollector::clone_empty() const {
  return std::make_unique<MovementCollector>(k_max_);
}

void MovementCollector::merge(const Collector& other) {
  const auto& o = dynamic_cast<const MovementCollector&>(other);
  if (o.k_max_ != k_max_) throw ConfigError("movement collector: merging different k_max");
  for (int k = 0; k <= k_max_; ++k) {
    lag_sum_[k] += o.lag_sum_[k];
    lag_count_[k] += o.lag_count_[k];
  }
  sum_ += o.sum_;
  sum_sq_ += o.sum_sq_;
  sum_tau_ += o.sum_tau_;
  n_ += o.n_;
  signs.same += o.signs.same;
  signs.diff += o.signs.diff;
}

std::vector<double> MovementCollector::autocorr() const {
  std::vector<double> out(k_max_ + 1, 0.0);
  const double c0 = sum_sq_ / static_cast<double>(n_);
  out[0] = 1.0;
  for (int k = 1; k <= k_max_; ++k) out[k] = lag_sum_[k] / static_cast<double>(lag_count_[k]) / c0;
  return out;
}

void ReplicaSamples::on_tick(const TickRow& row) {
  if (!open_) {
    offsets.push_back(offsets.back());
    open_ = true;
  }
  dp.push_back(row.dp);
  tau.push_back(row.tau);
  ++offsets.back();
}

void ReplicaSamples::merge(const Collector& other) {
  const auto& o = dynamic_cast<const ReplicaSamples&>(other);
  const std::size_t base = dp.size();
  dp.insert(dp.end(), o.dp.begin(), o.dp.end());
  tau.insert(tau.end(), o.tau.begin(), o.tau.end());
  for (std::size_t r = 1; r < o.offsets.size(); ++r) offsets.push_back(base + o.offsets[r]);
  open_ = false;
}

double ReplicaSamples::mean_tau(int r) const {
  const auto a = offsets.at(r), b = offsets.at(r + 1);
  if (b == a) throw DomainError("replica samples: empty replica");
  double s = 0.0;
  for (auto k = a; k < b; ++k) s += tau[k];
  return s / static_cast<double>(b - a);
}

double ReplicaSamples::ensemble_mean_tau() const {
  if (replicas() < 1) throw DomainError("replica samples: no data");
  double rate = 0.0;
  for (int r = 0; r < replicas(); ++r) rate += 1.0 / mean_tau(r);
  return replicas() / rate;
}

std::vector<double> ReplicaSamples::normalized_tau() const {
  std::vector<double> out;
  out.reserve(tau.size());
  for (int r = 0; r < replicas(); ++r) {
    const double m = mean_tau(r);
    for (auto k = offsets[r]; k < offsets[r + 1]; ++k) out.push_back(tau[k] / m);
  }
  return out;
}

std::vector<double> ReplicaSamples::dp_per_mean_tau(double scale) const {
  std::vector<double> out;
  out.reserve(dp.size());
  for (int r = 0; r < replicas(); ++r) {
    const double m = scale * mean_tau(r);
    for (auto k = offsets[r]; k < offsets[r + 1]; ++k) out.push_back(dp[k] / m);
  }
  return out;
}

// ---- fits --------------------------------------------------------------------------

std::string to_string(FitModel m) {
  switch (m) {
    case FitModel::exponential_tail: return "exponential";
    case FitModel::gaussian_tail: return "gaussian";
    case FitModel::loglog: return "loglog";
  }
  return "?";
}

namespace {

// Weighted least squares for y ~ X beta.
Eigen::VectorXd wls(const Eigen::MatrixXd& X, const Eigen::VectorXd& y, const Eigen::VectorXd& w, double& rms) {
  const Eigen::VectorXd sw = w.cwiseSqrt();
  const Eigen::MatrixXd A = sw.asDiagonal() * X;
  const Eigen::VectorXd b = sw.asDiagonal() * y;
  Eigen::VectorXd beta = A.colPivHouseholderQr().solve(b);
  const Eigen::VectorXd r = y - X * beta;
  rms = std::sqrt((w.array() * r.array().square()).sum() / w.sum());
  return beta;
}

}  // namespace

FitResult tail_fit(const std::vector<double>& samples, FitModel model, std::optional<double> lo,
                   std::optional<double> hi, int bins) {
  if (model == FitModel::loglog) throw ConfigError("tail_fit: use loglog_fit for power laws");
  if (samples.empty()) throw DomainError("tail_fit: no samples");
  double sq = 0.0;
  for (double v : samples) sq += v * v;
  const double s = std::sqrt(sq / static_cast<double>(samples.size()));
  const double a = lo.value_or(2.0 * s), b = hi.value_or(6.0 * s);
  if (!(b > a) || bins < 3) throw DomainError("tail_fit: degenerate window");

  Histogram h(a, b, (b - a) / bins);
  for (double v : samples) h.add(std::abs(v));
  const double total = static_cast<double>(samples.size());

  std::vector<double> xs, ys, ws;
  for (int k = 0; k < h.bins(); ++k) {
    if (h.count(k) == 0) continue;
    xs.push_back(h.center(k));
    ys.push_back(std::log(static_cast<double>(h.count(k)) / (total * h.width())));
    ws.push_back(static_cast<double>(h.count(k)));
  }
  const int cols = model == FitModel::exponential_tail ? 2 : 3;
  if (static_cast<int>(xs.size()) < cols + 1) throw DomainError("tail_fit: too few populated bins in window");

  Eigen::MatrixXd X(xs.size(), cols);
  for (std::size_t k = 0; k < xs.size(); ++k) {
    X(k, 0) = 1.0;
    X(k, 1) = xs[k];
    if (cols == 3) X(k, 2) = xs[k] * xs[k];
  }
  FitResult f;
  f.model = model;
  f.window_lo = a;
  f.window_hi = b;
  f.samples_in_window = h.in_range();
  const Eigen::VectorXd beta =
      wls(X, Eigen::Map<const Eigen::VectorXd>(ys.data(), ys.size()), Eigen::Map<const Eigen::VectorXd>(ws.data(), ws.size()),
          f.residual);
  if (model == FitModel::exponential_tail) {
    if (!(beta[1] < 0.0)) throw DomainError("tail_fit: non-decaying tail");
    f.params = {-1.0 / beta[1], beta[0]};
  } else {
    f.params = {-beta[0], -beta[1], -beta[2]};
  }
  return f;
}

double tail_mass(const std::vector<double>& samples, double k) {
  if (samples.empty()) throw DomainError("tail_mass: no samples");
  double sq = 0.0;
  for (double v : samples) sq += v * v;
  const double cut = k * std::sqrt(sq / static_cast<double>(samples.size()));
  std::int64_t n = 0;
  for (double v : samples) n += std::abs(v) > cut;
  return static_cast<double>(n) / static_cast<double>(samples.size());
}

FitResult loglog_fit(const std::vector<double>& x, const std::vector<double>& y, double lo, double hi) {
  std::vector<double> lx, ly;
  for (std::size_t k = 0; k < x.size(); ++k)
    if (x[k] >= lo && x[k] <= hi && x[k] > 0.0 && y[k] > 0.0) {
      lx.push_back(std::log(x[k]));
      ly.push_back(std::log(y[k]));
    }
  if (lx.size() < 2) throw DomainError("loglog_fit: fewer than two points in window");
  const LineFit l = line_fit(lx, ly);
  FitResult f;
  f.model = FitModel::loglog;
  f.params = {l.slope, l.intercept};
  f.window_lo = lo;
  f.window_hi = hi;
  f.samples_in_window = static_cast<std::int64_t>(lx.size());
  double r2 = 0.0;
  for (std::size_t k = 0; k < lx.size(); ++k) r2 += std::pow(ly[k] - l.intercept - l.slope * lx[k], 2);
  f.residual = std::sqrt(r2 / lx.size());
  return f;
}

LineFit line_fit(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size() || x.size() < 2) throw DomainError("line_fit: need two or more points");
  const double n = static_cast<double>(x.size());
  const double mx = std::accumulate(x.begin(), x.end(), 0.0) / n;
  const double my = std::accumulate(y.begin(), y.end(), 0.0) / n;
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t k = 0; k < x.size(); ++k) {
    sxx += (x[k] - mx) * (x[k] - mx);
    sxy += (x[k] - mx) * (y[k] - my);
  }
  if (sxx == 0.0) throw DomainError("line_fit: degenerate abscissa");
  LineFit f;
  f.slope = sxy / sxx;
  f.intercept = my - f.slope * mx;
  return f;
}

}  // namespace hftkin
