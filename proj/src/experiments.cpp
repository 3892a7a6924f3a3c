#include "hftkin/experiments.hpp"

#include <cmath>

#include "hftkin/errors.hpp"
#include "hftkin/micro.hpp"

namespace hftkin {

namespace {

template <class Study>
std::vector<Collector*> prototypes(const Study& st, StudyResult& res) {
  res.movement = MovementCollector(st.k_max);
  std::vector<Collector*> out{&res.movement};
  if (st.tick_msd_max_lag > 0) out.push_back(&res.tick_msd.emplace(st.tick_msd_max_lag));
  if (st.rt_msd_step > 0.0) out.push_back(&res.rt_msd.emplace(st.rt_msd_step, st.rt_msd_max_lag));
  if (st.keep_samples) out.push_back(&res.samples.emplace());
  return out;
}

}  // namespace

StudyResult run_micro_study(const MicroStudy& st) {
  StudyResult res;
  auto sinks = prototypes(st, res);
  if (st.book_bin > 0.0) sinks.push_back(&res.book.emplace(st.book_half_range, st.book_bin, st.book_ref));
  run_ensemble(st.cfg, st.replicas, st.workers, sinks);
  return res;
}

StudyResult run_meanfield_study(const MeanfieldStudy& st) {
  StudyResult res;
  auto sinks = prototypes(st, res);
  run_meanfield_ensemble(st.params, st.ticks, st.seed, st.replicas, st.workers, sinks);
  return res;
}

LineFit msd_line(const MsdAccumulator& acc, double step, double lo, double hi) {
  std::vector<double> x, y;
  for (int k = 1; k <= acc.max_lag(); ++k) {
    const double t = k * step;
    if (t >= lo - 1e-12 && t <= hi + 1e-12 && acc.count(k) > 0) {
      x.push_back(t);
      y.push_back(acc.msd(k));
    }
  }
  if (x.size() < 2) throw DomainError("msd_line: fewer than two lags in the window");
  return line_fit(x, y);
}

std::pair<std::vector<double>, std::vector<double>> msd_curve(const MsdAccumulator& acc, double step) {
  std::vector<double> x, y;
  for (int k = 1; k <= acc.max_lag(); ++k) {
    if (acc.count(k) == 0) continue;
    x.push_back(k * step);
    y.push_back(acc.msd(k));
  }
  return {x, y};
}

double book_l1(const BookProfileCollector& book, const SpreadLaw& law) {
  return l1_distance(book.ask, [&](double r) { return oracle::book_profile(law, r); });
}

SteadyResult run_steady(const SteadyStudy& s) {
  ProfileGrid g = make_grid(s.law, s.n_traders, s.sigma, s.h, s.bins);
  set_initial(g, InitialGuess::gaussian);
  return solve_steady(std::move(g), s.tolerance, s.max_time);
}

double steady_book_l1(const ProfileGrid& g, const SpreadLaw& law) {
  const Eigen::VectorXd fa = ask_book(g);
  double acc = 0.0;
  for (int m = 0; m < g.cells(); ++m) acc += std::abs(fa[m] - oracle::book_profile(law, g.r(m))) * g.h;
  return acc;
}

double nlo_window_l1(const ProfileGrid& g, oracle::NloForm form) {
  if (g.nbins() != 1) throw DomainError("nlo_window_l1: needs a point-mass grid");
  const double L = g.bins.L[0];
  const double l_rho = L;
  const double w = 2.0 * l_rho / std::sqrt(2.0 * g.n_traders);
  double num = 0.0, den = 0.0;
  for (int m = 0; m < g.cells(); ++m) {
    const double r = g.r(m);
    if (std::abs(std::abs(r) - 0.5 * L) > w) continue;
    const double ref = oracle::nlo_profile(L, r, g.n_traders, l_rho * l_rho, form);
    num += std::abs(g.phi(m, 0) - ref) * g.h;
    den += ref * g.h;
  }
  return num / den;
}

}  // namespace hftkin
