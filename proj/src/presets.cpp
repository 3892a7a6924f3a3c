#include "hftkin/presets.hpp"

#include <algorithm>
#include <cmath>
#include <iostream>
#include <map>
#include <sstream>

#include "hftkin/errors.hpp"
#include "hftkin/experiments.hpp"
#include "hftkin/io.hpp"

namespace hftkin {

namespace {

constexpr double kBookBin = 1.0 / 32;

struct Context {
  Context(const PresetInfo& i, const PresetOptions& o, std::string d) : info(i), opt(o), dir(std::move(d)) {}

  const PresetInfo& info;
  const PresetOptions& opt;
  std::string dir;
  Json summary = Json::object();
  std::map<std::string, Estimate> est;
  std::map<std::string, double> oracle;
  std::map<std::string, Threshold> threshold;

  void row(const std::string& key, Estimate e, double o, Threshold t) {
    est[key] = e;
    oracle[key] = o;
    threshold[key] = t;
  }
  void csv(const std::string& name, const Json& header, const Table& t) const {
    std::ostringstream os;
    write_table(os, header, t);
    write_text_file(dir + "/" + name, os.str());
  }
  void log(const std::string& msg) const {
    if (!opt.quiet) std::cerr << "[" << info.name << "] " << msg << std::endl;
  }
  std::int64_t total_ticks() const { return opt.ticks.value_or(info.default_ticks); }
};

SimConfig micro_config(int n, const SpreadLaw& law, std::uint64_t seed) {
  SimConfig c;
  c.n_traders = n;
  c.spread_law = law;
  c.seed = seed;
  return c;
}

MicroStudy micro_study(const Context& ctx, SimConfig cfg, int replicas, std::int64_t total) {
  MicroStudy st;
  st.replicas = ctx.opt.replicas.value_or(replicas);
  st.workers = ctx.opt.workers;
  cfg.tick_budget = std::max<std::int64_t>(1, (total + st.replicas - 1) / st.replicas);
  st.cfg = cfg;
  return st;
}

Json study_header(const MicroStudy& st) {
  Json h = run_header(st.cfg);
  h["replicas"] = st.replicas;
  h["ticks_per_replica"] = st.cfg.tick_budget;
  return h;
}

double binomial_se(const SignStats& s) {
  const double n = static_cast<double>(s.same + s.diff);
  return std::sqrt(s.p_diff() * s.p_same() / n);
}

Table histogram_table(const Histogram& h, const std::string& x, const std::string& y) {
  Table t;
  const Eigen::VectorXd c = h.centers(), d = h.density();
  t.add(x, std::vector<double>(c.data(), c.data() + c.size()));
  t.add(y, std::vector<double>(d.data(), d.data() + d.size()));
  return t;
}

Histogram histogram_of(const std::vector<double>& v, double lo, double hi, double width, bool absolute) {
  Histogram h(lo, hi, width);
  for (double x : v) h.add(absolute ? std::abs(x) : x);
  return h;
}

Json fit_json(const FitResult& f) {
  return {{"model", to_string(f.model)},
          {"params", f.params},
          {"window", {f.window_lo, f.window_hi}},
          {"residual", f.residual},
          {"samples_in_window", f.samples_in_window}};
}

// ---- fig7 --------------------------------------------------------------------------------

void book_preset(Context& ctx, const SpreadLaw& law) {
  MicroStudy st = micro_study(ctx, micro_config(800, law, ctx.opt.seed), 4, ctx.total_ticks());
  st.book_bin = kBookBin * law.l_star;
  st.book_half_range = (law.is_point_mass() ? 2.0 : 16.0) * law.l_star;
  ctx.log("micro N=800, " + std::to_string(st.replicas) + " replicas x " + std::to_string(st.cfg.tick_budget) + " ticks");
  const StudyResult res = run_micro_study(st);
  const auto& book = *res.book;

  const double l1 = book_l1(book, law);
  ctx.row("book_l1", {l1, 0.0}, 0.0, Threshold::upper(0.05));

  const Eigen::VectorXd fa = book.ask.density(), fb = book.bid.density();
  const double sa = static_cast<double>(book.ask.in_range()) /
                    static_cast<double>(book.ask.in_range() + book.ask.underflow() + book.ask.overflow());
  const double sb = static_cast<double>(book.bid.in_range()) /
                    static_cast<double>(book.bid.in_range() + book.bid.underflow() + book.bid.overflow());
  Table t;
  std::vector<double> r, a, b, o;
  const int n = book.ask.bins();
  for (int k = 0; k < n; ++k) {
    r.push_back(book.ask.center(k));
    a.push_back(sa * fa[k]);
    b.push_back(sb * fb[n - 1 - k]);
    o.push_back(oracle::book_profile(law, book.ask.center(k)));
  }
  t.add("r", r);
  t.add("f_A", a);
  t.add("f_B_reflected", b);
  t.add("f_A_theory", o);
  Json h = study_header(st);
  h["snapshots"] = book.snapshots;
  h["reference"] = "cm";
  ctx.csv("book.csv", h, t);
  ctx.summary["book_l1"] = l1;
  ctx.summary["snapshots"] = book.snapshots;
  ctx.summary["header"] = h;
}

// ---- fig8 -------------------------------------------------------------------------------

void weak_msd_block(Context& ctx, int n, std::int64_t total, std::map<int, StudyResult>& keep) {
  const SpreadLaw law = SpreadLaw::gamma(1.0);
  MicroStudy st = micro_study(ctx, micro_config(n, law, ctx.opt.seed), 10, total);
  st.k_max = 10;
  st.tick_msd_max_lag = 100;
  st.rt_msd_step = 0.1;
  st.rt_msd_max_lag = 200;
  st.keep_samples = true;
  ctx.log("weak trend N=" + std::to_string(n) + ", " + std::to_string(st.replicas) + " replicas x " +
          std::to_string(st.cfg.tick_budget) + " ticks");
  StudyResult res = run_micro_study(st);
  const auto k = derived_constants(law, n, 1.0);
  const double D = oracle::diffusion_coefficient(law, n, 1.0);
  const std::string tag = "_N" + std::to_string(n);

  const LineFit rt = msd_line(res.rt_msd->acc, res.rt_msd->step(), 2.0, 20.0);
  ctx.row("msd_slope" + tag, {rt.slope, 0.0}, 2.0 * D, Threshold::relative(0.15));
  const LineFit tk = msd_line(res.tick_msd->acc, 1.0, 10.0, 100.0);
  ctx.row("tick_msd_intercept" + tag, {tk.intercept, 0.0}, k.l_rho_sq / (2.0 * n), Threshold::relative(0.5));

  const Json h = study_header(st);
  {
    auto [x, y] = msd_curve(res.rt_msd->acc, res.rt_msd->step());
    Table t;
    std::vector<double> th;
    for (double v : x) th.push_back(oracle::msd_theory(oracle::MsdMode::real_time, v, law, n, 1.0));
    t.add("t", x);
    t.add("msd", y);
    t.add("msd_theory", th);
    ctx.csv("msd_real" + tag + ".csv", h, t);
  }
  {
    auto [x, y] = msd_curve(res.tick_msd->acc, 1.0);
    Table t;
    std::vector<double> th;
    for (double v : x) th.push_back(oracle::msd_theory(oracle::MsdMode::tick, v, law, n, 1.0));
    t.add("K", x);
    t.add("msd", y);
    t.add("msd_theory", th);
    ctx.csv("msd_tick" + tag + ".csv", h, t);
  }
  ctx.summary["msd" + tag] = {{"real_time_slope", rt.slope}, {"real_time_window", {2.0, 20.0}},
                              {"tick_intercept", tk.intercept}, {"tick_slope", tk.slope},
                              {"tick_window", {10.0, 100.0}}, {"D", D}};
  keep.emplace(n, std::move(res));
}

void interval_rows(Context& ctx, int n, const StudyResult& res, const Json& header) {
  const auto k = derived_constants(SpreadLaw::gamma(1.0), n, 1.0);
  const auto& s = *res.samples;
  const std::string tag = "_N" + std::to_string(n);
  const double mean = s.ensemble_mean_tau();
  double m = 0.0, m2 = 0.0;
  for (int r = 0; r < s.replicas(); ++r) {
    const double rate = k.tau_star / s.mean_tau(r);
    m += rate;
    m2 += rate * rate;
  }
  m /= s.replicas();
  const double var = std::max(0.0, m2 / s.replicas() - m * m);
  const double se = s.replicas() > 1 ? std::sqrt(var / (s.replicas() - 1)) / (m * m) : 0.0;
  ctx.row("tau_ratio" + tag, {mean / k.tau_star, se}, 1.0, Threshold::relative(0.10));

  const std::vector<double> scaled = s.normalized_tau();
  const FitResult f = tail_fit(scaled, FitModel::exponential_tail);
  const double c_tau = 1.0 / f.kappa();
  ctx.row("c_tau" + tag, {c_tau, 0.0}, 1.5, Threshold::range(1.3, 1.8));
  ctx.csv("interval_hist" + tag + ".csv", header, histogram_table(histogram_of(scaled, 0.0, 10.0, 0.1, false), "tau_scaled", "density"));
  ctx.summary["intervals" + tag] = {{"mean_tau", mean}, {"tau_star", k.tau_star}, {"replicas", s.replicas()},
                                    {"c_tau", c_tau}, {"c_tau_theory_reading", c_tau * k.tau_star / mean},
                                    {"fit", fit_json(f)}};
}

void fig8(Context& ctx) {
  const SpreadLaw law = SpreadLaw::gamma(1.0);
  const std::int64_t total = ctx.total_ticks();
  std::map<int, StudyResult> runs;
  weak_msd_block(ctx, 50, total, runs);
  weak_msd_block(ctx, 100, total, runs);

  for (int n : {25, 50, 100, 200, 400, 800}) {
    Json h;
    if (!runs.count(n)) {
      const int reps = std::max(4, (3200 + n - 1) / n);
      MicroStudy st = micro_study(ctx, micro_config(n, law, ctx.opt.seed), reps, total / 10);
      st.keep_samples = true;
      ctx.log("intervals N=" + std::to_string(n) + ", " + std::to_string(st.replicas) + " replicas x " +
              std::to_string(st.cfg.tick_budget) + " ticks");
      runs.emplace(n, run_micro_study(st));
      h = study_header(st);
    } else {
      h = run_header(micro_config(n, law, ctx.opt.seed));
    }
    interval_rows(ctx, n, runs.at(n), h);
  }

  const StudyResult& w = runs.at(100);
  const auto k = derived_constants(law, 100, 1.0);
  const double factor = w.movement.variance() * 2.0 * 100 / k.l_rho_sq;
  ctx.row("var_factor_N100", {factor, 0.0}, 0.4, Threshold::range(0.3, 0.5));
  const auto ac = w.movement.autocorr();
  ctx.row("autocorr_1_N100", {ac[1], 0.0}, -0.5, Threshold::upper(-0.2));
  ctx.row("p_diff_N100", {w.movement.signs.p_diff(), binomial_se(w.movement.signs)}, 0.611, Threshold::absolute(0.02));

  const Json h = run_header(micro_config(100, law, ctx.opt.seed));
  Table t;
  std::vector<double> K, C, Z;
  for (int j = 0; j < static_cast<int>(ac.size()); ++j) {
    K.push_back(j);
    C.push_back(ac[j]);
    Z.push_back(oracle::zigzag_autocorr(j));
  }
  t.add("K", K);
  t.add("C", C);
  t.add("C_zigzag", Z);
  ctx.csv("autocorr_N100.csv", h, t);

  std::vector<double> scaled;
  for (double v : w.samples->dp) scaled.push_back(std::sqrt(100.0) * v / law.l_star);
  ctx.csv("dp_pdf_N100.csv", h, histogram_table(histogram_of(scaled, -3.0, 3.0, 0.05, false), "dp_scaled", "density"));
  const FitResult g = tail_fit(scaled, FitModel::gaussian_tail);
  ctx.summary["dp_N100"] = {{"variance", w.movement.variance()}, {"var_factor", factor}, {"gaussian_tail", fit_json(g)}};
}

void fig8e(Context& ctx) {
  const SpreadLaw law = SpreadLaw::gamma(1.0);
  MicroStudy st = micro_study(ctx, micro_config(100, law, ctx.opt.seed), 4, ctx.total_ticks());
  ctx.log("weak trend N=100");
  const StudyResult res = run_micro_study(st);
  const auto k = derived_constants(law, 100, 1.0);
  const double factor = res.movement.variance() * 2.0 * 100 / k.l_rho_sq;
  ctx.row("var_factor_N100", {factor, 0.0}, 0.4, Threshold::absolute(0.1));
  ctx.summary["variance"] = res.movement.variance();
  ctx.summary["header"] = study_header(st);
}

// ---- trend regimes --------------------------------------------------------------------------

MicroStudy trend_study(const Context& ctx, int n, double c_tilde, double dp_tilde) {
  SimConfig cfg = with_dimensionless_trend(micro_config(n, SpreadLaw::gamma(1.0), ctx.opt.seed), c_tilde, dp_tilde);
  MicroStudy st = micro_study(ctx, cfg, 4, ctx.total_ticks());
  st.k_max = 30;
  st.tick_msd_max_lag = 100;
  st.keep_samples = true;
  return st;
}

void write_trend_csvs(Context& ctx, const std::string& tag, const MicroStudy& st, const StudyResult& res) {
  const Json h = study_header(st);
  auto [x, y] = msd_curve(res.tick_msd->acc, 1.0);
  Table m;
  m.add("K", x);
  m.add("msd", y);
  ctx.csv("msd_tick" + tag + ".csv", h, m);
  const auto ac = res.movement.autocorr();
  Table a;
  std::vector<double> K(ac.size());
  for (std::size_t j = 0; j < ac.size(); ++j) K[j] = static_cast<double>(j);
  a.add("K", K);
  a.add("C", ac);
  ctx.csv("autocorr" + tag + ".csv", h, a);
}

void fig9(Context& ctx) {
  const MicroStudy st = trend_study(ctx, 200, 2.0, 0.1);
  ctx.log("strong trend N=200");
  const StudyResult res = run_micro_study(st);
  const double c = st.cfg.trend_strength;
  const auto k = derived_constants(st.cfg.spread_law, 200, 1.0);

  const std::vector<double> scaled = res.samples->dp_per_mean_tau(c);
  const FitResult f = tail_fit(scaled, FitModel::exponential_tail);
  ctx.row("kappa_ratio", {f.kappa(), 0.0}, 0.64, Threshold::absolute(0.07));
  ctx.row("p_same", {res.movement.signs.p_same(), binomial_se(res.movement.signs)}, 0.949, Threshold::absolute(0.02));
  auto [x, y] = msd_curve(res.tick_msd->acc, 1.0);
  const FitResult ll = loglog_fit(x, y, 1.0, 10.0);
  ctx.row("loglog_slope", {ll.slope(), 0.0}, 1.8, Threshold::lower(1.6));

  const double mean = res.samples->ensemble_mean_tau();
  ctx.summary["kappa_fit"] = fit_json(f);
  ctx.summary["kappa_over_c_tau_star_theory"] = f.kappa() * mean / k.tau_star;
  ctx.summary["mean_tau_over_tau_star"] = mean / k.tau_star;
  ctx.summary["loglog_fit"] = fit_json(ll);
  ctx.csv("dp_abs_scaled.csv", study_header(st),
          histogram_table(histogram_of(scaled, 0.0, 8.0, 0.1, true), "abs_dp_over_c_tau", "density"));
  write_trend_csvs(ctx, "", st, res);
}

void fig10_11(Context& ctx) {
  {
    const MicroStudy st = trend_study(ctx, 100, 0.5, 2.5);
    ctx.log("marginal trend (0.5, 2.5) N=100");
    const StudyResult res = run_micro_study(st);
    const auto& dp = res.samples->dp;
    const FitResult f = tail_fit(dp, FitModel::exponential_tail);
    const double mass = tail_mass(dp, 4.0);
    ctx.row("tail_mass_4s", {mass, 0.0}, std::exp(-4.0 * std::sqrt(2.0)), Threshold::lower(4.7e-4));
    ctx.row("tail_samples", {static_cast<double>(f.samples_in_window), 0.0}, 1000.0, Threshold::lower(1000.0));
    ctx.row("p_diff_marginal", {res.movement.signs.p_diff(), binomial_se(res.movement.signs)}, 0.520,
            Threshold::absolute(0.02));
    ctx.summary["tail_fit"] = fit_json(f);
    ctx.csv("dp_abs.csv", study_header(st), histogram_table(histogram_of(dp, 0.0, 8.0 * f.window_lo / 2.0, f.window_lo / 20.0, true), "abs_dp", "density"));
    write_trend_csvs(ctx, "_c0.5", st, res);
  }
  {
    const MicroStudy st = trend_study(ctx, 100, 0.86, 1.43);
    ctx.log("marginal trend (0.86, 1.43) N=100");
    const StudyResult res = run_micro_study(st);
    auto [x, y] = msd_curve(res.tick_msd->acc, 1.0);
    const FitResult ll = loglog_fit(x, y, 1.0, 10.0);
    ctx.row("hurst", {ll.hurst(), 0.0}, 0.65, Threshold::absolute(0.07));
    ctx.summary["hurst_fit"] = fit_json(ll);
    write_trend_csvs(ctx, "_c0.86", st, res);
  }
}

void table2(Context& ctx) {
  struct Regime {
    const char* key;
    double c_tilde;
    std::optional<double> dp_tilde;
    double p_diff;
  };
  const Regime regimes[] = {{"a_weak", 0.0, std::nullopt, 0.611}, {"b_strong", 2.0, 0.1, 0.051},
                            {"c_marginal", 0.5, 2.5, 0.520}};
  Table t;
  std::vector<double> same, diff;
  for (const auto& reg : regimes) {
    SimConfig cfg =
        with_dimensionless_trend(micro_config(100, SpreadLaw::gamma(1.0), ctx.opt.seed), reg.c_tilde, reg.dp_tilde);
    MicroStudy st = micro_study(ctx, cfg, 4, ctx.total_ticks());
    ctx.log(std::string("regime ") + reg.key);
    const StudyResult res = run_micro_study(st);
    const auto& s = res.movement.signs;
    ctx.row(std::string("p_diff_") + reg.key, {s.p_diff(), binomial_se(s)}, reg.p_diff, Threshold::absolute(0.02));
    same.push_back(s.p_same());
    diff.push_back(s.p_diff());
    ctx.summary[reg.key] = {{"p_same", s.p_same()}, {"p_diff", s.p_diff()}, {"pairs", s.same + s.diff},
                            {"header", study_header(st)}};
  }
  t.add("regime", {0, 1, 2});
  t.add("p_same", same);
  t.add("p_diff", diff);
  ctx.csv("signs.csv", {{"regimes", {"a_weak", "b_strong", "c_marginal"}}, {"n_traders", 100}}, t);
}

// ---- solver ---------------------------------------------------------------------------------

Json steady_header(const SteadyStudy& s, const SteadyResult& r) {
  return {{"spread_law", to_json(s.law)}, {"n_traders", s.n_traders}, {"sigma", s.sigma}, {"h", s.h},
          {"bins", r.grid.nbins()},       {"l_cut", r.grid.cells() * s.h}, {"tolerance", s.tolerance},
          {"max_time", s.max_time},       {"converged", r.converged},     {"time", r.time},
          {"steps", r.steps},             {"residual", r.residual},       {"max_mass_change", r.max_mass_change},
          {"clipped_mass", r.clipped_mass}, {"clip_events", r.clip_events}};
}

void write_profiles(Context& ctx, const std::string& name, const Json& header, const ProfileGrid& g) {
  Table t;
  const Eigen::VectorXd r = g.r_grid(), fa = ask_book(g), fb = bid_book(g);
  t.add("r", std::vector<double>(r.data(), r.data() + r.size()));
  for (int k = 0; k < g.nbins(); ++k) {
    const auto col = g.phi.col(k);
    t.add("phi_" + std::to_string(k), std::vector<double>(col.data(), col.data() + col.size()));
  }
  t.add("f_A", std::vector<double>(fa.data(), fa.data() + fa.size()));
  t.add("f_B", std::vector<double>(fb.data(), fb.data() + fb.size()));
  Json h = header;
  h["spread_bins"] = {{"L", std::vector<double>(g.bins.L.data(), g.bins.L.data() + g.bins.L.size())},
                      {"weight", std::vector<double>(g.bins.weight.data(), g.bins.weight.data() + g.bins.weight.size())}};
  ctx.csv(name, h, t);
}

void boltzmann_steady(Context& ctx) {
  double mass = 0.0;
  auto solve = [&](const std::string& tag, SteadyStudy s) {
    ctx.log("solver " + tag);
    SteadyResult r = run_steady(s);
    mass = std::max(mass, r.max_mass_change);
    const Json h = steady_header(s, r);
    write_profiles(ctx, "profiles_" + tag + ".csv", h, r.grid);
    ctx.summary[tag] = h;
    return r;
  };
  SteadyStudy pm;
  pm.law = SpreadLaw::point_mass(1.0);
  const SteadyResult a = solve("point_mass_N800", pm);
  ctx.row("steady_l1_point_mass", {steady_book_l1(a.grid, pm.law), 0.0}, 0.0, Threshold::upper(0.05));

  SteadyStudy gm;
  gm.law = SpreadLaw::gamma(1.0);
  gm.h = 1.0 / 32;
  const SteadyResult b = solve("gamma_N800", gm);
  ctx.row("steady_l1_gamma", {steady_book_l1(b.grid, gm.law), 0.0}, 0.0, Threshold::upper(0.05));

  SteadyStudy small = pm;
  small.n_traders = 25;
  small.tolerance = 1e-6;
  const SteadyResult c = solve("point_mass_N25", small);
  ctx.row("nlo_window_l1", {nlo_window_l1(c.grid, oracle::NloForm::derived), 0.0}, 0.0, Threshold::upper(0.1));
  ctx.summary["nlo_window_l1_printed_form"] = nlo_window_l1(c.grid, oracle::NloForm::printed);
  ctx.row("max_mass_change", {mass, 0.0}, 0.0, Threshold::upper(1e-10));
}

}  // namespace

const std::vector<PresetInfo>& preset_catalog() {
  static const std::vector<PresetInfo> catalog = {
      {"fig7a", "micro", "point-mass book profile at N=800 vs the tent", 100000, 2000000},
      {"fig7b", "micro", "gamma book profile at N=800 vs the closed form", 100000, 2000000},
      {"fig8", "micro", "weak trend: intervals over N, MSD at N=50/100, variance, autocorrelation, signs", 1000000,
       10000000},
      {"fig8e", "micro", "weak trend: variance modification factor at N=100", 100000, 10000000},
      {"fig9", "micro", "strong trend (2.0, 0.1) at N=200: exponential tail, signs, short-lag MSD", 100000, 10000000},
      {"fig10-11", "micro", "marginal trend (0.5, 2.5) tail and signs; Hurst at (0.86, 1.43)", 100000, 10000000},
      {"tableII", "micro", "sign statistics for the weak, strong and marginal regimes at N=100", 100000, 10000000},
      {"boltzmann-steady", "boltzmann", "steady solver vs LO profiles at N=800 and the edge layer at N=25", 0, 0},
  };
  return catalog;
}

ComparisonReport run_preset(const std::string& name, const PresetOptions& opt) {
  const auto& cat = preset_catalog();
  const auto it = std::find_if(cat.begin(), cat.end(), [&](const PresetInfo& p) { return p.name == name; });
  if (it == cat.end()) throw ConfigError("unknown preset '" + name + "'");
  if (opt.ticks && (*opt.ticks < 1 || (it->max_ticks > 0 && *opt.ticks > it->max_ticks)))
    throw ResourceError("preset " + name + ": ticks must be in [1, " + std::to_string(it->max_ticks) + "]");
  if (opt.replicas && *opt.replicas < 1) throw ConfigError("replicas must be >= 1");

  Context ctx(*it, opt, opt.out_dir + "/" + name);
  if (name == "fig7a") book_preset(ctx, SpreadLaw::point_mass(1.0));
  else if (name == "fig7b") book_preset(ctx, SpreadLaw::gamma(1.0));
  else if (name == "fig8") fig8(ctx);
  else if (name == "fig8e") fig8e(ctx);
  else if (name == "fig9") fig9(ctx);
  else if (name == "fig10-11") fig10_11(ctx);
  else if (name == "tableII") table2(ctx);
  else boltzmann_steady(ctx);

  ComparisonReport rep = compare(ctx.est, ctx.oracle, ctx.threshold);
  Json summary = {{"preset", name}, {"seed", opt.seed}, {"workers", opt.workers}, {"results", ctx.summary}};
  write_text_file(ctx.dir + "/summary.json", summary.dump(2) + "\n");
  write_text_file(ctx.dir + "/report.json", rep.to_json().dump(2) + "\n");
  return rep;
}

}  // namespace hftkin
