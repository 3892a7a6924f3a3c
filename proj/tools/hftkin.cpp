#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "hftkin/boltzmann.hpp"
#include "hftkin/errors.hpp"
#include "hftkin/experiments.hpp"
#include "hftkin/io.hpp"
#include "hftkin/langevin.hpp"
#include "hftkin/micro.hpp"
#include "hftkin/oracle.hpp"
#include "hftkin/presets.hpp"
#include "hftkin/report.hpp"

using namespace hftkin;

namespace {

enum Exit { kPass = 0, kFail = 1, kUsage = 2, kRuntime = 3 };

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

Json read_json_file(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw UsageError("cannot open " + path);
  try {
    return Json::parse(f);
  } catch (const nlohmann::json::exception& e) {
    throw UsageError(path + ": " + e.what());
  }
}

void emit(const std::string& path, const std::string& text) {
  if (path.empty() || path == "-") {
    std::cout << text;
  } else {
    write_text_file(path, text);
  }
}

// ---- shared flag groups ----------------------------------------------------------------

struct SpreadFlags {
  std::string kind;
  double l_star = 1.0;
  int alpha = 3;
  double l_min = 0.0, l_max = 0.0;
  CLI::Option *o_kind = nullptr, *o_lstar = nullptr, *o_alpha = nullptr, *o_lmin = nullptr, *o_lmax = nullptr;

  void add(CLI::App* app) {
    o_kind = app->add_option("--spread", kind, "spread law")->check(CLI::IsMember({"point_mass", "gamma"}));
    o_lstar = app->add_option("--l-star", l_star, "spread scale L*");
    o_alpha = app->add_option("--alpha", alpha, "gamma exponent");
    o_lmin = app->add_option("--l-min", l_min, "truncation lower end");
    o_lmax = app->add_option("--l-max", l_max, "truncation upper end");
  }

  SpreadLaw apply(SpreadLaw law) const {
    if (o_kind->count()) law = kind == "point_mass" ? SpreadLaw::point_mass(law.l_star) : SpreadLaw::gamma(law.l_star);
    if (o_lstar->count()) law.l_star = l_star;
    if (o_alpha->count()) law.alpha = alpha;
    if (o_lmin->count() != o_lmax->count()) throw UsageError("--l-min and --l-max go together");
    if (o_lmin->count()) law.truncation = Truncation{l_min, l_max};
    validate(law);
    return law;
  }
};

struct TrendFlags {
  double c = 0.0, dp_star = 1.0, c_tilde = 0.0, dp_tilde = 0.0;
  CLI::Option *o_c = nullptr, *o_dp = nullptr, *o_ct = nullptr, *o_dpt = nullptr;

  void add(CLI::App* app) {
    o_c = app->add_option("--trend-strength,-c", c, "trend-following strength c");
    o_dp = app->add_option("--trend-threshold", dp_star, "saturation threshold dp*");
    o_ct = app->add_option("--c-tilde", c_tilde, "dimensionless strength (sets c and dp*)");
    o_dpt = app->add_option("--dp-tilde", dp_tilde, "dimensionless threshold (with --c-tilde)");
    o_ct->excludes(o_c);
    o_ct->excludes(o_dp);
    o_dpt->needs(o_ct);
  }

  bool dimensionless() const { return o_ct->count() > 0; }
  std::optional<double> dp_tilde_opt() const { return o_dpt->count() ? std::optional(dp_tilde) : std::nullopt; }
};

struct SimFlags {
  std::string config_path;
  int n = 100;
  double sigma = 1.0, dt = 0.0, warmup = 0.0, interval = 0.0;
  std::int64_t ticks = 100000, idle = 0;
  std::uint64_t seed = 1;
  SpreadFlags spread;
  TrendFlags trend;
  CLI::Option *o_n, *o_sigma, *o_dt, *o_warm, *o_int, *o_ticks, *o_seed, *o_idle;

  void add(CLI::App* app) {
    app->add_option("--config", config_path, "JSON SimConfig; flags override it")->check(CLI::ExistingFile);
    o_n = app->add_option("--n-traders,-N", n, "number of traders");
    o_sigma = app->add_option("--noise-std", sigma, "noise strength sigma");
    o_dt = app->add_option("--dt", dt, "time step");
    o_warm = app->add_option("--warmup", warmup, "warm-up duration");
    o_int = app->add_option("--sampling-interval", interval, "snapshot interval");
    o_ticks = app->add_option("--ticks", ticks, "tick budget");
    o_seed = app->add_option("--seed", seed, "master seed");
    o_idle = app->add_option("--max-idle-steps", idle, "starvation guard");
    spread.add(app);
    trend.add(app);
  }

  SimConfig build() const {
    SimConfig cfg;
    if (!config_path.empty()) cfg = sim_config_from_json(read_json_file(config_path));
    if (o_n->count()) cfg.n_traders = n;
    if (o_sigma->count()) cfg.noise_std = sigma;
    if (o_dt->count()) cfg.dt = dt;
    if (o_warm->count()) cfg.warmup = warmup;
    if (o_int->count()) cfg.sampling_interval = interval;
    if (o_ticks->count()) cfg.tick_budget = ticks;
    if (o_seed->count()) cfg.seed = seed;
    if (o_idle->count()) cfg.max_idle_steps = idle;
    cfg.spread_law = spread.apply(cfg.spread_law);
    if (trend.o_c->count()) cfg.trend_strength = trend.c;
    if (trend.o_dp->count()) cfg.trend_threshold = trend.dp_star;
    if (trend.dimensionless()) cfg = with_dimensionless_trend(cfg, trend.c_tilde, trend.dp_tilde_opt());
    validate(cfg);
    return cfg;
  }
};

// ---- verbs ------------------------------------------------------------------------------

int cmd_simulate(const SimFlags& f, std::uint64_t replica, const std::string& out, const std::string& snaps,
                 bool print_config) {
  const SimConfig cfg = resolve(f.build());
  Json header = run_header(cfg);
  header["generator"] = "micro";
  header["replica"] = replica;
  if (print_config) {
    std::cout << header.dump(2) << "\n";
    return kPass;
  }
  MicroEngine engine(cfg, replica);
  TickRecorder rec;
  SnapshotRecorder snap;
  std::vector<Collector*> sinks{&rec};
  if (!snaps.empty()) sinks.push_back(&snap);
  engine.run(sinks);
  const auto& d = engine.state().diag;
  header["diagnostics"] = {{"steps", d.steps},         {"screen_hits", d.screen_hits},
                           {"stale_events", d.stale_events}, {"multi_settlements", d.multi_settlements},
                           {"reanchors", d.reanchors},   {"max_cm_drift", d.max_cm_drift}};
  std::ostringstream os;
  write_ticks(os, header, rec.series);
  emit(out, os.str());
  if (!snaps.empty()) {
    Table t;
    std::vector<double> time, trader, ask;
    for (std::size_t k = 0; k < snap.times.size(); ++k)
      for (Eigen::Index i = 0; i < snap.asks[k].size(); ++i) {
        time.push_back(snap.times[k]);
        trader.push_back(static_cast<double>(i));
        ask.push_back(snap.asks[k][i]);
      }
    t.add("t", time);
    t.add("trader", trader);
    t.add("ask_rel", ask);
    std::ostringstream ss;
    write_table(ss, header, t);
    write_text_file(snaps, ss.str());
  }
  return kPass;
}

struct MeanfieldFlags {
  int n = 100;
  double sigma = 1.0, tau_ema = 1.0;
  std::int64_t ticks = 100000;
  std::uint64_t seed = 1, replica = 0;
  std::string variant = "hyperbolic", mode = "plain", out;
  SpreadFlags spread;
  TrendFlags trend;
};

int cmd_meanfield(const MeanfieldFlags& f) {
  const SpreadLaw law = f.spread.apply(SpreadLaw::gamma(1.0));
  double c = f.trend.c, dp_star = f.trend.dp_star;
  if (f.trend.dimensionless()) {
    const auto t = trend_from_dimensionless(f.trend.c_tilde, f.trend.dp_tilde_opt(), law, f.n, f.sigma);
    c = t.c;
    dp_star = t.dp_star;
  }
  const TrendVariant variant = f.variant == "ema"      ? TrendVariant::ema
                               : f.variant == "linear" ? TrendVariant::linear
                                                       : TrendVariant::hyperbolic;
  const auto mode = f.mode == "improved" ? oracle::IntervalMode::improved : oracle::IntervalMode::plain;
  const LangevinParams prm = make_langevin_params(c, dp_star, f.sigma, f.n, law, variant, f.tau_ema, mode);
  TickRecorder rec;
  run_meanfield(prm, f.ticks, f.seed, {&rec}, f.replica);
  Json h;
  h["generator"] = "meanfield";
  h["params"] = {{"c", c},       {"dp_star", dp_star},         {"sigma", f.sigma},          {"n_traders", f.n},
                 {"spread_law", to_json(law)}, {"variant", f.variant}, {"tau_ema", f.tau_ema},
                 {"interval_mode", f.mode}, {"tau_star", prm.tau_star}, {"l_rho_sq", prm.l_rho_sq}};
  h["seed"] = f.seed;
  h["replica"] = f.replica;
  std::ostringstream os;
  write_ticks(os, h, rec.series);
  emit(f.out, os.str());
  return kPass;
}

struct BoltzmannFlags {
  int n = 800, bins = 32;
  double sigma = 1.0, h = 1.0 / 64, tol = 1e-5, max_time = 10.0, l_cut = 0.0;
  std::string init = "gaussian", out;
  SpreadFlags spread;
  CLI::Option* o_lcut = nullptr;
};

int cmd_boltzmann(const BoltzmannFlags& f) {
  const SpreadLaw law = f.spread.apply(SpreadLaw::point_mass(1.0));
  std::optional<double> cut;
  if (f.o_lcut->count()) cut = f.l_cut;
  ProfileGrid g = make_grid(law, f.n, f.sigma, f.h, f.bins, cut);
  set_initial(g, f.init == "tent" ? InitialGuess::tent : f.init == "uniform" ? InitialGuess::uniform : InitialGuess::gaussian);
  const SteadyResult r = solve_steady(std::move(g), f.tol, f.max_time);
  Json h = {{"generator", "boltzmann"},
            {"spread_law", to_json(law)},
            {"n_traders", f.n},
            {"sigma", f.sigma},
            {"h", f.h},
            {"bins", r.grid.nbins()},
            {"l_cut", r.grid.cells() * f.h},
            {"init", f.init},
            {"convergence",
             {{"converged", r.converged},
              {"time", r.time},
              {"steps", r.steps},
              {"residual", r.residual},
              {"max_mass_change", r.max_mass_change},
              {"clipped_mass", r.clipped_mass},
              {"clip_events", r.clip_events}}},
            {"spread_bins",
             {{"L", std::vector<double>(r.grid.bins.L.data(), r.grid.bins.L.data() + r.grid.bins.L.size())},
              {"weight", std::vector<double>(r.grid.bins.weight.data(),
                                             r.grid.bins.weight.data() + r.grid.bins.weight.size())}}}};
  Table t;
  const Eigen::VectorXd rr = r.grid.r_grid(), fa = ask_book(r.grid), fb = bid_book(r.grid);
  t.add("r", std::vector<double>(rr.data(), rr.data() + rr.size()));
  for (int k = 0; k < r.grid.nbins(); ++k) {
    const auto col = r.grid.phi.col(k);
    t.add("phi_" + std::to_string(k), std::vector<double>(col.data(), col.data() + col.size()));
  }
  t.add("f_A", std::vector<double>(fa.data(), fa.data() + fa.size()));
  t.add("f_B", std::vector<double>(fb.data(), fb.data() + fb.size()));
  std::ostringstream os;
  write_table(os, h, t);
  emit(f.out, os.str());
  if (!r.converged) std::cerr << "warning: not converged (residual " << r.residual << ")\n";
  return kPass;
}

struct OracleFlags {
  std::string formula, out, form = "derived", mode = "plain";
  double from = -1.0, to = 1.0, L = 1.0, tau_star = 1.0, kappa = 1.0, alpha = 3.0, kappa_min = 1.0, c = 1.0;
  int points = 201, n = 100;
  double sigma = 1.0;
  SpreadFlags spread;
};

int cmd_oracle(const OracleFlags& f) {
  if (f.points < 2) throw UsageError("--points must be >= 2");
  const SpreadLaw law = f.spread.apply(SpreadLaw::gamma(1.0));
  const auto form = f.form == "printed" ? oracle::NloForm::printed : oracle::NloForm::derived;
  const auto mode = f.mode == "improved" ? oracle::IntervalMode::improved : oracle::IntervalMode::plain;
  const std::map<std::string, std::function<double(double)>> table = {
      {"tent", [&](double x) { return oracle::tent_profile(f.L, x); }},
      {"book", [&](double x) { return oracle::book_profile(law, x); }},
      {"psi", [&](double x) { return oracle::psi(x); }},
      {"nlo", [&](double x) { return oracle::nlo_profile(f.L, x, f.n, 1.0 / inverse_square_moment(law), form); }},
      {"interval-ccdf", [&](double x) { return oracle::interval_ccdf(x, f.tau_star, mode); }},
      {"interval-pdf", [&](double x) { return oracle::interval_pdf(x, f.tau_star, mode); }},
      {"msd-real", [&](double x) { return oracle::msd_theory(oracle::MsdMode::real_time, x, law, f.n, f.sigma); }},
      {"msd-tick", [&](double x) { return oracle::msd_theory(oracle::MsdMode::tick, x, law, f.n, f.sigma); }},
      {"zigzag-autocorr", [&](double x) { return oracle::zigzag_autocorr(static_cast<int>(std::lround(x))); }},
      {"dp-gaussian", [&](double x) { return oracle::dp_gaussian_pdf(x, 1.0 / inverse_square_moment(law), f.n); }},
      {"dp-laplace", [&](double x) { return oracle::dp_exponential_tail(x, f.kappa); }},
      {"powerlaw-ccdf", [&](double x) { return oracle::powerlaw_superposition_ccdf(x, f.alpha, f.kappa_min); }},
      {"jump-density", [&](double x) { return jump_density(law, x); }},
      {"spread-density", [&](double x) { return density(law, x); }},
  };
  const auto it = table.find(f.formula);
  if (it == table.end()) {
    std::string names;
    for (const auto& [k, v] : table) names += " " + k;
    throw UsageError("unknown formula '" + f.formula + "'; choose from:" + names);
  }
  Table t;
  std::vector<double> x, y;
  for (int k = 0; k < f.points; ++k) {
    x.push_back(f.from + (f.to - f.from) * k / (f.points - 1));
    y.push_back(it->second(x.back()));
  }
  t.add("x", x);
  t.add("value", y);
  Json h = {{"formula", f.formula}, {"spread_law", to_json(law)}, {"L", f.L}, {"n_traders", f.n},
            {"sigma", f.sigma},     {"tau_star", f.tau_star},       {"kappa", f.kappa}, {"alpha", f.alpha},
            {"kappa_min", f.kappa_min}, {"nlo_form", f.form},      {"interval_mode", f.mode}};
  std::ostringstream os;
  write_table(os, h, t);
  emit(f.out, os.str());
  return kPass;
}

struct AnalyzeFlags {
  std::string ticks_csv, snapshots_csv, out;
  int k_max = 10, msd_lag = 100;
  double bin = 1.0 / 32, half_range = 16.0;
};

int cmd_analyze(const AnalyzeFlags& f) {
  if (f.ticks_csv.empty() && f.snapshots_csv.empty()) throw UsageError("give --ticks and/or --snapshots");
  Json out;
  if (!f.ticks_csv.empty()) {
    std::ifstream is(f.ticks_csv);
    if (!is) throw UsageError("cannot open " + f.ticks_csv);
    Json header;
    const TickSeries s = read_ticks(is, &header);
    if (s.size() < 3) throw DomainError("analyze: series too short");
    const auto signs = sign_stats(s.dp);
    double sum = 0.0, sq = 0.0, tau = 0.0;
    for (std::size_t k = 0; k < s.size(); ++k) {
      sum += s.dp[k];
      sq += s.dp[k] * s.dp[k];
      tau += s.tau[k];
    }
    const double n = static_cast<double>(s.size());
    std::vector<int> lags;
    for (int k = 1; k <= std::min<int>(f.msd_lag, static_cast<int>(s.size()) - 1); ++k) lags.push_back(k);
    const int kmax = std::min<int>(f.k_max, static_cast<int>(s.size()) - 1);
    out["ticks"] = {{"source", f.ticks_csv},
                    {"header", header},
                    {"samples", s.size()},
                    {"mean_tau", tau / n},
                    {"mean_dp", sum / n},
                    {"second_moment_dp", sq / n},
                    {"autocorr", autocorr(s.dp, kmax)},
                    {"p_same", signs.p_same()},
                    {"p_diff", signs.p_diff()},
                    {"msd_tick", msd_tick(s.p, lags)}};
    for (auto model : {FitModel::exponential_tail, FitModel::gaussian_tail}) {
      try {
        const FitResult r = tail_fit(s.dp, model);
        out["ticks"]["fit_" + to_string(model)] = {{"params", r.params},
                                                    {"window", {r.window_lo, r.window_hi}},
                                                    {"residual", r.residual},
                                                    {"samples_in_window", r.samples_in_window}};
      } catch (const DomainError& e) {
        out["ticks"]["fit_" + to_string(model)] = {{"error", e.what()}};
      }
    }
  }
  if (!f.snapshots_csv.empty()) {
    std::ifstream is(f.snapshots_csv);
    if (!is) throw UsageError("cannot open " + f.snapshots_csv);
    const Table t = read_table(is);
    const auto& time = t.column("t");
    const auto& ask = t.column("ask_rel");
    std::vector<Eigen::VectorXd> snaps;
    std::vector<double> cur;
    for (std::size_t k = 0; k < time.size(); ++k) {
      if (k > 0 && time[k] != time[k - 1]) {
        snaps.push_back(Eigen::Map<Eigen::VectorXd>(cur.data(), static_cast<Eigen::Index>(cur.size())));
        cur.clear();
      }
      cur.push_back(ask[k]);
    }
    if (!cur.empty()) snaps.push_back(Eigen::Map<Eigen::VectorXd>(cur.data(), static_cast<Eigen::Index>(cur.size())));
    const Histogram h = book_profile_estimate(snaps, f.bin, f.half_range);
    const Eigen::VectorXd c = h.centers(), d = h.density();
    out["book"] = {{"source", f.snapshots_csv},
                   {"snapshots", snaps.size()},
                   {"r", std::vector<double>(c.data(), c.data() + c.size())},
                   {"f_A", std::vector<double>(d.data(), d.data() + d.size())},
                   {"underflow", h.underflow()},
                   {"overflow", h.overflow()}};
  }
  emit(f.out, out.dump(2) + "\n");
  return kPass;
}

int cmd_compare(const std::string& est_path, const std::string& orc_path, const std::string& thr_path,
                const std::string& out) {
  std::map<std::string, Estimate> est;
  std::map<std::string, double> orc;
  std::map<std::string, Threshold> thr;
  try {
    for (const auto& [k, v] : read_json_file(est_path).items()) {
      if (v.is_number()) est[k] = {v.get<double>(), 0.0};
      else est[k] = {v.at("value").get<double>(), v.value("stderr", 0.0)};
    }
    for (const auto& [k, v] : read_json_file(orc_path).items()) orc[k] = v.get<double>();
    for (const auto& [k, v] : read_json_file(thr_path).items()) {
      Json row = {{"key", k}, {"estimate", 0.0}, {"oracle", 0.0}, {"threshold", v}, {"pass", false}};
      thr[k] = ComparisonReport::from_json({{"rows", {row}}}).rows.at(0).threshold;
    }
  } catch (const nlohmann::json::exception& e) {
    throw UsageError(std::string("compare: malformed input: ") + e.what());
  }
  const ComparisonReport rep = compare(est, orc, thr);
  std::cerr << rep.to_text();
  emit(out, rep.to_json().dump(2) + "\n");
  return rep.pass() ? kPass : kFail;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Kinetic model of trend-following high-frequency traders"};
  app.require_subcommand(1);

  SimFlags sim;
  std::uint64_t replica = 0;
  std::string sim_out, sim_snaps;
  bool print_config = false;
  auto* c_sim = app.add_subcommand("simulate", "run the microscopic engine and write the tick series");
  sim.add(c_sim);
  c_sim->add_option("--replica", replica, "replica index (selects the random stream)");
  c_sim->add_option("--out,-o", sim_out, "tick CSV path (default stdout)");
  c_sim->add_option("--snapshots", sim_snaps, "also write ask-quote snapshots to this CSV");
  c_sim->add_flag("--print-config", print_config, "print the resolved configuration and exit");

  MeanfieldFlags mf;
  auto* c_mf = app.add_subcommand("meanfield", "run the tick-time Langevin simulator");
  c_mf->add_option("--n-traders,-N", mf.n, "number of traders");
  c_mf->add_option("--noise-std", mf.sigma, "noise strength sigma");
  c_mf->add_option("--ticks", mf.ticks, "number of ticks");
  c_mf->add_option("--seed", mf.seed, "master seed");
  c_mf->add_option("--replica", mf.replica, "replica index");
  c_mf->add_option("--variant", mf.variant, "trend term")->check(CLI::IsMember({"hyperbolic", "ema", "linear"}));
  c_mf->add_option("--tau-ema", mf.tau_ema, "EMA decay in ticks");
  c_mf->add_option("--interval-mode", mf.mode, "interval law")->check(CLI::IsMember({"plain", "improved"}));
  c_mf->add_option("--out,-o", mf.out, "tick CSV path (default stdout)");
  mf.spread.add(c_mf);
  mf.trend.add(c_mf);

  BoltzmannFlags bz;
  auto* c_bz = app.add_subcommand("boltzmann", "solve the steady kinetic equation on a grid");
  c_bz->add_option("--n-traders,-N", bz.n, "number of traders (0 disables collisions)");
  c_bz->add_option("--noise-std", bz.sigma, "noise strength sigma");
  c_bz->add_option("--spacing", bz.h, "grid spacing h");
  c_bz->add_option("--bins", bz.bins, "spread bins for continuous laws");
  bz.o_lcut = c_bz->add_option("--l-cut", bz.l_cut, "domain width (default 3 max L)");
  c_bz->add_option("--init", bz.init, "initial guess")->check(CLI::IsMember({"gaussian", "tent", "uniform"}));
  c_bz->add_option("--tol", bz.tol, "steady residual tolerance");
  c_bz->add_option("--max-time", bz.max_time, "pseudo-time limit");
  c_bz->add_option("--out,-o", bz.out, "profile CSV path (default stdout)");
  bz.spread.add(c_bz);

  OracleFlags orc;
  auto* c_orc = app.add_subcommand("oracle", "tabulate a closed-form prediction on a grid");
  c_orc->add_option("formula", orc.formula, "formula name")->required();
  c_orc->add_option("--from", orc.from, "grid start");
  c_orc->add_option("--to", orc.to, "grid end");
  c_orc->add_option("--points", orc.points, "grid points");
  c_orc->add_option("--L", orc.L, "spread for tent and nlo");
  c_orc->add_option("--n-traders,-N", orc.n, "number of traders");
  c_orc->add_option("--noise-std", orc.sigma, "noise strength sigma");
  c_orc->add_option("--tau-star", orc.tau_star, "mean interval");
  c_orc->add_option("--kappa", orc.kappa, "decay length");
  c_orc->add_option("--tail-alpha", orc.alpha, "power-law exponent for powerlaw-ccdf");
  c_orc->add_option("--kappa-min", orc.kappa_min, "smallest decay length for powerlaw-ccdf");
  c_orc->add_option("--form", orc.form, "nlo exponent")->check(CLI::IsMember({"derived", "printed"}));
  c_orc->add_option("--interval-mode", orc.mode, "interval law")->check(CLI::IsMember({"plain", "improved"}));
  c_orc->add_option("--out,-o", orc.out, "CSV path (default stdout)");
  orc.spread.add(c_orc);

  AnalyzeFlags an;
  auto* c_an = app.add_subcommand("analyze", "estimate statistics from tick or snapshot CSVs");
  c_an->add_option("--ticks", an.ticks_csv, "tick CSV")->check(CLI::ExistingFile);
  c_an->add_option("--snapshots", an.snapshots_csv, "snapshot CSV")->check(CLI::ExistingFile);
  c_an->add_option("--k-max", an.k_max, "autocorrelation lags");
  c_an->add_option("--msd-lag", an.msd_lag, "largest tick-MSD lag");
  c_an->add_option("--bin", an.bin, "book histogram bin width");
  c_an->add_option("--half-range", an.half_range, "book histogram half range");
  c_an->add_option("--out,-o", an.out, "JSON path (default stdout)");

  std::string preset_name;
  PresetOptions popt;
  std::int64_t p_ticks = 0;
  int p_reps = 0;
  bool list = false;
  auto* c_pre = app.add_subcommand("preset", "run a named experiment and compare with theory");
  c_pre->add_option("name", preset_name, "preset name");
  c_pre->add_flag("--list", list, "list presets");
  c_pre->add_option("--seed", popt.seed, "master seed");
  auto* o_pt = c_pre->add_option("--ticks", p_ticks, "total ticks per run");
  auto* o_pr = c_pre->add_option("--replicas", p_reps, "replicas per run");
  c_pre->add_option("--workers,-j", popt.workers, "worker threads")->check(CLI::PositiveNumber);
  c_pre->add_option("--out-dir", popt.out_dir, "artifact directory");
  c_pre->add_flag("--quiet,-q", popt.quiet, "no progress on stderr");

  std::string est_path, orc_path, thr_path, cmp_out;
  auto* c_cmp = app.add_subcommand("compare", "compare estimates with oracle values under thresholds");
  c_cmp->add_option("--estimates", est_path, "JSON {key: value | {value, stderr}}")->required()->check(CLI::ExistingFile);
  c_cmp->add_option("--oracles", orc_path, "JSON {key: value}")->required()->check(CLI::ExistingFile);
  c_cmp->add_option("--thresholds", thr_path, "JSON {key: {kind, a, b}}")->required()->check(CLI::ExistingFile);
  c_cmp->add_option("--out,-o", cmp_out, "report JSON path (default stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kPass : kUsage;
  }

  try {
    if (*c_sim) return cmd_simulate(sim, replica, sim_out, sim_snaps, print_config);
    if (*c_mf) return cmd_meanfield(mf);
    if (*c_bz) return cmd_boltzmann(bz);
    if (*c_orc) return cmd_oracle(orc);
    if (*c_an) return cmd_analyze(an);
    if (*c_cmp) return cmd_compare(est_path, orc_path, thr_path, cmp_out);
    if (*c_pre) {
      if (list) {
        for (const auto& p : preset_catalog())
          std::cout << p.name << "\t" << p.generator << "\t" << p.description << "\n";
        return kPass;
      }
      if (preset_name.empty()) throw UsageError("preset: give a name or --list");
      if (o_pt->count()) popt.ticks = p_ticks;
      if (o_pr->count()) popt.replicas = p_reps;
      const ComparisonReport rep = run_preset(preset_name, popt);
      std::cout << rep.to_text();
      return rep.pass() ? kPass : kFail;
    }
  } catch (const UsageError& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return kUsage;
  } catch (const ConfigError& e) {
    std::cerr << "configuration error: " << e.what() << "\n";
    return kUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kRuntime;
  }
  return kUsage;
}
