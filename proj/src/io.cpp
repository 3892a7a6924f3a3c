#include "hftkin/io.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "hftkin/errors.hpp"

namespace hftkin {

namespace {

void check_keys(const Json& j, std::initializer_list<const char*> allowed, const char* what) {
  if (!j.is_object()) throw ConfigError(std::string(what) + ": expected a JSON object");
  for (const auto& [key, value] : j.items()) {
    bool ok = false;
    for (const char* a : allowed) ok = ok || key == a;
    if (!ok) throw ConfigError(std::string(what) + ": unknown key '" + key + "'");
  }
}

template <class T>
T get(const Json& j, const char* key, const char* what) {
  try {
    return j.at(key).get<T>();
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string(what) + ": bad or missing '" + key + "': " + e.what());
  }
}

template <class T>
void read_optional(const Json& j, const char* key, T& out, const char* what) {
  if (j.contains(key)) out = get<T>(j, key, what);
}

template <class T>
void read_optional(const Json& j, const char* key, std::optional<T>& out, const char* what) {
  if (j.contains(key) && !j.at(key).is_null()) out = get<T>(j, key, what);
}

Json optional_json(const std::optional<double>& v) { return v ? Json(*v) : Json(nullptr); }

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> out;
  std::string cell;
  std::istringstream ss(line);
  while (std::getline(ss, cell, ',')) out.push_back(cell);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

Json read_header(std::istream& is) {
  std::string line;
  if (!std::getline(is, line) || line.rfind("# ", 0) != 0) throw DomainError("csv: missing '# {json}' header line");
  try {
    return Json::parse(line.substr(2));
  } catch (const nlohmann::json::exception& e) {
    throw DomainError(std::string("csv: unreadable header: ") + e.what());
  }
}

double parse_real(const std::string& s) {
  std::size_t used = 0;
  const double v = std::stod(s, &used);
  if (used != s.size()) throw DomainError("csv: bad number '" + s + "'");
  return v;
}

}  // namespace

std::string format_real(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

Json to_json(const SpreadLaw& law) {
  Json j;
  j["kind"] = law.is_point_mass() ? "point_mass" : "gamma";
  j["l_star"] = law.l_star;
  if (!law.is_point_mass()) {
    j["alpha"] = law.alpha;
    if (law.truncation) j["truncation"] = {{"l_min", law.truncation->l_min}, {"l_max", law.truncation->l_max}};
  }
  return j;
}

SpreadLaw spread_law_from_json(const Json& j) {
  constexpr const char* what = "spread_law";
  check_keys(j, {"kind", "l_star", "alpha", "truncation"}, what);
  const auto kind = get<std::string>(j, "kind", what);
  const double l_star = get<double>(j, "l_star", what);
  SpreadLaw law;
  if (kind == "point_mass") {
    if (j.contains("alpha") || j.contains("truncation"))
      throw ConfigError("spread_law: point_mass takes only l_star");
    law = SpreadLaw::point_mass(l_star);
  } else if (kind == "gamma") {
    law = SpreadLaw::gamma(l_star);
    read_optional(j, "alpha", law.alpha, what);
    if (j.contains("truncation")) {
      const auto& t = j.at("truncation");
      check_keys(t, {"l_min", "l_max"}, "spread_law.truncation");
      law.truncation = Truncation{get<double>(t, "l_min", what), get<double>(t, "l_max", what)};
    }
  } else {
    throw ConfigError("spread_law: unknown kind '" + kind + "'");
  }
  validate(law);
  return law;
}

Json to_json(const SimConfig& cfg) {
  Json j;
  j["n_traders"] = cfg.n_traders;
  j["trend_strength"] = cfg.trend_strength;
  j["trend_threshold"] = cfg.trend_threshold;
  j["noise_std"] = cfg.noise_std;
  j["spread_law"] = to_json(cfg.spread_law);
  j["dt"] = optional_json(cfg.dt);
  j["warmup"] = optional_json(cfg.warmup);
  j["sampling_interval"] = optional_json(cfg.sampling_interval);
  j["tick_budget"] = cfg.tick_budget;
  j["seed"] = cfg.seed;
  j["max_idle_steps"] = cfg.max_idle_steps;
  return j;
}

SimConfig sim_config_from_json(const Json& j) {
  constexpr const char* what = "config";
  check_keys(j,
             {"n_traders", "trend_strength", "trend_threshold", "noise_std", "spread_law", "dt", "warmup",
              "sampling_interval", "tick_budget", "seed", "max_idle_steps"},
             what);
  SimConfig cfg;
  read_optional(j, "n_traders", cfg.n_traders, what);
  read_optional(j, "trend_strength", cfg.trend_strength, what);
  read_optional(j, "trend_threshold", cfg.trend_threshold, what);
  read_optional(j, "noise_std", cfg.noise_std, what);
  if (j.contains("spread_law")) cfg.spread_law = spread_law_from_json(j.at("spread_law"));
  read_optional(j, "dt", cfg.dt, what);
  read_optional(j, "warmup", cfg.warmup, what);
  read_optional(j, "sampling_interval", cfg.sampling_interval, what);
  read_optional(j, "tick_budget", cfg.tick_budget, what);
  read_optional(j, "seed", cfg.seed, what);
  read_optional(j, "max_idle_steps", cfg.max_idle_steps, what);
  validate(cfg);
  return cfg;
}

Json run_header(const SimConfig& cfg) {
  const SimConfig r = resolve(cfg);
  const auto d = dimensionless(r);
  const auto k = derived_constants(r.spread_law, r.n_traders, r.noise_std);
  Json j;
  j["config"] = to_json(r);
  j["dimensionless"] = {{"c_tilde", d.c_tilde}, {"dp_tilde", optional_json(d.dp_tilde)}};
  j["derived"] = {{"tau_star", k.tau_star}, {"l_rho_sq", k.l_rho_sq}, {"alpha2", k.alpha2}};
  return j;
}

void Table::add(std::string name, std::vector<double> values) {
  if (!columns.empty() && values.size() != rows()) throw DomainError("table: column '" + name + "' has wrong length");
  names.push_back(std::move(name));
  columns.push_back(std::move(values));
}

const std::vector<double>& Table::column(const std::string& name) const {
  for (std::size_t k = 0; k < names.size(); ++k)
    if (names[k] == name) return columns[k];
  throw DomainError("table: no column '" + name + "'");
}

void write_table(std::ostream& os, const Json& header, const Table& t) {
  os << "# " << header.dump() << '\n';
  for (std::size_t c = 0; c < t.names.size(); ++c) os << (c ? "," : "") << t.names[c];
  os << '\n';
  for (std::size_t r = 0; r < t.rows(); ++r) {
    for (std::size_t c = 0; c < t.columns.size(); ++c) os << (c ? "," : "") << format_real(t.columns[c][r]);
    os << '\n';
  }
}

Table read_table(std::istream& is, Json* header) {
  const Json h = read_header(is);
  if (header) *header = h;
  std::string line;
  if (!std::getline(is, line)) throw DomainError("csv: missing column row");
  Table t;
  t.names = split_csv(line);
  t.columns.assign(t.names.size(), {});
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    const auto cells = split_csv(line);
    if (cells.size() != t.names.size()) throw DomainError("csv: ragged row");
    for (std::size_t c = 0; c < cells.size(); ++c) t.columns[c].push_back(parse_real(cells[c]));
  }
  return t;
}

void write_ticks(std::ostream& os, const Json& header, const TickSeries& s) {
  os << "# " << header.dump() << '\n';
  os << "T,t,p,dp,tau,buyer,seller\n";
  for (std::size_t k = 0; k < s.size(); ++k) {
    os << s.T[k] << ',' << format_real(s.t[k]) << ',' << format_real(s.p[k]) << ',' << format_real(s.dp[k]) << ','
       << format_real(s.tau[k]) << ',';
    if (s.buyer[k] >= 0) os << s.buyer[k];
    os << ',';
    if (s.seller[k] >= 0) os << s.seller[k];
    os << '\n';
  }
}

TickSeries read_ticks(std::istream& is, Json* header) {
  const Json h = read_header(is);
  if (header) *header = h;
  std::string line;
  if (!std::getline(is, line) || line != "T,t,p,dp,tau,buyer,seller") throw DomainError("csv: not a tick series");
  TickSeries s;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    const auto c = split_csv(line);
    if (c.size() != 7) throw DomainError("csv: ragged tick row");
    TickRow r;
    r.T = std::stoll(c[0]);
    r.t = parse_real(c[1]);
    r.p = parse_real(c[2]);
    r.dp = parse_real(c[3]);
    r.tau = parse_real(c[4]);
    r.buyer = c[5].empty() ? -1 : std::stoi(c[5]);
    r.seller = c[6].empty() ? -1 : std::stoi(c[6]);
    s.push_back(r);
  }
  return s;
}

void write_text_file(const std::string& path, const std::string& text) {
  const std::filesystem::path p(path);
  if (p.has_parent_path()) std::filesystem::create_directories(p.parent_path());
  std::ofstream f(p, std::ios::binary);
  if (!f) throw std::runtime_error("cannot open " + path + " for writing");
  f << text;
  if (!f) throw std::runtime_error("write failed: " + path);
}

}  // namespace hftkin
