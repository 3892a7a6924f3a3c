#include "hftkin/report.hpp"

#include <cmath>
#include <cstdio>

#include "hftkin/errors.hpp"

namespace hftkin {

namespace {

const char* kind_name(Threshold::Kind k) {
  switch (k) {
    case Threshold::Kind::relative: return "relative";
    case Threshold::Kind::absolute: return "absolute";
    case Threshold::Kind::upper: return "upper";
    case Threshold::Kind::lower: return "lower";
    case Threshold::Kind::range: return "range";
  }
  return "?";
}

Threshold::Kind kind_from_name(const std::string& s) {
  for (auto k : {Threshold::Kind::relative, Threshold::Kind::absolute, Threshold::Kind::upper, Threshold::Kind::lower,
                 Threshold::Kind::range})
    if (s == kind_name(k)) return k;
  throw DomainError("report: unknown threshold kind '" + s + "'");
}

}  // namespace

bool Threshold::accepts(double e, double o) const {
  if (!std::isfinite(e)) return false;
  switch (kind) {
    case Kind::relative: return std::abs(e - o) <= a * std::abs(o);
    case Kind::absolute: return std::abs(e - o) <= a;
    case Kind::upper: return e <= a;
    case Kind::lower: return e >= a;
    case Kind::range: return a <= e && e <= b;
  }
  return false;
}

std::string Threshold::describe() const {
  char buf[96];
  switch (kind) {
    case Kind::relative: std::snprintf(buf, sizeof buf, "rel <= %g", a); break;
    case Kind::absolute: std::snprintf(buf, sizeof buf, "abs <= %g", a); break;
    case Kind::upper: std::snprintf(buf, sizeof buf, "<= %g", a); break;
    case Kind::lower: std::snprintf(buf, sizeof buf, ">= %g", a); break;
    case Kind::range: std::snprintf(buf, sizeof buf, "in [%g, %g]", a, b); break;
  }
  return buf;
}

bool ComparisonReport::pass() const {
  for (const auto& r : rows)
    if (!r.pass) return false;
  return true;
}

Json ComparisonReport::to_json() const {
  Json rows_j = Json::array();
  for (const auto& r : rows) {
    rows_j.push_back({{"key", r.key},
                      {"estimate", r.estimate.value},
                      {"stderr", r.estimate.stderr_},
                      {"oracle", r.oracle},
                      {"relative_error", r.relative_error},
                      {"threshold", {{"kind", kind_name(r.threshold.kind)}, {"a", r.threshold.a}, {"b", r.threshold.b}}},
                      {"pass", r.pass}});
  }
  return {{"pass", pass()}, {"rows", rows_j}};
}

ComparisonReport ComparisonReport::from_json(const Json& j) {
  ComparisonReport rep;
  try {
    for (const auto& r : j.at("rows")) {
      ComparisonRow row;
      row.key = r.at("key").get<std::string>();
      row.estimate = {r.at("estimate").get<double>(), r.value("stderr", 0.0)};
      row.oracle = r.at("oracle").get<double>();
      row.relative_error = r.value("relative_error", 0.0);
      const auto& t = r.at("threshold");
      row.threshold = {kind_from_name(t.at("kind").get<std::string>()), t.at("a").get<double>(), t.value("b", 0.0)};
      row.pass = r.at("pass").get<bool>();
      rep.rows.push_back(row);
    }
  } catch (const nlohmann::json::exception& e) {
    throw DomainError(std::string("report: malformed JSON: ") + e.what());
  }
  return rep;
}

std::string ComparisonReport::to_text() const {
  std::string out;
  char buf[256];
  for (const auto& r : rows) {
    std::snprintf(buf, sizeof buf, "%-4s %-32s est=%-12.6g +-%-10.3g oracle=%-12.6g err=%-10.3g %s\n",
                  r.pass ? "PASS" : "FAIL", r.key.c_str(), r.estimate.value, r.estimate.stderr_, r.oracle,
                  r.relative_error, r.threshold.describe().c_str());
    out += buf;
  }
  return out;
}

ComparisonReport compare(const std::map<std::string, Estimate>& estimates, const std::map<std::string, double>& oracles,
                         const std::map<std::string, Threshold>& thresholds) {
  auto require = [](const auto& m, const std::string& key, const char* what) {
    if (!m.count(key)) throw DomainError("compare: key '" + key + "' has no " + what);
  };
  for (const auto& [k, v] : oracles) require(estimates, k, "estimate");
  for (const auto& [k, v] : thresholds) require(estimates, k, "estimate");
  ComparisonReport rep;
  for (const auto& [key, est] : estimates) {
    require(oracles, key, "oracle");
    require(thresholds, key, "threshold");
    ComparisonRow row;
    row.key = key;
    row.estimate = est;
    row.oracle = oracles.at(key);
    row.threshold = thresholds.at(key);
    const double diff = std::abs(est.value - row.oracle);
    row.relative_error = row.oracle != 0.0 ? diff / std::abs(row.oracle) : diff;
    row.pass = row.threshold.accepts(est.value, row.oracle);
    rep.rows.push_back(row);
  }
  return rep;
}

}  // namespace hftkin
