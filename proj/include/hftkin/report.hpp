#pragma once

#include <map>
#include <string>
#include <vector>

#include "hftkin/io.hpp"

namespace hftkin {

struct Estimate {
  double value = 0.0;
  double stderr_ = 0.0;  // 0 when not available
};

struct Threshold {
  enum class Kind { relative, absolute, upper, lower, range };
  Kind kind = Kind::relative;
  double a = 0.0;
  double b = 0.0;  // range only

  static Threshold relative(double tol) { return {Kind::relative, tol, 0.0}; }
  static Threshold absolute(double tol) { return {Kind::absolute, tol, 0.0}; }
  static Threshold upper(double bound) { return {Kind::upper, bound, 0.0}; }
  static Threshold lower(double bound) { return {Kind::lower, bound, 0.0}; }
  static Threshold range(double lo, double hi) { return {Kind::range, lo, hi}; }

  bool accepts(double estimate, double oracle) const;
  std::string describe() const;
};

struct ComparisonRow {
  std::string key;
  Estimate estimate;
  double oracle = 0.0;
  double relative_error = 0.0;  // |e - o| / |o|, or |e - o| when o = 0
  Threshold threshold;
  bool pass = false;
};

struct ComparisonReport {
  std::vector<ComparisonRow> rows;

  bool pass() const;
  Json to_json() const;
  static ComparisonReport from_json(const Json& j);
  /// One aligned line per row.
  std::string to_text() const;
};

/// Rows in key order. The three maps must have identical key sets; a missing
/// key on any side throws DomainError.
ComparisonReport compare(const std::map<std::string, Estimate>& estimates, const std::map<std::string, double>& oracles,
                         const std::map<std::string, Threshold>& thresholds);

}  // namespace hftkin
