#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "hftkin/report.hpp"

namespace hftkin {

struct ResourceError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct PresetInfo {
  std::string name;
  std::string generator;  // micro | meanfield | boltzmann
  std::string description;
  std::int64_t default_ticks = 0;  // total ticks per run (0 for the solver)
  std::int64_t max_ticks = 0;      // budget; larger overrides are refused
};

const std::vector<PresetInfo>& preset_catalog();

struct PresetOptions {
  std::uint64_t seed = 1;
  std::optional<std::int64_t> ticks;  // total ticks per run, split over replicas
  std::optional<int> replicas;
  int workers = 1;
  std::string out_dir = "out";
  bool quiet = false;
};

/// Runs the named preset, writes its CSVs, summary.json and report.json under
/// out_dir/<name>/, and returns the comparison report. Unknown names throw
/// ConfigError; budget violations throw ResourceError.
ComparisonReport run_preset(const std::string& name, const PresetOptions& opt);

}  // namespace hftkin
