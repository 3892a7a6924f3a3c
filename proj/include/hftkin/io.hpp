#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include <json.hpp>

#include "hftkin/config.hpp"
#include "hftkin/spread_law.hpp"
#include "hftkin/state.hpp"

namespace hftkin {

using Json = nlohmann::ordered_json;

Json to_json(const SpreadLaw& law);
SpreadLaw spread_law_from_json(const Json& j);

/// Unknown keys and wrong types raise ConfigError.
Json to_json(const SimConfig& cfg);
SimConfig sim_config_from_json(const Json& j);

/// Resolved configuration plus dimensionless and derived constants.
Json run_header(const SimConfig& cfg);

/// Named numeric columns of equal length.
struct Table {
  std::vector<std::string> names;
  std::vector<std::vector<double>> columns;

  void add(std::string name, std::vector<double> values);
  std::size_t rows() const { return columns.empty() ? 0 : columns.front().size(); }
  const std::vector<double>& column(const std::string& name) const;
};

/// Every CSV starts with one line "# " + compact JSON header, then the
/// column-name row. Reals use %.17g, so files round-trip exactly.
void write_table(std::ostream& os, const Json& header, const Table& t);
Table read_table(std::istream& is, Json* header = nullptr);

/// Columns T, t, p, dp, tau, buyer, seller; counterparty cells are empty
/// when the generator has none.
void write_ticks(std::ostream& os, const Json& header, const TickSeries& s);
TickSeries read_ticks(std::istream& is, Json* header = nullptr);

std::string format_real(double x);

/// Writes to a file, creating parent directories. Throws std::runtime_error on failure.
void write_text_file(const std::string& path, const std::string& text);

}  // namespace hftkin
