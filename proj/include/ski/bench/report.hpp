#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <variant>
#include <vector>

#include <nlohmann/json.hpp>

#include "ski/bench/data.hpp"
#include "ski/bounds.hpp"

namespace ski::bench {

using Value = std::variant<std::int64_t, double, std::string>;

/// One CSV: header plus rows. Doubles print with 17 significant digits.
struct Table {
  std::vector<std::string> header;
  std::vector<std::vector<Value>> rows;

  void add(std::vector<Value> row);
  std::string to_csv() const;
};

/// A pass/fail assertion that is not a bound comparison (rates, regime
/// directions, monotonicity).
struct Check {
  std::string name;
  bool passed = false;
  std::string detail;
};

struct NamedFit {
  std::string name;
  RateFit fit;
  double lo = 0.0;
  double hi = 0.0;
  bool passed = false;
};

struct ExperimentResult {
  std::string name;
  Table table;
  std::vector<bounds::BoundReport> reports;
  std::vector<NamedFit> fits;
  std::vector<Check> checks;
  nlohmann::json extra = nlohmann::json::object();

  bool passed() const;
  std::vector<std::string> failures() const;
};

std::string format_double(double v);

nlohmann::json to_json(const bounds::BoundReport& r);
nlohmann::json to_json(const bounds::Constants& k);
nlohmann::json to_json(const NamedFit& f);
nlohmann::json to_json(const ExperimentResult& r);

/// Writes <dir>/<name>.csv for every result and <dir>/summary.json.
void write_outputs(const std::filesystem::path& dir, const std::vector<ExperimentResult>& results,
                   const nlohmann::json& header);

}  // namespace ski::bench
