#include "ski/bench/report.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>

#include "ski/error.hpp"

namespace ski::bench {

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void Table::add(std::vector<Value> row) {
  if (row.size() != header.size()) throw ShapeError("Table: row width does not match the header");
  rows.push_back(std::move(row));
}

std::string Table::to_csv() const {
  std::string out;
  auto put = [&out](const Value& v) {
    if (const auto* i = std::get_if<std::int64_t>(&v)) {
      out += std::to_string(*i);
    } else if (const auto* d = std::get_if<double>(&v)) {
      out += format_double(*d);
    } else {
      out += std::get<std::string>(v);
    }
  };
  for (std::size_t i = 0; i < header.size(); ++i) out += (i ? "," : "") + header[i];
  out += '\n';
  for (const auto& row : rows) {
    for (std::size_t i = 0; i < row.size(); ++i) {
      if (i) out += ',';
      put(row[i]);
    }
    out += '\n';
  }
  return out;
}

bool ExperimentResult::passed() const { return failures().empty(); }

std::vector<std::string> ExperimentResult::failures() const {
  std::vector<std::string> out;
  for (const auto& r : reports) {
    if (!r.satisfied) out.push_back(name + ": bound " + r.name + " violated");
  }
  for (const auto& f : fits) {
    if (!f.passed) out.push_back(name + ": rate " + f.name + " slope " + format_double(f.fit.slope) + " outside [" +
                                 format_double(f.lo) + ", " + format_double(f.hi) + "]");
  }
  for (const auto& c : checks) {
    if (!c.passed) out.push_back(name + ": check " + c.name + " failed (" + c.detail + ")");
  }
  return out;
}

namespace {

// JSON numbers cannot be inf/nan; encode those as strings.
nlohmann::json number(double v) {
  if (std::isfinite(v)) return v;
  return format_double(v);
}

}  // namespace

nlohmann::json to_json(const bounds::BoundReport& r) {
  return {{"name", r.name},
          {"theoretical", number(r.theoretical)},
          {"measured", number(r.measured)},
          {"satisfied", r.satisfied},
          {"margin_ratio", number(r.margin_ratio)},
          {"provenance", r.provenance}};
}

nlohmann::json to_json(const bounds::Constants& k) {
  return {{"c", k.c},
          {"K_prime", k.k_prime},
          {"K_prime_signal_variance", k.k_prime_partial[0]},
          {"K_prime_lengthscale", k.k_prime_partial[1]},
          {"C_grad", k.C_grad},
          {"M", k.M},
          {"L", k.L},
          {"mu", k.mu},
          {"calibration_meta",
           {{"c_source", k.meta.c_source},
            {"K_prime_source", k.meta.k_prime_source},
            {"mu_source", k.meta.mu_source},
            {"K_prime_safety", k.meta.k_prime_safety},
            {"mu_safety", k.meta.mu_safety},
            {"K_prime_raw", k.meta.k_prime_raw},
            {"K_prime_partial_raw", {k.meta.k_prime_partial_raw[0], k.meta.k_prime_partial_raw[1]}},
            {"mu_raw", k.meta.mu_raw},
            {"probe_seed", k.meta.probe_seed},
            {"probe_pairs", k.meta.probe_pairs},
            {"probe_cells", k.meta.probe_cells}}}};
}

nlohmann::json to_json(const NamedFit& f) {
  nlohmann::json pts = nlohmann::json::array();
  for (const auto& [x, y] : f.fit.points) pts.push_back({x, y});
  return {{"name", f.name},     {"slope", f.fit.slope},       {"intercept", f.fit.intercept},
          {"r_squared", f.fit.r_squared}, {"points", pts}, {"notes", f.fit.notes},
          {"expected_lo", f.lo}, {"expected_hi", f.hi},       {"passed", f.passed}};
}

nlohmann::json to_json(const ExperimentResult& r) {
  nlohmann::json reports = nlohmann::json::array();
  for (const auto& b : r.reports) reports.push_back(to_json(b));
  nlohmann::json fits = nlohmann::json::array();
  for (const auto& f : r.fits) fits.push_back(to_json(f));
  nlohmann::json checks = nlohmann::json::array();
  for (const auto& c : r.checks) checks.push_back({{"name", c.name}, {"passed", c.passed}, {"detail", c.detail}});
  return {{"name", r.name}, {"passed", r.passed()}, {"reports", reports},
          {"rate_fits", fits}, {"checks", checks},  {"extra", r.extra}};
}

void write_outputs(const std::filesystem::path& dir, const std::vector<ExperimentResult>& results,
                   const nlohmann::json& header) {
  std::filesystem::create_directories(dir);
  nlohmann::json summary = header;
  summary["experiments"] = nlohmann::json::array();
  nlohmann::json failures = nlohmann::json::array();
  for (const auto& r : results) {
    std::ofstream csv(dir / (r.name + ".csv"), std::ios::binary);
    if (!csv) throw Error("cannot write " + (dir / (r.name + ".csv")).string());
    csv << r.table.to_csv();
    summary["experiments"].push_back(to_json(r));
    for (const auto& f : r.failures()) failures.push_back(f);
  }
  summary["failures"] = failures;
  summary["passed"] = failures.empty();
  std::ofstream js(dir / "summary.json", std::ios::binary);
  if (!js) throw Error("cannot write " + (dir / "summary.json").string());
  js << summary.dump(2) << '\n';
}

}  // namespace ski::bench
