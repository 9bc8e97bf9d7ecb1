#include "ski/bench/run.hpp"

#include <omp.h>

#include <filesystem>
#include <ostream>

#include "ski/bench/experiments.hpp"
#include "ski/bench/report.hpp"
#include "ski/error.hpp"

namespace ski::bench {

int exit_code_for(const std::exception& e) {
  if (dynamic_cast<const NumericalError*>(&e) || dynamic_cast<const CalibrationError*>(&e)) return kNumericalError;
  if (dynamic_cast<const InvalidArgument*>(&e) || dynamic_cast<const ShapeError*>(&e) ||
      dynamic_cast<const OutOfDomain*>(&e)) {
    return kUsageError;
  }
  if (dynamic_cast<const InsufficientData*>(&e)) return kAssertionFailure;
  return kNumericalError;
}

namespace {

nlohmann::json config_json(const SweepConfig& cfg) {
  return {{"dims", cfg.dims},
          {"n_values", cfg.n_values},
          {"m_per_dim_values", cfg.m_per_dim_values},
          {"T", cfg.T},
          {"D", cfg.D},
          {"hp_true",
           {{"signal_variance", cfg.hp_true.signal_variance},
            {"lengthscale", cfg.hp_true.lengthscale},
            {"noise_variance", cfg.hp_true.noise_variance}}},
          {"seeds", cfg.seeds},
          {"experiments", std::vector<std::string>(cfg.experiments.begin(), cfg.experiments.end())}};
}

void set_jobs(int jobs) {
  if (jobs > 0) omp_set_num_threads(jobs);
}

}  // namespace

int run(const SweepConfig& cfg, std::ostream& log) {
  set_jobs(cfg.jobs);
  const auto cal = calibrate_all(cfg);
  const auto results = run_experiments(cfg, cal);

  nlohmann::json header;
  header["config"] = config_json(cfg);
  header["calibration"] = nlohmann::json::object();
  for (const auto& [d, k] : cal.by_dim) header["calibration"][std::to_string(d)] = to_json(k);
  write_outputs(cfg.output_path, results, header);

  int failed = 0;
  for (const auto& r : results) {
    const auto f = r.failures();
    log << r.name << ": " << (f.empty() ? "pass" : "FAIL") << " (" << r.reports.size() << " bounds, "
        << r.fits.size() << " rates, " << r.checks.size() << " checks)\n";
    for (const auto& line : f) log << "  " << line << '\n';
    failed += static_cast<int>(f.size());
  }
  return failed == 0 ? kPass : kAssertionFailure;
}

int calibrate_command(const SweepConfig& cfg, std::ostream& out, std::ostream& log) {
  set_jobs(cfg.jobs);
  const auto cal = calibrate_all(cfg);
  nlohmann::json j = nlohmann::json::object();
  for (const auto& [d, k] : cal.by_dim) j[std::to_string(d)] = to_json(k);
  out << j.dump(2) << '\n';
  log << "calibrated " << cal.by_dim.size() << " dimension(s)\n";
  return kPass;
}

}  // namespace ski::bench
