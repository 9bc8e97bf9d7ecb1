#pragma once

#include <map>
#include <vector>

#include "ski/bench/config.hpp"
#include "ski/bench/report.hpp"
#include "ski/bounds.hpp"

namespace ski::bench {

/// Constants calibrated per dimension before any cell is certified.
struct Calibration {
  std::map<int, bounds::Constants> by_dim;

  const bounds::Constants& at(int d) const;
};

/// Probe for dimension d: a seed distinct from every sweep seed and lattices
/// spanning the spacings the config will use in that dimension.
bounds::ProbeSpec calibration_probe(const SweepConfig& cfg, int d);

/// Dimensions whose constants the selected experiments need.
std::vector<int> dims_needed(const SweepConfig& cfg);

Calibration calibrate_all(const SweepConfig& cfg);

/// Spectral norm by power iteration, falling back to an SVD if the
/// iteration does not settle.
double measured_norm(const Eigen::MatrixXd& A);

ExperimentResult run_kernel_rate(const SweepConfig& cfg, const Calibration& cal);
ExperimentResult run_gram_rate(const SweepConfig& cfg, const Calibration& cal);
ExperimentResult run_n_growth(const SweepConfig& cfg, const Calibration& cal);
/// score, inverse_action, logdet and posterior share the sweep cells; only
/// the requested ones are returned.
std::vector<ExperimentResult> run_sweep(const SweepConfig& cfg, const Calibration& cal);
ExperimentResult run_sizing(const SweepConfig& cfg, const Calibration& cal);
ExperimentResult run_regimes(const SweepConfig& cfg, const Calibration& cal);
ExperimentResult run_ascent(const SweepConfig& cfg);

/// Every requested experiment, in the canonical order.
std::vector<ExperimentResult> run_experiments(const SweepConfig& cfg, const Calibration& cal);

}  // namespace ski::bench
