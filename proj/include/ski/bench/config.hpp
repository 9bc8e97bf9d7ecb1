#pragma once

#include <cstdint>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "ski/gp.hpp"
#include "ski/kernels.hpp"

namespace ski::bench {

inline const std::vector<std::string> kExperiments{"gram_rate", "n_growth", "kernel_rate", "score",  "inverse_action",
                                                   "logdet",    "posterior", "ascent",      "regimes", "sizing"};

struct SweepConfig {
  // Shared sweep over (d, n, cells, seed).
  std::vector<int> dims{1, 2};
  std::vector<int> n_values{64, 128, 256};
  std::vector<int> m_per_dim_values{8, 16, 32};
  int T = 64;
  double D = 1.0;
  kernels::Hyperparams hp_true{1.0, 0.5, 0.1};
  std::vector<std::uint64_t> seeds{1, 2, 3};
  std::set<std::string> experiments{kExperiments.begin(), kExperiments.end()};
  std::string output_path = "results";
  int jobs = 0;  // 0: OpenMP default

  // Calibration probe.
  int probe_pairs = 4000;
  double k_prime_safety = 1.5;
  double mu_safety = 1.1;

  // kernel_rate
  std::vector<int> kernel_rate_dims{1, 2};
  std::vector<int> kernel_rate_cells{16, 32, 64, 128, 256};
  int kernel_rate_pairs = 1000;
  int kernel_rate_slice_points = 4001;

  // gram_rate: cells ladder per dimension
  int gram_rate_n = 256;
  std::vector<int> gram_rate_dims{1, 2, 3};
  std::map<int, std::vector<int>> gram_rate_cells{
      {1, {16, 32, 64, 128, 256}}, {2, {8, 12, 16, 24, 32}}, {3, {8, 10, 12, 16, 20}}};

  // n_growth
  std::vector<int> n_growth_values{64, 128, 256, 512, 1024};
  int n_growth_cells = 16;

  // sizing
  std::vector<double> sizing_epsilons{1e-2, 1e-3};
  std::vector<int> sizing_n_values{128, 256};
  std::vector<int> sizing_score_n_values{64, 128, 256, 512, 1024};
  double sizing_score_epsilon = 1e-2;

  // regimes
  std::vector<int> regimes_dims{1, 2, 3, 4};
  std::vector<std::int64_t> regimes_n_values{1000, 10000, 100000, 1000000};
  double regimes_epsilon = 1e-2;
  double regimes_C = 1.0;

  // ascent
  int ascent_n = 128;
  int ascent_K = 200;
  int ascent_cells = 16;
  int ascent_lattice_cells = 127;
  gp::ThetaBox ascent_box;
  Eigen::Vector2d ascent_theta0{2.0, 1.2};
  double ascent_eta = 0.0;  // 0: 1/mu

  void validate() const;
};

/// Parses the flat `key = value` format; `#` starts a comment. Unknown keys
/// are an InvalidArgument.
SweepConfig parse_config(const std::string& text, bool* has_seeds = nullptr);
SweepConfig load_config(const std::string& path, bool* has_seeds = nullptr);

/// Applies one key/value pair to the config.
void apply_setting(SweepConfig& cfg, const std::string& key, const std::string& value);

std::vector<std::string> split_list(const std::string& text);

}  // namespace ski::bench
