#pragma once

// Closed-form SKI error bounds, the calibration of their kernel-dependent
// constants, and reports comparing each bound with a measurement.

#include <cstdint>
#include <array>
#include <optional>
#include <string>
#include <vector>

#include "ski/gp.hpp"
#include "ski/kernels.hpp"

namespace ski::bounds {

/// Number of interpolation points per axis for cubic convolution.
inline constexpr int kInterpolationPoints = 4;
inline constexpr std::uint64_t kProbeSeed = 0x7f4a7c159e3779b9ULL;

struct CalibrationMeta {
  std::string c_source = "interp.empirical_c";
  std::string k_prime_source;
  std::string mu_source;
  double k_prime_safety = 1.5;
  double mu_safety = 1.1;
  double k_prime_raw = 0.0;
  std::array<double, kernels::kNumHypers> k_prime_partial_raw{};
  double mu_raw = 0.0;
  std::uint64_t probe_seed = 0;
  int probe_pairs = 0;
  std::vector<int> probe_cells;
};

struct Constants {
  double c = 1.25;
  double k_prime = 0.0;
  /// K' of the derivative kernels, indexed by kernels::Hyper.
  std::array<double, kernels::kNumHypers> k_prime_partial{};
  double C_grad = 0.0;
  double M = 0.0;
  int L = kInterpolationPoints;
  double mu = 0.0;
  CalibrationMeta meta;

  double k_prime_for(kernels::Hyper which) const { return k_prime_partial[static_cast<int>(which)]; }
};

struct BoundReport {
  std::string name;
  double theoretical = 0.0;
  double measured = 0.0;
  bool satisfied = false;
  double margin_ratio = 0.0;  // measured / theoretical
  std::string provenance;

  static BoundReport make(std::string name, double theoretical, double measured, std::string provenance);
};

/// K' c^{2d} h^3 with h = 2D / m^{1/d}, for a given K'.
double delta_interp(std::int64_t m_unpadded, int d, double D, double k_prime, double c);
double delta_interp(std::int64_t m_unpadded, int d, double D, const Constants& consts);

/// n (1 + sqrt(L) c^d) delta.
double gamma(std::int64_t n, std::int64_t m_unpadded, int d, double D, const Constants& consts);
/// Same with the K' of a derivative kernel.
double gamma_partial(std::int64_t n, std::int64_t m_unpadded, int d, double D, const Constants& consts,
                     kernels::Hyper which);

/// Smallest perfect d-th power m (and at least 4^d) meeting the sizing rule
/// for spectral error epsilon.
std::int64_t inducing_count(std::int64_t n, double epsilon, int d, double D, const Constants& consts);
/// Cells per axis of a perfect d-th power.
int cells_for(std::int64_t m_unpadded, int d);

/// Smallest epsilon compatible with an m log m = O(n) lattice.
double linear_time_epsilon(std::int64_t n, int d, double D, const Constants& consts, double C_regime = 1.0);

double score_error_bound(std::int64_t n, std::int64_t m_unpadded, int d, double D, const Constants& consts,
                         double y_norm, double sigma2);
double inverse_action_bound(double gamma_val, double sigma2);
double logdet_bound(double gamma_val, double sigma2);
double posterior_mean_bound(std::int64_t n, std::int64_t T, std::int64_t m_unpadded, int d, double D,
                            const Constants& consts, double y_norm, double sigma2);
double posterior_cov_bound(std::int64_t n, std::int64_t T, std::int64_t m_unpadded, int d, double D,
                           const Constants& consts, double sigma2);
/// Rate 3/d - 1 at which the m-dependent covariance terms decay in m.
double posterior_cov_decay_exponent(int d);

double ascent_certificate(double mu, double L_star, double L_theta0, int K, double eps_g);

/// Probe used to fit K': random point pairs on lattices with the given
/// cell counts, for every listed hyperparameter setting.
struct ProbeSpec {
  int dim = 1;
  double halfwidth = 1.0;
  std::vector<kernels::Hyperparams> hyperparams{kernels::Hyperparams{}};
  std::vector<int> cells{8, 16, 32, 64, 128};
  int pairs = 4000;
  std::uint64_t seed = kProbeSeed;
  double safety = 1.5;
};

/// Instance on which the smoothness constant is measured.
struct SmoothnessProbe {
  kernels::Dataset data;
  gp::ThetaBox box;
  double noise_variance = 0.1;
  int grid_points = 9;
  double safety = 1.1;
};

/// Max over the probe of |f(x) - sum_k w_k(x) f(u_k)| / (c^{2d} h^3) with
/// f = k(., x') (or a hyperparameter derivative of k); not yet scaled by the
/// safety factor.
double fit_k_prime_raw(const ProbeSpec& probe, std::optional<kernels::Hyper> derivative, double c);

/// Max spectral norm of the exact log-likelihood Hessian over the theta
/// grid; not yet scaled by the safety factor.
double smoothness_raw(const SmoothnessProbe& probe);

Constants calibrate(const ProbeSpec& probe, const std::optional<SmoothnessProbe>& smoothness = std::nullopt);

}  // namespace ski::bounds
