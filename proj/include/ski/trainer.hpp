#pragma once

// Projected gradient ascent on the SKI log-likelihood over a box of
// hyperparameters, with the exact objective recorded alongside.

#include <string>
#include <vector>

#include "ski/gp.hpp"
#include "ski/interp.hpp"
#include "ski/kernels.hpp"

namespace ski::trainer {

struct Iterate {
  kernels::Hyperparams theta;
  double ski_loglik = 0.0;
  double exact_loglik = 0.0;
  double exact_grad_norm = 0.0;
  double score_error = 0.0;  // ||grad L~ - grad L||
  bool clipped = false;  // the step that produced this iterate hit the box
};

struct Trajectory {
  std::vector<Iterate> iterates;
  double step_size = 0.0;
  gp::ThetaBox box;
  bool failed = false;
  std::string error;

  bool clipping_activated() const;
  /// min_k ||grad L(theta_k)||^2 over every recorded iterate but the last
  /// (the K iterates theta_0..theta_{K-1} of a K-step run).
  double min_grad_norm_sq() const;
  /// Running minimum of ||grad L(theta_k)||^2.
  std::vector<double> running_min_grad_norm_sq() const;
};

/// K steps of theta <- clip(theta + eta grad L~(theta)).
Trajectory ascend(const kernels::Dataset& data, const kernels::Hyperparams& theta0, double eta, int K,
                  const interp::GridSpec& grid, const gp::ThetaBox& box);

struct Maximum {
  kernels::Hyperparams theta;
  double log_likelihood = 0.0;
};

/// Grid search of the exact log-likelihood over the box, refined by
/// projected exact-gradient steps of size eta. Returns the best value seen.
Maximum locate_maximum(const kernels::Dataset& data, const gp::ThetaBox& box, double noise_variance, double eta,
                       int grid_points = 33, int refine_steps = 20);

enum class FreeParams { Both, SignalVarianceOnly };

struct ContractionCheck {
  double lhs = 0.0;
  double rhs = 0.0;
  bool holds = false;
  double strong_concavity = 0.0;
};

/// One exact-gradient step from theta0 compared with the contraction
/// (1 - mu eta) ||theta0 - theta*|| where mu is the smallest curvature of
/// -L on the segment [theta0, theta*]. Throws NumericalError
/// ("diagnostic unavailable") when theta_star is not stationary.
ContractionCheck one_step_contraction_check(const kernels::Dataset& data, const kernels::Hyperparams& theta_star,
                                            const kernels::Hyperparams& theta0, double eta,
                                            FreeParams free = FreeParams::Both, double stationarity_tol = 1e-4);

}  // namespace ski::trainer
