#pragma once

// Zero-mean GP regression with the RBF kernel, either exact or with the
// SKI approximation K~ = W K_U W^T substituted in every kernel block.

#include <optional>
#include <string>

#include <Eigen/Dense>

#include "ski/interp.hpp"
#include "ski/kernels.hpp"
#include "ski/linalg.hpp"

namespace ski::gp {

class Mode {
 public:
  static Mode exact() { return Mode(); }
  static Mode ski(const interp::GridSpec& grid) {
    Mode m;
    m.grid_ = grid;
    return m;
  }

  bool is_ski() const { return grid_.has_value(); }
  const interp::GridSpec& grid() const;
  std::string name() const { return is_ski() ? "ski" : "exact"; }

 private:
  std::optional<interp::GridSpec> grid_;
};

/// Compact box over theta = (signal_variance, lengthscale).
struct ThetaBox {
  Eigen::Vector2d lo{0.25, 0.2};
  Eigen::Vector2d hi{4.0, 2.0};

  void validate() const;
  bool contains(const Eigen::Vector2d& theta) const;
  Eigen::Vector2d clip(const Eigen::Vector2d& theta) const;
};

using Score = Eigen::Vector2d;

struct Posterior {
  Eigen::VectorXd mean;
  linalg::SymmetricMatrix covariance;
};

struct Evaluation {
  double log_likelihood = 0.0;
  Score score = Score::Zero();
};

/// K (exact) or K~ (ski) on the training inputs, without noise.
Eigen::MatrixXd train_gram(const kernels::Dataset& data, const kernels::Hyperparams& hp, const Mode& mode);
Eigen::MatrixXd train_gram_partial(const kernels::Dataset& data, const kernels::Hyperparams& hp,
                                   const Mode& mode, kernels::Hyper which);

double log_likelihood(const kernels::Dataset& data, const kernels::Hyperparams& hp, const Mode& mode);
Score score(const kernels::Dataset& data, const kernels::Hyperparams& hp, const Mode& mode);
/// Both from one factorization.
Evaluation evaluate(const kernels::Dataset& data, const kernels::Hyperparams& hp, const Mode& mode);

/// Hessian of the log-likelihood in theta by central differences of the
/// score, step rel_step * |theta_i|.
Eigen::Matrix2d hessian(const kernels::Dataset& data, const kernels::Hyperparams& hp, const Mode& mode,
                        double rel_step = 1e-4);

/// Noisy predictive distribution at the test inputs (covariance includes
/// sigma^2 I in both modes).
Posterior posterior(const kernels::Dataset& data, const kernels::Dataset& test, const kernels::Hyperparams& hp,
                    const Mode& mode);

struct Deviation {
  double mean_l2 = 0.0;
  double cov_spectral = 0.0;
};

Deviation posterior_deviation(const Posterior& exact, const Posterior& ski);

}  // namespace ski::gp
