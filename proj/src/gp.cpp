#include "ski/gp.hpp"

#include <array>
#include <cmath>
#include <numbers>

#include "ski/error.hpp"
#include "ski/ski.hpp"

namespace ski::gp {

const interp::GridSpec& Mode::grid() const {
  if (!grid_) throw InvalidArgument("Mode: exact mode has no grid");
  return *grid_;
}

void ThetaBox::validate() const {
  for (int i = 0; i < 2; ++i) {
    if (!(lo[i] > 0.0) || !(hi[i] >= lo[i]) || !std::isfinite(hi[i])) {
      throw InvalidArgument("ThetaBox: need 0 < lo <= hi < inf on every coordinate");
    }
  }
}

bool ThetaBox::contains(const Eigen::Vector2d& theta) const {
  return (theta.array() >= lo.array()).all() && (theta.array() <= hi.array()).all();
}

Eigen::Vector2d ThetaBox::clip(const Eigen::Vector2d& theta) const {
  return theta.cwiseMax(lo).cwiseMin(hi);
}

namespace {

void check_training(const kernels::Dataset& data) {
  if (data.n() < 1) throw InvalidArgument("gp: need at least one training point");
  data.validate();
}

linalg::CholeskyFactor noisy_factor(const Eigen::MatrixXd& K, double noise) {
  Eigen::MatrixXd Ky = K;
  Ky.diagonal().array() += noise;
  return linalg::CholeskyFactor::compute(linalg::SymmetricMatrix(std::move(Ky)));
}

}  // namespace

Eigen::MatrixXd train_gram(const kernels::Dataset& data, const kernels::Hyperparams& hp, const Mode& mode) {
  if (!mode.is_ski()) return kernels::gram(data.X, hp);
  return ski_gram(SkiModel::build(data, mode.grid(), hp));
}

Eigen::MatrixXd train_gram_partial(const kernels::Dataset& data, const kernels::Hyperparams& hp,
                                   const Mode& mode, kernels::Hyper which) {
  if (!mode.is_ski()) return kernels::gram_partial(data.X, hp, which);
  return ski_gram_partial(SkiModel::build(data, mode.grid(), hp), which);
}

double log_likelihood(const kernels::Dataset& data, const kernels::Hyperparams& hp, const Mode& mode) {
  check_training(data);
  hp.validate();
  const auto L = noisy_factor(train_gram(data, hp, mode), hp.noise_variance);
  const Eigen::VectorXd alpha = L.solve(data.y);
  const double n = data.n();
  return -0.5 * data.y.dot(alpha) - 0.5 * L.log_det() - 0.5 * n * std::log(2.0 * std::numbers::pi);
}

Evaluation evaluate(const kernels::Dataset& data, const kernels::Hyperparams& hp, const Mode& mode) {
  check_training(data);
  hp.validate();
  Eigen::MatrixXd K;
  std::array<Eigen::MatrixXd, kernels::kNumHypers> dK;
  if (mode.is_ski()) {
    const auto model = SkiModel::build(data, mode.grid(), hp);
    K = ski_gram(model);
    for (auto which : kernels::kHypers) dK[static_cast<int>(which)] = ski_gram_partial(model, which);
  } else {
    K = kernels::gram(data.X, hp);
    for (auto which : kernels::kHypers) dK[static_cast<int>(which)] = kernels::gram_partial(data.X, hp, which);
  }
  const auto L = noisy_factor(K, hp.noise_variance);
  const Eigen::VectorXd alpha = L.solve(data.y);
  const Eigen::MatrixXd Kinv = L.inverse();

  Evaluation out;
  out.log_likelihood = -0.5 * data.y.dot(alpha) - 0.5 * L.log_det() -
                       0.5 * data.n() * std::log(2.0 * std::numbers::pi);
  for (int l = 0; l < kernels::kNumHypers; ++l) {
    // 1/2 a^T dK a - 1/2 tr(Ky^{-1} dK); both matrices are symmetric.
    out.score[l] = 0.5 * alpha.dot(dK[l] * alpha) - 0.5 * Kinv.cwiseProduct(dK[l]).sum();
  }
  if (!out.score.allFinite() || !std::isfinite(out.log_likelihood)) {
    throw NumericalError("gp: non-finite log-likelihood or score");
  }
  return out;
}

Score score(const kernels::Dataset& data, const kernels::Hyperparams& hp, const Mode& mode) {
  return evaluate(data, hp, mode).score;
}

Eigen::Matrix2d hessian(const kernels::Dataset& data, const kernels::Hyperparams& hp, const Mode& mode,
                        double rel_step) {
  Eigen::Matrix2d H;
  const Eigen::Vector2d theta = hp.theta();
  for (int j = 0; j < 2; ++j) {
    const double step = rel_step * std::abs(theta[j]);
    Eigen::Vector2d up = theta, down = theta;
    up[j] += step;
    down[j] -= step;
    H.col(j) = (score(data, hp.with_theta(up), mode) - score(data, hp.with_theta(down), mode)) / (2.0 * step);
  }
  return 0.5 * (H + H.transpose());
}

Posterior posterior(const kernels::Dataset& data, const kernels::Dataset& test, const kernels::Hyperparams& hp,
                    const Mode& mode) {
  check_training(data);
  hp.validate();
  if (test.d() != data.d()) throw ShapeError("posterior: test and training dimensions differ");
  for (Eigen::Index i = 0; i < test.X.rows(); ++i) {
    for (Eigen::Index j = 0; j < test.X.cols(); ++j) {
      if (std::abs(test.X(i, j)) > data.halfwidth) {
        throw OutOfDomain("posterior: test point " + std::to_string(i) + " outside the domain in dimension " +
                          std::to_string(j));
      }
    }
  }

  Eigen::MatrixXd K, Kxs, Kss;
  if (mode.is_ski()) {
    const auto model = SkiModel::build(data, mode.grid(), hp);
    K = ski_gram(model);
    Kxs = ski_cross(model, test.X).transpose();
    Kss = ski_gram_test(model, test.X);
  } else {
    K = kernels::gram(data.X, hp);
    Kxs = kernels::gram(data.X, test.X, hp);
    Kss = kernels::gram(test.X, hp);
  }
  const auto L = noisy_factor(K, hp.noise_variance);
  const Eigen::VectorXd mean = Kxs.transpose() * L.solve(data.y);
  Eigen::MatrixXd cov = Kss - Kxs.transpose() * L.solve(Kxs);
  cov.diagonal().array() += hp.noise_variance;
  cov = 0.5 * (cov + cov.transpose()).eval();
  return {mean, linalg::SymmetricMatrix(std::move(cov))};
}

Deviation posterior_deviation(const Posterior& exact, const Posterior& ski) {
  if (exact.mean.size() != ski.mean.size() || exact.covariance.order() != ski.covariance.order()) {
    throw ShapeError("posterior_deviation: posteriors have different test counts");
  }
  return {(ski.mean - exact.mean).norm(),
          linalg::spectral_norm(ski.covariance.dense() - exact.covariance.dense())};
}

}  // namespace ski::gp
