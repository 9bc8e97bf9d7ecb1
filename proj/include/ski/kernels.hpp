#pragma once

#include <array>
#include <span>
#include <string_view>

#include <Eigen/Dense>

namespace ski::kernels {

/// RBF hyperparameters. Optimization works in (signal_variance,
/// lengthscale); the noise variance is held fixed.
struct Hyperparams {
  double signal_variance = 1.0;  // sigma_f^2
  double lengthscale = 1.0;
  double noise_variance = 0.1;  // sigma^2

  void validate() const;
  Eigen::Vector2d theta() const { return {signal_variance, lengthscale}; }
  Hyperparams with_theta(const Eigen::Vector2d& t) const { return {t[0], t[1], noise_variance}; }
};

/// Selects a kernel hyperparameter for partial derivatives.
enum class Hyper : int { SignalVariance = 0, Lengthscale = 1 };
inline constexpr std::array<Hyper, 2> kHypers{Hyper::SignalVariance, Hyper::Lengthscale};
inline constexpr int kNumHypers = 2;

Hyper parse_hyper(std::string_view name);
std::string_view hyper_name(Hyper which);

/// Inputs X (n x d), targets y and the half-width D of the box [-D, D]^d
/// that contains every input.
struct Dataset {
  Eigen::MatrixXd X;
  Eigen::VectorXd y;
  double halfwidth = 1.0;

  int n() const { return static_cast<int>(X.rows()); }
  int d() const { return static_cast<int>(X.cols()); }
  void validate() const;
};

double rbf(std::span<const double> x, std::span<const double> xp, const Hyperparams& hp);
double rbf_partial(std::span<const double> x, std::span<const double> xp, const Hyperparams& hp,
                   Hyper which);

/// Same quantities as functions of the squared distance.
double rbf_r2(double r2, const Hyperparams& hp);
double rbf_partial_r2(double r2, const Hyperparams& hp, Hyper which);

/// K(i, j) = k(a_i, b_j), a_rows x b_rows. Rows are assembled in parallel.
Eigen::MatrixXd gram(const Eigen::MatrixXd& A, const Eigen::MatrixXd& B, const Hyperparams& hp);
/// Symmetric n x n Gram of X with itself.
Eigen::MatrixXd gram(const Eigen::MatrixXd& X, const Hyperparams& hp);
/// dK/dtheta_which on X.
Eigen::MatrixXd gram_partial(const Eigen::MatrixXd& X, const Hyperparams& hp, Hyper which);
Eigen::MatrixXd gram_partial(const Eigen::MatrixXd& A, const Eigen::MatrixXd& B, const Hyperparams& hp,
                             Hyper which);

/// Uniform bound M on |k| and C on |dk/dtheta_l| over the domain [-D, D]^d.
struct KernelConstants {
  double M = 0.0;
  double C = 0.0;
};

KernelConstants kernel_constants(const Hyperparams& hp, double halfwidth, int dim);

}  // namespace ski::kernels
