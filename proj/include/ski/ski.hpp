#pragma once

// Structured kernel interpolation: k~(x, x') = w(x)^T K_U w(x') with K_U the
// RBF kernel on a regular lattice and w the cubic convolution weights.

#include <span>
#include <vector>

#include <Eigen/Dense>

#include "ski/interp.hpp"
#include "ski/kernels.hpp"
#include "ski/linalg.hpp"

namespace ski {

/// Which lattice kernel a dense SKI block is built from: the kernel itself
/// or one of its hyperparameter partials (interpolated with the same W).
enum class LatticeTerm { Value, SignalVariance, Lengthscale };

LatticeTerm lattice_term(kernels::Hyper which);

/// Per-axis tables of the RBF factors at lattice offsets. The RBF is a
/// product over axes, so every SKI block entry factors into d small sums.
class LatticeKernel {
 public:
  LatticeKernel() = default;
  LatticeKernel(const interp::GridSpec& grid, const kernels::Hyperparams& hp);

  /// exp(-(delta*h)^2 / (2 l^2)) for delta = 0..count-1 on axis j.
  const std::vector<double>& factor(int axis) const { return factor_.at(static_cast<std::size_t>(axis)); }
  /// Entry of the SKI block between two points given their stencils.
  double entry(std::span<const interp::Stencil1D> a, std::span<const interp::Stencil1D> b,
               LatticeTerm term) const;

 private:
  double signal_variance_ = 1.0;
  double lengthscale_ = 1.0;
  std::vector<std::vector<double>> factor_;
  std::vector<std::vector<double>> factor_sq_;  // factor * (delta*h)^2
};

class SkiModel {
 public:
  /// Largest lattice for which inducing_gram() will materialize K_U.
  static constexpr std::int64_t kDenseInducingLimit = 8192;
  /// Largest point count for which dense SKI blocks are assembled.
  static constexpr int kDenseBlockLimit = 4096;

  static SkiModel build(const kernels::Dataset& data, const interp::GridSpec& grid,
                        const kernels::Hyperparams& hp);

  int n() const { return weights_.rows(); }
  const interp::GridSpec& grid() const { return grid_; }
  const kernels::Hyperparams& hp() const { return hp_; }
  const interp::SparseWeights& train_weights() const { return weights_; }
  const linalg::GridKernelOperator& inducing_operator() const { return operator_; }
  const LatticeKernel& lattice() const { return lattice_; }

  /// Dense K_U (m_total x m_total); throws InvalidArgument above the limit.
  linalg::SymmetricMatrix inducing_gram() const;

 private:
  interp::GridSpec grid_;
  kernels::Hyperparams hp_;
  interp::SparseWeights weights_;
  linalg::GridKernelOperator operator_;
  LatticeKernel lattice_;
};

double ski_kernel(const SkiModel& model, std::span<const double> x, std::span<const double> xp);

/// Dense W_A K W_B^T for any pair of weight matrices; rows in parallel.
Eigen::MatrixXd ski_block(const interp::SparseWeights& A, const interp::SparseWeights& B,
                          const LatticeKernel& lattice, LatticeTerm term);

/// n x n SKI Gram of the training inputs.
Eigen::MatrixXd ski_gram(const SkiModel& model);
/// T x n SKI kernel between test and training inputs.
Eigen::MatrixXd ski_cross(const SkiModel& model, const Eigen::MatrixXd& test);
/// T x T SKI Gram of the test inputs.
Eigen::MatrixXd ski_gram_test(const SkiModel& model, const Eigen::MatrixXd& test);
/// W (dK_U/dtheta) W^T with the training weights.
Eigen::MatrixXd ski_gram_partial(const SkiModel& model, kernels::Hyper which);

/// K~ v = W K_U W^T v through the FFT lattice operator.
Eigen::VectorXd ski_mvm(const SkiModel& model, const Eigen::VectorXd& v);

}  // namespace ski
