#pragma once

#include <complex>
#include <cstdint>
#include <memory>
#include <vector>

#include <Eigen/Dense>

namespace ski::linalg {

/// Dense symmetric matrix. Construction rejects inputs whose relative
/// asymmetry exceeds `tolerance` and then symmetrizes exactly.
class SymmetricMatrix {
 public:
  explicit SymmetricMatrix(Eigen::MatrixXd a, double tolerance = 1e-12);

  Eigen::Index order() const { return a_.rows(); }
  const Eigen::MatrixXd& dense() const { return a_; }

 private:
  Eigen::MatrixXd a_;
};

inline constexpr std::uint64_t kPowerIterationSeed = 0x5ca1ab1eULL;

/// Largest singular value by power iteration on A^T A from a seeded start
/// vector. Throws ConvergenceError (carrying the last estimate) when the
/// relative change has not dropped below `tol` after `max_iter` steps.
double spectral_norm(const Eigen::MatrixXd& A, double tol = 1e-10, int max_iter = 10000,
                     std::uint64_t seed = kPowerIterationSeed);

/// L L^T = A + jitter I.
class CholeskyFactor {
 public:
  /// Tries jitter in {0, 1e-10, 1e-8, 1e-6} * trace(A)/n in turn.
  static CholeskyFactor compute(const SymmetricMatrix& A);
  /// Single attempt with the given jitter.
  static CholeskyFactor compute(const SymmetricMatrix& A, double jitter);

  Eigen::Index order() const { return llt_.matrixLLT().rows(); }
  double jitter() const { return jitter_; }
  Eigen::MatrixXd lower() const { return llt_.matrixL(); }

  Eigen::VectorXd solve(const Eigen::VectorXd& b) const;
  Eigen::MatrixXd solve(const Eigen::MatrixXd& B) const;
  Eigen::MatrixXd inverse() const;
  /// 2 * sum log L_ii
  double log_det() const;
  /// L z
  Eigen::VectorXd multiply_lower(const Eigen::VectorXd& z) const;

 private:
  CholeskyFactor() = default;
  Eigen::LLT<Eigen::MatrixXd> llt_;
  double jitter_ = 0.0;
};

/// L z with z ~ N(0, I) drawn from std::mt19937_64(seed).
Eigen::VectorXd sample_mvn(const CholeskyFactor& factor, std::uint64_t seed);

/// Kronecker product of symmetric Toeplitz matrices, scale * T_0 (x) ... (x) T_{d-1},
/// applied through per-axis circulant embedding and real FFTs. This is
/// K_U for a separable stationary kernel on a regular lattice.
class GridKernelOperator {
 public:
  GridKernelOperator() = default;
  GridKernelOperator(std::vector<Eigen::VectorXd> first_columns, double scale);

  Eigen::Index order() const { return order_; }
  int dim() const { return static_cast<int>(axes_.size()); }
  int count(int axis) const { return axes_.at(static_cast<std::size_t>(axis)).count; }
  double scale() const { return scale_; }
  const Eigen::VectorXd& first_column(int axis) const {
    return axes_.at(static_cast<std::size_t>(axis)).column;
  }

  /// K_U v
  Eigen::VectorXd apply(const Eigen::VectorXd& v) const;
  /// Entry (a, b) in flat row-major indexing.
  double entry(std::int64_t a, std::int64_t b) const;
  /// Dense K_U; only sensible for small lattices.
  Eigen::MatrixXd to_dense() const;

 private:
  struct Plan;
  struct Axis {
    int count = 0;
    int fft_size = 0;
    Eigen::VectorXd column;
    std::vector<double> eigenvalues;  // first fft_size/2 + 1 circulant eigenvalues
    std::shared_ptr<Plan> plan;
  };
  void apply_axis(const Axis& axis, std::int64_t stride, Eigen::VectorXd& data) const;

  std::vector<Axis> axes_;
  Eigen::Index order_ = 0;
  double scale_ = 1.0;
};

}  // namespace ski::linalg
