#include "ski/linalg.hpp"

#include <cmath>
#include <mutex>
#include <random>
#include <sstream>

#include <fftw3.h>

#include "ski/error.hpp"

namespace ski::linalg {

SymmetricMatrix::SymmetricMatrix(Eigen::MatrixXd a, double tolerance) : a_(std::move(a)) {
  if (a_.rows() != a_.cols()) throw ShapeError("SymmetricMatrix: matrix is not square");
  if (a_.size() == 0) return;
  const double scale = std::max(a_.cwiseAbs().maxCoeff(), 1e-300);
  const double asym = (a_ - a_.transpose()).cwiseAbs().maxCoeff();
  if (asym > tolerance * scale) {
    std::ostringstream msg;
    msg << "SymmetricMatrix: relative asymmetry " << asym / scale << " exceeds " << tolerance;
    throw InvalidArgument(msg.str());
  }
  a_ = (0.5 * (a_ + a_.transpose())).eval();
}

double spectral_norm(const Eigen::MatrixXd& A, double tol, int max_iter, std::uint64_t seed) {
  if (!A.allFinite()) throw InvalidArgument("spectral_norm: non-finite entries");
  if (A.size() == 0 || A.cwiseAbs().maxCoeff() == 0.0) return 0.0;

  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal;
  Eigen::VectorXd v(A.cols());
  for (Eigen::Index i = 0; i < v.size(); ++i) v[i] = normal(rng);
  v.normalize();

  double estimate = 0.0;
  for (int it = 0; it < max_iter; ++it) {
    const Eigen::VectorXd w = A * v;
    const double s = w.norm();
    Eigen::VectorXd z = A.transpose() * w;
    const double zn = z.norm();
    if (zn == 0.0) {
      // Start vector in the null space; restart from a fresh draw.
      for (Eigen::Index i = 0; i < v.size(); ++i) v[i] = normal(rng);
      v.normalize();
      continue;
    }
    v = z / zn;
    if (it > 0 && std::abs(s - estimate) <= tol * s) return s;
    estimate = s;
  }
  throw ConvergenceError("spectral_norm: power iteration did not converge", estimate);
}

namespace {

double smallest_pivot(const Eigen::MatrixXd& a) {
  Eigen::LDLT<Eigen::MatrixXd> ldlt(a);
  return ldlt.vectorD().minCoeff();
}

}  // namespace

CholeskyFactor CholeskyFactor::compute(const SymmetricMatrix& A, double jitter) {
  const Eigen::Index n = A.order();
  if (n == 0) throw ShapeError("cholesky: empty matrix");
  CholeskyFactor f;
  f.jitter_ = jitter;
  Eigen::MatrixXd shifted = A.dense();
  shifted.diagonal().array() += jitter;
  f.llt_.compute(shifted);
  if (f.llt_.info() != Eigen::Success) {
    std::ostringstream msg;
    msg << "cholesky: matrix not positive definite (jitter " << jitter << ", smallest pivot "
        << smallest_pivot(shifted) << ")";
    throw NumericalError(msg.str());
  }
  return f;
}

CholeskyFactor CholeskyFactor::compute(const SymmetricMatrix& A) {
  const Eigen::Index n = A.order();
  if (n == 0) throw ShapeError("cholesky: empty matrix");
  const double base = std::abs(A.dense().trace()) / static_cast<double>(n);
  double last_jitter = 0.0;
  for (double factor : {0.0, 1e-10, 1e-8, 1e-6}) {
    last_jitter = factor * base;
    Eigen::MatrixXd shifted = A.dense();
    shifted.diagonal().array() += last_jitter;
    CholeskyFactor f;
    f.jitter_ = last_jitter;
    f.llt_.compute(shifted);
    if (f.llt_.info() == Eigen::Success) return f;
  }
  Eigen::MatrixXd shifted = A.dense();
  shifted.diagonal().array() += last_jitter;
  std::ostringstream msg;
  msg << "cholesky: not positive definite after jitter ladder (smallest pivot " << smallest_pivot(shifted)
      << ")";
  throw NumericalError(msg.str());
}

Eigen::VectorXd CholeskyFactor::solve(const Eigen::VectorXd& b) const {
  if (b.size() != order()) throw ShapeError("cholesky solve: length mismatch");
  return llt_.solve(b);
}

Eigen::MatrixXd CholeskyFactor::solve(const Eigen::MatrixXd& B) const {
  if (B.rows() != order()) throw ShapeError("cholesky solve: row mismatch");
  return llt_.solve(B);
}

Eigen::MatrixXd CholeskyFactor::inverse() const {
  return llt_.solve(Eigen::MatrixXd::Identity(order(), order()));
}

double CholeskyFactor::log_det() const {
  return 2.0 * llt_.matrixLLT().diagonal().array().log().sum();
}

Eigen::VectorXd CholeskyFactor::multiply_lower(const Eigen::VectorXd& z) const {
  if (z.size() != order()) throw ShapeError("cholesky multiply: length mismatch");
  return llt_.matrixL() * z;
}

Eigen::VectorXd sample_mvn(const CholeskyFactor& factor, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal;
  Eigen::VectorXd z(factor.order());
  for (Eigen::Index i = 0; i < z.size(); ++i) z[i] = normal(rng);
  return factor.multiply_lower(z);
}

// FFTW's planner is not thread-safe; plans are built and destroyed under
// one lock and executed through the new-array interface from any thread.
namespace {
std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}
}  // namespace

struct GridKernelOperator::Plan {
  fftw_plan forward = nullptr;
  fftw_plan backward = nullptr;

  explicit Plan(int n) {
    std::lock_guard<std::mutex> lock(planner_mutex());
    double* real = fftw_alloc_real(static_cast<std::size_t>(n));
    fftw_complex* spec = fftw_alloc_complex(static_cast<std::size_t>(n / 2 + 1));
    forward = fftw_plan_dft_r2c_1d(n, real, spec, FFTW_ESTIMATE);
    backward = fftw_plan_dft_c2r_1d(n, spec, real, FFTW_ESTIMATE);
    fftw_free(real);
    fftw_free(spec);
    if (!forward || !backward) throw NumericalError("GridKernelOperator: FFT planning failed");
  }
  ~Plan() {
    std::lock_guard<std::mutex> lock(planner_mutex());
    if (forward) fftw_destroy_plan(forward);
    if (backward) fftw_destroy_plan(backward);
  }
  Plan(const Plan&) = delete;
  Plan& operator=(const Plan&) = delete;
};

GridKernelOperator::GridKernelOperator(std::vector<Eigen::VectorXd> first_columns, double scale)
    : scale_(scale) {
  if (first_columns.empty()) throw InvalidArgument("GridKernelOperator: need at least one axis");
  order_ = 1;
  for (auto& col : first_columns) {
    if (col.size() < 1) throw InvalidArgument("GridKernelOperator: empty Toeplitz column");
    Axis axis;
    axis.count = static_cast<int>(col.size());
    axis.fft_size = 2 * axis.count;
    axis.column = std::move(col);
    axis.plan = std::make_shared<Plan>(axis.fft_size);

    // Eigenvalues of the circulant embedding [t_0..t_{c-1}, 0, t_{c-1}..t_1].
    const int n = axis.fft_size;
    double* buf = fftw_alloc_real(static_cast<std::size_t>(n));
    fftw_complex* spec = fftw_alloc_complex(static_cast<std::size_t>(n / 2 + 1));
    for (int k = 0; k < n; ++k) buf[k] = 0.0;
    for (int k = 0; k < axis.count; ++k) buf[k] = axis.column[k];
    for (int k = 1; k < axis.count; ++k) buf[n - k] = axis.column[k];
    fftw_execute_dft_r2c(axis.plan->forward, buf, spec);
    axis.eigenvalues.resize(static_cast<std::size_t>(n / 2 + 1));
    for (int k = 0; k <= n / 2; ++k) axis.eigenvalues[k] = spec[k][0];
    fftw_free(buf);
    fftw_free(spec);

    order_ *= axis.count;
    axes_.push_back(std::move(axis));
  }
}

void GridKernelOperator::apply_axis(const Axis& axis, std::int64_t stride, Eigen::VectorXd& data) const {
  const int c = axis.count;
  const int n = axis.fft_size;
  const std::int64_t block = static_cast<std::int64_t>(c) * stride;
  const std::int64_t outer = static_cast<std::int64_t>(data.size()) / block;
  const std::int64_t lines = outer * stride;
  const double inv_n = 1.0 / n;
#pragma omp parallel
  {
    double* buf = fftw_alloc_real(static_cast<std::size_t>(n));
    fftw_complex* spec = fftw_alloc_complex(static_cast<std::size_t>(n / 2 + 1));
#pragma omp for schedule(static)
    for (std::int64_t line = 0; line < lines; ++line) {
      const std::int64_t o = line / stride;
      const std::int64_t s = line % stride;
      double* base = data.data() + o * block + s;
      for (int k = 0; k < c; ++k) buf[k] = base[k * stride];
      for (int k = c; k < n; ++k) buf[k] = 0.0;
      fftw_execute_dft_r2c(axis.plan->forward, buf, spec);
      for (int k = 0; k <= n / 2; ++k) {
        spec[k][0] *= axis.eigenvalues[k];
        spec[k][1] *= axis.eigenvalues[k];
      }
      fftw_execute_dft_c2r(axis.plan->backward, spec, buf);
      for (int k = 0; k < c; ++k) base[k * stride] = buf[k] * inv_n;
    }
    fftw_free(buf);
    fftw_free(spec);
  }
}

Eigen::VectorXd GridKernelOperator::apply(const Eigen::VectorXd& v) const {
  if (v.size() != order_) {
    throw ShapeError("GridKernelOperator::apply: expected length " + std::to_string(order_));
  }
  Eigen::VectorXd out = v;
  std::int64_t stride = order_;
  for (const auto& axis : axes_) {
    stride /= axis.count;
    apply_axis(axis, stride, out);
  }
  out *= scale_;
  return out;
}

double GridKernelOperator::entry(std::int64_t a, std::int64_t b) const {
  double value = scale_;
  for (int j = dim() - 1; j >= 0; --j) {
    const auto& axis = axes_[j];
    const std::int64_t ia = a % axis.count;
    const std::int64_t ib = b % axis.count;
    value *= axis.column[std::abs(ia - ib)];
    a /= axis.count;
    b /= axis.count;
  }
  return value;
}

Eigen::MatrixXd GridKernelOperator::to_dense() const {
  Eigen::MatrixXd out(order_, order_);
  for (Eigen::Index a = 0; a < order_; ++a) {
    for (Eigen::Index b = 0; b < order_; ++b) out(a, b) = entry(a, b);
  }
  return out;
}

}  // namespace ski::linalg
