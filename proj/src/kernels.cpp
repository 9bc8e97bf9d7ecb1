#include "ski/kernels.hpp"

#include <cmath>
#include <string>

#include "ski/detail/parallel.hpp"
#include "ski/error.hpp"

namespace ski::kernels {

void Hyperparams::validate() const {
  if (!(signal_variance > 0.0) || !std::isfinite(signal_variance)) {
    throw InvalidArgument("Hyperparams: signal variance must be positive and finite");
  }
  if (!(lengthscale > 0.0) || !std::isfinite(lengthscale)) {
    throw InvalidArgument("Hyperparams: lengthscale must be positive and finite");
  }
  // Zero noise is allowed for noiseless sampling; the solvers fall back on jitter.
  if (!(noise_variance >= 0.0) || !std::isfinite(noise_variance)) {
    throw InvalidArgument("Hyperparams: noise variance must be nonnegative and finite");
  }
}

Hyper parse_hyper(std::string_view name) {
  if (name == "signal_variance" || name == "signal_variance_sq") return Hyper::SignalVariance;
  if (name == "lengthscale") return Hyper::Lengthscale;
  throw InvalidArgument("unknown hyperparameter selector '" + std::string(name) + "'");
}

std::string_view hyper_name(Hyper which) {
  switch (which) {
    case Hyper::SignalVariance:
      return "signal_variance";
    case Hyper::Lengthscale:
      return "lengthscale";
  }
  throw InvalidArgument("unknown hyperparameter selector");
}

void Dataset::validate() const {
  if (X.rows() < 1) throw InvalidArgument("Dataset: need at least one point");
  if (y.size() != X.rows()) throw ShapeError("Dataset: X and y lengths differ");
  if (!(halfwidth > 0.0)) throw InvalidArgument("Dataset: half-width must be positive");
  for (Eigen::Index i = 0; i < X.rows(); ++i) {
    for (Eigen::Index j = 0; j < X.cols(); ++j) {
      if (!(std::abs(X(i, j)) <= halfwidth)) {
        throw OutOfDomain("Dataset: row " + std::to_string(i) + " leaves [-D, D]^d");
      }
    }
  }
}

namespace {

double squared_distance(std::span<const double> x, std::span<const double> xp) {
  if (x.size() != xp.size()) throw ShapeError("rbf: dimension mismatch");
  double r2 = 0.0;
  for (std::size_t j = 0; j < x.size(); ++j) {
    const double diff = x[j] - xp[j];
    r2 += diff * diff;
  }
  return r2;
}

double row_r2(const Eigen::MatrixXd& A, Eigen::Index i, const Eigen::MatrixXd& B, Eigen::Index j) {
  double r2 = 0.0;
  for (Eigen::Index k = 0; k < A.cols(); ++k) {
    const double diff = A(i, k) - B(j, k);
    r2 += diff * diff;
  }
  return r2;
}

template <class Entry>
Eigen::MatrixXd assemble(const Eigen::MatrixXd& A, const Eigen::MatrixXd& B, Entry entry) {
  if (A.cols() != B.cols()) throw ShapeError("gram: input dimensions differ");
  Eigen::MatrixXd K(A.rows(), B.rows());
  detail::parallel_for(A.rows(), [&](std::int64_t i) {
    for (Eigen::Index j = 0; j < B.rows(); ++j) K(i, j) = entry(row_r2(A, i, B, j));
  });
  return K;
}

template <class Entry>
Eigen::MatrixXd assemble_symmetric(const Eigen::MatrixXd& X, Entry entry) {
  const Eigen::Index n = X.rows();
  Eigen::MatrixXd K(n, n);
  detail::parallel_for(n, [&](std::int64_t i) {
    for (Eigen::Index j = 0; j <= i; ++j) K(i, j) = entry(row_r2(X, i, X, j));
  }, true);
  K.triangularView<Eigen::StrictlyUpper>() = K.transpose();
  return K;
}

}  // namespace

double rbf_r2(double r2, const Hyperparams& hp) {
  return hp.signal_variance * std::exp(-0.5 * r2 / (hp.lengthscale * hp.lengthscale));
}

double rbf_partial_r2(double r2, const Hyperparams& hp, Hyper which) {
  const double l2 = hp.lengthscale * hp.lengthscale;
  const double e = std::exp(-0.5 * r2 / l2);
  switch (which) {
    case Hyper::SignalVariance:
      return e;
    case Hyper::Lengthscale:
      return hp.signal_variance * e * r2 / (l2 * hp.lengthscale);
  }
  throw InvalidArgument("rbf_partial: unknown hyperparameter selector");
}

double rbf(std::span<const double> x, std::span<const double> xp, const Hyperparams& hp) {
  return rbf_r2(squared_distance(x, xp), hp);
}

double rbf_partial(std::span<const double> x, std::span<const double> xp, const Hyperparams& hp,
                   Hyper which) {
  return rbf_partial_r2(squared_distance(x, xp), hp, which);
}

Eigen::MatrixXd gram(const Eigen::MatrixXd& A, const Eigen::MatrixXd& B, const Hyperparams& hp) {
  hp.validate();
  return assemble(A, B, [&](double r2) { return rbf_r2(r2, hp); });
}

Eigen::MatrixXd gram(const Eigen::MatrixXd& X, const Hyperparams& hp) {
  hp.validate();
  return assemble_symmetric(X, [&](double r2) { return rbf_r2(r2, hp); });
}

Eigen::MatrixXd gram_partial(const Eigen::MatrixXd& X, const Hyperparams& hp, Hyper which) {
  hp.validate();
  (void)hyper_name(which);
  return assemble_symmetric(X, [&](double r2) { return rbf_partial_r2(r2, hp, which); });
}

Eigen::MatrixXd gram_partial(const Eigen::MatrixXd& A, const Eigen::MatrixXd& B, const Hyperparams& hp,
                             Hyper which) {
  hp.validate();
  (void)hyper_name(which);
  return assemble(A, B, [&](double r2) { return rbf_partial_r2(r2, hp, which); });
}

KernelConstants kernel_constants(const Hyperparams& hp, double halfwidth, int dim) {
  hp.validate();
  KernelConstants out;
  out.M = hp.signal_variance;
  // dk/dsigma_f^2 peaks at r = 0 with value 1.
  const double c_signal = 1.0;
  // dk/dl = sigma_f^2 e^{-s/2} s / l with s = r^2/l^2, maximal at s = 2.
  const double s_max = 4.0 * halfwidth * halfwidth * dim / (hp.lengthscale * hp.lengthscale);
  const double s = std::min(2.0, s_max);
  const double c_length = hp.signal_variance * std::exp(-0.5 * s) * s / hp.lengthscale;
  out.C = std::max(c_signal, c_length);
  return out;
}

}  // namespace ski::kernels
