#include "ski/ski.hpp"

#include <array>
#include <cmath>
#include <cstdlib>

#include "ski/detail/parallel.hpp"
#include "ski/error.hpp"

namespace ski {

LatticeTerm lattice_term(kernels::Hyper which) {
  switch (which) {
    case kernels::Hyper::SignalVariance:
      return LatticeTerm::SignalVariance;
    case kernels::Hyper::Lengthscale:
      return LatticeTerm::Lengthscale;
  }
  throw InvalidArgument("lattice_term: unknown hyperparameter selector");
}

LatticeKernel::LatticeKernel(const interp::GridSpec& grid, const kernels::Hyperparams& hp)
    : signal_variance_(hp.signal_variance), lengthscale_(hp.lengthscale) {
  hp.validate();
  const double inv_two_l2 = 0.5 / (hp.lengthscale * hp.lengthscale);
  for (const auto& axis : grid.axes()) {
    std::vector<double> f(static_cast<std::size_t>(axis.count));
    std::vector<double> fsq(f.size());
    for (int k = 0; k < axis.count; ++k) {
      const double dist = k * axis.h;
      const double r2 = dist * dist;
      f[k] = std::exp(-r2 * inv_two_l2);
      fsq[k] = f[k] * r2;
    }
    factor_.push_back(std::move(f));
    factor_sq_.push_back(std::move(fsq));
  }
}

namespace {

// sum_{k,l} a_k b_l table[|ia_k - ib_l|]
inline double axis_sum(const interp::Stencil1D& a, const interp::Stencil1D& b, const std::vector<double>& table) {
  double acc = 0.0;
  for (std::size_t k = 0; k < 4; ++k) {
    const double wa = a.weights[k];
    if (wa == 0.0) continue;
    const int ia = a.index(k);
    double inner = 0.0;
    for (std::size_t l = 0; l < 4; ++l) {
      const double wb = b.weights[l];
      if (wb == 0.0) continue;
      inner += wb * table[static_cast<std::size_t>(std::abs(ia - b.index(l)))];
    }
    acc += wa * inner;
  }
  return acc;
}

}  // namespace

double LatticeKernel::entry(std::span<const interp::Stencil1D> a, std::span<const interp::Stencil1D> b,
                            LatticeTerm term) const {
  const std::size_t d = factor_.size();
  if (a.size() != d || b.size() != d) throw ShapeError("LatticeKernel: stencil rank mismatch");
  if (term == LatticeTerm::Lengthscale) {
    // d/dl of sigma_f^2 prod_j f_j = sigma_f^2 / l^3 * sum_j (delta_j h)^2 f_j prod_{i != j} f_i
    std::array<double, 16> plain{};
    std::array<double, 16> weighted{};
    if (d > plain.size()) throw InvalidArgument("LatticeKernel: dimension too large");
    for (std::size_t j = 0; j < d; ++j) {
      plain[j] = axis_sum(a[j], b[j], factor_[j]);
      weighted[j] = axis_sum(a[j], b[j], factor_sq_[j]);
    }
    double total = 0.0;
    for (std::size_t j = 0; j < d; ++j) {
      double term_j = weighted[j];
      for (std::size_t i = 0; i < d; ++i) {
        if (i != j) term_j *= plain[i];
      }
      total += term_j;
    }
    return signal_variance_ * total / (lengthscale_ * lengthscale_ * lengthscale_);
  }
  double prod = 1.0;
  for (std::size_t j = 0; j < d; ++j) prod *= axis_sum(a[j], b[j], factor_[j]);
  return term == LatticeTerm::Value ? signal_variance_ * prod : prod;
}

SkiModel SkiModel::build(const kernels::Dataset& data, const interp::GridSpec& grid,
                         const kernels::Hyperparams& hp) {
  hp.validate();
  if (data.d() != grid.dim()) throw ShapeError("SkiModel: data and grid dimensions differ");
  if (data.n() < 1) throw InvalidArgument("SkiModel: need at least one training point");
  SkiModel m;
  m.grid_ = grid;
  m.hp_ = hp;
  m.weights_ = interp::SparseWeights::build(data.X, grid);
  m.lattice_ = LatticeKernel(grid, hp);
  std::vector<Eigen::VectorXd> columns;
  for (int j = 0; j < grid.dim(); ++j) {
    const auto& f = m.lattice_.factor(j);
    columns.emplace_back(Eigen::Map<const Eigen::VectorXd>(f.data(), static_cast<Eigen::Index>(f.size())));
  }
  m.operator_ = linalg::GridKernelOperator(std::move(columns), hp.signal_variance);
  return m;
}

linalg::SymmetricMatrix SkiModel::inducing_gram() const {
  if (grid_.m_total() > kDenseInducingLimit) {
    throw InvalidArgument("inducing_gram: lattice of " + std::to_string(grid_.m_total()) +
                          " nodes is too large to materialize");
  }
  return linalg::SymmetricMatrix(operator_.to_dense());
}

Eigen::MatrixXd ski_block(const interp::SparseWeights& A, const interp::SparseWeights& B,
                          const LatticeKernel& lattice, LatticeTerm term) {
  if (A.rows() > SkiModel::kDenseBlockLimit || B.rows() > SkiModel::kDenseBlockLimit) {
    throw InvalidArgument("ski_block: dense blocks are limited to " + std::to_string(SkiModel::kDenseBlockLimit) +
                          " points; use ski_mvm");
  }
  Eigen::MatrixXd out(A.rows(), B.rows());
  detail::parallel_for(A.rows(), [&](std::int64_t i) {
    const auto sa = A.row_stencils(static_cast<int>(i));
    for (int j = 0; j < B.rows(); ++j) out(i, j) = lattice.entry(sa, B.row_stencils(j), term);
  });
  return out;
}

namespace {

Eigen::MatrixXd symmetric_block(const interp::SparseWeights& W, const LatticeKernel& lattice, LatticeTerm term) {
  const int n = W.rows();
  if (n > SkiModel::kDenseBlockLimit) {
    throw InvalidArgument("ski_gram: dense blocks are limited to " + std::to_string(SkiModel::kDenseBlockLimit) +
                          " points; use ski_mvm");
  }
  Eigen::MatrixXd out(n, n);
  detail::parallel_for(n, [&](std::int64_t i) {
    const auto si = W.row_stencils(static_cast<int>(i));
    for (int j = 0; j <= i; ++j) out(i, j) = lattice.entry(si, W.row_stencils(j), term);
  }, true);
  out.triangularView<Eigen::StrictlyUpper>() = out.transpose();
  return out;
}

}  // namespace

double ski_kernel(const SkiModel& model, std::span<const double> x, std::span<const double> xp) {
  const auto& grid = model.grid();
  if (static_cast<int>(x.size()) != grid.dim() || static_cast<int>(xp.size()) != grid.dim()) {
    throw ShapeError("ski_kernel: point dimension mismatch");
  }
  std::vector<interp::Stencil1D> a(x.size()), b(xp.size());
  for (int j = 0; j < grid.dim(); ++j) {
    a[j] = interp::stencil_1d(x[j], grid.axis(j));
    b[j] = interp::stencil_1d(xp[j], grid.axis(j));
  }
  return model.lattice().entry(a, b, LatticeTerm::Value);
}

Eigen::MatrixXd ski_gram(const SkiModel& model) {
  return symmetric_block(model.train_weights(), model.lattice(), LatticeTerm::Value);
}

Eigen::MatrixXd ski_cross(const SkiModel& model, const Eigen::MatrixXd& test) {
  const auto Wt = interp::SparseWeights::build(test, model.grid());
  return ski_block(Wt, model.train_weights(), model.lattice(), LatticeTerm::Value);
}

Eigen::MatrixXd ski_gram_test(const SkiModel& model, const Eigen::MatrixXd& test) {
  const auto Wt = interp::SparseWeights::build(test, model.grid());
  return symmetric_block(Wt, model.lattice(), LatticeTerm::Value);
}

Eigen::MatrixXd ski_gram_partial(const SkiModel& model, kernels::Hyper which) {
  return symmetric_block(model.train_weights(), model.lattice(), lattice_term(which));
}

Eigen::VectorXd ski_mvm(const SkiModel& model, const Eigen::VectorXd& v) {
  if (v.size() != model.n()) throw ShapeError("ski_mvm: expected length " + std::to_string(model.n()));
  const auto& W = model.train_weights();
  return W.apply(model.inducing_operator().apply(W.apply_transpose(v)));
}

}  // namespace ski
