#include "ski/reference.hpp"

#include "ski/error.hpp"

namespace ski::reference {

Eigen::MatrixXd gram(const Eigen::MatrixXd& A, const Eigen::MatrixXd& B, const kernels::Hyperparams& hp) {
  if (A.cols() != B.cols()) throw ShapeError("reference::gram: dimension mismatch");
  Eigen::MatrixXd K(A.rows(), B.rows());
  for (Eigen::Index i = 0; i < A.rows(); ++i) {
    for (Eigen::Index j = 0; j < B.rows(); ++j) {
      const Eigen::VectorXd a = A.row(i).transpose();
      const Eigen::VectorXd b = B.row(j).transpose();
      K(i, j) = kernels::rbf({a.data(), static_cast<std::size_t>(a.size())},
                             {b.data(), static_cast<std::size_t>(b.size())}, hp);
    }
  }
  return K;
}

Eigen::MatrixXd ski_block_dense(const interp::SparseWeights& A, const interp::SparseWeights& B,
                                const Eigen::MatrixXd& inducing_gram) {
  if (inducing_gram.rows() != A.cols() || inducing_gram.cols() != B.cols()) {
    throw ShapeError("reference::ski_block_dense: K_U does not match the weight columns");
  }
  return A.to_dense() * inducing_gram * B.to_dense().transpose();
}

Eigen::MatrixXd ski_block_sparse(const interp::SparseWeights& A, const interp::SparseWeights& B,
                                 const linalg::GridKernelOperator& op) {
  if (op.order() != A.cols() || op.order() != B.cols()) {
    throw ShapeError("reference::ski_block_sparse: operator does not match the weight columns");
  }
  Eigen::MatrixXd out(A.rows(), B.rows());
  for (int i = 0; i < A.rows(); ++i) {
    const auto ia = A.row_index(i);
    const auto wa = A.row_weight(i);
    for (int j = 0; j < B.rows(); ++j) {
      const auto ib = B.row_index(j);
      const auto wb = B.row_weight(j);
      double acc = 0.0;
      for (std::size_t p = 0; p < ia.size(); ++p) {
        for (std::size_t q = 0; q < ib.size(); ++q) acc += wa[p] * wb[q] * op.entry(ia[p], ib[q]);
      }
      out(i, j) = acc;
    }
  }
  return out;
}

Eigen::VectorXd grid_mvm_dense(const linalg::GridKernelOperator& op, const Eigen::VectorXd& v) {
  if (v.size() != op.order()) throw ShapeError("reference::grid_mvm_dense: length mismatch");
  Eigen::VectorXd out = Eigen::VectorXd::Zero(op.order());
  for (Eigen::Index a = 0; a < op.order(); ++a) {
    double acc = 0.0;
    for (Eigen::Index b = 0; b < op.order(); ++b) acc += op.entry(a, b) * v[b];
    out[a] = acc;
  }
  return out;
}

Eigen::VectorXd ski_mvm_dense(const SkiModel& model, const Eigen::VectorXd& v) {
  if (v.size() != model.n()) throw ShapeError("reference::ski_mvm_dense: length mismatch");
  const auto& W = model.train_weights();
  return ski_block_sparse(W, W, model.inducing_operator()) * v;
}

}  // namespace ski::reference
