#pragma once

// Serial reference implementations of the parallel kernels. They take the
// direct route (dense products, full 4^d x 4^d stencil loops) and exist to
// check and benchmark the fast paths.

#include <Eigen/Dense>

#include "ski/interp.hpp"
#include "ski/kernels.hpp"
#include "ski/linalg.hpp"
#include "ski/ski.hpp"

namespace ski::reference {

Eigen::MatrixXd gram(const Eigen::MatrixXd& A, const Eigen::MatrixXd& B, const kernels::Hyperparams& hp);

/// W_A K_U W_B^T from dense matrices.
Eigen::MatrixXd ski_block_dense(const interp::SparseWeights& A, const interp::SparseWeights& B,
                                const Eigen::MatrixXd& inducing_gram);

/// sum_{a,b} w_A(i,a) w_B(j,b) K_U(a,b) over all 4^d x 4^d stencil pairs.
Eigen::MatrixXd ski_block_sparse(const interp::SparseWeights& A, const interp::SparseWeights& B,
                                 const linalg::GridKernelOperator& op);

Eigen::VectorXd grid_mvm_dense(const linalg::GridKernelOperator& op, const Eigen::VectorXd& v);

/// Dense K~ v with K~ assembled by ski_block_sparse.
Eigen::VectorXd ski_mvm_dense(const SkiModel& model, const Eigen::VectorXd& v);

}  // namespace ski::reference
