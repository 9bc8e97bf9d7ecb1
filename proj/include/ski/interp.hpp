#pragma once

// Keys cubic convolution on regular lattices: the 1-D kernel, per-axis
// stencils, tensor-product weight rows and the weight-sum constant c.

#include <array>
#include <cstdint>
#include <span>
#include <vector>

#include <Eigen/Dense>

namespace ski::interp {

/// Keys' cubic convolution kernel u(s) (a = -1/2). Zero for |s| >= 2.
double cubic_kernel(double s);

/// Regular 1-D lattice: node(i) = lo + i*h for 0 <= i < count. The first
/// and last `pad` nodes are padding outside the interpolation domain.
struct Grid1D {
  double lo = 0.0;
  double h = 1.0;
  int count = 4;
  int pad = 0;

  Grid1D() = default;
  Grid1D(double lo, double h, int count, int pad = 0);

  double node(int i) const { return lo + static_cast<double>(i) * h; }
  double span_lo() const { return node(pad); }
  double span_hi() const { return node(count - 1 - pad); }
};

/// Tensor-product lattice over [-D, D]^d with the same spacing on every
/// axis. `cells` is the number of cells per axis inside [-D, D], so
/// h = 2D / cells and the unpadded node count used by the error
/// formulas is m = cells^d.
class GridSpec {
 public:
  static constexpr int kDefaultPad = 2;

  GridSpec() = default;
  static GridSpec regular(int dim, int cells, double halfwidth, int pad = kDefaultPad);

  int dim() const { return static_cast<int>(axes_.size()); }
  int cells() const { return cells_; }
  int pad() const { return pad_; }
  double spacing() const { return h_; }
  double halfwidth() const { return halfwidth_; }
  const Grid1D& axis(int j) const { return axes_.at(static_cast<std::size_t>(j)); }
  const std::vector<Grid1D>& axes() const { return axes_; }

  /// (2D/h)^d, the count that appears in the bound formulas.
  std::int64_t m_unpadded() const;
  /// Number of lattice nodes including padding; the size of K_U.
  std::int64_t m_total() const;

  /// Row-major flat index (dimension 0 slowest).
  std::int64_t flatten(std::span<const int> multi) const;
  std::vector<int> unflatten(std::int64_t flat) const;

  /// All lattice nodes as an m_total x d matrix in flat-index order.
  Eigen::MatrixXd nodes() const;

  /// True when x lies inside the unpadded span on every axis.
  bool contains(std::span<const double> x) const;

 private:
  std::vector<Grid1D> axes_;
  int cells_ = 0;
  int pad_ = 0;
  double h_ = 0.0;
  double halfwidth_ = 0.0;
};

struct Stencil1D {
  static constexpr std::array<int, 4> kOffsets{-1, 0, 1, 2};
  int base = 0;
  std::array<double, 4> weights{};

  int index(std::size_t k) const { return base + kOffsets[k]; }
};

/// Four-point stencil for x on axis g. `base` is the left node of the cell
/// containing x; a point on a node gets the one-hot stencil.
Stencil1D stencil_1d(double x, const Grid1D& g);

/// One row of the interpolation matrix W: 4^d (flat index, weight) pairs.
struct WeightRow {
  std::vector<std::int64_t> index;
  std::vector<double> weight;

  double sum() const;
  double abs_sum() const;
};

WeightRow weights_nd(std::span<const double> x, const GridSpec& grid);

/// Expands per-axis stencils into the 4^d tensor-product entries, in the
/// same order weights_nd uses.
void expand_stencils(std::span<const Stencil1D> stencils, const GridSpec& grid,
                     std::span<std::int64_t> index, std::span<double> weight);

/// Row-compressed W with exactly 4^d entries per row.
class SparseWeights {
 public:
  SparseWeights() = default;

  /// Builds one row per row of `points`; rows run in parallel.
  static SparseWeights build(const Eigen::MatrixXd& points, const GridSpec& grid);

  int rows() const { return rows_; }
  std::int64_t cols() const { return cols_; }
  int nnz_per_row() const { return nnz_; }

  std::span<const std::int64_t> row_index(int i) const {
    return {index_.data() + static_cast<std::size_t>(i) * nnz_, static_cast<std::size_t>(nnz_)};
  }
  std::span<const double> row_weight(int i) const {
    return {weight_.data() + static_cast<std::size_t>(i) * nnz_, static_cast<std::size_t>(nnz_)};
  }
  /// Per-axis stencils of row i (d of them).
  std::span<const Stencil1D> row_stencils(int i) const {
    return {stencils_.data() + static_cast<std::size_t>(i) * dim_, static_cast<std::size_t>(dim_)};
  }

  /// y = W x  (gather, length rows).
  Eigen::VectorXd apply(const Eigen::VectorXd& x) const;
  /// y = W^T x  (scatter, length cols).
  Eigen::VectorXd apply_transpose(const Eigen::VectorXd& x) const;

  Eigen::MatrixXd to_dense() const;

 private:
  int rows_ = 0;
  std::int64_t cols_ = 0;
  int nnz_ = 0;
  int dim_ = 0;
  std::vector<std::int64_t> index_;
  std::vector<double> weight_;
  std::vector<Stencil1D> stencils_;
};

/// sum_k values[k] * w_k(x); exact (bitwise) at lattice nodes.
double interpolate(std::span<const double> values, std::span<const double> x,
                   const GridSpec& grid);

/// sup over t in [0, 1] of sum_k |u(t - k)|, by a dense sweep.
double empirical_c(int samples = 20001);

}  // namespace ski::interp
