#include "ski/interp.hpp"

#include <cmath>
#include <limits>
#include <sstream>

#include "ski/detail/parallel.hpp"
#include "ski/error.hpp"

namespace ski::interp {

double cubic_kernel(double s) {
  if (!std::isfinite(s)) {
    throw InvalidArgument("cubic_kernel: non-finite argument");
  }
  const double a = std::abs(s);
  if (a == 0.0) return 1.0;
  if (a < 1.0) return (1.5 * a - 2.5) * a * a + 1.0;
  if (a > 1.0 && a < 2.0) return ((-0.5 * a + 2.5) * a - 4.0) * a + 2.0;
  return 0.0;
}

Grid1D::Grid1D(double lo_, double h_, int count_, int pad_) : lo(lo_), h(h_), count(count_), pad(pad_) {
  if (!std::isfinite(lo) || !(h > 0.0) || !std::isfinite(h)) {
    throw InvalidArgument("Grid1D: spacing must be positive and finite");
  }
  if (count < 4) throw InvalidArgument("Grid1D: at least 4 nodes are required");
  if (pad < 0 || 2 * pad >= count) throw InvalidArgument("Grid1D: invalid padding");
}

GridSpec GridSpec::regular(int dim, int cells, double halfwidth, int pad) {
  if (dim < 1) throw InvalidArgument("GridSpec: dimension must be >= 1");
  if (cells < 1) throw InvalidArgument("GridSpec: need at least one cell per axis");
  if (!(halfwidth > 0.0) || !std::isfinite(halfwidth)) {
    throw InvalidArgument("GridSpec: domain half-width must be positive");
  }
  if (pad < 0) throw InvalidArgument("GridSpec: padding must be nonnegative");
  GridSpec g;
  g.cells_ = cells;
  g.pad_ = pad;
  g.halfwidth_ = halfwidth;
  g.h_ = 2.0 * halfwidth / cells;
  const int count = cells + 1 + 2 * pad;
  const double lo = -halfwidth - pad * g.h_;
  g.axes_.assign(static_cast<std::size_t>(dim), Grid1D(lo, g.h_, count, pad));
  return g;
}

std::int64_t GridSpec::m_unpadded() const {
  std::int64_t m = 1;
  for (int j = 0; j < dim(); ++j) m *= cells_;
  return m;
}

std::int64_t GridSpec::m_total() const {
  std::int64_t m = 1;
  for (const auto& a : axes_) m *= a.count;
  return m;
}

std::int64_t GridSpec::flatten(std::span<const int> multi) const {
  if (static_cast<int>(multi.size()) != dim()) throw ShapeError("GridSpec::flatten: wrong rank");
  std::int64_t flat = 0;
  for (int j = 0; j < dim(); ++j) flat = flat * axes_[j].count + multi[j];
  return flat;
}

std::vector<int> GridSpec::unflatten(std::int64_t flat) const {
  std::vector<int> multi(static_cast<std::size_t>(dim()));
  for (int j = dim() - 1; j >= 0; --j) {
    multi[j] = static_cast<int>(flat % axes_[j].count);
    flat /= axes_[j].count;
  }
  return multi;
}

Eigen::MatrixXd GridSpec::nodes() const {
  const std::int64_t m = m_total();
  Eigen::MatrixXd out(m, dim());
  for (std::int64_t f = 0; f < m; ++f) {
    const auto multi = unflatten(f);
    for (int j = 0; j < dim(); ++j) out(f, j) = axes_[j].node(multi[j]);
  }
  return out;
}

bool GridSpec::contains(std::span<const double> x) const {
  if (static_cast<int>(x.size()) != dim()) return false;
  for (int j = 0; j < dim(); ++j) {
    if (!(x[j] >= axes_[j].span_lo() && x[j] <= axes_[j].span_hi())) return false;
  }
  return true;
}

Stencil1D stencil_1d(double x, const Grid1D& g) {
  if (!std::isfinite(x)) throw InvalidArgument("stencil_1d: non-finite coordinate");
  if (x < g.span_lo() || x > g.span_hi()) {
    std::ostringstream msg;
    msg << "stencil_1d: x = " << x << " outside [" << g.span_lo() << ", " << g.span_hi() << "]";
    throw OutOfDomain(msg.str());
  }
  const double t = (x - g.lo) / g.h;
  const double nearest = std::round(t);
  Stencil1D s;
  double frac;
  // Points that sit on a node up to rounding take the one-hot stencil.
  if (std::abs(t - nearest) <= 8.0 * std::numeric_limits<double>::epsilon() * std::max(1.0, std::abs(t))) {
    s.base = static_cast<int>(nearest);
    frac = 0.0;
  } else {
    const double fl = std::floor(t);
    s.base = static_cast<int>(fl);
    frac = t - fl;
  }
  if (s.base - 1 < 0 || s.base + 2 > g.count - 1) {
    std::ostringstream msg;
    msg << "stencil_1d: stencil around node " << s.base << " leaves the lattice (pad too small)";
    throw OutOfDomain(msg.str());
  }
  for (std::size_t k = 0; k < 4; ++k) s.weights[k] = cubic_kernel(frac - Stencil1D::kOffsets[k]);
  return s;
}

double WeightRow::sum() const {
  double acc = 0.0;
  for (double w : weight) acc += w;
  return acc;
}

double WeightRow::abs_sum() const {
  double acc = 0.0;
  for (double w : weight) acc += std::abs(w);
  return acc;
}

void expand_stencils(std::span<const Stencil1D> stencils, const GridSpec& grid,
                     std::span<std::int64_t> index, std::span<double> weight) {
  const int d = grid.dim();
  const std::size_t total = std::size_t{1} << (2 * d);
  if (static_cast<int>(stencils.size()) != d || index.size() != total || weight.size() != total) {
    throw ShapeError("expand_stencils: buffer sizes do not match 4^d");
  }
  for (std::size_t e = 0; e < total; ++e) {
    std::int64_t flat = 0;
    double w = 1.0;
    for (int j = 0; j < d; ++j) {
      const std::size_t digit = (e >> (2 * (d - 1 - j))) & 3u;
      flat = flat * grid.axis(j).count + stencils[j].index(digit);
      w *= stencils[j].weights[digit];
    }
    index[e] = flat;
    weight[e] = w;
  }
}

WeightRow weights_nd(std::span<const double> x, const GridSpec& grid) {
  const int d = grid.dim();
  if (static_cast<int>(x.size()) != d) throw ShapeError("weights_nd: point dimension mismatch");
  std::vector<Stencil1D> st(static_cast<std::size_t>(d));
  for (int j = 0; j < d; ++j) {
    try {
      st[j] = stencil_1d(x[j], grid.axis(j));
    } catch (const OutOfDomain& e) {
      throw OutOfDomain("weights_nd: dimension " + std::to_string(j) + ": " + e.what());
    }
  }
  WeightRow row;
  const std::size_t total = std::size_t{1} << (2 * d);
  row.index.resize(total);
  row.weight.resize(total);
  expand_stencils(st, grid, row.index, row.weight);
  return row;
}

SparseWeights SparseWeights::build(const Eigen::MatrixXd& points, const GridSpec& grid) {
  const int d = grid.dim();
  if (points.cols() != d) throw ShapeError("SparseWeights: point dimension does not match grid");
  const int n = static_cast<int>(points.rows());
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < d; ++j) {
      const double v = points(i, j);
      if (!(v >= grid.axis(j).span_lo() && v <= grid.axis(j).span_hi())) {
        std::ostringstream msg;
        msg << "row " << i << ", dimension " << j << ": coordinate " << v << " outside [-"
            << grid.halfwidth() << ", " << grid.halfwidth() << "]";
        throw OutOfDomain(msg.str());
      }
    }
  }
  SparseWeights w;
  w.rows_ = n;
  w.cols_ = grid.m_total();
  w.nnz_ = 1 << (2 * d);
  w.dim_ = d;
  w.index_.resize(static_cast<std::size_t>(n) * w.nnz_);
  w.weight_.resize(static_cast<std::size_t>(n) * w.nnz_);
  w.stencils_.resize(static_cast<std::size_t>(n) * d);
  detail::parallel_for(n, [&](std::int64_t i) {
    auto st = std::span<Stencil1D>(w.stencils_.data() + i * d, static_cast<std::size_t>(d));
    for (int j = 0; j < d; ++j) st[j] = stencil_1d(points(i, j), grid.axis(j));
    expand_stencils(st, grid,
                    std::span<std::int64_t>(w.index_.data() + i * w.nnz_, static_cast<std::size_t>(w.nnz_)),
                    std::span<double>(w.weight_.data() + i * w.nnz_, static_cast<std::size_t>(w.nnz_)));
  });
  return w;
}

Eigen::VectorXd SparseWeights::apply(const Eigen::VectorXd& x) const {
  if (x.size() != cols_) throw ShapeError("SparseWeights::apply: length mismatch");
  Eigen::VectorXd y(rows_);
  detail::parallel_for(rows_, [&](std::int64_t i) {
    const auto idx = row_index(static_cast<int>(i));
    const auto wt = row_weight(static_cast<int>(i));
    double acc = 0.0;
    for (int k = 0; k < nnz_; ++k) acc += wt[k] * x[idx[k]];
    y[i] = acc;
  });
  return y;
}

Eigen::VectorXd SparseWeights::apply_transpose(const Eigen::VectorXd& x) const {
  if (x.size() != rows_) throw ShapeError("SparseWeights::apply_transpose: length mismatch");
  Eigen::VectorXd y = Eigen::VectorXd::Zero(cols_);
  for (int i = 0; i < rows_; ++i) {
    const auto idx = row_index(i);
    const auto wt = row_weight(i);
    for (int k = 0; k < nnz_; ++k) y[idx[k]] += wt[k] * x[i];
  }
  return y;
}

Eigen::MatrixXd SparseWeights::to_dense() const {
  Eigen::MatrixXd out = Eigen::MatrixXd::Zero(rows_, cols_);
  for (int i = 0; i < rows_; ++i) {
    const auto idx = row_index(i);
    const auto wt = row_weight(i);
    for (int k = 0; k < nnz_; ++k) out(i, idx[k]) += wt[k];
  }
  return out;
}

double interpolate(std::span<const double> values, std::span<const double> x, const GridSpec& grid) {
  if (static_cast<std::int64_t>(values.size()) != grid.m_total()) {
    throw ShapeError("interpolate: expected " + std::to_string(grid.m_total()) + " grid values, got " +
                     std::to_string(values.size()));
  }
  const WeightRow row = weights_nd(x, grid);
  double acc = 0.0;
  for (std::size_t k = 0; k < row.index.size(); ++k) {
    if (row.weight[k] != 0.0) acc += row.weight[k] * values[static_cast<std::size_t>(row.index[k])];
  }
  return acc;
}

double empirical_c(int samples) {
  if (samples < 2) throw InvalidArgument("empirical_c: need at least two samples");
  double best = 0.0;
  for (int i = 0; i < samples; ++i) {
    const double t = static_cast<double>(i) / (samples - 1);
    double acc = 0.0;
    for (int k : Stencil1D::kOffsets) acc += std::abs(cubic_kernel(t - k));
    best = std::max(best, acc);
  }
  return best;
}

}  // namespace ski::interp
