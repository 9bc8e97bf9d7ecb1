#include "ski/bench/data.hpp"

#include <algorithm>
#include <cmath>
#include <optional>
#include <random>
#include <sstream>

#include "ski/error.hpp"
#include "ski/linalg.hpp"

namespace ski::bench {

std::uint64_t derive_seed(std::uint64_t base, std::uint64_t a, std::uint64_t b, std::uint64_t c) {
  // splitmix64 over the coordinates
  auto mix = [](std::uint64_t z) {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  };
  std::uint64_t s = mix(base);
  s = mix(s ^ a);
  s = mix(s ^ b);
  return mix(s ^ c);
}

GeneratedData generate(int d, int n, int T, double D, const kernels::Hyperparams& hp, std::uint64_t seed) {
  if (d < 1 || n < 1 || T < 0 || !(D > 0.0)) throw InvalidArgument("generate: sizes must be positive");
  hp.validate();
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unif(-D, D);
  std::normal_distribution<double> normal;

  constexpr int kMaxRetries = 3;
  for (int attempt = 0; attempt <= kMaxRetries; ++attempt) {
    Eigen::MatrixXd Z(n + T, d);
    for (Eigen::Index i = 0; i < Z.rows(); ++i) {
      for (int j = 0; j < d; ++j) Z(i, j) = unif(rng);
    }
    std::optional<linalg::CholeskyFactor> L;
    try {
      L = linalg::CholeskyFactor::compute(linalg::SymmetricMatrix(kernels::gram(Z, hp)));
    } catch (const NumericalError&) {
      continue;
    }
    const Eigen::VectorXd f = linalg::sample_mvn(*L, rng());
    GeneratedData out;
    out.train.X = Z.topRows(n);
    out.train.y = f.head(n);
    const double noise_sd = std::sqrt(hp.noise_variance);
    for (int i = 0; i < n; ++i) out.train.y[i] += noise_sd * normal(rng);
    out.train.halfwidth = D;
    out.test.X = Z.bottomRows(T);
    out.test.y = f.tail(T);
    out.test.halfwidth = D;
    return out;
  }
  throw NumericalError("generate: joint covariance not factorizable after " + std::to_string(kMaxRetries) +
                       " redraws");
}

kernels::Dataset lattice_dataset(const interp::GridSpec& grid, int n, const kernels::Hyperparams& hp,
                                 std::uint64_t seed) {
  if (n < 1) throw InvalidArgument("lattice_dataset: n must be positive");
  const int d = grid.dim();
  const int per_axis = grid.cells() + 1;
  std::int64_t inside = 1;
  for (int j = 0; j < d; ++j) inside *= per_axis;

  kernels::Dataset data;
  data.halfwidth = grid.halfwidth();
  data.X.resize(n, d);
  for (int i = 0; i < n; ++i) {
    // Spread the picks over the interior nodes.
    std::int64_t flat = (static_cast<std::int64_t>(i) * inside) / n;
    for (int j = d - 1; j >= 0; --j) {
      const int k = static_cast<int>(flat % per_axis);
      flat /= per_axis;
      data.X(i, j) = grid.axis(j).node(grid.pad() + k);
    }
  }
  auto Ky = kernels::gram(data.X, hp);
  Ky.diagonal().array() += hp.noise_variance;
  const auto L = linalg::CholeskyFactor::compute(linalg::SymmetricMatrix(std::move(Ky)));
  data.y = linalg::sample_mvn(L, seed);
  return data;
}

RateFit fit_rate(const std::vector<std::pair<double, double>>& points) {
  RateFit fit;
  for (const auto& [x, y] : points) {
    if (!(x > 0.0)) throw InvalidArgument("fit_rate: x values must be positive");
    if (!(y >= 1e-14)) {
      std::ostringstream note;
      note.precision(17);
      note << "excluded (" << x << ", " << y << "): below 1e-14";
      fit.notes.push_back(note.str());
      continue;
    }
    fit.points.emplace_back(std::log(x), std::log(y));
  }
  const auto k = static_cast<Eigen::Index>(fit.points.size());
  if (k < 3) throw InsufficientData("fit_rate: need at least 3 usable points, have " + std::to_string(k));
  Eigen::MatrixXd A(k, 2);
  Eigen::VectorXd b(k);
  for (Eigen::Index i = 0; i < k; ++i) {
    A(i, 0) = fit.points[i].first;
    A(i, 1) = 1.0;
    b[i] = fit.points[i].second;
  }
  const Eigen::Vector2d coef = A.colPivHouseholderQr().solve(b);
  fit.slope = coef[0];
  fit.intercept = coef[1];
  const double ss_res = (A * coef - b).squaredNorm();
  const double ss_tot = (b.array() - b.mean()).square().sum();
  fit.r_squared = ss_tot > 0.0 ? std::clamp(1.0 - ss_res / ss_tot, 0.0, 1.0) : 1.0;
  return fit;
}

}  // namespace ski::bench
