#include <cmath>

#include <gtest/gtest.h>

#include "oracle.hpp"
#include "ski/bounds.hpp"
#include "ski/error.hpp"

using namespace ski;
using namespace ski::bounds;

namespace {

Constants unit_constants() {
  Constants k;
  k.c = 1.25;
  k.k_prime = 1.0;
  k.k_prime_partial = {2.0, 3.0};
  k.C_grad = 1.5;
  k.M = 1.0;
  return k;
}

}  // namespace

TEST(Delta, ArithmeticExample) {
  const auto k = unit_constants();
  // h = 2/16, c^2 = 1.5625
  EXPECT_DOUBLE_EQ(delta_interp(16, 1, 1.0, k), 1.5625 / 512.0);
  // d = 2, m = 64: h = 2/8, c^4 = 2.44140625
  EXPECT_DOUBLE_EQ(delta_interp(64, 2, 1.0, k), 2.44140625 / 64.0);
  EXPECT_THROW(delta_interp(3, 1, 1.0, k), InvalidArgument);
  EXPECT_THROW(delta_interp(15, 2, 1.0, k), InvalidArgument);
  EXPECT_THROW(delta_interp(16, 1, 0.0, k), InvalidArgument);
}

TEST(Gamma, ArithmeticExample) {
  const auto k = unit_constants();
  const double delta = 1.5625 / 512.0;
  EXPECT_DOUBLE_EQ(gamma(100, 16, 1, 1.0, k), 100 * (1 + 2 * 1.25) * delta);
  EXPECT_DOUBLE_EQ(gamma_partial(100, 16, 1, 1.0, k, kernels::Hyper::Lengthscale), 3.0 * 100 * 3.5 * delta);
  EXPECT_THROW(gamma(0, 16, 1, 1.0, k), InvalidArgument);
}

TEST(Gamma, MonotoneAndRates) {
  const auto k = unit_constants();
  for (int d = 1; d <= 3; ++d) {
    std::int64_t prev_m = 0;
    double prev = INFINITY;
    for (int cells = 4; cells <= 32; cells *= 2) {
      std::int64_t m = 1;
      for (int j = 0; j < d; ++j) m *= cells;
      const double g = gamma(64, m, d, 1.0, k);
      EXPECT_LT(g, prev);
      if (prev_m > 0) EXPECT_NEAR(prev / g, 8.0, 1e-12);  // h^3
      prev = g;
      prev_m = m;
    }
    EXPECT_NEAR(gamma(200, 4096, 2, 1.0, k) / gamma(100, 4096, 2, 1.0, k), 2.0, 1e-12);
  }
}

TEST(Gamma, DimensionGrowthAtFixedSpacing) {
  const auto k = unit_constants();
  for (int d = 1; d <= 4; ++d) {
    const std::int64_t m = static_cast<std::int64_t>(std::pow(8, d));
    const std::int64_t m_next = m * 8;
    const double ratio = gamma(50, m_next, d + 1, 1.0, k) / gamma(50, m, d, 1.0, k);
    // Closed form: c^2 (1 + 2c^{d+1}) / (1 + 2c^d), never below c^2.
    const double cd = std::pow(k.c, d);
    EXPECT_NEAR(ratio, k.c * k.c * (1 + 2 * cd * k.c) / (1 + 2 * cd), 1e-12 * ratio);
    EXPECT_GE(ratio, k.c * k.c);
    if (d <= 2) EXPECT_GE(ratio, cd);
    EXPECT_GE(delta_interp(m_next, d + 1, 1.0, k) / delta_interp(m, d, 1.0, k), k.c * k.c - 1e-12);
  }
}

TEST(InducingCount, MeetsTargetAndIsPerfectPower) {
  const auto k = unit_constants();
  for (int d = 1; d <= 3; ++d) {
    for (double eps : {1e-1, 1e-2, 1e-3}) {
      const auto m = inducing_count(256, eps, d, 1.0, k);
      const int cells = cells_for(m, d);
      EXPECT_EQ(static_cast<std::int64_t>(std::llround(std::pow(cells, d))), m);
      EXPECT_GE(cells, 4);
      // The sizing rule in closed form, before rounding up.
      const double cd = std::pow(k.c, d);
      const double target = std::pow(256.0 / eps * (1 + 2 * cd) * k.k_prime * 8 * cd * cd, d / 3.0);
      EXPECT_GE(static_cast<double>(m), target * (1 - 1e-12));
      // gamma at that lattice meets epsilon.
      EXPECT_LE(gamma(256, m, d, 1.0, k), eps * (1 + 1e-9));
    }
  }
}

TEST(InducingCount, DependsOnlyOnRatioAndIsMonotone) {
  const auto k = unit_constants();
  for (int d = 1; d <= 3; ++d) {
    EXPECT_EQ(inducing_count(100, 1e-2, d, 1.0, k), inducing_count(200, 2e-2, d, 1.0, k));
    EXPECT_LE(inducing_count(100, 1e-2, d, 1.0, k), inducing_count(400, 1e-2, d, 1.0, k));
    EXPECT_LE(inducing_count(100, 1e-2, d, 1.0, k), inducing_count(100, 1e-3, d, 1.0, k));
  }
  EXPECT_EQ(inducing_count(1, 1e6, 2, 1.0, k), 16);
  EXPECT_THROW(inducing_count(100, 0.0, 1, 1.0, k), InvalidArgument);
}

TEST(CellsFor, Examples) {
  EXPECT_EQ(cells_for(64, 3), 4);
  EXPECT_EQ(cells_for(65, 3), 5);
  EXPECT_EQ(cells_for(1000000, 2), 1000);
  EXPECT_EQ(cells_for(17, 1), 17);
  EXPECT_THROW(cells_for(0, 1), InvalidArgument);
}

TEST(LinearTimeEpsilon, RegimeBehaviour) {
  const auto k = unit_constants();
  auto series = [&](int d) {
    std::vector<double> out;
    for (std::int64_t n : {1000, 10000, 100000, 1000000}) out.push_back(linear_time_epsilon(n, d, 1.0, k));
    return out;
  };
  for (int d : {1, 2}) {
    const auto s = series(d);
    for (std::size_t i = 1; i < s.size(); ++i) EXPECT_LT(s[i], s[i - 1]) << d;
  }
  const auto s4 = series(4);
  for (std::size_t i = 1; i < s4.size(); ++i) EXPECT_GT(s4[i], s4[i - 1]);
  // d = 3: eps / log n is constant in n.
  const auto s3 = series(3);
  const double r0 = s3[0] / std::log(1000.0), r3 = s3[3] / std::log(1e6);
  EXPECT_NEAR(r0, r3, 1e-12 * r0);
}

TEST(ScoreBound, ClosedFormExample) {
  const auto k = unit_constants();
  const double g = gamma(64, 256, 2, 1.0, k);
  double worst = 0.0;
  for (auto which : kernels::kHypers) {
    const double gp = gamma_partial(64, 256, 2, 1.0, k, which);
    worst = std::max(worst, gp + 1.5 * 64 * g + g * gp);
  }
  const double expect = 3.0 * std::sqrt(2.0) * worst / (2 * 0.01) + g / (2 * 0.01);
  EXPECT_NEAR(score_error_bound(64, 256, 2, 1.0, k, 3.0, 0.1), expect, 1e-12 * expect);
  EXPECT_THROW(score_error_bound(64, 256, 2, 1.0, k, 3.0, 0.0), InvalidArgument);
}

TEST(InferenceBounds, Arithmetic) {
  EXPECT_DOUBLE_EQ(inverse_action_bound(0.5, 0.1), 0.5 / 0.01);
  EXPECT_DOUBLE_EQ(logdet_bound(0.5, 0.1), 5.0);
  const auto k = unit_constants();
  const double gn = gamma(100, 256, 2, 1.0, k), gt = gamma(25, 256, 2, 1.0, k);
  const double c4 = std::pow(1.25, 4);
  EXPECT_NEAR(posterior_mean_bound(100, 25, 256, 2, 1.0, k, 2.0, 0.1),
              (std::max(gt, gn) / 0.1 + 50.0 * c4 * gn / 0.01) * 2.0, 1e-12 * (50.0 * c4 * gn / 0.01) * 2.0);
  const double expect_cov = gt + 50.0 / 0.1 * gn + gn / 0.01 * 2500 * 256 * c4 + 50.0 * 256 * c4 / 0.1 * gn;
  EXPECT_NEAR(posterior_cov_bound(100, 25, 256, 2, 1.0, k, 0.1), expect_cov, 1e-10 * expect_cov);
  EXPECT_DOUBLE_EQ(posterior_cov_decay_exponent(1), 2.0);
  EXPECT_DOUBLE_EQ(posterior_cov_decay_exponent(3), 0.0);
  EXPECT_LT(posterior_cov_decay_exponent(4), 0.0);
}

TEST(AscentCertificate, Limits) {
  EXPECT_DOUBLE_EQ(ascent_certificate(2.0, 5.0, 1.0, 4, 0.0), 4.0);
  EXPECT_DOUBLE_EQ(ascent_certificate(2.0, 5.0, 5.0, 4, 2.0), 1.0);
  double prev = INFINITY;
  for (int K : {1, 10, 100, 1000000}) {
    const double v = ascent_certificate(3.0, 10.0, 0.0, K, 0.5);
    EXPECT_LT(v, prev);
    prev = v;
  }
  EXPECT_NEAR(prev, 0.25 / 6.0, 1e-4);
  EXPECT_THROW(ascent_certificate(0.0, 1.0, 0.0, 1, 0.0), InvalidArgument);
  EXPECT_THROW(ascent_certificate(1.0, 1.0, 0.0, 0, 0.0), InvalidArgument);
}

TEST(BoundReport, Satisfaction) {
  EXPECT_TRUE(BoundReport::make("a", 1.0, 0.5, "x").satisfied);
  EXPECT_TRUE(BoundReport::make("a", 1.0, 1.0, "x").satisfied);
  EXPECT_FALSE(BoundReport::make("a", 1.0, 1.01, "x").satisfied);
  EXPECT_DOUBLE_EQ(BoundReport::make("a", 2.0, 0.5, "x").margin_ratio, 0.25);
}

TEST(Calibration, KPrimeDominatesProbesAndIsStable) {
  ProbeSpec a;
  a.dim = 1;
  a.hyperparams = {kernels::Hyperparams{1.0, 0.5, 0.1}};
  a.cells = {16, 32, 64};
  a.pairs = 2000;
  ProbeSpec b = a;
  b.cells = {24, 48, 96};
  b.seed = a.seed + 17;
  const auto ka = calibrate(a);
  const auto kb = calibrate(b);
  EXPECT_NEAR(ka.c, 1.25, 1e-9);
  EXPECT_GT(ka.k_prime, 0.0);
  EXPECT_NEAR(ka.k_prime / kb.k_prime, 1.0, 0.2);
  for (int l = 0; l < 2; ++l) EXPECT_NEAR(ka.k_prime_partial[l] / kb.k_prime_partial[l], 1.0, 0.2);
  EXPECT_DOUBLE_EQ(ka.k_prime, 1.5 * ka.meta.k_prime_raw);
  EXPECT_EQ(ka.M, 1.0);
  EXPECT_GE(ka.C_grad, 1.0);
  // The calibrated constant bounds the elementwise SKI kernel error on fresh points.
  const auto grid = interp::GridSpec::regular(1, 32, 1.0);
  const double bound = (1 + 2 * 1.25) * delta_interp(32, 1, 1.0, ka);
  for (double x = -1.0; x <= 1.0; x += 0.0173) {
    for (double xp = -1.0; xp <= 1.0; xp += 0.091) {
      const auto wx = interp::weights_nd(std::span<const double>(&x, 1), grid);
      const auto wp = interp::weights_nd(std::span<const double>(&xp, 1), grid);
      double approx = 0.0;
      for (std::size_t i = 0; i < wx.index.size(); ++i)
        for (std::size_t j = 0; j < wp.index.size(); ++j) {
          Eigen::VectorXd u(1), v(1);
          u << grid.axis(0).node(static_cast<int>(wx.index[i]));
          v << grid.axis(0).node(static_cast<int>(wp.index[j]));
          approx += wx.weight[i] * wp.weight[j] * oracle::rbf(u, v, 1.0, 0.5);
        }
      EXPECT_LE(std::abs(approx - std::exp(-(x - xp) * (x - xp) / 0.5)), bound);
    }
  }
}

TEST(Calibration, DegenerateProbesThrow) {
  ProbeSpec p;
  p.pairs = 0;
  EXPECT_THROW(calibrate(p), CalibrationError);
  p.pairs = 10;
  p.cells.clear();
  EXPECT_THROW(calibrate(p), CalibrationError);
  SmoothnessProbe s;
  s.data.X = Eigen::MatrixXd::Zero(3, 1);
  s.data.y = Eigen::VectorXd::Ones(3);
  s.grid_points = 1;
  EXPECT_THROW(smoothness_raw(s), CalibrationError);
}

TEST(Calibration, SmoothnessIsPositive) {
  SmoothnessProbe s;
  s.data.X = oracle::uniform(30, 1, 1.0, 8);
  s.data.y = Eigen::VectorXd::Random(30);
  s.grid_points = 3;
  ProbeSpec p;
  p.pairs = 200;
  p.cells = {16};
  const auto k = calibrate(p, s);
  EXPECT_GT(k.mu, 0.0);
  EXPECT_DOUBLE_EQ(k.mu, 1.1 * k.meta.mu_raw);
  // mu dominates the Hessian at a box corner.
  const Eigen::Matrix2d H = gp::hessian(s.data, kernels::Hyperparams{s.box.lo[0], s.box.lo[1], 0.1}, gp::Mode::exact());
  EXPECT_LE(Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d>(H).eigenvalues().cwiseAbs().maxCoeff(), k.mu);
}
