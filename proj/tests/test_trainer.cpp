#include <cmath>

#include <gtest/gtest.h>

#include "oracle.hpp"
#include "ski/error.hpp"
#include "ski/trainer.hpp"

using namespace ski;
using namespace ski::trainer;

namespace {

kernels::Dataset make_data(int n, unsigned seed) {
  kernels::Dataset data;
  data.X = oracle::uniform(n, 1, 1.0, seed);
  data.y = (3.0 * data.X.col(0)).array().sin().matrix() + 0.3 * Eigen::VectorXd::Random(n);
  return data;
}

// Newton iterations on sigma_f^2 with the lengthscale held fixed.
kernels::Hyperparams stationary_signal_variance(const kernels::Dataset& data, kernels::Hyperparams hp) {
  for (int it = 0; it < 50; ++it) {
    const double g = gp::score(data, hp, gp::Mode::exact())[0];
    if (std::abs(g) < 1e-10) break;
    const double H = gp::hessian(data, hp, gp::Mode::exact())(0, 0);
    hp.signal_variance = std::max(1e-3, hp.signal_variance - g / H);
  }
  return hp;
}

}  // namespace

TEST(Ascend, ZeroStepKeepsTheta) {
  const auto data = make_data(30, 1);
  const auto grid = interp::GridSpec::regular(1, 16, 1.0);
  const kernels::Hyperparams hp{1.0, 0.5, 0.1};
  const auto traj = ascend(data, hp, 0.0, 5, grid, gp::ThetaBox{});
  ASSERT_FALSE(traj.failed);
  ASSERT_EQ(traj.iterates.size(), 6u);
  for (const auto& it : traj.iterates) EXPECT_EQ(it.theta.theta(), hp.theta());
  EXPECT_FALSE(traj.clipping_activated());
}

TEST(Ascend, ProjectionKeepsIteratesInBox) {
  const auto data = make_data(30, 2);
  const auto grid = interp::GridSpec::regular(1, 16, 1.0);
  const gp::ThetaBox box;
  const auto traj = ascend(data, {1.0, 0.5, 0.1}, 10.0, 10, grid, box);
  ASSERT_FALSE(traj.failed) << traj.error;
  for (const auto& it : traj.iterates) EXPECT_TRUE(box.contains(it.theta.theta()));
  EXPECT_TRUE(traj.clipping_activated());
  EXPECT_EQ(traj.iterates.front().clipped, false);
}

TEST(Ascend, Deterministic) {
  const auto data = make_data(40, 3);
  const auto grid = interp::GridSpec::regular(1, 16, 1.0);
  const auto a = ascend(data, {2.0, 1.0, 0.1}, 1e-3, 8, grid, gp::ThetaBox{});
  const auto b = ascend(data, {2.0, 1.0, 0.1}, 1e-3, 8, grid, gp::ThetaBox{});
  ASSERT_EQ(a.iterates.size(), b.iterates.size());
  for (std::size_t k = 0; k < a.iterates.size(); ++k) {
    EXPECT_EQ(a.iterates[k].theta.theta(), b.iterates[k].theta.theta());
    EXPECT_EQ(a.iterates[k].ski_loglik, b.iterates[k].ski_loglik);
  }
}

TEST(Ascend, InputValidation) {
  const auto data = make_data(10, 4);
  const auto grid = interp::GridSpec::regular(1, 8, 1.0);
  EXPECT_THROW(ascend(data, {1.0, 0.5, 0.1}, -1.0, 3, grid, gp::ThetaBox{}), InvalidArgument);
  EXPECT_THROW(ascend(data, {10.0, 0.5, 0.1}, 0.1, 3, grid, gp::ThetaBox{}), InvalidArgument);
  EXPECT_THROW(ascend(data, {1.0, 0.5, 0.1}, 0.1, -1, grid, gp::ThetaBox{}), InvalidArgument);
}

TEST(Ascend, MonotoneOnLatticeData) {
  // On lattice nodes SKI is exact, so small ascent steps cannot decrease L.
  const auto grid = interp::GridSpec::regular(1, 32, 1.0);
  kernels::Dataset data;
  data.X.resize(33, 1);
  for (int i = 0; i <= 32; ++i) data.X(i, 0) = grid.axis(0).node(i + 2);
  data.y = (2.5 * data.X.col(0)).array().cos().matrix() + 0.1 * Eigen::VectorXd::Random(33);
  const auto traj = ascend(data, {2.0, 1.2, 0.1}, 2e-3, 30, grid, gp::ThetaBox{});
  ASSERT_FALSE(traj.failed) << traj.error;
  for (std::size_t k = 1; k < traj.iterates.size(); ++k) {
    EXPECT_GE(traj.iterates[k].exact_loglik, traj.iterates[k - 1].exact_loglik - 1e-9);
    EXPECT_LT(traj.iterates[k].score_error, 1e-8);
  }
  const auto run = traj.running_min_grad_norm_sq();
  for (std::size_t k = 1; k < run.size(); ++k) EXPECT_LE(run[k], run[k - 1]);
  EXPECT_GE(traj.min_grad_norm_sq(), run.back());
}

TEST(LocateMaximum, BeatsGridStart) {
  const auto data = make_data(30, 6);
  const gp::ThetaBox box;
  const auto best = locate_maximum(data, box, 0.1, 1e-3, 9, 5);
  EXPECT_TRUE(box.contains(best.theta.theta()));
  for (double a : {0.25, 1.0, 4.0})
    for (double b : {0.2, 1.0, 2.0})
      EXPECT_GE(best.log_likelihood, gp::log_likelihood(data, {a, b, 0.1}, gp::Mode::exact()) - 1e-12);
}

TEST(Contraction, HoldsNearStationaryPoint) {
  const auto data = make_data(30, 7);
  const auto star = stationary_signal_variance(data, {1.0, 0.5, 0.1});
  ASSERT_LT(std::abs(gp::score(data, star, gp::Mode::exact())[0]), 1e-6);
  const double H = -gp::hessian(data, star, gp::Mode::exact())(0, 0);
  ASSERT_GT(H, 0.0);
  auto start = star;
  start.signal_variance *= 1.1;
  const auto check = one_step_contraction_check(data, star, start, 0.5 / H, FreeParams::SignalVarianceOnly);
  EXPECT_TRUE(check.holds) << check.lhs << " vs " << check.rhs;
  EXPECT_GT(check.strong_concavity, 0.0);
  EXPECT_LT(check.lhs, std::abs(start.signal_variance - star.signal_variance));
  // theta0 == theta* is a fixed point.
  const auto fixed = one_step_contraction_check(data, star, star, 0.5 / H, FreeParams::SignalVarianceOnly);
  EXPECT_NEAR(fixed.lhs, 0.0, 1e-6);
}

TEST(Contraction, UnavailableAwayFromStationarity) {
  const auto data = make_data(30, 8);
  const kernels::Hyperparams hp{3.0, 0.5, 0.1};
  EXPECT_THROW(one_step_contraction_check(data, hp, hp, 0.01), NumericalError);
  auto other = hp;
  other.lengthscale = 0.7;
  EXPECT_THROW(one_step_contraction_check(data, hp, other, 0.01, FreeParams::SignalVarianceOnly), InvalidArgument);
}
