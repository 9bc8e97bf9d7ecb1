#include "ski/trainer.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "ski/error.hpp"

namespace ski::trainer {

bool Trajectory::clipping_activated() const {
  return std::any_of(iterates.begin(), iterates.end(), [](const Iterate& it) { return it.clipped; });
}

double Trajectory::min_grad_norm_sq() const {
  if (iterates.empty()) throw InvalidArgument("Trajectory: no iterates");
  const std::size_t count = iterates.size() > 1 ? iterates.size() - 1 : 1;
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < count; ++k) best = std::min(best, iterates[k].exact_grad_norm * iterates[k].exact_grad_norm);
  return best;
}

std::vector<double> Trajectory::running_min_grad_norm_sq() const {
  std::vector<double> out;
  double best = std::numeric_limits<double>::infinity();
  for (const auto& it : iterates) {
    best = std::min(best, it.exact_grad_norm * it.exact_grad_norm);
    out.push_back(best);
  }
  return out;
}

Trajectory ascend(const kernels::Dataset& data, const kernels::Hyperparams& theta0, double eta, int K,
                  const interp::GridSpec& grid, const gp::ThetaBox& box) {
  box.validate();
  if (!(eta >= 0.0) || !std::isfinite(eta)) throw InvalidArgument("ascend: step size must be nonnegative");
  if (K < 0) throw InvalidArgument("ascend: K must be nonnegative");
  if (!box.contains(theta0.theta())) throw InvalidArgument("ascend: theta0 lies outside the box");

  Trajectory traj;
  traj.step_size = eta;
  traj.box = box;
  const auto ski_mode = gp::Mode::ski(grid);
  const auto exact_mode = gp::Mode::exact();

  kernels::Hyperparams theta = theta0;
  bool clipped = false;
  try {
    for (int k = 0; k <= K; ++k) {
      const auto approx = gp::evaluate(data, theta, ski_mode);
      const auto exact = gp::evaluate(data, theta, exact_mode);
      traj.iterates.push_back({theta, approx.log_likelihood, exact.log_likelihood, exact.score.norm(),
                               (approx.score - exact.score).norm(), clipped});
      if (k == K) break;
      const Eigen::Vector2d proposal = theta.theta() + eta * approx.score;
      const Eigen::Vector2d next = box.clip(proposal);
      clipped = (next.array() != proposal.array()).any();
      theta = theta.with_theta(next);
    }
  } catch (const Error& e) {
    traj.failed = true;
    traj.error = e.what();
  }
  return traj;
}

Maximum locate_maximum(const kernels::Dataset& data, const gp::ThetaBox& box, double noise_variance, double eta,
                       int grid_points, int refine_steps) {
  box.validate();
  if (grid_points < 2) throw InvalidArgument("locate_maximum: need at least 2 grid points per axis");
  const auto exact = gp::Mode::exact();
  Maximum best;
  best.log_likelihood = -std::numeric_limits<double>::infinity();
  for (int a = 0; a < grid_points; ++a) {
    for (int b = 0; b < grid_points; ++b) {
      const kernels::Hyperparams hp{box.lo[0] + (box.hi[0] - box.lo[0]) * a / (grid_points - 1),
                                    box.lo[1] + (box.hi[1] - box.lo[1]) * b / (grid_points - 1), noise_variance};
      const double v = gp::log_likelihood(data, hp, exact);
      if (v > best.log_likelihood) best = {hp, v};
    }
  }
  kernels::Hyperparams theta = best.theta;
  for (int s = 0; s < refine_steps; ++s) {
    const auto ev = gp::evaluate(data, theta, exact);
    if (ev.log_likelihood > best.log_likelihood) best = {theta, ev.log_likelihood};
    theta = theta.with_theta(box.clip(theta.theta() + eta * ev.score));
  }
  const double last = gp::log_likelihood(data, theta, exact);
  if (last > best.log_likelihood) best = {theta, last};
  return best;
}

namespace {

Eigen::Vector2d masked(Eigen::Vector2d g, FreeParams free) {
  if (free == FreeParams::SignalVarianceOnly) g[1] = 0.0;
  return g;
}

// Smallest eigenvalue of -H restricted to the free coordinates.
double curvature(const kernels::Dataset& data, const kernels::Hyperparams& hp, FreeParams free) {
  const Eigen::Matrix2d H = gp::hessian(data, hp, gp::Mode::exact());
  if (free == FreeParams::SignalVarianceOnly) return -H(0, 0);
  return Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d>(-H).eigenvalues().minCoeff();
}

}  // namespace

ContractionCheck one_step_contraction_check(const kernels::Dataset& data, const kernels::Hyperparams& theta_star,
                                            const kernels::Hyperparams& theta0, double eta, FreeParams free,
                                            double stationarity_tol) {
  if (!(eta >= 0.0)) throw InvalidArgument("one_step_contraction_check: step size must be nonnegative");
  if (free == FreeParams::SignalVarianceOnly && theta0.lengthscale != theta_star.lengthscale) {
    throw InvalidArgument("one_step_contraction_check: fixed lengthscale differs between theta0 and theta*");
  }
  const auto exact = gp::Mode::exact();
  const Eigen::Vector2d g_star = masked(gp::score(data, theta_star, exact), free);
  if (!(g_star.norm() <= stationarity_tol)) {
    throw NumericalError("one_step_contraction_check: diagnostic unavailable, theta* is not stationary (|grad| = " +
                         std::to_string(g_star.norm()) + ")");
  }
  const Eigen::Vector2d t0 = theta0.theta();
  const Eigen::Vector2d ts = theta_star.theta();
  const Eigen::Vector2d t1 = t0 + eta * masked(gp::score(data, theta0, exact), free);

  ContractionCheck out;
  if (t0 == ts) {
    out.strong_concavity = curvature(data, theta_star, free);
  } else {
    double mu = std::numeric_limits<double>::infinity();
    for (double s : {0.0, 0.5, 1.0}) {
      mu = std::min(mu, curvature(data, theta_star.with_theta(ts + s * (t0 - ts)), free));
    }
    out.strong_concavity = mu;
  }
  out.lhs = (t1 - ts).norm();
  out.rhs = (1.0 - out.strong_concavity * eta) * (t0 - ts).norm();
  // theta* is only stationary to within |g_star|, which a step moves by eta |g_star|.
  out.holds = out.lhs <= out.rhs + eta * g_star.norm();
  return out;
}

}  // namespace ski::trainer
