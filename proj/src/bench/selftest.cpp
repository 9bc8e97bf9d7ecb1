#include <cmath>
#include <functional>
#include <numbers>
#include <ostream>
#include <string>
#include <vector>

#include "ski/bench/data.hpp"
#include "ski/bench/run.hpp"
#include "ski/bounds.hpp"
#include "ski/error.hpp"
#include "ski/gp.hpp"
#include "ski/interp.hpp"
#include "ski/kernels.hpp"
#include "ski/linalg.hpp"
#include "ski/ski.hpp"

namespace ski::bench {

namespace {

struct Case {
  std::string name;
  std::function<bool()> body;
};

bool near(double a, double b, double tol) { return std::abs(a - b) <= tol * std::max(1.0, std::abs(b)); }

std::vector<Case> cases() {
  using kernels::Hyperparams;
  std::vector<Case> out;
  out.push_back({"cubic kernel values", [] {
                   return interp::cubic_kernel(0.0) == 1.0 && interp::cubic_kernel(1.0) == 0.0 &&
                          interp::cubic_kernel(2.0) == 0.0 && near(interp::cubic_kernel(0.5), 0.5625, 1e-15) &&
                          near(interp::cubic_kernel(1.5), -0.0625, 1e-15);
                 }});
  out.push_back({"weight-sum constant c = 1.25", [] { return near(interp::empirical_c(), 1.25, 1e-12); }});
  out.push_back({"stencil weights sum to one", [] {
                   const auto grid = interp::GridSpec::regular(2, 8, 1.0);
                   const std::vector<double> x{0.123, -0.77};
                   return near(interp::weights_nd(x, grid).sum(), 1.0, 1e-14);
                 }});
  out.push_back({"interpolation reproduces cubics", [] {
                   const auto grid = interp::GridSpec::regular(1, 16, 1.0);
                   const auto nodes = grid.nodes();
                   std::vector<double> v(nodes.rows());
                   for (Eigen::Index i = 0; i < nodes.rows(); ++i) v[i] = std::pow(nodes(i, 0), 2) - 0.3 * nodes(i, 0);
                   const double x = 0.3137;
                   return near(interp::interpolate(v, std::span<const double>(&x, 1), grid), x * x - 0.3 * x, 1e-13);
                 }});
  out.push_back({"rbf at zero distance is the signal variance", [] {
                   const Hyperparams hp{2.5, 0.7, 0.1};
                   const double x = 0.4;
                   return kernels::rbf(std::span<const double>(&x, 1), std::span<const double>(&x, 1), hp) == 2.5;
                 }});
  out.push_back({"spectral norm of a diagonal matrix", [] {
                   const Eigen::Vector3d d(1.0, -4.0, 2.0);
                   return near(linalg::spectral_norm(d.asDiagonal().toDenseMatrix()), 4.0, 1e-9);
                 }});
  out.push_back({"cholesky log-determinant", [] {
                   Eigen::Matrix2d A;
                   A << 4.0, 1.0, 1.0, 3.0;
                   return near(linalg::CholeskyFactor::compute(linalg::SymmetricMatrix(A)).log_det(), std::log(11.0),
                               1e-14);
                 }});
  out.push_back({"FFT lattice MVM equals dense", [] {
                   const auto grid = interp::GridSpec::regular(2, 6, 1.0);
                   kernels::Dataset data{Eigen::MatrixXd::Zero(1, 2), Eigen::VectorXd::Zero(1), 1.0};
                   const auto model = SkiModel::build(data, grid, Hyperparams{1.0, 0.5, 0.1});
                   const auto& op = model.inducing_operator();
                   Eigen::VectorXd v = Eigen::VectorXd::LinSpaced(op.order(), -1.0, 2.0);
                   return (op.apply(v) - op.to_dense() * v).norm() <= 1e-12 * (op.to_dense() * v).norm();
                 }});
  out.push_back({"lattice data: SKI Gram is exact", [] {
                   const auto grid = interp::GridSpec::regular(1, 8, 1.0);
                   const Hyperparams hp{1.0, 0.5, 0.1};
                   const auto data = lattice_dataset(grid, 9, hp, 5);
                   const auto model = SkiModel::build(data, grid, hp);
                   return (ski_gram(model) - kernels::gram(data.X, hp)).cwiseAbs().maxCoeff() < 1e-12;
                 }});
  out.push_back({"n = 1, y = 0 log-likelihood", [] {
                   const Hyperparams hp{1.5, 0.5, 0.2};
                   kernels::Dataset data{Eigen::MatrixXd::Constant(1, 1, 0.3), Eigen::VectorXd::Zero(1), 1.0};
                   const double expect = -0.5 * std::log(1.7) - 0.5 * std::log(2.0 * std::numbers::pi);
                   return near(gp::log_likelihood(data, hp, gp::Mode::exact()), expect, 1e-14);
                 }});
  out.push_back({"n = 1 posterior mean closed form", [] {
                   const Hyperparams hp{1.5, 0.5, 0.2};
                   kernels::Dataset data{Eigen::MatrixXd::Constant(1, 1, 0.3), Eigen::VectorXd::Constant(1, 0.8), 1.0};
                   kernels::Dataset test{Eigen::MatrixXd::Constant(1, 1, -0.1), Eigen::VectorXd::Zero(1), 1.0};
                   const double k = 1.5 * std::exp(-0.16 / (2 * 0.25));
                   return near(gp::posterior(data, test, hp, gp::Mode::exact()).mean[0], k * 0.8 / 1.7, 1e-13);
                 }});
  out.push_back({"delta arithmetic example", [] {
                   bounds::Constants k;
                   k.k_prime = 1.0;
                   k.c = 1.25;
                   return near(bounds::delta_interp(64, 1, 1.0, k), 1.5625 * std::pow(2.0 / 64.0, 3), 1e-14);
                 }});
  out.push_back({"gamma multiplier 3.5 in d = 1", [] {
                   bounds::Constants k;
                   k.k_prime = 1.0;
                   return near(bounds::gamma(10, 64, 1, 1.0, k), 35.0 * bounds::delta_interp(64, 1, 1.0, k), 1e-14);
                 }});
  out.push_back({"score bound with y = 0", [] {
                   bounds::Constants k;
                   k.k_prime = 0.2;
                   k.k_prime_partial = {0.3, 0.4};
                   k.C_grad = 1.0;
                   k.M = 1.0;
                   const double g = bounds::gamma(32, 256, 1, 1.0, k);
                   return near(bounds::score_error_bound(32, 256, 1, 1.0, k, 0.0, 0.1), g / (2 * 0.01), 1e-14);
                 }});
  out.push_back({"ascent certificate floor", [] {
                   return near(bounds::ascent_certificate(2.0, 1.0, 0.0, 1 << 30, 0.5), 0.0625, 1e-8);
                 }});
  out.push_back({"fit_rate exact cubic", [] {
                   std::vector<std::pair<double, double>> pts;
                   for (double x : {1.0, 2.0, 3.0, 5.0}) pts.emplace_back(x, x * x * x);
                   return near(fit_rate(pts).slope, 3.0, 1e-10);
                 }});
  out.push_back({"fit_rate needs three points", [] {
                   try {
                     fit_rate({{1.0, 1.0}, {2.0, 2.0}});
                   } catch (const InsufficientData&) {
                     return true;
                   }
                   return false;
                 }});
  out.push_back({"generate is deterministic", [] {
                   const Hyperparams hp{1.0, 0.5, 0.1};
                   const auto a = generate(2, 20, 5, 1.0, hp, 9);
                   const auto b = generate(2, 20, 5, 1.0, hp, 9);
                   return a.train.X == b.train.X && a.train.y == b.train.y && a.test.X == b.test.X;
                 }});
  return out;
}

}  // namespace

int selftest(std::ostream& out) {
  int failed = 0;
  for (const auto& c : cases()) {
    bool ok = false;
    std::string why;
    try {
      ok = c.body();
    } catch (const std::exception& e) {
      why = std::string(" (") + e.what() + ")";
    }
    out << (ok ? "pass  " : "FAIL  ") << c.name << why << '\n';
    failed += !ok;
  }
  out << (failed ? std::to_string(failed) + " failed\n" : "all passed\n");
  return failed ? kAssertionFailure : kPass;
}

}  // namespace ski::bench
