#include "ski/bounds.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "ski/error.hpp"
#include "ski/interp.hpp"
#include "ski/linalg.hpp"

namespace ski::bounds {

BoundReport BoundReport::make(std::string name, double theoretical, double measured, std::string provenance) {
  BoundReport r;
  r.name = std::move(name);
  r.theoretical = theoretical;
  r.measured = measured;
  r.satisfied = measured <= theoretical * (1.0 + 1e-9);
  r.margin_ratio = theoretical > 0.0 ? measured / theoretical : (measured > 0.0 ? INFINITY : 0.0);
  r.provenance = std::move(provenance);
  return r;
}

namespace {

void require_positive(double v, const char* what) {
  if (!(v > 0.0) || !std::isfinite(v)) throw InvalidArgument(std::string(what) + " must be positive and finite");
}

double c_pow(const Constants& k, int d) { return std::pow(k.c, d); }

double gamma_from_delta(std::int64_t n, int d, double delta, const Constants& consts) {
  if (n < 1) throw InvalidArgument("gamma: n must be at least 1");
  return static_cast<double>(n) * (1.0 + std::sqrt(static_cast<double>(consts.L)) * c_pow(consts, d)) * delta;
}

}  // namespace

double delta_interp(std::int64_t m_unpadded, int d, double D, double k_prime, double c) {
  if (d < 1) throw InvalidArgument("delta_interp: d must be positive");
  require_positive(D, "delta_interp: D");
  const double min_m = std::pow(4.0, d);
  if (static_cast<double>(m_unpadded) < min_m) {
    throw InvalidArgument("delta_interp: m = " + std::to_string(m_unpadded) + " is below 4^d");
  }
  const double h = 2.0 * D / std::pow(static_cast<double>(m_unpadded), 1.0 / d);
  return k_prime * std::pow(c, 2 * d) * h * h * h;
}

double delta_interp(std::int64_t m_unpadded, int d, double D, const Constants& consts) {
  return delta_interp(m_unpadded, d, D, consts.k_prime, consts.c);
}

double gamma(std::int64_t n, std::int64_t m_unpadded, int d, double D, const Constants& consts) {
  return gamma_from_delta(n, d, delta_interp(m_unpadded, d, D, consts), consts);
}

double gamma_partial(std::int64_t n, std::int64_t m_unpadded, int d, double D, const Constants& consts,
                     kernels::Hyper which) {
  return gamma_from_delta(n, d, delta_interp(m_unpadded, d, D, consts.k_prime_for(which), consts.c), consts);
}

int cells_for(std::int64_t m_unpadded, int d) {
  if (d < 1 || m_unpadded < 1) throw InvalidArgument("cells_for: need d >= 1 and m >= 1");
  auto power = [d](std::int64_t b) {
    std::int64_t p = 1;
    for (int i = 0; i < d; ++i) p *= b;
    return p;
  };
  auto cells = static_cast<std::int64_t>(std::llround(std::pow(static_cast<double>(m_unpadded), 1.0 / d)));
  cells = std::max<std::int64_t>(cells, 1);
  while (power(cells) < m_unpadded) ++cells;
  while (cells > 1 && power(cells - 1) >= m_unpadded) --cells;
  return static_cast<int>(cells);
}

std::int64_t inducing_count(std::int64_t n, double epsilon, int d, double D, const Constants& consts) {
  require_positive(epsilon, "inducing_count: epsilon");
  if (n < 1 || d < 1) throw InvalidArgument("inducing_count: need n >= 1 and d >= 1");
  const double cd = c_pow(consts, d);
  const double base = (static_cast<double>(n) / epsilon) * (1.0 + 2.0 * cd) * consts.k_prime * 8.0 * cd * cd *
                      D * D * D;
  const double raw = std::ceil(std::pow(base, d / 3.0));
  if (!std::isfinite(raw) || raw > 9e15) throw InvalidArgument("inducing_count: lattice size overflows");
  const auto m = std::max<std::int64_t>(static_cast<std::int64_t>(raw), 1);
  int cells = std::max(cells_for(m, d), 4);
  std::int64_t out = 1;
  for (int i = 0; i < d; ++i) out *= cells;
  return out;
}

double linear_time_epsilon(std::int64_t n, int d, double D, const Constants& consts, double C_regime) {
  if (n < 3) throw InvalidArgument("linear_time_epsilon: n must be at least 3");
  require_positive(C_regime, "linear_time_epsilon: C_regime");
  const double cd = c_pow(consts, d);
  const double lead = (1.0 + 2.0 * cd) * consts.k_prime * 8.0 * cd * cd * D * D * D / std::pow(C_regime, 3.0 / d);
  const double nn = static_cast<double>(n);
  return lead * nn * std::pow(std::log(nn), 3.0 / d) / std::pow(nn, 3.0 / d);
}

double score_error_bound(std::int64_t n, std::int64_t m_unpadded, int d, double D, const Constants& consts,
                         double y_norm, double sigma2) {
  require_positive(sigma2, "score_error_bound: sigma2");
  if (y_norm < 0.0) throw InvalidArgument("score_error_bound: y_norm must be nonnegative");
  const double g = gamma(n, m_unpadded, d, D, consts);
  const double s4 = sigma2 * sigma2;
  double worst = 0.0;
  for (auto which : kernels::kHypers) {
    const double gp = gamma_partial(n, m_unpadded, d, D, consts, which);
    worst = std::max(worst, gp + consts.C_grad * static_cast<double>(n) * g + g * gp);
  }
  const double p = kernels::kNumHypers;
  return y_norm * std::sqrt(p) * worst / (2.0 * s4) + g / (2.0 * s4);
}

double inverse_action_bound(double gamma_val, double sigma2) {
  require_positive(sigma2, "inverse_action_bound: sigma2");
  return gamma_val / (sigma2 * sigma2);
}

double logdet_bound(double gamma_val, double sigma2) {
  require_positive(sigma2, "logdet_bound: sigma2");
  return gamma_val / sigma2;
}

double posterior_mean_bound(std::int64_t n, std::int64_t T, std::int64_t m_unpadded, int d, double D,
                            const Constants& consts, double y_norm, double sigma2) {
  require_positive(sigma2, "posterior_mean_bound: sigma2");
  const double gn = gamma(n, m_unpadded, d, D, consts);
  const double gt = gamma(T, m_unpadded, d, D, consts);
  const double root = std::sqrt(static_cast<double>(T) * static_cast<double>(n));
  const double c2d = std::pow(consts.c, 2 * d);
  return (std::max(gt, gn) / sigma2 + root * consts.M * c2d * gn / (sigma2 * sigma2)) * y_norm;
}

double posterior_cov_bound(std::int64_t n, std::int64_t T, std::int64_t m_unpadded, int d, double D,
                           const Constants& consts, double sigma2) {
  require_positive(sigma2, "posterior_cov_bound: sigma2");
  const double gn = gamma(n, m_unpadded, d, D, consts);
  const double gt = gamma(T, m_unpadded, d, D, consts);
  const double worst = std::max(gt, gn);
  const double tn = static_cast<double>(T) * static_cast<double>(n);
  const double root = std::sqrt(tn);
  const double m = static_cast<double>(m_unpadded);
  const double c2d = std::pow(consts.c, 2 * d);
  const double M = consts.M;
  return gt + root * M / sigma2 * worst + gn / (sigma2 * sigma2) * tn * m * c2d * M * M +
         root * m * c2d * M / sigma2 * worst;
}

double posterior_cov_decay_exponent(int d) {
  if (d < 1) throw InvalidArgument("posterior_cov_decay_exponent: d must be positive");
  return 3.0 / d - 1.0;
}

double ascent_certificate(double mu, double L_star, double L_theta0, int K, double eps_g) {
  require_positive(mu, "ascent_certificate: mu");
  if (K < 1) throw InvalidArgument("ascent_certificate: K must be at least 1");
  return 2.0 * mu * (L_star - L_theta0) / K + eps_g * eps_g / (2.0 * mu);
}

double fit_k_prime_raw(const ProbeSpec& probe, std::optional<kernels::Hyper> derivative, double c) {
  const int d = probe.dim;
  if (d < 1 || probe.cells.empty() || probe.hyperparams.empty() || probe.pairs < 1) {
    throw CalibrationError("calibrate: empty probe");
  }
  const double D = probe.halfwidth;
  const double c2d = std::pow(c, 2 * d);
  double best = 0.0;
  for (const auto& hp : probe.hyperparams) {
    hp.validate();
    auto f = [&](std::span<const double> a, std::span<const double> b) {
      return derivative ? kernels::rbf_partial(a, b, hp, *derivative) : kernels::rbf(a, b, hp);
    };
    for (int cells : probe.cells) {
      const auto grid = interp::GridSpec::regular(d, cells, D);
      const double h = grid.spacing();
      std::mt19937_64 rng(probe.seed ^ (static_cast<std::uint64_t>(cells) * 0x9e3779b97f4a7c15ULL));
      std::uniform_real_distribution<double> unif(-D, D);
      std::vector<double> x(d), xp(d), node(d);
      for (int p = 0; p < probe.pairs; ++p) {
        for (int j = 0; j < d; ++j) x[j] = unif(rng);
        for (int j = 0; j < d; ++j) xp[j] = unif(rng);
        const auto row = interp::weights_nd(x, grid);
        double approx = 0.0;
        for (std::size_t k = 0; k < row.index.size(); ++k) {
          const auto multi = grid.unflatten(row.index[k]);
          for (int j = 0; j < d; ++j) node[j] = grid.axis(j).node(multi[j]);
          approx += row.weight[k] * f(node, xp);
        }
        const double err = std::abs(approx - f(x, xp));
        best = std::max(best, err / (c2d * h * h * h));
      }
    }
  }
  if (!(best > 0.0) || !std::isfinite(best)) {
    throw CalibrationError("calibrate: probe produced no usable interpolation error");
  }
  return best;
}

double smoothness_raw(const SmoothnessProbe& probe) {
  probe.box.validate();
  if (probe.grid_points < 2) throw CalibrationError("calibrate: smoothness grid needs at least 2 points");
  double best = 0.0;
  const int g = probe.grid_points;
  for (int a = 0; a < g; ++a) {
    for (int b = 0; b < g; ++b) {
      const double t0 = probe.box.lo[0] + (probe.box.hi[0] - probe.box.lo[0]) * a / (g - 1);
      const double t1 = probe.box.lo[1] + (probe.box.hi[1] - probe.box.lo[1]) * b / (g - 1);
      const kernels::Hyperparams hp{t0, t1, probe.noise_variance};
      const Eigen::Matrix2d H = gp::hessian(probe.data, hp, gp::Mode::exact());
      best = std::max(best, Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d>(H).eigenvalues().cwiseAbs().maxCoeff());
    }
  }
  if (!(best > 0.0) || !std::isfinite(best)) throw CalibrationError("calibrate: degenerate smoothness probe");
  return best;
}

Constants calibrate(const ProbeSpec& probe, const std::optional<SmoothnessProbe>& smoothness) {
  Constants k;
  k.c = interp::empirical_c();
  k.meta.k_prime_safety = probe.safety;
  k.meta.probe_seed = probe.seed;
  k.meta.probe_pairs = probe.pairs;
  k.meta.probe_cells = probe.cells;
  k.meta.k_prime_source = "max interpolation error / (c^2d h^3) over random probe pairs";

  k.meta.k_prime_raw = fit_k_prime_raw(probe, std::nullopt, k.c);
  k.k_prime = probe.safety * k.meta.k_prime_raw;
  for (auto which : kernels::kHypers) {
    const int l = static_cast<int>(which);
    k.meta.k_prime_partial_raw[l] = fit_k_prime_raw(probe, which, k.c);
    k.k_prime_partial[l] = probe.safety * k.meta.k_prime_partial_raw[l];
  }
  for (const auto& hp : probe.hyperparams) {
    const auto kc = kernels::kernel_constants(hp, probe.halfwidth, probe.dim);
    k.M = std::max(k.M, kc.M);
    k.C_grad = std::max(k.C_grad, kc.C);
  }
  if (smoothness) {
    k.meta.mu_safety = smoothness->safety;
    k.meta.mu_raw = smoothness_raw(*smoothness);
    k.mu = smoothness->safety * k.meta.mu_raw;
    k.meta.mu_source = "max Hessian spectral norm over a " + std::to_string(smoothness->grid_points) + "x" +
                       std::to_string(smoothness->grid_points) + " theta grid";
  }
  return k;
}

}  // namespace ski::bounds
