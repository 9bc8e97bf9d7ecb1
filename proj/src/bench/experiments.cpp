#include "ski/bench/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <set>

#include "ski/bench/data.hpp"
#include "ski/detail/parallel.hpp"
#include "ski/error.hpp"
#include "ski/gp.hpp"
#include "ski/interp.hpp"
#include "ski/kernels.hpp"
#include "ski/linalg.hpp"
#include "ski/ski.hpp"
#include "ski/trainer.hpp"

namespace ski::bench {

namespace {

using bounds::BoundReport;
using Json = nlohmann::json;

bool wants(const SweepConfig& cfg, const std::string& name) { return cfg.experiments.count(name) > 0; }

std::int64_t ipow(std::int64_t b, int e) {
  std::int64_t p = 1;
  for (int i = 0; i < e; ++i) p *= b;
  return p;
}

std::string cell_label(int d, std::int64_t n, std::int64_t cells, std::uint64_t seed) {
  return "[d=" + std::to_string(d) + ",n=" + std::to_string(n) + ",cells=" + std::to_string(cells) +
         ",seed=" + std::to_string(seed) + "]";
}

std::vector<Value> provenance(int d, std::int64_t n, const interp::GridSpec& grid, std::uint64_t seed) {
  return {std::int64_t{d}, n, grid.m_unpadded(), grid.m_total(), static_cast<std::int64_t>(seed)};
}

const std::vector<std::string> kProvenanceHeader{"d", "n", "m_unpadded", "m_total", "seed"};

std::vector<std::string> with_provenance(std::vector<std::string> rest) {
  std::vector<std::string> h = kProvenanceHeader;
  h.insert(h.end(), rest.begin(), rest.end());
  return h;
}

void append(std::vector<Value>& row, std::initializer_list<Value> more) { row.insert(row.end(), more); }

NamedFit named_fit(std::string name, const std::vector<std::pair<double, double>>& pts, double lo, double hi) {
  NamedFit f;
  f.name = std::move(name);
  f.fit = fit_rate(pts);
  f.lo = lo;
  f.hi = hi;
  f.passed = f.fit.slope >= lo && f.fit.slope <= hi;
  return f;
}

double mean_of(const std::vector<double>& v) { return std::accumulate(v.begin(), v.end(), 0.0) / v.size(); }

std::vector<int> default_probe_cells(int d) {
  switch (d) {
    case 1:
      return {8, 16, 32, 64, 128, 256};
    case 2:
      return {8, 16, 32, 64};
    case 3:
      return {8, 12, 16, 24};
    default:
      return {8, 12};
  }
}

}  // namespace

const bounds::Constants& Calibration::at(int d) const {
  const auto it = by_dim.find(d);
  if (it == by_dim.end()) throw CalibrationError("no calibrated constants for d = " + std::to_string(d));
  return it->second;
}

bounds::ProbeSpec calibration_probe(const SweepConfig& cfg, int d) {
  bounds::ProbeSpec probe;
  probe.dim = d;
  probe.halfwidth = cfg.D;
  probe.hyperparams = {cfg.hp_true};
  probe.safety = cfg.k_prime_safety;
  probe.pairs = std::max(250, cfg.probe_pairs >> (d - 1));
  std::set<int> cells;
  for (int c : default_probe_cells(d)) cells.insert(c);
  if (std::find(cfg.dims.begin(), cfg.dims.end(), d) != cfg.dims.end()) {
    cells.insert(cfg.m_per_dim_values.begin(), cfg.m_per_dim_values.end());
  }
  if (const auto it = cfg.gram_rate_cells.find(d); it != cfg.gram_rate_cells.end()) {
    cells.insert(it->second.begin(), it->second.end());
  }
  if (d == 1) {
    cells.insert(cfg.n_growth_cells);
    cells.insert(cfg.kernel_rate_cells.begin(), cfg.kernel_rate_cells.end());
  }
  probe.cells.assign(cells.begin(), cells.end());
  // Never the same stream as a sweep seed.
  probe.seed = derive_seed(bounds::kProbeSeed, static_cast<std::uint64_t>(d), 0xca11b8a7e);
  return probe;
}

std::vector<int> dims_needed(const SweepConfig& cfg) {
  std::set<int> dims;
  if (wants(cfg, "score") || wants(cfg, "inverse_action") || wants(cfg, "logdet") || wants(cfg, "posterior")) {
    dims.insert(cfg.dims.begin(), cfg.dims.end());
  }
  if (wants(cfg, "kernel_rate")) dims.insert(1);
  if (wants(cfg, "gram_rate")) dims.insert(cfg.gram_rate_dims.begin(), cfg.gram_rate_dims.end());
  if (wants(cfg, "n_growth") || wants(cfg, "sizing")) dims.insert(1);
  if (wants(cfg, "regimes")) dims.insert(cfg.regimes_dims.begin(), cfg.regimes_dims.end());
  return {dims.begin(), dims.end()};
}

Calibration calibrate_all(const SweepConfig& cfg) {
  Calibration cal;
  for (int d : dims_needed(cfg)) cal.by_dim[d] = bounds::calibrate(calibration_probe(cfg, d));
  return cal;
}

double measured_norm(const Eigen::MatrixXd& A) {
  try {
    return linalg::spectral_norm(A);
  } catch (const ConvergenceError&) {
    return Eigen::BDCSVD<Eigen::MatrixXd>(A).singularValues()(0);
  }
}

// ---------------------------------------------------------------- kernel_rate

ExperimentResult run_kernel_rate(const SweepConfig& cfg, const Calibration& cal) {
  ExperimentResult res;
  res.name = "kernel_rate";
  res.table.header = with_provenance({"probe", "cells", "h", "max_error", "delta_bound"});
  const std::uint64_t seed = cfg.seeds.front();
  const auto& hp = cfg.hp_true;

  // Interpolating the slice f = k(., 0) in d = 1.
  std::vector<std::pair<double, double>> slice_pts;
  for (int cells : cfg.kernel_rate_cells) {
    const auto grid = interp::GridSpec::regular(1, cells, cfg.D);
    const Eigen::MatrixXd nodes = grid.nodes();
    std::vector<double> values(static_cast<std::size_t>(nodes.rows()));
    const double zero = 0.0;
    for (Eigen::Index i = 0; i < nodes.rows(); ++i) {
      values[i] = kernels::rbf(std::span<const double>(&nodes(i, 0), 1), std::span<const double>(&zero, 1), hp);
    }
    double worst = 0.0;
    const int P = cfg.kernel_rate_slice_points;
    for (int p = 0; p < P; ++p) {
      // Offset by an irrational fraction of a cell so the points avoid the nodes.
      const double x = std::clamp(-cfg.D + 2.0 * cfg.D * (p + 0.5 * (std::sqrt(5.0) - 1.0)) / P, -cfg.D, cfg.D);
      const double approx = interp::interpolate(values, std::span<const double>(&x, 1), grid);
      worst = std::max(worst, std::abs(approx - kernels::rbf(std::span<const double>(&x, 1),
                                                             std::span<const double>(&zero, 1), hp)));
    }
    const double delta = bounds::delta_interp(grid.m_unpadded(), 1, cfg.D, cal.at(1));
    auto row = provenance(1, P, grid, seed);
    append(row, {std::string("slice"), std::int64_t{cells}, grid.spacing(), worst, delta});
    res.table.add(std::move(row));
    slice_pts.emplace_back(grid.spacing(), worst);
    res.reports.push_back(BoundReport::make("delta_interp" + cell_label(1, P, cells, seed), delta, worst,
                                            "interpolation-error"));
  }
  auto slice_fit = named_fit("slice_error_vs_h[d=1]", slice_pts, 2.7, 3.3);
  res.checks.push_back({"slice_fit_r_squared[d=1]", slice_fit.fit.r_squared >= 0.98,
                        "r^2 = " + format_double(slice_fit.fit.r_squared)});
  res.fits.push_back(std::move(slice_fit));

  // Elementwise |k - k~| over random pairs.
  for (int d : cfg.kernel_rate_dims) {
    std::vector<std::pair<double, double>> pts;
    for (int cells : cfg.kernel_rate_cells) {
      const auto grid = interp::GridSpec::regular(d, cells, cfg.D);
      const LatticeKernel lattice(grid, hp);
      std::mt19937_64 rng(derive_seed(seed, static_cast<std::uint64_t>(d), static_cast<std::uint64_t>(cells), 7));
      std::uniform_real_distribution<double> unif(-cfg.D, cfg.D);
      std::vector<double> x(d), xp(d);
      std::vector<interp::Stencil1D> sa(d), sb(d);
      double worst = 0.0;
      for (int p = 0; p < cfg.kernel_rate_pairs; ++p) {
        for (int j = 0; j < d; ++j) x[j] = unif(rng);
        for (int j = 0; j < d; ++j) xp[j] = unif(rng);
        for (int j = 0; j < d; ++j) {
          sa[j] = interp::stencil_1d(x[j], grid.axis(j));
          sb[j] = interp::stencil_1d(xp[j], grid.axis(j));
        }
        const double approx = lattice.entry(sa, sb, LatticeTerm::Value);
        worst = std::max(worst, std::abs(approx - kernels::rbf(x, xp, hp)));
      }
      auto row = provenance(d, cfg.kernel_rate_pairs, grid, seed);
      append(row, {std::string("ski_pairs"), std::int64_t{cells}, grid.spacing(), worst, std::string("")});
      res.table.add(std::move(row));
      pts.emplace_back(grid.spacing(), worst);
    }
    res.fits.push_back(named_fit("ski_kernel_error_vs_h[d=" + std::to_string(d) + "]", pts, 2.6, 3.4));
  }
  return res;
}

// ------------------------------------------------------------------ gram_rate

ExperimentResult run_gram_rate(const SweepConfig& cfg, const Calibration& cal) {
  ExperimentResult res;
  res.name = "gram_rate";
  res.table.header = with_provenance({"cells", "h", "gram_error", "gamma"});
  struct Job {
    int d, cells;
    std::uint64_t seed;
  };
  std::vector<Job> jobs;
  for (int d : cfg.gram_rate_dims) {
    const auto it = cfg.gram_rate_cells.find(d);
    if (it == cfg.gram_rate_cells.end()) throw InvalidArgument("gram_rate: no cell ladder for d = " + std::to_string(d));
    for (auto seed : cfg.seeds) {
      for (int cells : it->second) jobs.push_back({d, cells, seed});
    }
  }
  std::vector<double> err(jobs.size());
  detail::parallel_for(static_cast<std::int64_t>(jobs.size()), [&](std::int64_t k) {
    const auto& job = jobs[k];
    const auto data = generate(job.d, cfg.gram_rate_n, 0, cfg.D, cfg.hp_true,
                               derive_seed(job.seed, static_cast<std::uint64_t>(job.d),
                                           static_cast<std::uint64_t>(cfg.gram_rate_n), 1))
                          .train;
    const auto grid = interp::GridSpec::regular(job.d, job.cells, cfg.D);
    const auto model = SkiModel::build(data, grid, cfg.hp_true);
    err[k] = measured_norm(kernels::gram(data.X, cfg.hp_true) - ski_gram(model));
  }, true);

  std::map<std::pair<int, int>, std::vector<double>> by_cell;
  for (std::size_t k = 0; k < jobs.size(); ++k) {
    const auto& job = jobs[k];
    const auto grid = interp::GridSpec::regular(job.d, job.cells, cfg.D);
    const double g = bounds::gamma(cfg.gram_rate_n, grid.m_unpadded(), job.d, cfg.D, cal.at(job.d));
    auto row = provenance(job.d, cfg.gram_rate_n, grid, job.seed);
    append(row, {std::int64_t{job.cells}, grid.spacing(), err[k], g});
    res.table.add(std::move(row));
    res.reports.push_back(
        BoundReport::make("gamma" + cell_label(job.d, cfg.gram_rate_n, job.cells, job.seed), g, err[k], "gram-spectral"));
    by_cell[{job.d, job.cells}].push_back(err[k]);
  }
  for (int d : cfg.gram_rate_dims) {
    std::vector<std::pair<double, double>> pts;
    for (int cells : cfg.gram_rate_cells.at(d)) {
      pts.emplace_back(static_cast<double>(ipow(cells, d)), mean_of(by_cell[{d, cells}]));
    }
    const double target = -3.0 / d;
    res.fits.push_back(named_fit("gram_error_vs_m[d=" + std::to_string(d) + "]", pts, target - 0.5, target + 0.5));
  }
  return res;
}

// ------------------------------------------------------------------- n_growth

ExperimentResult run_n_growth(const SweepConfig& cfg, const Calibration& cal) {
  ExperimentResult res;
  res.name = "n_growth";
  res.table.header = with_provenance({"cells", "gram_error", "gamma"});
  const auto grid = interp::GridSpec::regular(1, cfg.n_growth_cells, cfg.D);
  struct Job {
    int n;
    std::uint64_t seed;
  };
  std::vector<Job> jobs;
  for (auto seed : cfg.seeds) {
    for (int n : cfg.n_growth_values) jobs.push_back({n, seed});
  }
  std::vector<double> err(jobs.size());
  detail::parallel_for(static_cast<std::int64_t>(jobs.size()), [&](std::int64_t k) {
    const auto data = generate(1, jobs[k].n, 0, cfg.D, cfg.hp_true,
                               derive_seed(jobs[k].seed, 1, static_cast<std::uint64_t>(jobs[k].n), 2))
                          .train;
    const auto model = SkiModel::build(data, grid, cfg.hp_true);
    err[k] = measured_norm(kernels::gram(data.X, cfg.hp_true) - ski_gram(model));
  }, true);
  std::map<int, std::vector<double>> by_n;
  for (std::size_t k = 0; k < jobs.size(); ++k) {
    const double g = bounds::gamma(jobs[k].n, grid.m_unpadded(), 1, cfg.D, cal.at(1));
    auto row = provenance(1, jobs[k].n, grid, jobs[k].seed);
    append(row, {std::int64_t{cfg.n_growth_cells}, err[k], g});
    res.table.add(std::move(row));
    res.reports.push_back(BoundReport::make("gamma" + cell_label(1, jobs[k].n, cfg.n_growth_cells, jobs[k].seed), g,
                                            err[k], "gram-spectral"));
    by_n[jobs[k].n].push_back(err[k]);
  }
  std::vector<std::pair<double, double>> pts;
  for (int n : cfg.n_growth_values) pts.emplace_back(static_cast<double>(n), mean_of(by_n[n]));
  res.fits.push_back(named_fit("gram_error_vs_n[d=1]", pts, 0.6, 1.2));
  return res;
}

// ---------------------------------------------------------------------- sweep

namespace {

struct SweepCell {
  int d = 0;
  int n = 0;
  int cells = 0;
  std::uint64_t seed = 0;
  interp::GridSpec grid;
  double y_norm = 0.0;

  double gram_err = 0.0, cross_err = 0.0;
  std::array<double, kernels::kNumHypers> partial_err{};
  double score_err = 0.0, inv_err = 0.0, logdet_err = 0.0, loglik_err = 0.0;
  double mean_err = 0.0, cov_err = 0.0;
};

void measure_cell(const SweepConfig& cfg, SweepCell& c) {
  const auto& hp = cfg.hp_true;
  const auto gen = generate(c.d, c.n, cfg.T, cfg.D, hp,
                            derive_seed(c.seed, static_cast<std::uint64_t>(c.d), static_cast<std::uint64_t>(c.n)));
  const auto& train = gen.train;
  c.grid = interp::GridSpec::regular(c.d, c.cells, cfg.D);
  c.y_norm = train.y.norm();
  const auto model = SkiModel::build(train, c.grid, hp);

  const Eigen::MatrixXd K = kernels::gram(train.X, hp);
  const Eigen::MatrixXd Kt = ski_gram(model);
  c.gram_err = measured_norm(K - Kt);
  for (auto which : kernels::kHypers) {
    c.partial_err[static_cast<int>(which)] =
        measured_norm(kernels::gram_partial(train.X, hp, which) - ski_gram_partial(model, which));
  }
  c.cross_err = measured_norm(kernels::gram(gen.test.X, train.X, hp) - ski_cross(model, gen.test.X));

  auto noisy = [&](Eigen::MatrixXd A) {
    A.diagonal().array() += hp.noise_variance;
    return linalg::CholeskyFactor::compute(linalg::SymmetricMatrix(std::move(A)));
  };
  const auto Fe = noisy(K);
  const auto Fs = noisy(Kt);
  c.inv_err = measured_norm(Fs.inverse() - Fe.inverse());
  c.logdet_err = std::abs(Fs.log_det() - Fe.log_det());

  const auto exact_mode = gp::Mode::exact();
  const auto ski_mode = gp::Mode::ski(c.grid);
  const auto ee = gp::evaluate(train, hp, exact_mode);
  const auto es = gp::evaluate(train, hp, ski_mode);
  c.loglik_err = std::abs(ee.log_likelihood - es.log_likelihood);
  c.score_err = (ee.score - es.score).norm();

  const auto dev = gp::posterior_deviation(gp::posterior(train, gen.test, hp, exact_mode),
                                           gp::posterior(train, gen.test, hp, ski_mode));
  c.mean_err = dev.mean_l2;
  c.cov_err = dev.cov_spectral;
}

// Number of times a series goes up.
int inversions(const std::vector<double>& v) {
  int count = 0;
  for (std::size_t i = 1; i < v.size(); ++i) count += v[i] > v[i - 1];
  return count;
}

}  // namespace

std::vector<ExperimentResult> run_sweep(const SweepConfig& cfg, const Calibration& cal) {
  std::vector<SweepCell> cells;
  for (int d : cfg.dims) {
    for (int n : cfg.n_values) {
      for (int m : cfg.m_per_dim_values) {
        for (auto seed : cfg.seeds) {
          SweepCell c;
          c.d = d;
          c.n = n;
          c.cells = m;
          c.seed = seed;
          cells.push_back(c);
        }
      }
    }
  }
  detail::parallel_for(static_cast<std::int64_t>(cells.size()), [&](std::int64_t k) { measure_cell(cfg, cells[k]); },
                       true);

  const double s2 = cfg.hp_true.noise_variance;
  ExperimentResult score, inverse, logdet, post;
  score.name = "score";
  inverse.name = "inverse_action";
  logdet.name = "logdet";
  post.name = "posterior";
  score.table.header = with_provenance({"cells", "h", "gram_error", "gamma", "partial_signal_variance_error",
                                        "gamma_signal_variance", "partial_lengthscale_error", "gamma_lengthscale",
                                        "y_norm", "score_error", "eps_G"});
  inverse.table.header = with_provenance({"cells", "h", "inverse_error", "inverse_bound"});
  logdet.table.header =
      with_provenance({"cells", "h", "logdet_error", "logdet_bound", "loglik_error", "loglik_bound"});
  post.table.header = with_provenance({"cells", "h", "T", "cross_error", "cross_bound", "mean_error", "mean_bound",
                                       "cov_error", "cov_bound"});

  std::map<std::tuple<int, std::uint64_t>, std::pair<std::vector<double>, std::vector<double>>> d1_series;
  for (const auto& c : cells) {
    const auto& k = cal.at(c.d);
    const std::int64_t m = c.grid.m_unpadded();
    const std::string label = cell_label(c.d, c.n, c.cells, c.seed);
    const auto prov = provenance(c.d, c.n, c.grid, c.seed);
    const double h = c.grid.spacing();

    const double g = bounds::gamma(c.n, m, c.d, cfg.D, k);
    const double gT = bounds::gamma(cfg.T, m, c.d, cfg.D, k);
    const double g_sf = bounds::gamma_partial(c.n, m, c.d, cfg.D, k, kernels::Hyper::SignalVariance);
    const double g_l = bounds::gamma_partial(c.n, m, c.d, cfg.D, k, kernels::Hyper::Lengthscale);
    const double eps_G = bounds::score_error_bound(c.n, m, c.d, cfg.D, k, c.y_norm, s2);
    {
      auto row = prov;
      append(row, {std::int64_t{c.cells}, h, c.gram_err, g, c.partial_err[0], g_sf, c.partial_err[1], g_l, c.y_norm,
                   c.score_err, eps_G});
      score.table.add(std::move(row));
      score.reports.push_back(BoundReport::make("gamma" + label, g, c.gram_err, "gram-spectral"));
      score.reports.push_back(
          BoundReport::make("gamma_signal_variance" + label, g_sf, c.partial_err[0], "gram-partial-spectral"));
      score.reports.push_back(
          BoundReport::make("gamma_lengthscale" + label, g_l, c.partial_err[1], "gram-partial-spectral"));
      score.reports.push_back(BoundReport::make("eps_G" + label, eps_G, c.score_err, "score-error"));
    }
    {
      const double b = bounds::inverse_action_bound(g, s2);
      auto row = prov;
      append(row, {std::int64_t{c.cells}, h, c.inv_err, b});
      inverse.table.add(std::move(row));
      inverse.reports.push_back(BoundReport::make("inverse_action" + label, b, c.inv_err, "regularized-inverse"));
    }
    {
      const double b = bounds::logdet_bound(g, s2);
      const double ll = 0.5 * (g / (s2 * s2) * c.y_norm * c.y_norm + g / s2);
      auto row = prov;
      append(row, {std::int64_t{c.cells}, h, c.logdet_err, b, c.loglik_err, ll});
      logdet.table.add(std::move(row));
      logdet.reports.push_back(BoundReport::make("logdet" + label, b, c.logdet_err, "log-determinant"));
      logdet.reports.push_back(BoundReport::make("log_likelihood" + label, ll, c.loglik_err, "log-likelihood"));
    }
    {
      const double cross = std::max(g, gT);
      const double mb = bounds::posterior_mean_bound(c.n, cfg.T, m, c.d, cfg.D, k, c.y_norm, s2);
      const double cb = bounds::posterior_cov_bound(c.n, cfg.T, m, c.d, cfg.D, k, s2);
      auto row = prov;
      append(row, {std::int64_t{c.cells}, h, std::int64_t{cfg.T}, c.cross_err, cross, c.mean_err, mb, c.cov_err, cb});
      post.table.add(std::move(row));
      post.reports.push_back(BoundReport::make("cross_kernel" + label, cross, c.cross_err, "cross-kernel"));
      post.reports.push_back(BoundReport::make("posterior_mean" + label, mb, c.mean_err, "posterior-mean"));
      post.reports.push_back(BoundReport::make("posterior_cov" + label, cb, c.cov_err, "posterior-covariance"));
    }
    if (c.d == 1) {
      auto& s = d1_series[{c.n, c.seed}];
      s.first.push_back(c.mean_err);
      s.second.push_back(c.cov_err);
    }
  }

  std::set<int> dims(cfg.dims.begin(), cfg.dims.end());
  for (int d : dims) {
    const double e = bounds::posterior_cov_decay_exponent(d);
    post.checks.push_back({"cov_bound_decay_sign[d=" + std::to_string(d) + "]", (e > 0.0) == (d < 3),
                           "exponent 3/d - 1 = " + format_double(e)});
  }
  // Cells are in increasing order within each (n, seed) series when the
  // config lists them that way.
  if (std::is_sorted(cfg.m_per_dim_values.begin(), cfg.m_per_dim_values.end())) {
    for (const auto& [key, s] : d1_series) {
      const auto& [n, seed] = key;
      const int inv_mean = inversions(s.first);
      const int inv_cov = inversions(s.second);
      post.checks.push_back({"deviation_shrinks_with_m[d=1,n=" + std::to_string(n) + ",seed=" + std::to_string(seed) + "]",
                             inv_mean <= 1 && inv_cov <= 1,
                             "inversions mean " + std::to_string(inv_mean) + ", cov " + std::to_string(inv_cov)});
    }
  }

  std::vector<ExperimentResult> out;
  for (auto* r : {&score, &inverse, &logdet, &post}) {
    if (wants(cfg, r->name)) out.push_back(std::move(*r));
  }
  return out;
}

// --------------------------------------------------------------------- sizing

ExperimentResult run_sizing(const SweepConfig& cfg, const Calibration& cal) {
  ExperimentResult res;
  res.name = "sizing";
  res.table.header = with_provenance({"probe", "epsilon", "gram_error", "y_norm", "score_error", "eps_G",
                                      "eps_G_over_y_norm"});
  const auto& k = cal.at(1);
  const double s2 = cfg.hp_true.noise_variance;

  struct Job {
    bool score = false;
    int n = 0;
    double eps = 0.0;
    std::uint64_t seed = 0;
    double gram_err = 0.0, y_norm = 0.0, score_err = 0.0;
  };
  std::vector<Job> jobs;
  for (double eps : cfg.sizing_epsilons) {
    for (int n : cfg.sizing_n_values) {
      for (auto seed : cfg.seeds) jobs.push_back({false, n, eps, seed});
    }
  }
  const std::uint64_t seed0 = cfg.seeds.front();
  for (int n : cfg.sizing_score_n_values) jobs.push_back({true, n, cfg.sizing_score_epsilon, seed0});

  detail::parallel_for(static_cast<std::int64_t>(jobs.size()), [&](std::int64_t i) {
    auto& job = jobs[i];
    const auto m = bounds::inducing_count(job.n, job.eps, 1, cfg.D, k);
    const auto grid = interp::GridSpec::regular(1, bounds::cells_for(m, 1), cfg.D);
    const auto data =
        generate(1, job.n, 0, cfg.D, cfg.hp_true, derive_seed(job.seed, 1, static_cast<std::uint64_t>(job.n), 3)).train;
    job.y_norm = data.y.norm();
    if (job.score) {
      const auto ee = gp::evaluate(data, cfg.hp_true, gp::Mode::exact());
      const auto es = gp::evaluate(data, cfg.hp_true, gp::Mode::ski(grid));
      job.score_err = (ee.score - es.score).norm();
    } else {
      const auto model = SkiModel::build(data, grid, cfg.hp_true);
      job.gram_err = measured_norm(kernels::gram(data.X, cfg.hp_true) - ski_gram(model));
    }
  }, true);

  std::vector<std::pair<double, double>> growth;
  for (const auto& job : jobs) {
    const auto m = bounds::inducing_count(job.n, job.eps, 1, cfg.D, k);
    const auto grid = interp::GridSpec::regular(1, bounds::cells_for(m, 1), cfg.D);
    const std::string label = cell_label(1, job.n, grid.cells(), job.seed);
    auto row = provenance(1, job.n, grid, job.seed);
    if (job.score) {
      const double eps_G = bounds::score_error_bound(job.n, m, 1, cfg.D, k, job.y_norm, s2);
      append(row, {std::string("score_growth"), job.eps, std::string(""), job.y_norm, job.score_err, eps_G,
                   eps_G / job.y_norm});
      res.reports.push_back(BoundReport::make("eps_G_sized" + label, eps_G, job.score_err, "score-error"));
      growth.emplace_back(static_cast<double>(job.n), eps_G / job.y_norm);
    } else {
      append(row, {std::string("spectral"), job.eps, job.gram_err, job.y_norm, std::string(""), std::string(""),
                   std::string("")});
      res.reports.push_back(BoundReport::make("sizing_eps=" + format_double(job.eps) + label, job.eps, job.gram_err,
                                              "inducing-count"));
    }
    res.table.add(std::move(row));
  }
  if (growth.size() >= 3) res.fits.push_back(named_fit("eps_G_over_y_norm_vs_n[d=1]", growth, 0.6, 1.4));
  return res;
}

// -------------------------------------------------------------------- regimes

ExperimentResult run_regimes(const SweepConfig& cfg, const Calibration& cal) {
  ExperimentResult res;
  res.name = "regimes";
  res.table.header = with_provenance({"epsilon_threshold", "log_n", "threshold_over_log_n", "sized_epsilon",
                                      "m_log_m_over_n"});
  Json series = Json::object();
  for (int d : cfg.regimes_dims) {
    const auto& k = cal.at(d);
    std::vector<double> eps, ratio, mlogm;
    for (auto n : cfg.regimes_n_values) {
      const double e = bounds::linear_time_epsilon(n, d, cfg.D, k, cfg.regimes_C);
      const auto m = bounds::inducing_count(n, cfg.regimes_epsilon, d, cfg.D, k);
      const auto grid = interp::GridSpec::regular(d, bounds::cells_for(m, d), cfg.D);
      const double ml = static_cast<double>(m) * std::log(static_cast<double>(m)) / static_cast<double>(n);
      eps.push_back(e);
      ratio.push_back(e / std::log(static_cast<double>(n)));
      mlogm.push_back(ml);
      auto row = provenance(d, n, grid, 0);
      append(row, {e, std::log(static_cast<double>(n)), ratio.back(), cfg.regimes_epsilon, ml});
      res.table.add(std::move(row));
    }
    const std::string tag = "[d=" + std::to_string(d) + "]";
    series[std::to_string(d)] = {{"n", cfg.regimes_n_values}, {"epsilon_threshold", eps},
                                 {"threshold_over_log_n", ratio}, {"m_log_m_over_n", mlogm}};
    bool dec = true, inc = true;
    for (std::size_t i = 1; i < eps.size(); ++i) {
      dec = dec && eps[i] < eps[i - 1];
      inc = inc && eps[i] > eps[i - 1];
    }
    if (d < 3) {
      res.checks.push_back({"threshold_decreasing" + tag, dec, "linear-time epsilon threshold must fall with n"});
    } else if (d == 3) {
      const auto [lo, hi] = std::minmax_element(ratio.begin(), ratio.end());
      const double spread = (*hi - *lo) / std::abs(*hi);
      res.checks.push_back({"threshold_proportional_to_log_n" + tag, spread <= 1e-9,
                            "relative spread of threshold / log n = " + format_double(spread)});
    } else {
      res.checks.push_back({"threshold_increasing" + tag, inc, "linear-time epsilon threshold must grow with n"});
    }
    series[std::to_string(d)]["threshold_monotone"] = dec ? "decreasing" : (inc ? "increasing" : "neither");
    if (d <= 3 && mlogm.size() >= 2) {
      const bool falls = mlogm.back() < mlogm[mlogm.size() - 2];
      series[std::to_string(d)]["m_log_m_over_n_decreasing_last_two"] = falls;
      // For d = 3 the sized m grows like n, so m log m / n grows like log n;
      // the series is reported but not asserted here.
      if (d < 3) {
        res.checks.push_back({"m_log_m_over_n_decreasing" + tag, falls,
                              "m log m / n over the two largest n: " + format_double(mlogm[mlogm.size() - 2]) +
                                  " -> " + format_double(mlogm.back())});
      }
    }
  }
  res.extra["series"] = series;
  return res;
}

// --------------------------------------------------------------------- ascent

namespace {

bounds::Constants ascent_constants(const SweepConfig& cfg, const kernels::Dataset& data, int grid_cells) {
  bounds::ProbeSpec probe;
  probe.dim = 1;
  probe.halfwidth = cfg.D;
  probe.safety = cfg.k_prime_safety;
  probe.pairs = cfg.probe_pairs;
  const auto& box = cfg.ascent_box;
  const double s2 = cfg.hp_true.noise_variance;
  // Corners of the box bound the constants the whole trajectory can see.
  probe.hyperparams = {{box.lo[0], box.lo[1], s2}, {box.lo[0], box.hi[1], s2}, {box.hi[0], box.lo[1], s2},
                       {box.hi[0], box.hi[1], s2}};
  std::set<int> cells{8, 16, 32, 64, grid_cells};
  probe.cells.assign(cells.begin(), cells.end());
  probe.seed = derive_seed(bounds::kProbeSeed, 1, 0xa5ce17);
  bounds::SmoothnessProbe smooth{data, box, s2, 9, cfg.mu_safety};
  return bounds::calibrate(probe, smooth);
}

}  // namespace

ExperimentResult run_ascent(const SweepConfig& cfg) {
  ExperimentResult res;
  res.name = "ascent";
  res.table.header = with_provenance({"instance", "k", "signal_variance", "lengthscale", "ski_loglik", "exact_loglik",
                                      "exact_grad_norm", "score_error", "clipped"});
  const std::uint64_t seed = cfg.seeds.front();
  const double s2 = cfg.hp_true.noise_variance;
  const kernels::Hyperparams theta0{cfg.ascent_theta0[0], cfg.ascent_theta0[1], s2};

  struct Instance {
    std::string name;
    kernels::Dataset data;
    interp::GridSpec grid;
  };
  std::vector<Instance> instances;
  {
    const auto data = generate(1, cfg.ascent_n, 0, cfg.D, cfg.hp_true, derive_seed(seed, 1, 0xa5ce17)).train;
    instances.push_back({"random", data, interp::GridSpec::regular(1, cfg.ascent_cells, cfg.D)});
    const auto lgrid = interp::GridSpec::regular(1, cfg.ascent_lattice_cells, cfg.D);
    instances.push_back({"lattice", lattice_dataset(lgrid, cfg.ascent_n, cfg.hp_true, derive_seed(seed, 1, 0x1a77)),
                         lgrid});
  }

  Json extra = Json::object();
  for (const auto& inst : instances) {
    const auto k = ascent_constants(cfg, inst.data, inst.grid.cells());
    const double eta = cfg.ascent_eta > 0.0 ? cfg.ascent_eta : 1.0 / k.mu;
    const auto traj = trainer::ascend(inst.data, theta0, eta, cfg.ascent_K, inst.grid, cfg.ascent_box);
    if (traj.failed) throw NumericalError("ascent (" + inst.name + "): " + traj.error);
    const auto best = trainer::locate_maximum(inst.data, cfg.ascent_box, s2, eta);
    // Any iterate above the located maximum raises the anchor.
    double L_star = best.log_likelihood;
    for (const auto& it : traj.iterates) L_star = std::max(L_star, it.exact_loglik);
    const double L0 = traj.iterates.front().exact_loglik;
    const std::int64_t m = inst.grid.m_unpadded();
    const double y_norm = inst.data.y.norm();
    const bool lattice = inst.name == "lattice";
    const double eps_g = lattice ? 0.0 : bounds::score_error_bound(cfg.ascent_n, m, 1, cfg.D, k, y_norm, s2);
    const double min_sq = traj.min_grad_norm_sq();
    const std::string label = "[" + inst.name + ",n=" + std::to_string(cfg.ascent_n) + ",K=" +
                              std::to_string(cfg.ascent_K) + "]";

    for (std::size_t i = 0; i < traj.iterates.size(); ++i) {
      const auto& it = traj.iterates[i];
      auto row = provenance(1, cfg.ascent_n, inst.grid, seed);
      append(row, {inst.name, static_cast<std::int64_t>(i), it.theta.signal_variance, it.theta.lengthscale,
                   it.ski_loglik, it.exact_loglik, it.exact_grad_norm, it.score_error,
                   std::int64_t{it.clipped ? 1 : 0}});
      res.table.add(std::move(row));
    }

    double max_score_err = 0.0;
    for (const auto& it : traj.iterates) max_score_err = std::max(max_score_err, it.score_error);

    if (lattice) {
      const double cert = bounds::ascent_certificate(k.mu, L_star, L0, cfg.ascent_K, 0.0) + 1e-12;
      res.reports.push_back(BoundReport::make("ascent_certificate_exact_gradients" + label, cert, min_sq, "ascent"));
      res.reports.push_back(BoundReport::make("lattice_score_error" + label, 1e-8, max_score_err, "lattice-exactness"));
      bool monotone = true;
      for (std::size_t i = 1; i < traj.iterates.size(); ++i) {
        monotone = monotone && traj.iterates[i].exact_loglik >= traj.iterates[i - 1].exact_loglik - 1e-10;
      }
      res.checks.push_back({"exact_loglik_nondecreasing" + label, monotone, "step 1/mu on lattice data"});
    } else {
      const double cert = bounds::ascent_certificate(k.mu, L_star, L0, cfg.ascent_K, eps_g);
      res.reports.push_back(BoundReport::make("ascent_certificate" + label, cert, min_sq, "ascent"));
      res.reports.push_back(BoundReport::make("trajectory_score_error" + label, eps_g, max_score_err, "score-error"));
      const auto running = traj.running_min_grad_norm_sq();
      const bool nonincreasing = std::is_sorted(running.rbegin(), running.rend());
      const double floor = eps_g * eps_g / (2.0 * k.mu) + 2.0 * k.mu * (L_star - L0) / cfg.ascent_K;
      res.checks.push_back({"running_min_plateau" + label, nonincreasing && running.back() <= 2.0 * floor,
                            "final running min " + format_double(running.back()) + " vs 2x " + format_double(floor)});
    }
    extra[inst.name] = {{"constants", to_json(k)},
                        {"eta", eta},
                        {"L_star", L_star},
                        {"L_star_theta", {best.theta.signal_variance, best.theta.lengthscale}},
                        {"L_theta0", L0},
                        {"eps_g", eps_g},
                        {"min_grad_norm_sq", min_sq},
                        {"clipping_activated", traj.clipping_activated()}};
  }
  res.extra = extra;
  return res;
}

// ------------------------------------------------------------------------ all

std::vector<ExperimentResult> run_experiments(const SweepConfig& cfg, const Calibration& cal) {
  std::vector<ExperimentResult> out;
  if (wants(cfg, "gram_rate")) out.push_back(run_gram_rate(cfg, cal));
  if (wants(cfg, "n_growth")) out.push_back(run_n_growth(cfg, cal));
  if (wants(cfg, "kernel_rate")) out.push_back(run_kernel_rate(cfg, cal));
  if (wants(cfg, "score") || wants(cfg, "inverse_action") || wants(cfg, "logdet") || wants(cfg, "posterior")) {
    for (auto& r : run_sweep(cfg, cal)) out.push_back(std::move(r));
  }
  if (wants(cfg, "ascent")) out.push_back(run_ascent(cfg));
  if (wants(cfg, "regimes")) out.push_back(run_regimes(cfg, cal));
  if (wants(cfg, "sizing")) out.push_back(run_sizing(cfg, cal));
  return out;
}

}  // namespace ski::bench
