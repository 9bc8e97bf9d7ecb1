// Runs the acceptance criteria on the shipped default config and prints one
// pass/fail line per criterion. Exits nonzero if any criterion fails.

#include <sys/wait.h>

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <iterator>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "ski/bench/config.hpp"
#include "ski/bench/data.hpp"
#include "ski/bench/experiments.hpp"
#include "ski/bench/report.hpp"
#include "ski/bounds.hpp"
#include "ski/gp.hpp"
#include "ski/ski.hpp"

namespace fs = std::filesystem;
using namespace ski;
using namespace ski::bench;

namespace {

struct Outcome {
  bool passed = true;
  std::vector<std::string> notes;

  void require(bool ok, const std::string& what) {
    if (!ok) passed = false;
    notes.push_back((ok ? "ok   " : "FAIL ") + what);
  }
};

const ExperimentResult& find(const std::vector<ExperimentResult>& results, const std::string& name) {
  for (const auto& r : results)
    if (r.name == name) return r;
  throw std::runtime_error("experiment " + name + " missing from the run");
}

const NamedFit& fit(const ExperimentResult& r, const std::string& name) {
  for (const auto& f : r.fits)
    if (f.name == name) return f;
  throw std::runtime_error("fit " + name + " missing from " + r.name);
}

std::string describe(const NamedFit& f) {
  std::ostringstream s;
  s << f.name << " slope " << format_double(f.fit.slope) << " in [" << f.lo << ", " << f.hi << "], r^2 "
    << format_double(f.fit.r_squared);
  return s.str();
}

bool starts_with(const std::string& s, const std::string& prefix) { return s.rfind(prefix, 0) == 0; }

// Every report whose name starts with prefix is satisfied; returns the count.
int reports_hold(const ExperimentResult& r, const std::string& prefix, Outcome& out) {
  int count = 0, bad = 0;
  double worst = 0.0;
  for (const auto& rep : r.reports) {
    if (!starts_with(rep.name, prefix)) continue;
    // "gamma" must not also match "gamma_signal_variance".
    if (prefix == "gamma" && rep.name[5] != '[') continue;
    ++count;
    bad += !rep.satisfied;
    worst = std::max(worst, rep.margin_ratio);
  }
  out.require(count > 0 && bad == 0, r.name + "/" + prefix + ": " + std::to_string(count - bad) + "/" +
                                          std::to_string(count) + " satisfied, worst measured/bound " +
                                          format_double(worst));
  return count;
}

// ---------------------------------------------------------------- criteria

Outcome criterion_1(const std::vector<ExperimentResult>& results) {
  Outcome out;
  const auto& f = fit(find(results, "kernel_rate"), "slice_error_vs_h[d=1]");
  out.require(f.passed, describe(f));
  out.require(f.fit.r_squared >= 0.98, "r^2 >= 0.98");
  return out;
}

Outcome criterion_2(const std::vector<ExperimentResult>& results) {
  Outcome out;
  for (int d : {1, 2}) {
    const auto& f = fit(find(results, "kernel_rate"), "ski_kernel_error_vs_h[d=" + std::to_string(d) + "]");
    out.require(f.passed, describe(f));
  }
  return out;
}

Outcome criterion_3(const std::vector<ExperimentResult>& results) {
  Outcome out;
  for (int d : {1, 2, 3}) {
    const auto& f = fit(find(results, "gram_rate"), "gram_error_vs_m[d=" + std::to_string(d) + "]");
    out.require(f.passed && std::abs(f.lo - (-3.0 / d - 0.5)) < 1e-12, describe(f));
  }
  return out;
}

Outcome criterion_4(const std::vector<ExperimentResult>& results) {
  Outcome out;
  const auto& f = fit(find(results, "n_growth"), "gram_error_vs_n[d=1]");
  out.require(f.passed, describe(f));
  return out;
}

Outcome criterion_5(const std::vector<ExperimentResult>& results) {
  Outcome out;
  reports_hold(find(results, "score"), "gamma", out);
  reports_hold(find(results, "posterior"), "cross_kernel", out);
  reports_hold(find(results, "inverse_action"), "inverse_action", out);
  reports_hold(find(results, "logdet"), "logdet", out);
  reports_hold(find(results, "score"), "gamma_signal_variance", out);
  reports_hold(find(results, "score"), "gamma_lengthscale", out);
  reports_hold(find(results, "score"), "eps_G", out);
  reports_hold(find(results, "posterior"), "posterior_mean", out);
  reports_hold(find(results, "posterior"), "posterior_cov", out);
  return out;
}

Outcome criterion_6(const SweepConfig& cfg, const std::vector<ExperimentResult>& results) {
  Outcome out;
  const int count = reports_hold(find(results, "sizing"), "sizing_eps=", out);
  const auto expected = cfg.sizing_epsilons.size() * cfg.sizing_n_values.size() * cfg.seeds.size();
  out.require(static_cast<std::size_t>(count) == expected,
              "cells covered: " + std::to_string(count) + " of eps x n x seeds = " + std::to_string(expected));
  return out;
}

Outcome criterion_7(const SweepConfig& cfg, const Calibration& cal) {
  Outcome out;
  const std::vector<std::int64_t> ns{1000, 10000, 100000, 1000000};
  for (int d : {1, 2, 3, 4}) {
    const auto& k = cal.at(d);
    std::vector<double> eps, ratio, mlogm;
    for (auto n : ns) {
      const double e = bounds::linear_time_epsilon(n, d, cfg.D, k, cfg.regimes_C);
      eps.push_back(e);
      ratio.push_back(e / std::log(static_cast<double>(n)));
      const double m = static_cast<double>(bounds::inducing_count(n, cfg.regimes_epsilon, d, cfg.D, k));
      mlogm.push_back(m * std::log(m) / static_cast<double>(n));
    }
    const std::string tag = "d=" + std::to_string(d);
    if (d <= 2) {
      bool dec = true;
      for (std::size_t i = 1; i < eps.size(); ++i) dec = dec && eps[i] < eps[i - 1];
      out.require(dec, tag + " threshold strictly decreasing");
    } else if (d == 3) {
      const auto [lo, hi] = std::minmax_element(ratio.begin(), ratio.end());
      out.require((*hi - *lo) / *hi <= 1e-9, tag + " threshold / log n constant, spread " +
                                                  format_double((*hi - *lo) / *hi));
    } else {
      bool inc = true;
      for (std::size_t i = 1; i < eps.size(); ++i) inc = inc && eps[i] > eps[i - 1];
      out.require(inc, tag + " threshold strictly increasing");
    }
    if (d <= 3) {
      out.require(mlogm[3] < mlogm[2], tag + " m log m / n over the largest two n: " + format_double(mlogm[2]) +
                                           " -> " + format_double(mlogm[3]));
    }
  }
  return out;
}

Outcome criterion_8(const SweepConfig& cfg, const std::vector<ExperimentResult>& results) {
  Outcome out;
  // Each mode's score against central differences of its own log-likelihood.
  double worst = 0.0;
  int checked = 0;
  for (int d : cfg.dims) {
    for (int n : cfg.n_values) {
      const auto data = generate(d, n, 1, cfg.D, cfg.hp_true, derive_seed(cfg.seeds.front(), d, n, 0xfd)).train;
      const auto grid = interp::GridSpec::regular(d, cfg.m_per_dim_values[1], cfg.D);
      for (const auto& mode : {gp::Mode::exact(), gp::Mode::ski(grid)}) {
        const auto g = gp::score(data, cfg.hp_true, mode);
        for (int i = 0; i < 2; ++i) {
          const double step = 1e-5 * cfg.hp_true.theta()[i];
          Eigen::Vector2d up = cfg.hp_true.theta(), down = up;
          up[i] += step;
          down[i] -= step;
          const double fd = (gp::log_likelihood(data, cfg.hp_true.with_theta(up), mode) -
                             gp::log_likelihood(data, cfg.hp_true.with_theta(down), mode)) /
                            (2 * step);
          worst = std::max(worst, std::abs(g[i] - fd) / std::max(std::abs(fd), 1.0));
          ++checked;
        }
      }
    }
  }
  out.require(worst < 1e-5, "score vs finite difference, worst relative error " + format_double(worst) + " over " +
                                std::to_string(checked) + " components");
  reports_hold(find(results, "score"), "eps_G", out);
  const auto& f = fit(find(results, "sizing"), "eps_G_over_y_norm_vs_n[d=1]");
  out.require(f.passed, describe(f));
  return out;
}

Outcome criterion_9(const std::vector<ExperimentResult>& results) {
  Outcome out;
  const auto& r = find(results, "ascent");
  reports_hold(r, "ascent_certificate[", out);
  reports_hold(r, "ascent_certificate_exact_gradients", out);
  return out;
}

Outcome criterion_10(const SweepConfig& cfg, const std::vector<ExperimentResult>& results) {
  Outcome out;
  const auto& hp = cfg.hp_true;
  double worst = 0.0;
  int configs = 0;
  for (int d : {1, 2}) {
    for (int cells : {8, 16}) {
      for (int n : {32, 64}) {
        const auto grid = interp::GridSpec::regular(d, cells, cfg.D);
        const auto data = lattice_dataset(grid, n, hp, derive_seed(7, d, cells, n));
        const auto test = lattice_dataset(grid, 16, hp, derive_seed(8, d, cells, n));
        const auto model = SkiModel::build(data, grid, hp);
        const auto exact = gp::Mode::exact(), ski_mode = gp::Mode::ski(grid);

        std::vector<double> errs;
        double kernel_err = 0.0;
        for (int i = 0; i < n; ++i) {
          const Eigen::VectorXd a = data.X.row(i).transpose();
          const Eigen::VectorXd b = data.X.row((i * 7 + 3) % n).transpose();
          kernel_err = std::max(kernel_err, std::abs(ski_kernel(model, {a.data(), static_cast<std::size_t>(d)},
                                                                {b.data(), static_cast<std::size_t>(d)}) -
                                                     kernels::rbf({a.data(), static_cast<std::size_t>(d)},
                                                                  {b.data(), static_cast<std::size_t>(d)}, hp)));
        }
        errs.push_back(kernel_err);
        errs.push_back(measured_norm(kernels::gram(data.X, hp) - ski_gram(model)));
        const auto ee = gp::evaluate(data, hp, exact), es = gp::evaluate(data, hp, ski_mode);
        errs.push_back((ee.score - es.score).norm());
        errs.push_back(std::abs(ee.log_likelihood - es.log_likelihood));
        const auto dev = gp::posterior_deviation(gp::posterior(data, test, hp, exact),
                                                 gp::posterior(data, test, hp, ski_mode));
        errs.push_back(dev.mean_l2);
        errs.push_back(dev.cov_spectral);
        worst = std::max(worst, *std::max_element(errs.begin(), errs.end()));
        ++configs;
      }
    }
  }
  out.require(worst < 1e-8, std::to_string(configs) + " lattice configurations, worst error " + format_double(worst));
  reports_hold(find(results, "ascent"), "lattice_score_error", out);
  return out;
}

Outcome criterion_11() {
  Outcome out;
  std::mt19937_64 rng(0x11);
  double worst = 0.0;
  for (int cell = 0; cell < 50; ++cell) {
    const int d = 1 + static_cast<int>(rng() % 2);
    const int n = 20 + static_cast<int>(rng() % 381);
    const int cells = 4 + static_cast<int>(rng() % (d == 1 ? 200 : 40));
    const kernels::Hyperparams hp{0.5 + (rng() % 1000) / 500.0, 0.2 + (rng() % 1000) / 1000.0, 0.1};
    const auto data = generate(d, n, 1, 1.0, hp, rng()).train;
    const auto model = SkiModel::build(data, interp::GridSpec::regular(d, cells, 1.0), hp);
    Eigen::VectorXd v(n);
    std::normal_distribution<double> normal;
    for (auto& x : v) x = normal(rng);
    const Eigen::VectorXd dense = ski_gram(model) * v;
    worst = std::max(worst, (ski_mvm(model, v) - dense).norm() / dense.norm());
  }
  out.require(worst < 1e-10, "50 random cells, worst relative error " + format_double(worst));
  return out;
}

int run_cli(const std::string& args) {
  const std::string cmd = std::string(SKI_BOUNDS_EXE) + " " + args + " >/dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

Outcome criterion_12(const std::string& config_path) {
  Outcome out;
  const fs::path base = fs::temp_directory_path() / "ski_bounds_acceptance";
  fs::remove_all(base);
  const fs::path a = base / "a", b = base / "b";
  const int ca = run_cli("run --config " + config_path + " --out " + a.string());
  const int cb = run_cli("run --config " + config_path + " --out " + b.string());
  out.require(ca == cb, "exit codes " + std::to_string(ca) + " and " + std::to_string(cb));
  int files = 0, identical = 0;
  for (const auto& entry : fs::directory_iterator(a)) {
    if (entry.path().extension() != ".csv") continue;
    ++files;
    const fs::path other = b / entry.path().filename();
    identical += fs::exists(other) && slurp(entry.path()) == slurp(other);
  }
  out.require(files > 0 && files == identical,
              std::to_string(identical) + "/" + std::to_string(files) + " CSV files byte-identical");
  fs::remove_all(base);
  return out;
}

}  // namespace

int main() {
  const std::string config_path = std::string(SKI_SOURCE_DIR) + "/configs/default.cfg";
  SweepConfig cfg;
  std::vector<ExperimentResult> results;
  Calibration cal;
  try {
    cfg = load_config(config_path);
    cfg.experiments = {kExperiments.begin(), kExperiments.end()};
    cfg.regimes_dims = {1, 2, 3, 4};
    cal = calibrate_all(cfg);
    results = run_experiments(cfg, cal);
  } catch (const std::exception& e) {
    std::cout << "acceptance: the default run raised: " << e.what() << '\n';
    return 1;
  }

  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
      {"cubic interpolation rate", [&] { return criterion_1(results); }},
      {"SKI kernel elementwise rate", [&] { return criterion_2(results); }},
      {"Gram spectral decay in m", [&] { return criterion_3(results); }},
      {"linear growth in n", [&] { return criterion_4(results); }},
      {"bound domination", [&] { return criterion_5(results); }},
      {"inducing-count sizing", [&] { return criterion_6(cfg, results); }},
      {"regime dichotomy", [&] { return criterion_7(cfg, cal); }},
      {"score fidelity", [&] { return criterion_8(cfg, results); }},
      {"inexact ascent", [&] { return criterion_9(results); }},
      {"lattice exactness", [&] { return criterion_10(cfg, results); }},
      {"structured MVM", [] { return criterion_11(); }},
      {"determinism", [&] { return criterion_12(config_path); }},
  };

  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o.require(false, std::string("raised: ") + e.what());
    }
    failed += !o.passed;
    std::cout << "criterion " << (i + 1) << " (" << criteria[i].first << "): " << (o.passed ? "PASS" : "FAIL")
              << '\n';
    for (const auto& note : o.notes) std::cout << "    " << note << '\n';
  }
  std::cout << (criteria.size() - failed) << "/" << criteria.size() << " criteria passed\n";
  return failed == 0 ? 0 : 1;
}
