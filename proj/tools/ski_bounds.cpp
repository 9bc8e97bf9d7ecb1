#include <cstdlib>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "ski/bench/config.hpp"
#include "ski/bench/run.hpp"
#include "ski/error.hpp"

namespace {

using namespace ski::bench;

struct Overrides {
  std::optional<std::string> experiments, dims, n, m, seed, out;
  std::optional<int> jobs;
};

SweepConfig build_config(const std::string& path, const Overrides& o) {
  bool has_seeds = false;
  SweepConfig cfg = load_config(path, &has_seeds);
  if (!o.seed && !has_seeds) {
    if (const char* env = std::getenv("SKI_BOUNDS_SEED")) apply_setting(cfg, "seeds", env);
  }
  if (o.experiments) {
    if (o.experiments->empty()) {
      cfg.experiments.clear();
    } else {
      apply_setting(cfg, "experiments", *o.experiments);
    }
  }
  if (o.dims) {
    apply_setting(cfg, "dims", *o.dims);
    apply_setting(cfg, "kernel_rate.dims", *o.dims);
    apply_setting(cfg, "regimes.dims", *o.dims);
    apply_setting(cfg, "gram_rate.dims", *o.dims);
  }
  if (o.n) apply_setting(cfg, "n_values", *o.n);
  if (o.m) apply_setting(cfg, "m_per_dim_values", *o.m);
  if (o.seed) apply_setting(cfg, "seeds", *o.seed);
  if (o.out) cfg.output_path = *o.out;
  if (o.jobs) cfg.jobs = *o.jobs;
  cfg.validate();
  return cfg;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"SKI error-bound benchmarks"};
  app.require_subcommand(1);

  std::string config_path;
  Overrides o;
  auto* run = app.add_subcommand("run", "run the experiments of a config");
  run->add_option("--config", config_path, "config file (key = value)")->required()->check(CLI::ExistingFile);
  run->add_option("--experiments", o.experiments, "comma-separated experiment names");
  run->add_option("--d", o.dims, "comma-separated dimensions");
  run->add_option("--n", o.n, "comma-separated training sizes");
  run->add_option("--m", o.m, "comma-separated cells per dimension");
  run->add_option("--seed", o.seed, "comma-separated seeds");
  run->add_option("--jobs", o.jobs, "parallel workers")->check(CLI::NonNegativeNumber);
  run->add_option("--out", o.out, "output directory");

  auto* cal = app.add_subcommand("calibrate", "print calibrated constants");
  cal->add_option("--config", config_path, "config file (key = value)")->required()->check(CLI::ExistingFile);

  auto* self = app.add_subcommand("selftest", "run the built-in example checks");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kPass : kUsageError;
  }

  try {
    if (*self) return selftest(std::cout);
    const SweepConfig cfg = build_config(config_path, o);
    if (*cal) return calibrate_command(cfg, std::cout, std::cerr);
    return ski::bench::run(cfg, std::cout);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return exit_code_for(e);
  }
}
