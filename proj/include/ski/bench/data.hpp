#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "ski/interp.hpp"
#include "ski/kernels.hpp"

namespace ski::bench {

struct GeneratedData {
  kernels::Dataset train;
  kernels::Dataset test;  // y holds the latent f at the test inputs
};

/// Uniform inputs on [-D, D]^d, f ~ GP(0, k) jointly over the n + T stacked
/// inputs, y = f + N(0, sigma^2). Redraws the inputs up to three times if the
/// joint covariance cannot be factorized.
GeneratedData generate(int d, int n, int T, double D, const kernels::Hyperparams& hp, std::uint64_t seed);

/// Training data whose inputs are lattice nodes inside [-D, D]^d (cycling
/// through the nodes when n exceeds their number); targets from the prior.
kernels::Dataset lattice_dataset(const interp::GridSpec& grid, int n, const kernels::Hyperparams& hp,
                                 std::uint64_t seed);

/// Mixes a base seed with experiment coordinates.
std::uint64_t derive_seed(std::uint64_t base, std::uint64_t a, std::uint64_t b = 0, std::uint64_t c = 0);

struct RateFit {
  double slope = 0.0;
  double intercept = 0.0;
  double r_squared = 0.0;
  std::vector<std::pair<double, double>> points;  // (log x, log y)
  std::vector<std::string> notes;
};

/// Least-squares line through (log x, log y). Pairs with y < 1e-14 are
/// dropped with a note; fewer than three usable pairs is InsufficientData.
RateFit fit_rate(const std::vector<std::pair<double, double>>& points);

}  // namespace ski::bench
