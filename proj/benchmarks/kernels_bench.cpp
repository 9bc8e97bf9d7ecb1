// Parallel kernels against their serial reference implementations.

#include <benchmark/benchmark.h>

#include "ski/kernels.hpp"
#include "ski/reference.hpp"
#include "ski/ski.hpp"

namespace {

ski::kernels::Dataset make_data(int n, int d) {
  ski::kernels::Dataset data;
  std::srand(1);
  data.X = Eigen::MatrixXd::Random(n, d);
  data.y = Eigen::VectorXd::Random(n);
  return data;
}

const ski::kernels::Hyperparams kHp{1.0, 0.5, 0.1};

void BM_GramParallel(benchmark::State& state) {
  const auto data = make_data(static_cast<int>(state.range(0)), 2);
  for (auto _ : state) benchmark::DoNotOptimize(ski::kernels::gram(data.X, data.X, kHp));
}

void BM_GramSerial(benchmark::State& state) {
  const auto data = make_data(static_cast<int>(state.range(0)), 2);
  for (auto _ : state) benchmark::DoNotOptimize(ski::reference::gram(data.X, data.X, kHp));
}

void BM_SkiGramFactored(benchmark::State& state) {
  const auto data = make_data(static_cast<int>(state.range(0)), 2);
  const auto model = ski::SkiModel::build(data, ski::interp::GridSpec::regular(2, 16, 1.0), kHp);
  for (auto _ : state) benchmark::DoNotOptimize(ski::ski_gram(model));
}

void BM_SkiGramStencilLoop(benchmark::State& state) {
  const auto data = make_data(static_cast<int>(state.range(0)), 2);
  const auto model = ski::SkiModel::build(data, ski::interp::GridSpec::regular(2, 16, 1.0), kHp);
  const auto& W = model.train_weights();
  for (auto _ : state) benchmark::DoNotOptimize(ski::reference::ski_block_sparse(W, W, model.inducing_operator()));
}

void BM_GridMvmFft(benchmark::State& state) {
  const auto cells = static_cast<int>(state.range(0));
  const auto model = ski::SkiModel::build(make_data(16, 2), ski::interp::GridSpec::regular(2, cells, 1.0), kHp);
  const Eigen::VectorXd v = Eigen::VectorXd::Random(model.inducing_operator().order());
  for (auto _ : state) benchmark::DoNotOptimize(model.inducing_operator().apply(v));
}

void BM_GridMvmDense(benchmark::State& state) {
  const auto cells = static_cast<int>(state.range(0));
  const auto model = ski::SkiModel::build(make_data(16, 2), ski::interp::GridSpec::regular(2, cells, 1.0), kHp);
  const Eigen::VectorXd v = Eigen::VectorXd::Random(model.inducing_operator().order());
  for (auto _ : state) benchmark::DoNotOptimize(ski::reference::grid_mvm_dense(model.inducing_operator(), v));
}

void BM_SkiMvm(benchmark::State& state) {
  const auto model = ski::SkiModel::build(make_data(static_cast<int>(state.range(0)), 2),
                                          ski::interp::GridSpec::regular(2, 32, 1.0), kHp);
  const Eigen::VectorXd v = Eigen::VectorXd::Random(model.n());
  for (auto _ : state) benchmark::DoNotOptimize(ski::ski_mvm(model, v));
}

void BM_SkiMvmDense(benchmark::State& state) {
  const auto model = ski::SkiModel::build(make_data(static_cast<int>(state.range(0)), 2),
                                          ski::interp::GridSpec::regular(2, 32, 1.0), kHp);
  const Eigen::VectorXd v = Eigen::VectorXd::Random(model.n());
  for (auto _ : state) benchmark::DoNotOptimize(ski::reference::ski_mvm_dense(model, v));
}

}  // namespace

BENCHMARK(BM_GramParallel)->Arg(256)->Arg(1024);
BENCHMARK(BM_GramSerial)->Arg(256)->Arg(1024);
BENCHMARK(BM_SkiGramFactored)->Arg(256)->Arg(512);
BENCHMARK(BM_SkiGramStencilLoop)->Arg(256)->Arg(512);
BENCHMARK(BM_GridMvmFft)->Arg(16)->Arg(32);
BENCHMARK(BM_GridMvmDense)->Arg(16)->Arg(32);
BENCHMARK(BM_SkiMvm)->Arg(256)->Arg(1024);
BENCHMARK(BM_SkiMvmDense)->Arg(256)->Arg(1024);

BENCHMARK_MAIN();
