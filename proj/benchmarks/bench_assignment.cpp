#include <benchmark/benchmark.h>

#include "hoimtrack/assignment.hpp"
#include "hoimtrack/random.hpp"

namespace {

void BM_Hungarian(benchmark::State& state) {
  const auto n = static_cast<Eigen::Index>(state.range(0));
  hoimtrack::RandomStream rng(1, 1);
  Eigen::MatrixXd cost(n, n);
  for (Eigen::Index i = 0; i < cost.size(); ++i) cost(i) = rng.uniform();
  for (auto _ : state) benchmark::DoNotOptimize(hoimtrack::hungarian(cost));
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_Hungarian)->RangeMultiplier(2)->Range(8, 256)->Complexity();

void BM_HungarianRectangular(benchmark::State& state) {
  hoimtrack::RandomStream rng(2, 1);
  Eigen::MatrixXd cost(40, 120);
  for (Eigen::Index i = 0; i < cost.size(); ++i) {
    cost(i) = rng.bernoulli(0.7) ? hoimtrack::kInfeasibleCost : rng.uniform();
  }
  for (auto _ : state) benchmark::DoNotOptimize(hoimtrack::hungarian(cost));
}
BENCHMARK(BM_HungarianRectangular);

}  // namespace
