#include <benchmark/benchmark.h>

#include "hoimtrack/loss.hpp"
#include "hoimtrack/memory.hpp"
#include "hoimtrack/random.hpp"

namespace {

// Memory sized like the larger benchmark setting in the default embedding
// width.
hoimtrack::ProjectionMemory filled_memory(std::size_t n, std::size_t b) {
  hoimtrack::RandomStream rng(3, 1);
  hoimtrack::ProjectionMemory memory(hoimtrack::MemoryConfig{n, b, 256, 0.5, 1.0 / 30.0});
  for (std::size_t k = 0; k < n; ++k) memory.update_labeled(k, rng.unit_vector(256));
  for (std::size_t k = 0; k < b; ++k) memory.push_background(rng.unit_vector(256));
  return memory;
}

void BM_IhoimGradient(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const hoimtrack::ProjectionMemory memory = filled_memory(n, n);
  hoimtrack::RandomStream rng(4, 1);
  const Eigen::VectorXd x = rng.unit_vector(256);
  for (auto _ : state) {
    benchmark::DoNotOptimize(hoimtrack::ihoim_gradient(memory, x, hoimtrack::SampleLabel::person(0)));
  }
}
BENCHMARK(BM_IhoimGradient)->Arg(500)->Arg(2332);

void BM_IhoimLoss(benchmark::State& state) {
  const hoimtrack::ProjectionMemory memory = filled_memory(2332, 2000);
  hoimtrack::RandomStream rng(5, 1);
  const Eigen::VectorXd x = rng.unit_vector(256);
  for (auto _ : state) {
    benchmark::DoNotOptimize(hoimtrack::ihoim_loss(memory, x, hoimtrack::SampleLabel::person(7)));
  }
}
BENCHMARK(BM_IhoimLoss);

void BM_MemoryUpdate(benchmark::State& state) {
  hoimtrack::ProjectionMemory memory = filled_memory(2332, 2000);
  hoimtrack::RandomStream rng(6, 1);
  const Eigen::VectorXd x = rng.unit_vector(256);
  std::size_t k = 0;
  for (auto _ : state) {
    memory.update_labeled(k, x);
    k = (k + 1) % 2332;
  }
}
BENCHMARK(BM_MemoryUpdate);

}  // namespace
