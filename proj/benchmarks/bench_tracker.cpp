#include <benchmark/benchmark.h>

#include "hoimtrack/synth.hpp"
#include "hoimtrack/tracker.hpp"

namespace {

void BM_TrackerStep(benchmark::State& state) {
  hoimtrack::ScenarioConfig cfg;
  cfg.n_identities = static_cast<std::size_t>(state.range(0));
  cfg.n_frames = 200;
  cfg.miss_rate = 0.1;
  cfg.false_positive_rate = 0.5;
  cfg.box_jitter = 2.0;
  cfg.embedding_noise = 0.05;
  cfg.seed = 1;
  const hoimtrack::Scenario scenario = hoimtrack::generate(cfg);
  for (auto _ : state) {
    hoimtrack::Tracker tracker;
    for (std::size_t f = 0; f < scenario.detections.size(); ++f) {
      benchmark::DoNotOptimize(tracker.step(static_cast<int>(f) + 1, scenario.detections[f]));
    }
  }
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(scenario.detections.size()));
}
BENCHMARK(BM_TrackerStep)->Arg(20)->Arg(80)->Unit(benchmark::kMillisecond);

}  // namespace
