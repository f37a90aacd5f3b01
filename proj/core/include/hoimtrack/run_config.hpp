#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "hoimtrack/learn.hpp"
#include "hoimtrack/synth.hpp"
#include "hoimtrack/tracker.hpp"

namespace hoimtrack {

struct PathConfig {
  std::string gt;
  std::string det;
  std::string emb;
  std::string res;
  std::string out;
};

/// Embedder and memory shape used by training pipelines. The identity count
/// comes from the scenario.
struct EmbedderConfig {
  std::size_t embedding_dim = 32;
  std::size_t n_background = 200;
};

struct AblationConfig {
  std::vector<std::uint64_t> seeds = {1, 2, 3, 4, 5};
  double match_iou = 0.5;
  /// Largest tolerated MOTA drop when motion fusion is enabled.
  double max_fusion_mota_drop = 0.005;
};

/// Everything a CLI pipeline needs, serialized as one JSON document with the
/// sections "scenario", "tracker", "train", "embedder", "ablation", "paths".
/// Missing keys keep their defaults; unknown keys are rejected.
struct RunConfig {
  ScenarioConfig scenario;
  TrackerConfig tracker;
  TrainConfig train;
  EmbedderConfig embedder;
  AblationConfig ablation;
  PathConfig paths;
};

/// The 20-identity, 400-frame noisy benchmark with scripted occlusions.
RunConfig default_benchmark_config();

RunConfig parse_run_config(const std::string& json_text);
RunConfig load_run_config(const std::filesystem::path& path);
/// Full document with every key spelled out.
std::string to_json(const RunConfig& config);

}  // namespace hoimtrack
