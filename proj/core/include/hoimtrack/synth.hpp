#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include <Eigen/Dense>

#include "hoimtrack/learn.hpp"
#include "hoimtrack/metrics.hpp"
#include "hoimtrack/tracker.hpp"

namespace hoimtrack {

/// Scripted occlusion: identity (zero-based) emits no detections in frames
/// [start_frame, end_frame] (one-based, inclusive) but stays in ground truth.
struct OcclusionWindow {
  std::size_t identity = 0;
  int start_frame = 1;
  int end_frame = 1;

  bool operator==(const OcclusionWindow&) const = default;
};

struct ScenarioConfig {
  std::size_t n_identities = 20;
  std::size_t n_frames = 400;
  double arena_width = 1920.0;
  double arena_height = 1080.0;
  std::size_t feature_dim = 64;

  // Agents move at constant velocity (plus optional Gaussian acceleration)
  // and reflect off the arena border.
  double min_speed = 1.0;
  double max_speed = 4.0;
  double acceleration_noise = 0.0;
  double min_height = 80.0;
  double max_height = 200.0;
  double min_aspect = 0.35;
  double max_aspect = 0.5;

  // Detector corruption.
  double miss_rate = 0.0;
  double false_positive_rate = 0.0;  ///< probability of one clutter box per frame
  double box_jitter = 0.0;           ///< std of each tlwh component, pixels
  double embedding_noise = 0.0;      ///< per-component std before renormalization
  double confidence_spread = 0.0;    ///< true detections score 1 - U(0, spread)
  double false_positive_min_confidence = 0.3;
  double false_positive_max_confidence = 0.8;

  std::vector<OcclusionWindow> occlusions;
  std::size_t random_occlusions_per_identity = 0;
  int occlusion_min_length = 3;
  int occlusion_max_length = 8;

  double min_prototype_angle_deg = 15.0;
  bool orthogonal_prototypes = false;

  // Feature samples for embedder training and held-out evaluation.
  std::size_t train_samples_per_identity = 20;
  std::size_t test_samples_per_identity = 10;
  std::size_t train_background_samples = 200;
  std::size_t test_background_samples = 50;
  double unlabeled_fraction = 0.0;
  /// Background samples blend a random identity prototype with weight
  /// background_hardness into a uniform direction, mimicking poorly aligned
  /// person crops. 0 gives uniform clutter.
  double background_hardness = 0.0;
  /// Person samples mix in a uniform clutter direction with weight drawn from
  /// U(0, person_misalignment), like proposals that only partly cover a person.
  double person_misalignment = 0.0;
  /// Feature noise of training samples; negative means use embedding_noise.
  double sample_noise = -1.0;

  std::uint64_t seed = 0;
};

/// Throws InputError on out-of-range fields.
void validate(const ScenarioConfig& config);

struct Scenario {
  ScenarioConfig config;
  Sequence gt;
  /// Detector output per frame; embeddings are raw unit f-dim features.
  std::vector<std::vector<Detection>> detections;
  /// Ground-truth id behind each detection, or -1 for clutter.
  std::vector<std::vector<int>> detection_sources;
  /// One unit f-vector per identity (row i is identity i).
  Eigen::MatrixXd prototypes;
  std::vector<TrainSample> train;
  std::vector<TrainSample> test;
  /// Every occlusion window in effect, scripted and random.
  std::vector<OcclusionWindow> occlusions;
};

/// Deterministic under config.seed. Each concern draws from its own named
/// stream (see random.hpp).
Scenario generate(const ScenarioConfig& config);

/// Minimum pairwise angle between prototypes, in degrees.
double prototype_separation(const Scenario& scenario);
double prototype_separation(const Eigen::MatrixXd& prototypes);

}  // namespace hoimtrack
