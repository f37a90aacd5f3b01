#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "hoimtrack/learn.hpp"
#include "hoimtrack/metrics.hpp"
#include "hoimtrack/run_config.hpp"
#include "hoimtrack/synth.hpp"
#include "hoimtrack/tracker.hpp"

namespace hoimtrack {

/// Writes gt.txt, det.txt, emb.csv and scenario.json into `dir`.
void export_scenario(const Scenario& scenario, const RunConfig& config,
                     const std::filesystem::path& dir);

/// Runs the tracker over consecutive frames starting at 1.
Sequence run_tracker(const std::vector<std::vector<Detection>>& frames,
                     const TrackerConfig& config);

/// Replaces every detection embedding by the embedder's image of it.
std::vector<std::vector<Detection>> embed_detections(
    const std::vector<std::vector<Detection>>& frames, const LinearEmbedder& model);

struct AblationRow {
  std::string name;
  double accuracy = 0.0;
  double mota = 0.0;
  double idf1 = 0.0;
  double idsw = 0.0;
  double fp = 0.0;
  double fn = 0.0;
};

struct DirectionCheck {
  std::string name;
  bool passed = false;
  std::string detail;
};

struct AblationSeedResult {
  std::uint64_t seed = 0;
  std::vector<AblationRow> rows;  ///< OIM-MM, iHOIM-MM, iHOIM+MM
  std::vector<EpochStats> ihoim_history;
  std::vector<EpochStats> baseline_history;
};

struct AblationReport {
  std::vector<AblationSeedResult> per_seed;
  std::vector<AblationRow> mean_rows;
  std::vector<DirectionCheck> checks;

  bool all_passed() const;
};

/// Trains the baseline and hierarchical embedders from the same init on each
/// seed's scenario, tracks with and without motion fusion, and averages.
AblationReport run_ablation(const RunConfig& config);

/// Writes ablation.md, ablation.csv, ablation.json and per-seed training
/// histories into `dir`.
void write_ablation_report(const AblationReport& report, const std::filesystem::path& dir);

}  // namespace hoimtrack
