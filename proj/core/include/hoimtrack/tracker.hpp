#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "hoimtrack/geometry.hpp"
#include "hoimtrack/memory.hpp"
#include "hoimtrack/motion.hpp"

namespace hoimtrack {

enum class DetectionSource { kDetector, kMotion };

/// One candidate box for association. Motion-sourced candidates come from a
/// track's own prediction and name that track in `origin_track`.
struct Detection {
  BoxTLWH box;
  double confidence = 1.0;
  std::optional<Embedding> embedding;
  DetectionSource source = DetectionSource::kDetector;
  std::optional<int> origin_track;
};

enum class TrackState { kTentative, kConfirmed, kDeleted };

struct Track {
  int track_id = 0;
  KalmanState kalman;
  /// Exponentially smoothed unit embedding; empty until a candidate with an
  /// embedding is associated.
  Embedding gallery;
  TrackState state = TrackState::kTentative;
  int hits = 0;
  int age = 0;
  int time_since_update = 0;
  /// Confidence of the last associated candidate.
  double confidence = 1.0;

  bool has_gallery() const { return gallery.size() > 0; }
  bool confirmed() const { return state == TrackState::kConfirmed; }
};

struct TrackerConfig {
  double max_cosine_distance = 0.2;
  double gating_threshold = kChi2Gate4Dof;
  int n_init = 3;
  int max_age = 30;
  double fusion_iou_threshold = 0.5;
  double motion_confidence_decay = 0.9;
  /// Weight of the old gallery in the exponential smoothing.
  double gallery_smoothing = 0.9;
  /// Maximum 1 - IoU accepted in the IoU association stage.
  double max_iou_distance = 0.7;
  /// Detector candidates and motion proposals below this are discarded.
  double confidence_threshold = 0.4;
  bool motion_fusion = true;
};

/// Validates thresholds; throws InputError.
void validate(const TrackerConfig& config);

struct TrackOutput {
  int track_id = 0;
  BoxTLWH box;
  double confidence = 1.0;
  DetectionSource source = DetectionSource::kDetector;
};

struct AssociationResult {
  std::vector<std::pair<std::size_t, std::size_t>> matches;  ///< (track, candidate)
  std::vector<std::size_t> unmatched_tracks;
  std::vector<std::size_t> unmatched_candidates;
};

/// Adds one motion-sourced candidate per confirmed track whose predicted box
/// has IoU <= fusion_iou_threshold with every detector box. Detector entries
/// are passed through unchanged and first. Proposals inherit the track's
/// gallery and a decayed confidence; those falling below the confidence
/// threshold are dropped. `tracks` must already be predicted to this frame.
std::vector<Detection> fuse_proposals(std::span<const Detection> detections,
                                      std::span<const Track> tracks,
                                      const TrackerConfig& config);

/// Matching cascade over detector candidates (confirmed tracks by ascending
/// time since update, gated cosine distance), then an IoU stage for tentative
/// and just-missed tracks, then motion candidates for their own unmatched
/// origin track.
AssociationResult associate(std::span<const Track> tracks, std::span<const Detection> candidates,
                            const TrackerConfig& config, const KalmanFilter& filter);

/// Online tracker. Frames must be fed in consecutive order.
class Tracker {
 public:
  explicit Tracker(TrackerConfig config = {}, MotionNoise noise = {});

  /// Processes one frame and returns confirmed tracks updated in it, ordered
  /// by track id.
  std::vector<TrackOutput> step(int frame_index, std::span<const Detection> detections);

  const std::vector<Track>& tracks() const { return tracks_; }
  const TrackerConfig& config() const { return config_; }

 private:
  void start_track(const Detection& detection);

  TrackerConfig config_;
  KalmanFilter filter_;
  std::vector<Track> tracks_;
  std::optional<int> last_frame_;
  int next_id_ = 1;
};

}  // namespace hoimtrack
