#include "hoimtrack/tracker.hpp"

#include <algorithm>
#include <string>

#include "hoimtrack/assignment.hpp"
#include "hoimtrack/errors.hpp"

namespace hoimtrack {
namespace {

BoxTLWH predicted_box(const Track& track) { return to_tlwh(track.kalman.box()); }

bool predicted_box_valid(const Track& track) { return track.kalman.box().valid(); }

// Runs the assignment over the given subsets and appends matches; entries at
// or above the sentinel are left unmatched.
void match_subset(const Eigen::MatrixXd& cost, const std::vector<std::size_t>& track_ids,
                  std::vector<std::size_t>& candidate_ids,
                  std::vector<std::pair<std::size_t, std::size_t>>& matches,
                  std::vector<std::size_t>& unmatched_tracks) {
  const Assignment assignment = hungarian(cost);
  std::vector<bool> candidate_taken(candidate_ids.size(), false);
  for (std::size_t r = 0; r < track_ids.size(); ++r) {
    const auto& col = assignment.row_to_col[r];
    if (col && cost(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(*col)) < kInfeasibleCost) {
      matches.emplace_back(track_ids[r], candidate_ids[*col]);
      candidate_taken[*col] = true;
    } else {
      unmatched_tracks.push_back(track_ids[r]);
    }
  }
  std::vector<std::size_t> left;
  for (std::size_t c = 0; c < candidate_ids.size(); ++c) {
    if (!candidate_taken[c]) left.push_back(candidate_ids[c]);
  }
  candidate_ids = std::move(left);
}

Eigen::MatrixXd appearance_cost(std::span<const Track> tracks,
                                std::span<const Detection> candidates,
                                const std::vector<std::size_t>& track_ids,
                                const std::vector<std::size_t>& candidate_ids,
                                const TrackerConfig& config, const KalmanFilter& filter) {
  Eigen::MatrixXd cost(static_cast<Eigen::Index>(track_ids.size()),
                       static_cast<Eigen::Index>(candidate_ids.size()));
  std::vector<BoxXYAH> measurements;
  measurements.reserve(candidate_ids.size());
  for (std::size_t c : candidate_ids) measurements.push_back(to_xyah(candidates[c].box));

  for (std::size_t r = 0; r < track_ids.size(); ++r) {
    const Track& track = tracks[track_ids[r]];
    const std::vector<double> gate = filter.gating_distance(track.kalman, measurements);
    for (std::size_t c = 0; c < candidate_ids.size(); ++c) {
      const Detection& cand = candidates[candidate_ids[c]];
      double value = kInfeasibleCost;
      if (track.has_gallery() && cand.embedding && cand.embedding->size() == track.gallery.size()) {
        const double distance = 1.0 - track.gallery.dot(*cand.embedding);
        if (distance <= config.max_cosine_distance && gate[c] <= config.gating_threshold) {
          value = distance;
        }
      }
      cost(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = value;
    }
  }
  return cost;
}

Eigen::MatrixXd iou_cost(std::span<const Track> tracks, std::span<const Detection> candidates,
                         const std::vector<std::size_t>& track_ids,
                         const std::vector<std::size_t>& candidate_ids,
                         const TrackerConfig& config) {
  Eigen::MatrixXd cost(static_cast<Eigen::Index>(track_ids.size()),
                       static_cast<Eigen::Index>(candidate_ids.size()));
  for (std::size_t r = 0; r < track_ids.size(); ++r) {
    const Track& track = tracks[track_ids[r]];
    const bool valid = predicted_box_valid(track);
    const BoxTLWH box = predicted_box(track);
    for (std::size_t c = 0; c < candidate_ids.size(); ++c) {
      double value = kInfeasibleCost;
      if (valid) {
        const double distance = 1.0 - iou(box, candidates[candidate_ids[c]].box);
        if (distance <= config.max_iou_distance) value = distance;
      }
      cost(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = value;
    }
  }
  return cost;
}

}  // namespace

void validate(const TrackerConfig& config) {
  if (!(config.max_cosine_distance > 0.0)) throw InputError("max_cosine_distance must be positive");
  if (!(config.gating_threshold > 0.0)) throw InputError("gating_threshold must be positive");
  if (config.n_init < 1) throw InputError("n_init must be at least 1");
  if (config.max_age < 1) throw InputError("max_age must be at least 1");
  if (!(config.fusion_iou_threshold > 0.0 && config.fusion_iou_threshold <= 1.0)) {
    throw InputError("fusion_iou_threshold must lie in (0, 1]");
  }
  if (!(config.motion_confidence_decay > 0.0 && config.motion_confidence_decay <= 1.0)) {
    throw InputError("motion_confidence_decay must lie in (0, 1]");
  }
  if (!(config.gallery_smoothing >= 0.0 && config.gallery_smoothing < 1.0)) {
    throw InputError("gallery_smoothing must lie in [0, 1)");
  }
  if (!(config.max_iou_distance > 0.0 && config.max_iou_distance <= 1.0)) {
    throw InputError("max_iou_distance must lie in (0, 1]");
  }
  if (!(config.confidence_threshold >= 0.0 && config.confidence_threshold <= 1.0)) {
    throw InputError("confidence_threshold must lie in [0, 1]");
  }
}

std::vector<Detection> fuse_proposals(std::span<const Detection> detections,
                                      std::span<const Track> tracks,
                                      const TrackerConfig& config) {
  std::vector<Detection> out(detections.begin(), detections.end());
  for (const Track& track : tracks) {
    if (!track.confirmed() || !predicted_box_valid(track)) continue;
    const BoxTLWH box = predicted_box(track);
    const bool covered = std::any_of(detections.begin(), detections.end(), [&](const Detection& d) {
      return d.source == DetectionSource::kDetector && iou(box, d.box) > config.fusion_iou_threshold;
    });
    if (covered) continue;
    const double confidence = track.confidence * config.motion_confidence_decay;
    if (confidence < config.confidence_threshold) continue;
    Detection proposal;
    proposal.box = box;
    proposal.confidence = confidence;
    if (track.has_gallery()) proposal.embedding = track.gallery;
    proposal.source = DetectionSource::kMotion;
    proposal.origin_track = track.track_id;
    out.push_back(std::move(proposal));
  }
  return out;
}

AssociationResult associate(std::span<const Track> tracks, std::span<const Detection> candidates,
                            const TrackerConfig& config, const KalmanFilter& filter) {
  AssociationResult result;
  std::vector<std::size_t> detector_ids;
  std::vector<std::size_t> motion_ids;
  for (std::size_t c = 0; c < candidates.size(); ++c) {
    (candidates[c].source == DetectionSource::kDetector ? detector_ids : motion_ids).push_back(c);
  }

  std::vector<std::size_t> confirmed;
  std::vector<std::size_t> unconfirmed;
  for (std::size_t t = 0; t < tracks.size(); ++t) {
    if (tracks[t].state == TrackState::kDeleted) continue;
    (tracks[t].confirmed() ? confirmed : unconfirmed).push_back(t);
  }

  // Appearance cascade, most recently updated tracks first.
  std::vector<std::size_t> cascade_unmatched;
  for (int level = 0; level < config.max_age; ++level) {
    std::vector<std::size_t> level_tracks;
    for (std::size_t t : confirmed) {
      if (tracks[t].time_since_update == level + 1) level_tracks.push_back(t);
    }
    if (level_tracks.empty()) continue;
    if (detector_ids.empty()) {
      cascade_unmatched.insert(cascade_unmatched.end(), level_tracks.begin(), level_tracks.end());
      continue;
    }
    const Eigen::MatrixXd cost =
        appearance_cost(tracks, candidates, level_tracks, detector_ids, config, filter);
    match_subset(cost, level_tracks, detector_ids, result.matches, cascade_unmatched);
  }
  for (std::size_t t : confirmed) {
    const int tsu = tracks[t].time_since_update;
    if (tsu < 1 || tsu > config.max_age) cascade_unmatched.push_back(t);
  }

  // IoU stage for tentative tracks and confirmed tracks missed only this frame.
  std::vector<std::size_t> iou_tracks = unconfirmed;
  std::vector<std::size_t> still_unmatched;
  for (std::size_t t : cascade_unmatched) {
    (tracks[t].time_since_update == 1 ? iou_tracks : still_unmatched).push_back(t);
  }
  std::sort(iou_tracks.begin(), iou_tracks.end());
  if (!iou_tracks.empty() && !detector_ids.empty()) {
    const Eigen::MatrixXd cost = iou_cost(tracks, candidates, iou_tracks, detector_ids, config);
    match_subset(cost, iou_tracks, detector_ids, result.matches, still_unmatched);
  } else {
    still_unmatched.insert(still_unmatched.end(), iou_tracks.begin(), iou_tracks.end());
  }

  // Motion proposals only fill in for the track that produced them.
  std::vector<bool> motion_used(candidates.size(), false);
  for (std::size_t t : still_unmatched) {
    bool matched = false;
    for (std::size_t c : motion_ids) {
      if (!motion_used[c] && candidates[c].origin_track == tracks[t].track_id) {
        result.matches.emplace_back(t, c);
        motion_used[c] = true;
        matched = true;
        break;
      }
    }
    if (!matched) result.unmatched_tracks.push_back(t);
  }

  result.unmatched_candidates = detector_ids;
  for (std::size_t c : motion_ids) {
    if (!motion_used[c]) result.unmatched_candidates.push_back(c);
  }
  std::sort(result.matches.begin(), result.matches.end());
  std::sort(result.unmatched_tracks.begin(), result.unmatched_tracks.end());
  std::sort(result.unmatched_candidates.begin(), result.unmatched_candidates.end());
  return result;
}

Tracker::Tracker(TrackerConfig config, MotionNoise noise) : config_(config), filter_(noise) {
  validate(config_);
}

void Tracker::start_track(const Detection& detection) {
  Track track;
  track.track_id = next_id_++;
  track.kalman = filter_.initiate(to_xyah(detection.box));
  if (detection.embedding) track.gallery = *detection.embedding;
  track.hits = 1;
  track.age = 1;
  track.confidence = detection.confidence;
  track.state = config_.n_init <= 1 ? TrackState::kConfirmed : TrackState::kTentative;
  tracks_.push_back(std::move(track));
}

std::vector<TrackOutput> Tracker::step(int frame_index, std::span<const Detection> detections) {
  if (last_frame_ && frame_index != *last_frame_ + 1) {
    throw InputError("tracker expected frame " + std::to_string(*last_frame_ + 1) + ", got " +
                     std::to_string(frame_index));
  }
  last_frame_ = frame_index;

  std::vector<Detection> accepted;
  accepted.reserve(detections.size());
  for (const Detection& d : detections) {
    if (!d.box.valid()) throw InputError("tracker: detection box has non-positive size");
    if (d.source == DetectionSource::kDetector && d.confidence >= config_.confidence_threshold) {
      accepted.push_back(d);
    }
  }

  for (Track& track : tracks_) {
    track.kalman = filter_.predict(track.kalman);
    ++track.age;
    ++track.time_since_update;
  }

  const std::vector<Detection> candidates =
      config_.motion_fusion ? fuse_proposals(accepted, tracks_, config_) : accepted;
  const AssociationResult assoc = associate(tracks_, candidates, config_, filter_);

  for (const auto& [t, c] : assoc.matches) {
    Track& track = tracks_[t];
    const Detection& cand = candidates[c];
    track.kalman = filter_.update(track.kalman, to_xyah(cand.box));
    if (cand.embedding) {
      if (track.has_gallery()) {
        Embedding blended = config_.gallery_smoothing * track.gallery +
                            (1.0 - config_.gallery_smoothing) * *cand.embedding;
        const double norm = blended.norm();
        if (norm > 0.0) track.gallery = blended / norm;
      } else {
        track.gallery = *cand.embedding;
      }
    }
    track.confidence = cand.confidence;
    ++track.hits;
    track.time_since_update = 0;
    if (track.state == TrackState::kTentative && track.hits >= config_.n_init) {
      track.state = TrackState::kConfirmed;
    }
  }

  for (std::size_t t : assoc.unmatched_tracks) {
    Track& track = tracks_[t];
    if (track.state == TrackState::kTentative || track.time_since_update > config_.max_age) {
      track.state = TrackState::kDeleted;
    }
  }

  for (std::size_t c : assoc.unmatched_candidates) {
    if (candidates[c].source == DetectionSource::kDetector) start_track(candidates[c]);
  }

  std::erase_if(tracks_, [](const Track& t) { return t.state == TrackState::kDeleted; });

  std::vector<TrackOutput> outputs;
  for (const Track& track : tracks_) {
    if (!track.confirmed() || track.time_since_update != 0) continue;
    outputs.push_back({track.track_id, to_tlwh(track.kalman.box()), track.confidence,
                       DetectionSource::kDetector});
  }
  // Mark outputs sustained by a motion proposal.
  for (const auto& [t, c] : assoc.matches) {
    if (candidates[c].source != DetectionSource::kMotion) continue;
    for (auto& out : outputs) {
      if (out.track_id == candidates[c].origin_track) out.source = DetectionSource::kMotion;
    }
  }
  std::sort(outputs.begin(), outputs.end(),
            [](const TrackOutput& a, const TrackOutput& b) { return a.track_id < b.track_id; });
  return outputs;
}

}  // namespace hoimtrack
