#pragma once

#include <cstddef>
#include <string>
#include <utility>
#include <vector>

#include "hoimtrack/geometry.hpp"

namespace hoimtrack {

struct LabeledBox {
  int id = 0;
  BoxTLWH box;
  double confidence = 1.0;

  bool operator==(const LabeledBox&) const = default;
};

using FrameBoxes = std::vector<LabeledBox>;

/// Per-frame boxes of one side (ground truth or predictions); frames[i]
/// holds frame i + 1.
struct Sequence {
  std::vector<FrameBoxes> frames;

  std::size_t frame_count() const { return frames.size(); }
  std::size_t box_count() const;
  bool operator==(const Sequence&) const = default;
};

struct SequenceRecord {
  Sequence gt;
  Sequence predictions;
};

struct ClearMotResult {
  double mota = 0.0;
  std::size_t fp = 0;
  std::size_t fn = 0;
  std::size_t idsw = 0;
  std::size_t num_gt = 0;
  std::size_t matches = 0;
  // Logged extras, outside the report surface.
  double motp = 0.0;  ///< mean IoU over matches
  std::size_t fragmentations = 0;
  std::size_t mostly_tracked = 0;
  std::size_t mostly_lost = 0;
  /// (gt id, prediction id) pairs per frame.
  std::vector<std::vector<std::pair<int, int>>> match_log;
};

struct IdentityResult {
  double idf1 = 0.0;
  double idp = 0.0;
  double idr = 0.0;
  std::size_t idtp = 0;
  std::size_t idfp = 0;
  std::size_t idfn = 0;
};

/// The five benchmark metrics plus the ground-truth count.
struct MetricsReport {
  double mota = 0.0;
  double idf1 = 0.0;
  std::size_t idsw = 0;
  std::size_t fp = 0;
  std::size_t fn = 0;
  std::size_t num_gt = 0;

  bool operator==(const MetricsReport&) const = default;
};

inline constexpr double kDefaultMatchIou = 0.5;

/// CLEAR MOT accounting. Pairings from the previous frame that still overlap
/// at >= iou_threshold are kept; the rest are matched by maximum IoU.
/// Throws InputError when there is no ground truth.
ClearMotResult clear_mot(const SequenceRecord& record, double iou_threshold = kDefaultMatchIou);

/// Identity metrics under the best global GT-to-prediction id bijection.
IdentityResult identity_metrics(const SequenceRecord& record,
                                double iou_threshold = kDefaultMatchIou);

inline double idf1(const SequenceRecord& record, double iou_threshold = kDefaultMatchIou) {
  return identity_metrics(record, iou_threshold).idf1;
}

MetricsReport evaluate(const SequenceRecord& record, double iou_threshold = kDefaultMatchIou);

/// False negatives a tracker confirming after `n_init` hits cannot avoid: GT
/// boxes in the first n_init - 1 frames of each identity's first appearance
/// that went unmatched.
std::size_t warmup_false_negatives(const SequenceRecord& record, const ClearMotResult& result,
                                   int n_init);

/// MOTA with the warm-up false negatives removed from both FN and num_gt.
double mota_excluding_warmup(const ClearMotResult& result, std::size_t warmup_fn);

/// JSON object with exactly: mota, idf1, idsw, fp, fn, num_gt.
std::string to_json(const MetricsReport& report);
MetricsReport report_from_json(const std::string& text);

}  // namespace hoimtrack
