#include "hoimtrack/geometry.hpp"

#include <algorithm>
#include <numeric>

#include "hoimtrack/errors.hpp"

namespace hoimtrack {

BoxXYAH to_xyah(const BoxTLWH& box) {
  return {box.left + box.width / 2.0, box.top + box.height / 2.0,
          box.width / box.height, box.height};
}

BoxTLWH to_tlwh(const BoxXYAH& box) {
  const double width = box.aspect * box.height;
  return {box.center_x - width / 2.0, box.center_y - box.height / 2.0, width,
          box.height};
}

namespace {

// Length of the overlap of [l1, l1 + w1] and [l2, l2 + w2]. Containment
// returns the inner length itself, so identical boxes overlap exactly.
double overlap(double l1, double w1, double l2, double w2) {
  const double r1 = l1 + w1;
  const double r2 = l2 + w2;
  if (l2 >= l1 && r2 <= r1) return w2;
  if (l1 >= l2 && r1 <= r2) return w1;
  return std::min(r1, r2) - std::max(l1, l2);
}

}  // namespace

double iou(const BoxTLWH& a, const BoxTLWH& b) {
  const double iw = overlap(a.left, a.width, b.left, b.width);
  const double ih = overlap(a.top, a.height, b.top, b.height);
  if (iw <= 0.0 || ih <= 0.0) return 0.0;
  const double inter = iw * ih;
  const double uni = a.area() + b.area() - inter;
  if (uni <= 0.0) return 0.0;
  return std::clamp(inter / uni, 0.0, 1.0);
}

std::vector<std::size_t> nms(std::span<const BoxTLWH> boxes,
                             std::span<const double> scores,
                             double iou_threshold) {
  if (boxes.size() != scores.size()) {
    throw InputError("nms: boxes and scores differ in length");
  }
  if (!(iou_threshold >= 0.0 && iou_threshold <= 1.0)) {
    throw InputError("nms: iou_threshold must lie in [0, 1]");
  }
  std::vector<std::size_t> order(boxes.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return scores[a] > scores[b];
  });

  std::vector<std::size_t> kept;
  for (std::size_t idx : order) {
    const bool suppressed = std::any_of(kept.begin(), kept.end(), [&](std::size_t k) {
      return iou(boxes[idx], boxes[k]) > iou_threshold;
    });
    if (!suppressed) kept.push_back(idx);
  }
  std::sort(kept.begin(), kept.end());
  return kept;
}

}  // namespace hoimtrack
