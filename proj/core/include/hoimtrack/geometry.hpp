#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace hoimtrack {

/// Axis-aligned box as (left, top, width, height) in continuous pixels.
struct BoxTLWH {
  double left = 0.0;
  double top = 0.0;
  double width = 0.0;
  double height = 0.0;

  double right() const { return left + width; }
  double bottom() const { return top + height; }
  double area() const { return width * height; }
  bool valid() const { return width > 0.0 && height > 0.0; }

  bool operator==(const BoxTLWH&) const = default;
};

/// Kalman measurement parameterization: center, aspect (w/h), height.
struct BoxXYAH {
  double center_x = 0.0;
  double center_y = 0.0;
  double aspect = 0.0;
  double height = 0.0;

  bool valid() const { return aspect > 0.0 && height > 0.0; }

  bool operator==(const BoxXYAH&) const = default;
};

BoxXYAH to_xyah(const BoxTLWH& box);
BoxTLWH to_tlwh(const BoxXYAH& box);

/// Intersection over union. Boxes that only share an edge have IoU 0.
double iou(const BoxTLWH& a, const BoxTLWH& b);

/// Greedy non-maximum suppression. Candidates are visited by descending score
/// (lower index first on ties); a candidate is dropped when its IoU with an
/// already kept box exceeds `iou_threshold`. Returns kept indices in
/// ascending order.
std::vector<std::size_t> nms(std::span<const BoxTLWH> boxes,
                             std::span<const double> scores,
                             double iou_threshold);

}  // namespace hoimtrack
