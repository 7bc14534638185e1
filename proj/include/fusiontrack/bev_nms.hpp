// Copyright 2026 The FusionTrack Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef FUSIONTRACK__BEV_NMS_HPP_
#define FUSIONTRACK__BEV_NMS_HPP_

#include "fusiontrack/box_estimation.hpp"
#include "fusiontrack/rig_geometry.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <span>
#include <vector>

namespace fusiontrack
{

struct BevRect
{
  double x_min = 0.0;
  double y_min = 0.0;
  double x_max = 0.0;
  double y_max = 0.0;

  double area() const { return (x_max - x_min) * (y_max - y_min); }
};

inline BevRect bev_footprint_aabb(const Box3D & box)
{
  BevRect r{
    std::numeric_limits<double>::infinity(), std::numeric_limits<double>::infinity(),
    -std::numeric_limits<double>::infinity(), -std::numeric_limits<double>::infinity()};
  for (const auto & c : box.bev_corners()) {
    r.x_min = std::min(r.x_min, c.x());
    r.y_min = std::min(r.y_min, c.y());
    r.x_max = std::max(r.x_max, c.x());
    r.y_max = std::max(r.y_max, c.y());
  }
  return r;
}

inline double aabb_iou(const BevRect & a, const BevRect & b)
{
  const double ix = std::max(0.0, std::min(a.x_max, b.x_max) - std::max(a.x_min, b.x_min));
  const double iy = std::max(0.0, std::min(a.y_max, b.y_max) - std::max(a.y_min, b.y_min));
  const double inter = ix * iy;
  const double uni = a.area() + b.area() - inter;
  return uni > 0.0 ? inter / uni : 0.0;
}

struct NmsParams
{
  double iou_threshold = 0.3;
};

/// Per-class greedy NMS on BEV axis-aligned footprints, applied only to boxes whose center
/// azimuth lies inside one of `sectors`. Surviving boxes keep their input order.
inline std::vector<Box3D> suppress(
  std::span<const Box3D> boxes, std::span<const AzimuthInterval> sectors,
  double iou_threshold = NmsParams{}.iou_threshold)
{
  const std::size_t n = boxes.size();
  std::vector<bool> eligible(n, false);
  std::vector<bool> removed(n, false);
  std::vector<BevRect> rects(n);
  std::vector<std::size_t> order;
  for (std::size_t i = 0; i < n; ++i) {
    const double az = std::atan2(boxes[i].center.y(), boxes[i].center.x());
    eligible[i] = std::any_of(
      sectors.begin(), sectors.end(), [az](const AzimuthInterval & s) { return s.contains(az); });
    if (eligible[i]) {
      rects[i] = bev_footprint_aabb(boxes[i]);
      order.push_back(i);
    }
  }
  auto range_of = [&](std::size_t i) { return boxes[i].center.head<2>().norm(); };
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    if (boxes[a].score != boxes[b].score) return boxes[a].score > boxes[b].score;
    if (range_of(a) != range_of(b)) return range_of(a) < range_of(b);
    if (boxes[a].camera_id != boxes[b].camera_id) return boxes[a].camera_id < boxes[b].camera_id;
    return a < b;
  });
  for (std::size_t k = 0; k < order.size(); ++k) {
    const std::size_t keep = order[k];
    if (removed[keep]) {
      continue;
    }
    for (std::size_t m = k + 1; m < order.size(); ++m) {
      const std::size_t other = order[m];
      if (!removed[other] && boxes[other].class_label == boxes[keep].class_label &&
          aabb_iou(rects[keep], rects[other]) > iou_threshold) {
        removed[other] = true;
      }
    }
  }
  std::vector<Box3D> out;
  out.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    if (!removed[i]) {
      out.push_back(boxes[i]);
    }
  }
  return out;
}

inline std::vector<Box3D> suppress(
  std::span<const Box3D> boxes, const SensorRig & rig, double iou_threshold = NmsParams{}.iou_threshold)
{
  const auto sectors = camera_overlap_sectors(rig);
  return suppress(boxes, sectors, iou_threshold);
}

}  // namespace fusiontrack

#endif  // FUSIONTRACK__BEV_NMS_HPP_
