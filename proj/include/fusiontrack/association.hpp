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

#ifndef FUSIONTRACK__ASSOCIATION_HPP_
#define FUSIONTRACK__ASSOCIATION_HPP_

#include "fusiontrack/common.hpp"
#include "fusiontrack/rig_geometry.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numeric>
#include <optional>
#include <span>
#include <vector>

namespace fusiontrack
{

/// Packed row-major bitmask, one bit per pixel.
class Bitmask
{
public:
  Bitmask() = default;
  Bitmask(int width, int height)
  : width_(width), height_(height),
    words_((static_cast<std::size_t>(width) * static_cast<std::size_t>(height) + 63) / 64, 0)
  {
  }

  int width() const { return width_; }
  int height() const { return height_; }

  bool test(int x, int y) const
  {
    const std::size_t i = index(x, y);
    return (words_[i >> 6] >> (i & 63)) & 1U;
  }

  void set(int x, int y, bool value = true)
  {
    const std::size_t i = index(x, y);
    const std::uint64_t bit = std::uint64_t{1} << (i & 63);
    if (value) {
      words_[i >> 6] |= bit;
    } else {
      words_[i >> 6] &= ~bit;
    }
  }

  std::size_t count() const
  {
    std::size_t n = 0;
    for (auto w : words_) {
      n += static_cast<std::size_t>(std::popcount(w));
    }
    return n;
  }

  bool operator==(const Bitmask & other) const = default;

private:
  std::size_t index(int x, int y) const
  {
    return static_cast<std::size_t>(y) * static_cast<std::size_t>(width_) +
           static_cast<std::size_t>(x);
  }

  int width_ = 0;
  int height_ = 0;
  std::vector<std::uint64_t> words_;
};

/// Per-camera object hypothesis. `box` has integral corners; `mask` spans the box extent.
struct Detection2D
{
  int camera_id = 0;
  ClassLabel class_label = ClassLabel::Car;
  double score = 1.0;
  PixelRect box;
  Bitmask mask;

  int box_x0() const { return static_cast<int>(std::lround(box.x0)); }
  int box_y0() const { return static_cast<int>(std::lround(box.y0)); }

  /// True when image pixel (px, py) is a set mask pixel.
  bool mask_at(int px, int py) const
  {
    const int mx = px - box_x0();
    const int my = py - box_y0();
    if (mx < 0 || my < 0 || mx >= mask.width() || my >= mask.height()) {
      return false;
    }
    return mask.test(mx, my);
  }

  void validate() const
  {
    if (!(score >= 0.0 && score <= 1.0)) {
      throw InvalidDetectionError("detection score outside [0, 1]");
    }
    if (!(box.width() > 0.0) || !(box.height() > 0.0)) {
      throw InvalidDetectionError("degenerate detection box");
    }
    if (mask.width() != static_cast<int>(std::lround(box.width())) ||
        mask.height() != static_cast<int>(std::lround(box.height()))) {
      throw InvalidDetectionError("mask extent does not match detection box");
    }
    if (mask.count() == 0) {
      throw InvalidDetectionError("detection mask is empty");
    }
  }
};

enum class AssociationSource { Mask, Frustum };

struct InstancePoints
{
  std::size_t detection_index = 0;
  int camera_id = 0;
  ClassLabel class_label = ClassLabel::Car;
  double score = 0.0;
  std::vector<Eigen::Vector3d> points;
  std::vector<std::size_t> point_indices;  // into the source cloud, ascending
  AssociationSource source = AssociationSource::Mask;
};

struct AssociationParams
{
  std::size_t min_points = 5;
  double near = 0.5;
  double far = 200.0;
};

namespace detail
{
inline std::vector<InstancePoints> collect_instances(
  const PointCloud & cloud, std::span<const Detection2D> detections,
  const std::vector<std::vector<std::size_t>> & members, const AssociationParams & params,
  AssociationSource source)
{
  std::vector<InstancePoints> out;
  for (std::size_t d = 0; d < detections.size(); ++d) {
    if (members[d].size() < params.min_points) {
      continue;
    }
    InstancePoints inst;
    inst.detection_index = d;
    inst.camera_id = detections[d].camera_id;
    inst.class_label = detections[d].class_label;
    inst.score = detections[d].score;
    inst.source = source;
    inst.point_indices = members[d];
    inst.points.reserve(members[d].size());
    for (auto i : members[d]) {
      inst.points.push_back(cloud.points[i]);
    }
    out.push_back(std::move(inst));
  }
  return out;
}
}  // namespace detail

/// Assigns each point to the detection whose mask covers its pixel. Overlapping masks
/// resolve to the smallest mask area (then the lowest detection index).
inline std::vector<InstancePoints> associate_mask(
  const PointCloud & cloud, std::span<const Detection2D> detections, const CameraModel & cam,
  const AssociationParams & params = {})
{
  if (cloud.empty() || detections.empty()) {
    return {};
  }
  // Paint masks from largest to smallest so the smallest owner wins each pixel.
  std::vector<std::size_t> order(detections.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::vector<std::size_t> area(detections.size());
  for (std::size_t d = 0; d < detections.size(); ++d) {
    area[d] = detections[d].mask.count();
  }
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    if (area[a] != area[b]) {
      return area[a] > area[b];
    }
    return a > b;
  });

  const std::size_t w = static_cast<std::size_t>(cam.width);
  std::vector<std::int32_t> owner(w * static_cast<std::size_t>(cam.height), -1);
  for (auto d : order) {
    const auto & det = detections[d];
    const int x0 = det.box_x0();
    const int y0 = det.box_y0();
    for (int my = 0; my < det.mask.height(); ++my) {
      const int py = y0 + my;
      if (py < 0 || py >= cam.height) {
        continue;
      }
      for (int mx = 0; mx < det.mask.width(); ++mx) {
        const int px = x0 + mx;
        if (px < 0 || px >= cam.width || !det.mask.test(mx, my)) {
          continue;
        }
        owner[static_cast<std::size_t>(py) * w + static_cast<std::size_t>(px)] =
          static_cast<std::int32_t>(d);
      }
    }
  }

  std::vector<std::vector<std::size_t>> members(detections.size());
  for (std::size_t i = 0; i < cloud.points.size(); ++i) {
    const auto proj = project_point(cloud.points[i], cam);
    if (!proj || proj->depth < params.near || proj->depth > params.far) {
      continue;
    }
    const auto px = static_cast<std::size_t>(proj->u);
    const auto py = static_cast<std::size_t>(proj->v);
    const std::int32_t d = owner[py * w + px];
    if (d >= 0) {
      members[static_cast<std::size_t>(d)].push_back(i);
    }
  }
  return detail::collect_instances(cloud, detections, members, params, AssociationSource::Mask);
}

/// Per detection, the indices of all points inside its box frustum (before conflict resolution).
inline std::vector<std::vector<std::size_t>> frustum_candidates(
  const PointCloud & cloud, std::span<const Detection2D> detections, const CameraModel & cam,
  const AssociationParams & params = {})
{
  std::vector<std::vector<std::size_t>> members(detections.size());
  std::vector<std::optional<Frustum>> frustums;
  frustums.reserve(detections.size());
  for (const auto & det : detections) {
    if (det.box.width() > 0.0 && det.box.height() > 0.0) {
      frustums.emplace_back(build_frustum(det.box, cam, params.near, params.far));
    } else {
      frustums.emplace_back(std::nullopt);
    }
  }
  for (std::size_t i = 0; i < cloud.points.size(); ++i) {
    for (std::size_t d = 0; d < detections.size(); ++d) {
      if (frustums[d] && frustums[d]->contains(cloud.points[i])) {
        members[d].push_back(i);
      }
    }
  }
  return members;
}

/// Assigns points by box-frustum membership. A point inside several frustums goes to the
/// detection with the smallest mean candidate depth (then the lowest index).
inline std::vector<InstancePoints> associate_frustum(
  const PointCloud & cloud, std::span<const Detection2D> detections, const CameraModel & cam,
  const AssociationParams & params = {})
{
  if (cloud.empty() || detections.empty()) {
    return {};
  }
  const auto candidates = frustum_candidates(cloud, detections, cam, params);

  std::vector<double> mean_depth(detections.size(), std::numeric_limits<double>::infinity());
  std::vector<std::uint8_t> hits(cloud.points.size(), 0);
  std::vector<std::int32_t> best(cloud.points.size(), -1);
  for (std::size_t d = 0; d < detections.size(); ++d) {
    if (candidates[d].empty()) {
      continue;
    }
    double sum = 0.0;
    for (auto i : candidates[d]) {
      sum += cam.extrinsic.apply(cloud.points[i]).z();
    }
    mean_depth[d] = sum / static_cast<double>(candidates[d].size());
  }
  for (std::size_t d = 0; d < detections.size(); ++d) {
    for (auto i : candidates[d]) {
      const std::int32_t cur = best[i];
      if (cur < 0 || mean_depth[d] < mean_depth[static_cast<std::size_t>(cur)]) {
        best[i] = static_cast<std::int32_t>(d);
      }
      hits[i] = 1;
    }
  }
  std::vector<std::vector<std::size_t>> members(detections.size());
  for (std::size_t i = 0; i < cloud.points.size(); ++i) {
    if (hits[i]) {
      members[static_cast<std::size_t>(best[i])].push_back(i);
    }
  }
  return detail::collect_instances(
    cloud, detections, members, params, AssociationSource::Frustum);
}

// --- Mask run-length encoding ---------------------------------------------------

/// Row-major run lengths over the mask, alternating unset/set and starting with unset.
inline std::vector<std::uint32_t> encode_rle(const Bitmask & mask)
{
  std::vector<std::uint32_t> runs;
  bool current = false;
  std::uint32_t run = 0;
  for (int y = 0; y < mask.height(); ++y) {
    for (int x = 0; x < mask.width(); ++x) {
      const bool bit = mask.test(x, y);
      if (bit != current) {
        runs.push_back(run);
        run = 0;
        current = bit;
      }
      ++run;
    }
  }
  runs.push_back(run);
  return runs;
}

inline Bitmask decode_rle(std::span<const std::uint32_t> runs, int width, int height)
{
  Bitmask mask(width, height);
  const std::size_t total = static_cast<std::size_t>(width) * static_cast<std::size_t>(height);
  std::size_t pos = 0;
  bool value = false;
  for (auto run : runs) {
    if (pos + run > total) {
      throw InvalidDetectionError("mask run-length encoding exceeds box extent");
    }
    if (value) {
      for (std::size_t k = pos; k < pos + run; ++k) {
        mask.set(static_cast<int>(k % static_cast<std::size_t>(width)),
                 static_cast<int>(k / static_cast<std::size_t>(width)));
      }
    }
    pos += run;
    value = !value;
  }
  if (pos != total) {
    throw InvalidDetectionError("mask run-length encoding does not cover the box extent");
  }
  return mask;
}

}  // namespace fusiontrack

#endif  // FUSIONTRACK__ASSOCIATION_HPP_
