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

#ifndef FUSIONTRACK__BOX_ESTIMATION_HPP_
#define FUSIONTRACK__BOX_ESTIMATION_HPP_

#include "fusiontrack/association.hpp"
#include "fusiontrack/common.hpp"

#include <Eigen/Core>

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <span>
#include <stdexcept>
#include <unordered_map>
#include <vector>

namespace fusiontrack
{

/// Oriented cuboid; `size` is (length, width, height) with length along `yaw`.
struct Box3D
{
  Eigen::Vector3d center = Eigen::Vector3d::Zero();
  Eigen::Vector3d size = Eigen::Vector3d::Ones();
  double yaw = 0.0;
  ClassLabel class_label = ClassLabel::Car;
  double score = 1.0;
  int camera_id = 0;

  /// BEV footprint corners, counter-clockwise.
  std::array<Eigen::Vector2d, 4> bev_corners() const
  {
    const Eigen::Vector2d u(std::cos(yaw), std::sin(yaw));
    const Eigen::Vector2d v(-u.y(), u.x());
    const Eigen::Vector2d c = center.head<2>();
    const double hl = 0.5 * size.x();
    const double hw = 0.5 * size.y();
    return {c + hl * u + hw * v, c - hl * u + hw * v, c - hl * u - hw * v, c + hl * u - hw * v};
  }

  bool contains(const Eigen::Vector3d & p, double tol = 0.0) const
  {
    const Eigen::Vector2d d = p.head<2>() - center.head<2>();
    const double along = d.x() * std::cos(yaw) + d.y() * std::sin(yaw);
    const double across = -d.x() * std::sin(yaw) + d.y() * std::cos(yaw);
    return std::abs(along) <= 0.5 * size.x() + tol && std::abs(across) <= 0.5 * size.y() + tol &&
           std::abs(p.z() - center.z()) <= 0.5 * size.z() + tol;
  }
};

struct SizePrior
{
  ClassLabel class_label = ClassLabel::Car;
  Eigen::Vector3d mean_size = Eigen::Vector3d::Ones();
  Eigen::Vector3d min_size = Eigen::Vector3d::Ones();
  Eigen::Vector3d max_size = Eigen::Vector3d::Ones();

  static SizePrior around(ClassLabel label, const Eigen::Vector3d & mean, double spread = 0.4)
  {
    return {label, mean, mean * (1.0 - spread), mean * (1.0 + spread)};
  }

  void validate() const
  {
    if ((min_size.array() <= 0.0).any() || (min_size.array() > mean_size.array()).any() ||
        (mean_size.array() > max_size.array()).any()) {
      throw std::invalid_argument("size prior must satisfy 0 < min <= mean <= max");
    }
  }
};

struct SizePriors
{
  std::array<SizePrior, 3> by_class{
    SizePrior::around(ClassLabel::Car, {4.0, 1.8, 1.6}),
    SizePrior::around(ClassLabel::Pedestrian, {0.8, 0.8, 1.75}),
    SizePrior::around(ClassLabel::Cyclist, {1.8, 0.8, 1.75})};

  const SizePrior & operator[](ClassLabel label) const
  {
    return by_class[static_cast<std::size_t>(label)];
  }
  SizePrior & operator[](ClassLabel label) { return by_class[static_cast<std::size_t>(label)]; }
};

struct SegmentationParams
{
  double ground_margin = 0.15;
  double cluster_radius = 0.7;
};

class EmptyInstanceError : public std::runtime_error
{
public:
  EmptyInstanceError() : std::runtime_error("instance has no object points") {}
};

// --- Stage 1: point-wise object/noise separation -----------------------------

/// Drops ground returns and keeps the largest single-linkage cluster.
inline std::vector<Eigen::Vector3d> segment_instance(
  std::span<const Eigen::Vector3d> points, double ground_z, const SegmentationParams & params = {})
{
  std::vector<Eigen::Vector3d> above;
  above.reserve(points.size());
  for (const auto & p : points) {
    if (p.z() > ground_z + params.ground_margin) {
      above.push_back(p);
    }
  }
  if (above.empty()) {
    throw EmptyInstanceError();
  }

  const double r = params.cluster_radius;
  const double r2 = r * r;
  auto cell_of = [r](const Eigen::Vector3d & p) {
    return std::array<std::int64_t, 3>{
      static_cast<std::int64_t>(std::floor(p.x() / r)),
      static_cast<std::int64_t>(std::floor(p.y() / r)),
      static_cast<std::int64_t>(std::floor(p.z() / r))};
  };
  auto key_of = [](const std::array<std::int64_t, 3> & c) {
    return static_cast<std::uint64_t>((c[0] & 0x1FFFFF) << 42) ^
           static_cast<std::uint64_t>((c[1] & 0x1FFFFF) << 21) ^
           static_cast<std::uint64_t>(c[2] & 0x1FFFFF);
  };
  std::unordered_map<std::uint64_t, std::vector<std::uint32_t>> grid;
  grid.reserve(above.size());
  for (std::uint32_t i = 0; i < above.size(); ++i) {
    grid[key_of(cell_of(above[i]))].push_back(i);
  }

  // BFS flood fill; labels ordered by first point index
  std::vector<std::int32_t> label(above.size(), -1);
  std::vector<std::size_t> sizes;
  std::vector<std::uint32_t> queue;
  for (std::uint32_t seed = 0; seed < above.size(); ++seed) {
    if (label[seed] >= 0) {
      continue;
    }
    const auto id = static_cast<std::int32_t>(sizes.size());
    sizes.push_back(0);
    queue.assign(1, seed);
    label[seed] = id;
    while (!queue.empty()) {
      const std::uint32_t cur = queue.back();
      queue.pop_back();
      ++sizes.back();
      const auto c = cell_of(above[cur]);
      for (std::int64_t dx = -1; dx <= 1; ++dx) {
        for (std::int64_t dy = -1; dy <= 1; ++dy) {
          for (std::int64_t dz = -1; dz <= 1; ++dz) {
            const auto it = grid.find(key_of({c[0] + dx, c[1] + dy, c[2] + dz}));
            if (it == grid.end()) {
              continue;
            }
            for (auto j : it->second) {
              if (label[j] < 0 && (above[j] - above[cur]).squaredNorm() <= r2) {
                label[j] = id;
                queue.push_back(j);
              }
            }
          }
        }
      }
    }
  }
  const auto best = static_cast<std::int32_t>(
    std::max_element(sizes.begin(), sizes.end()) - sizes.begin());
  std::vector<Eigen::Vector3d> out;
  out.reserve(sizes[static_cast<std::size_t>(best)]);
  for (std::size_t i = 0; i < above.size(); ++i) {
    if (label[i] == best) {
      out.push_back(above[i]);
    }
  }
  return out;
}

// --- Stage 2: center estimate ---------------------------------------------------

inline Eigen::Vector3d estimate_center(std::span<const Eigen::Vector3d> points)
{
  if (points.empty()) {
    throw std::invalid_argument("estimate_center requires a non-empty point set");
  }
  Eigen::Vector3d sum = Eigen::Vector3d::Zero();
  for (const auto & p : points) {
    sum += p;
  }
  return sum / static_cast<double>(points.size());
}

// --- Stage 3: amodal box --------------------------------------------------------

inline double cross2(const Eigen::Vector2d & o, const Eigen::Vector2d & a, const Eigen::Vector2d & b)
{
  return (a.x() - o.x()) * (b.y() - o.y()) - (a.y() - o.y()) * (b.x() - o.x());
}

/// Convex hull (monotone chain), counter-clockwise, collinear points dropped.
inline std::vector<Eigen::Vector2d> convex_hull(std::vector<Eigen::Vector2d> pts)
{
  std::sort(pts.begin(), pts.end(), [](const auto & a, const auto & b) {
    return a.x() < b.x() || (a.x() == b.x() && a.y() < b.y());
  });
  pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
  if (pts.size() < 3) {
    return pts;
  }
  std::vector<Eigen::Vector2d> hull(2 * pts.size());
  std::size_t k = 0;
  for (const auto & p : pts) {
    while (k >= 2 && cross2(hull[k - 2], hull[k - 1], p) <= 0.0) {
      --k;
    }
    hull[k++] = p;
  }
  for (std::size_t i = pts.size() - 1, t = k + 1; i-- > 0;) {
    while (k >= t && cross2(hull[k - 2], hull[k - 1], pts[i]) <= 0.0) {
      --k;
    }
    hull[k++] = pts[i];
  }
  hull.resize(k - 1);
  return hull;
}

inline double polygon_area(std::span<const Eigen::Vector2d> poly)
{
  double a = 0.0;
  for (std::size_t i = 0; i < poly.size(); ++i) {
    const auto & p = poly[i];
    const auto & q = poly[(i + 1) % poly.size()];
    a += p.x() * q.y() - q.x() * p.y();
  }
  return 0.5 * a;
}

/// Rectangle in the plane; `axis` angle gives the direction of the first extent.
struct OrientedRect
{
  Eigen::Vector2d center = Eigen::Vector2d::Zero();
  double axis_angle = 0.0;
  double extent_u = 0.0;  // along axis
  double extent_v = 0.0;  // across axis

  double area() const { return extent_u * extent_v; }

  std::array<Eigen::Vector2d, 4> corners() const
  {
    const Eigen::Vector2d u(std::cos(axis_angle), std::sin(axis_angle));
    const Eigen::Vector2d v(-u.y(), u.x());
    const double hu = 0.5 * extent_u;
    const double hv = 0.5 * extent_v;
    return {center + hu * u + hv * v, center - hu * u + hv * v, center - hu * u - hv * v,
            center + hu * u - hv * v};
  }
};

/// Minimum-area enclosing rectangle of a CCW convex hull (>= 3 vertices) by rotating calipers.
inline OrientedRect min_area_rect(std::span<const Eigen::Vector2d> hull)
{
  const std::size_t n = hull.size();
  if (n < 3) {
    throw std::invalid_argument("min_area_rect requires a hull with at least 3 vertices");
  }
  auto edge_dir = [&](std::size_t i) {
    return (hull[(i + 1) % n] - hull[i]).normalized().eval();
  };

  // Caliper indices for the first edge.
  Eigen::Vector2d u = edge_dir(0);
  Eigen::Vector2d v(-u.y(), u.x());
  std::size_t i_max_u = 0;
  std::size_t i_min_u = 0;
  std::size_t i_max_v = 0;
  for (std::size_t k = 1; k < n; ++k) {
    if (hull[k].dot(u) > hull[i_max_u].dot(u)) i_max_u = k;
    if (hull[k].dot(u) < hull[i_min_u].dot(u)) i_min_u = k;
    if (hull[k].dot(v) > hull[i_max_v].dot(v)) i_max_v = k;
  }

  std::vector<OrientedRect> candidates;
  candidates.reserve(n);
  for (std::size_t e = 0; e < n; ++e) {
    u = edge_dir(e);
    v = Eigen::Vector2d(-u.y(), u.x());
    while (hull[(i_max_u + 1) % n].dot(u) > hull[i_max_u].dot(u)) i_max_u = (i_max_u + 1) % n;
    while (hull[(i_max_v + 1) % n].dot(v) > hull[i_max_v].dot(v)) i_max_v = (i_max_v + 1) % n;
    while (hull[(i_min_u + 1) % n].dot(u) < hull[i_min_u].dot(u)) i_min_u = (i_min_u + 1) % n;

    const double u0 = hull[i_min_u].dot(u);
    const double u1 = hull[i_max_u].dot(u);
    const double v0 = hull[e].dot(v);
    const double v1 = hull[i_max_v].dot(v);
    OrientedRect r;
    r.axis_angle = std::atan2(u.y(), u.x());
    r.extent_u = u1 - u0;
    r.extent_v = v1 - v0;
    r.center = 0.5 * (u0 + u1) * u + 0.5 * (v0 + v1) * v;
    candidates.push_back(r);
  }

  // The minimum is not always unique (every edge of an acute triangle ties).
  // Near-ties go to the most elongated rectangle, which does not depend on
  // where the hull starts, so the fit moves rigidly with the points.
  double min_area = std::numeric_limits<double>::infinity();
  for (const auto & r : candidates) min_area = std::min(min_area, r.area());
  const double tie = min_area * (1.0 + 1e-9);
  auto elongation = [](const OrientedRect & r) {
    return std::max(r.extent_u, r.extent_v) / std::max(std::min(r.extent_u, r.extent_v), 1e-300);
  };
  const OrientedRect * best = nullptr;
  for (const auto & r : candidates) {
    if (r.area() > tie) continue;
    if (best == nullptr || elongation(r) > elongation(*best)) best = &r;
  }
  return *best;
}

struct AmodalFitParams
{
  // BEV extents below this are treated as unobserved (a single visible face).
  double unobserved_extent = 0.3;
};

struct BoxFit
{
  Box3D box;
  bool low_confidence = false;
  OrientedRect visible_rect;  // min-area rectangle of the visible points, LiDAR frame
};

namespace detail
{
inline double prior_mismatch(double visible, double mean, double max, double unobserved)
{
  // A visible edge is either the full extent (squared relative error) or a truncated
  // view of it, which costs a flat amount. Longer than the class maximum is ruled out.
  constexpr double kTruncated = 0.25;
  if (visible < unobserved) {
    return 0.0;
  }
  if (visible > max) {
    return std::numeric_limits<double>::infinity();
  }
  const double r = (visible - mean) / mean;
  return std::min(r * r, kTruncated);
}

/// Places an extent of `target` along an axis where the visible interval is [lo, hi].
/// Growth goes away from `viewpoint_coord`; shrinking stays centered.
inline double completed_center(double lo, double hi, double target, double viewpoint_coord)
{
  const double visible = hi - lo;
  if (target <= visible) {
    return 0.5 * (lo + hi);
  }
  if (viewpoint_coord <= 0.5 * (lo + hi)) {
    return lo + 0.5 * target;
  }
  return hi - 0.5 * target;
}
}  // namespace detail

/// Fits an oriented box to object points. The BEV footprint comes from the minimum-area
/// rectangle; extents are completed and clamped with the class size prior.
inline BoxFit fit_amodal_box(
  std::span<const Eigen::Vector3d> points, const SizePrior & prior,
  const Eigen::Vector3d & viewpoint = Eigen::Vector3d::Zero(), const AmodalFitParams & params = {})
{
  const Eigen::Vector3d centroid = estimate_center(points);
  double z_min = std::numeric_limits<double>::infinity();
  double z_max = -std::numeric_limits<double>::infinity();
  std::vector<Eigen::Vector2d> local;
  local.reserve(points.size());
  for (const auto & p : points) {
    local.push_back((p - centroid).head<2>());
    z_min = std::min(z_min, p.z());
    z_max = std::max(z_max, p.z());
  }
  const auto hull = convex_hull(local);

  BoxFit fit;
  fit.box.class_label = prior.class_label;
  if (hull.size() < 3 || std::abs(polygon_area(hull)) <= 1e-9) {
    fit.box.center = centroid;
    fit.box.size = prior.mean_size;
    fit.box.yaw = 0.0;
    fit.box.score = 0.5;
    fit.low_confidence = true;
    fit.visible_rect.center = centroid.head<2>();
    return fit;
  }

  OrientedRect rect = min_area_rect(hull);
  const Eigen::Vector2d view_local = (viewpoint - centroid).head<2>();

  // Pick which rectangle axis carries the length: the assignment that agrees with the prior,
  // falling back to the longer edge.
  const auto cost = [&](double length, double width) {
    return detail::prior_mismatch(length, prior.mean_size.x(), prior.max_size.x(), params.unobserved_extent) +
           detail::prior_mismatch(width, prior.mean_size.y(), prior.max_size.y(), params.unobserved_extent);
  };
  const double cost_u = cost(rect.extent_u, rect.extent_v);
  const double cost_v = cost(rect.extent_v, rect.extent_u);
  bool length_along_u = rect.extent_u >= rect.extent_v;
  if (std::isfinite(cost_u) || std::isfinite(cost_v)) {
    if (std::abs(cost_u - cost_v) > 1e-12) length_along_u = cost_u < cost_v;
  }
  if (!length_along_u) {
    rect.axis_angle += 0.5 * kPi;
    std::swap(rect.extent_u, rect.extent_v);
  }

  fit.visible_rect = rect;
  fit.visible_rect.center += centroid.head<2>();

  const Eigen::Vector2d u(std::cos(rect.axis_angle), std::sin(rect.axis_angle));
  const Eigen::Vector2d v(-u.y(), u.x());
  const std::array<double, 2> visible{rect.extent_u, rect.extent_v};
  const std::array<Eigen::Vector2d, 2> axes{u, v};

  Eigen::Vector2d center_local = Eigen::Vector2d::Zero();
  Eigen::Vector3d size;
  for (int k = 0; k < 2; ++k) {
    const double mid = rect.center.dot(axes[static_cast<std::size_t>(k)]);
    const double lo = mid - 0.5 * visible[static_cast<std::size_t>(k)];
    const double hi = mid + 0.5 * visible[static_cast<std::size_t>(k)];
    // An extent shorter than the class minimum cannot be the whole object: it is a face
    // seen end-on or a partial view, so complete it to the prior mean. Others clamp.
    const double seen = visible[static_cast<std::size_t>(k)];
    const double target = seen < std::max(params.unobserved_extent, prior.min_size[k])
                            ? prior.mean_size[k]
                            : std::clamp(seen, prior.min_size[k], prior.max_size[k]);
    const double c = detail::completed_center(lo, hi, target, view_local.dot(axes[static_cast<std::size_t>(k)]));
    center_local += c * axes[static_cast<std::size_t>(k)];
    size[k] = target;
  }
  const double height = std::clamp(z_max - z_min, prior.min_size.z(), prior.max_size.z());
  size.z() = height;

  fit.box.center = Eigen::Vector3d(
    centroid.x() + center_local.x(), centroid.y() + center_local.y(), 0.5 * (z_min + z_max));
  fit.box.size = size;
  double yaw = wrap_angle(rect.axis_angle);
  if (yaw <= -0.5 * kPi) {
    yaw += kPi;
  } else if (yaw > 0.5 * kPi) {
    yaw -= kPi;
  }
  fit.box.yaw = yaw;
  fit.box.score = 1.0;
  return fit;
}

/// Pluggable box estimator; a learned model can replace the geometric stages.
class BoxEstimator
{
public:
  virtual ~BoxEstimator() = default;
  virtual std::optional<Box3D> estimate(
    const InstancePoints & instance, const SizePriors & priors, double ground_z,
    const Eigen::Vector3d & viewpoint) const = 0;
};

class GeometricBoxEstimator : public BoxEstimator
{
public:
  GeometricBoxEstimator() = default;
  GeometricBoxEstimator(SegmentationParams seg, AmodalFitParams fit) : seg_(seg), fit_(fit) {}

  std::optional<Box3D> estimate(
    const InstancePoints & instance, const SizePriors & priors, double ground_z,
    const Eigen::Vector3d & viewpoint = Eigen::Vector3d::Zero()) const override
  {
    std::vector<Eigen::Vector3d> object;
    try {
      object = segment_instance(instance.points, ground_z, seg_);
    } catch (const EmptyInstanceError &) {
      return std::nullopt;
    }
    BoxFit fit = fit_amodal_box(object, priors[instance.class_label], viewpoint, fit_);
    Box3D box = fit.box;
    box.class_label = instance.class_label;
    box.camera_id = instance.camera_id;
    box.score = instance.score * (fit.low_confidence ? 0.5 : 1.0);
    return box;
  }

private:
  SegmentationParams seg_;
  AmodalFitParams fit_;
};

/// Segment, center and fit in one call; absent when segmentation leaves nothing.
inline std::optional<Box3D> estimate(
  const InstancePoints & instance, const SizePriors & priors, double ground_z,
  const Eigen::Vector3d & viewpoint = Eigen::Vector3d::Zero(), const SegmentationParams & seg = {})
{
  return GeometricBoxEstimator(seg, {}).estimate(instance, priors, ground_z, viewpoint);
}

}  // namespace fusiontrack

#endif  // FUSIONTRACK__BOX_ESTIMATION_HPP_
