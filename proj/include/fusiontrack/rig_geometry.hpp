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

#ifndef FUSIONTRACK__RIG_GEOMETRY_HPP_
#define FUSIONTRACK__RIG_GEOMETRY_HPP_

#include "fusiontrack/common.hpp"

#include <Eigen/Core>
#include <Eigen/Geometry>

#include <algorithm>
#include <array>
#include <cmath>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

// Frame conventions:
//   LiDAR / vehicle frames: x forward, y left, z up.
//   Camera frames: z forward (optical axis), x right, y down.

namespace fusiontrack
{

/// Rigid transform. `apply` maps points from the source frame into the target frame.
struct Pose
{
  Eigen::Vector3d translation = Eigen::Vector3d::Zero();
  Eigen::Quaterniond rotation = Eigen::Quaterniond::Identity();

  static Pose identity() { return {}; }

  static Pose from_matrix(const Eigen::Matrix3d & r, const Eigen::Vector3d & t)
  {
    return {t, Eigen::Quaterniond(r).normalized()};
  }

  /// Planar pose: rotation about +z by `yaw`.
  static Pose from_xyz_yaw(double x, double y, double z, double yaw)
  {
    return {
      Eigen::Vector3d(x, y, z), Eigen::Quaterniond(Eigen::AngleAxisd(yaw, Eigen::Vector3d::UnitZ()))};
  }

  Eigen::Matrix3d rotation_matrix() const { return rotation.toRotationMatrix(); }

  Eigen::Vector3d apply(const Eigen::Vector3d & p) const { return rotation * p + translation; }

  Pose inverse() const
  {
    const Eigen::Quaterniond inv = rotation.conjugate();
    return {-(inv * translation), inv};
  }

  /// Composition: (a * b).apply(p) == a.apply(b.apply(p)).
  Pose operator*(const Pose & rhs) const
  {
    return {rotation * rhs.translation + translation, (rotation * rhs.rotation).normalized()};
  }

  /// Heading of the rotated x axis projected on the xy plane.
  double yaw() const
  {
    const Eigen::Vector3d x_axis = rotation * Eigen::Vector3d::UnitX();
    return std::atan2(x_axis.y(), x_axis.x());
  }

  bool is_valid(double tol = 1e-9) const
  {
    if (!translation.allFinite() || !rotation.coeffs().allFinite()) {
      return false;
    }
    const Eigen::Matrix3d r = rotation_matrix();
    return (r.transpose() * r - Eigen::Matrix3d::Identity()).cwiseAbs().maxCoeff() <= tol &&
           std::abs(r.determinant() - 1.0) <= tol;
  }
};

/// Closed pixel rectangle [x0, x1] x [y0, y1] in continuous image coordinates.
/// Pixel (i, j) covers [i, i+1) x [j, j+1).
struct PixelRect
{
  double x0 = 0.0;
  double y0 = 0.0;
  double x1 = 0.0;
  double y1 = 0.0;

  double width() const { return x1 - x0; }
  double height() const { return y1 - y0; }
  bool contains(double u, double v) const { return u >= x0 && u <= x1 && v >= y0 && v <= y1; }
};

struct Projection
{
  double u = 0.0;
  double v = 0.0;
  double depth = 0.0;  // z in the camera frame
};

struct CameraModel
{
  double fx = 0.0;
  double fy = 0.0;
  double cx = 0.0;
  double cy = 0.0;
  int width = 0;
  int height = 0;
  double hfov_deg = 0.0;
  Pose extrinsic;  // LiDAR frame -> camera frame

  static double hfov_from_intrinsics(double fx, int width)
  {
    return rad2deg(2.0 * std::atan(0.5 * static_cast<double>(width) / fx));
  }

  static CameraModel make(
    double fx, double fy, double cx, double cy, int width, int height, const Pose & extrinsic)
  {
    CameraModel cam{fx, fy, cx, cy, width, height, hfov_from_intrinsics(fx, width), extrinsic};
    cam.validate();
    return cam;
  }

  void validate() const
  {
    if (!(fx > 0.0) || !(fy > 0.0)) {
      throw std::invalid_argument("camera focal lengths must be positive");
    }
    if (width <= 0 || height <= 0) {
      throw std::invalid_argument("camera image size must be positive");
    }
    if (!(cx > 0.0 && cx < width) || !(cy > 0.0 && cy < height)) {
      throw std::invalid_argument("camera principal point must lie inside the image");
    }
    if (std::abs(hfov_deg - hfov_from_intrinsics(fx, width)) > 0.5) {
      throw std::invalid_argument("camera hfov inconsistent with fx and width");
    }
    if (!extrinsic.is_valid(1e-9)) {
      throw std::invalid_argument("camera extrinsic rotation is not orthonormal");
    }
  }

  /// Optical center expressed in the LiDAR frame.
  Eigen::Vector3d center_in_lidar() const { return extrinsic.inverse().translation; }

  /// Azimuth (LiDAR frame) of the optical axis.
  double optical_axis_azimuth() const
  {
    const Eigen::Vector3d axis = extrinsic.rotation.conjugate() * Eigen::Vector3d::UnitZ();
    return std::atan2(axis.y(), axis.x());
  }

  PixelRect image_rect() const
  {
    return {0.0, 0.0, static_cast<double>(width), static_cast<double>(height)};
  }
};

/// Camera looking horizontally along `azimuth` (LiDAR frame), optical center at `center`.
inline Pose level_camera_extrinsic(double azimuth, const Eigen::Vector3d & center)
{
  const double c = std::cos(azimuth);
  const double s = std::sin(azimuth);
  Eigen::Matrix3d r;
  r.row(0) = Eigen::RowVector3d(s, -c, 0.0);    // camera x: right
  r.row(1) = Eigen::RowVector3d(0.0, 0.0, -1.0);  // camera y: down
  r.row(2) = Eigen::RowVector3d(c, s, 0.0);     // camera z: forward
  return Pose::from_matrix(r, -(r * center));
}

struct LidarModel
{
  int n_layers = 32;
  std::vector<double> vertical_angles_deg;
  double horizontal_resolution_deg = 0.1;
  double max_range = 200.0;
  double range_noise_sigma = 0.03;

  static std::vector<double> uniform_angles(int n_layers, double min_deg, double max_deg)
  {
    std::vector<double> angles(static_cast<std::size_t>(n_layers));
    for (int i = 0; i < n_layers; ++i) {
      angles[static_cast<std::size_t>(i)] =
        n_layers == 1 ? min_deg : min_deg + (max_deg - min_deg) * i / (n_layers - 1);
    }
    return angles;
  }

  int columns() const
  {
    return static_cast<int>(std::lround(360.0 / horizontal_resolution_deg));
  }

  double min_vertical_spacing_deg() const
  {
    double best = 180.0;
    for (std::size_t i = 1; i < vertical_angles_deg.size(); ++i) {
      best = std::min(best, vertical_angles_deg[i] - vertical_angles_deg[i - 1]);
    }
    return best;
  }

  void validate() const
  {
    if (n_layers <= 0 || vertical_angles_deg.size() != static_cast<std::size_t>(n_layers)) {
      throw std::invalid_argument("lidar vertical angle count must equal n_layers");
    }
    for (std::size_t i = 1; i < vertical_angles_deg.size(); ++i) {
      if (!(vertical_angles_deg[i] > vertical_angles_deg[i - 1])) {
        throw std::invalid_argument("lidar vertical angles must be strictly increasing");
      }
    }
    if (!(max_range > 0.0)) {
      throw std::invalid_argument("lidar max_range must be positive");
    }
    if (!(horizontal_resolution_deg > 0.0) || !(range_noise_sigma >= 0.0)) {
      throw std::invalid_argument("lidar resolution must be positive and noise non-negative");
    }
  }
};

/// 32-layer elevation pattern with 0.333 deg spacing around the horizon.
inline std::vector<double> default_vertical_angles()
{
  return {-25.0,  -15.639, -11.31, -8.843, -7.254, -6.148, -5.333, -4.667,
          -4.0,   -3.667,  -3.333, -3.0,   -2.667, -2.333, -2.0,   -1.667,
          -1.333, -1.0,    -0.667, -0.333, 0.0,    0.333,  0.667,  1.0,
          1.333,  1.667,   2.333,  3.333,  4.667,  7.0,    10.333, 15.0};
}

/// Azimuth interval [start, start + width] on the circle, radians.
struct AzimuthInterval
{
  double start = 0.0;  // in (-pi, pi]
  double width = 0.0;  // in [0, 2 pi]

  bool contains(double azimuth) const
  {
    if (width >= kTwoPi) {
      return true;
    }
    double offset = std::fmod(azimuth - start, kTwoPi);
    if (offset < 0.0) {
      offset += kTwoPi;
    }
    return offset <= width;
  }

  double end() const { return start + width; }
};

struct SensorRig
{
  std::vector<CameraModel> cameras;
  LidarModel lidar;
  Pose ego_extrinsic;  // LiDAR frame -> vehicle rear-axle frame

  std::vector<AzimuthInterval> camera_fovs() const
  {
    std::vector<AzimuthInterval> out;
    out.reserve(cameras.size());
    for (const auto & cam : cameras) {
      const double half = 0.5 * deg2rad(cam.hfov_deg);
      out.push_back({wrap_angle(cam.optical_axis_azimuth() - half), 2.0 * half});
    }
    return out;
  }

  /// Ground plane height in the LiDAR frame under the flat-world assumption.
  double ground_z() const
  {
    // Vehicle-frame ground is z = 0; the LiDAR origin sits ego_extrinsic.translation above it.
    return -ego_extrinsic.translation.z();
  }

  void validate() const;
};

// --- Azimuth coverage --------------------------------------------------------

namespace detail
{
struct CoverageSegment
{
  double begin;  // [0, 2 pi)
  double end;
  int count;
};

inline std::vector<CoverageSegment> coverage_segments(std::span<const AzimuthInterval> fovs)
{
  std::vector<std::pair<double, int>> events;
  int base = 0;
  for (const auto & fov : fovs) {
    if (fov.width <= 0.0) {
      continue;
    }
    if (fov.width >= kTwoPi) {
      ++base;
      continue;
    }
    double s = std::fmod(fov.start, kTwoPi);
    if (s < 0.0) {
      s += kTwoPi;
    }
    const double e = s + fov.width;
    if (e <= kTwoPi) {
      events.emplace_back(s, +1);
      events.emplace_back(e, -1);
    } else {
      events.emplace_back(s, +1);
      events.emplace_back(kTwoPi, -1);
      events.emplace_back(0.0, +1);
      events.emplace_back(e - kTwoPi, -1);
    }
  }
  std::vector<double> cuts{0.0, kTwoPi};
  for (const auto & ev : events) {
    cuts.push_back(ev.first);
  }
  std::sort(cuts.begin(), cuts.end());
  cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());

  std::vector<CoverageSegment> segments;
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
    const double mid = 0.5 * (cuts[i] + cuts[i + 1]);
    int count = base;
    for (std::size_t k = 0; k + 1 < events.size(); k += 2) {
      if (mid >= events[k].first && mid <= events[k + 1].first) {
        ++count;
      }
    }
    segments.push_back({cuts[i], cuts[i + 1], count});
  }
  return segments;
}

inline std::vector<AzimuthInterval> covered_at_least(
  std::span<const AzimuthInterval> fovs, int min_count)
{
  const auto segments = coverage_segments(fovs);
  std::vector<std::pair<double, double>> runs;
  for (const auto & seg : segments) {
    if (seg.count < min_count) {
      continue;
    }
    if (!runs.empty() && runs.back().second == seg.begin) {
      runs.back().second = seg.end;
    } else {
      runs.emplace_back(seg.begin, seg.end);
    }
  }
  // join a run touching 2 pi with one starting at 0
  if (runs.size() > 1 && runs.front().first == 0.0 && runs.back().second == kTwoPi) {
    runs.front().first = runs.back().first - kTwoPi;
    runs.pop_back();
  }
  std::vector<AzimuthInterval> out;
  for (const auto & [b, e] : runs) {
    const double width = e - b;
    out.push_back({width >= kTwoPi ? -kPi + 0.0 : wrap_angle(b), std::min(width, kTwoPi)});
  }
  std::sort(out.begin(), out.end(), [](const auto & a, const auto & b) {
    return a.start < b.start;
  });
  return out;
}
}  // namespace detail

/// Azimuth intervals covered by at least two of `fovs`.
inline std::vector<AzimuthInterval> overlap_sectors(std::span<const AzimuthInterval> fovs)
{
  return detail::covered_at_least(fovs, 2);
}

inline std::vector<AzimuthInterval> camera_overlap_sectors(const SensorRig & rig)
{
  const auto fovs = rig.camera_fovs();
  return overlap_sectors(fovs);
}

inline void SensorRig::validate() const
{
  if (cameras.empty()) {
    throw std::invalid_argument("rig has no cameras");
  }
  for (const auto & cam : cameras) {
    cam.validate();
  }
  lidar.validate();
  if (!ego_extrinsic.is_valid(1e-9)) {
    throw std::invalid_argument("ego extrinsic rotation is not orthonormal");
  }
  const auto fovs = camera_fovs();
  const auto covered = detail::covered_at_least(fovs, 1);
  double total = 0.0;
  for (const auto & c : covered) {
    total += c.width;
  }
  if (total < kTwoPi - 1e-9) {
    throw std::invalid_argument("camera array does not cover 360 degrees of azimuth");
  }
  // adjacent cameras sorted by optical-axis azimuth must overlap
  std::vector<AzimuthInterval> sorted(fovs.begin(), fovs.end());
  std::sort(sorted.begin(), sorted.end(), [](const auto & a, const auto & b) {
    return wrap_angle(a.start + 0.5 * a.width) < wrap_angle(b.start + 0.5 * b.width);
  });
  for (std::size_t i = 0; i < sorted.size() && sorted.size() > 1; ++i) {
    const auto & a = sorted[i];
    const auto & b = sorted[(i + 1) % sorted.size()];
    const std::array<AzimuthInterval, 2> pair{a, b};
    if (overlap_sectors(pair).empty()) {
      throw std::invalid_argument("adjacent cameras do not overlap");
    }
  }
}

/// Five level cameras spaced 72 deg apart with an 85 deg HFOV around a central LiDAR.
inline SensorRig default_rig()
{
  SensorRig rig;
  constexpr int kWidth = 960;
  constexpr int kHeight = 540;
  const double fx = 0.5 * kWidth / std::tan(deg2rad(85.0) / 2.0);
  for (int i = 0; i < 5; ++i) {
    const double azimuth = wrap_angle(deg2rad(72.0 * i));
    const Eigen::Vector3d center(0.15 * std::cos(azimuth), 0.15 * std::sin(azimuth), -0.1);
    rig.cameras.push_back(CameraModel::make(
      fx, fx, 0.5 * kWidth, 0.5 * kHeight, kWidth, kHeight,
      level_camera_extrinsic(azimuth, center)));
  }
  rig.lidar.vertical_angles_deg = default_vertical_angles();
  rig.lidar.n_layers = static_cast<int>(rig.lidar.vertical_angles_deg.size());
  rig.lidar.horizontal_resolution_deg = 0.1;
  rig.lidar.max_range = 200.0;
  rig.lidar.range_noise_sigma = 0.03;
  rig.ego_extrinsic = Pose::from_xyz_yaw(1.2, 0.0, 1.9, 0.0);
  return rig;
}

// --- Projection and frustums ---------------------------------------------------

/// Pinhole projection of a LiDAR-frame point. Absent behind the camera or outside the image.
inline std::optional<Projection> project_point(const Eigen::Vector3d & p, const CameraModel & cam)
{
  const Eigen::Vector3d pc = cam.extrinsic.apply(p);
  if (!(pc.z() > 0.0)) {
    return std::nullopt;
  }
  const double u = cam.fx * pc.x() / pc.z() + cam.cx;
  const double v = cam.fy * pc.y() / pc.z() + cam.cy;
  if (!(u >= 0.0 && u < cam.width && v >= 0.0 && v < cam.height)) {
    return std::nullopt;
  }
  return Projection{u, v, pc.z()};
}

/// Half-space normal . p <= offset.
struct HalfSpace
{
  Eigen::Vector3d normal = Eigen::Vector3d::UnitZ();
  double offset = 0.0;

  bool contains(const Eigen::Vector3d & p) const { return normal.dot(p) <= offset; }
};

struct Frustum
{
  // left, right, top, bottom, near, far; LiDAR frame
  std::array<HalfSpace, 6> planes;
  double near = 0.5;
  double far = 200.0;

  bool contains(const Eigen::Vector3d & p) const
  {
    for (const auto & plane : planes) {
      if (!plane.contains(p)) {
        return false;
      }
    }
    return true;
  }
};

class InvalidDetectionError : public std::invalid_argument
{
public:
  using std::invalid_argument::invalid_argument;
};

/// Frustum extruded from `box` through the camera center, clipped to [near, far] depth.
inline Frustum build_frustum(const PixelRect & box, const CameraModel & cam, double near, double far)
{
  if (!(box.width() > 0.0) || !(box.height() > 0.0)) {
    throw InvalidDetectionError("degenerate detection rectangle");
  }
  if (!(near > 0.0) || !(far > near)) {
    throw std::invalid_argument("frustum requires 0 < near < far");
  }
  // Camera-frame constraints (z > 0):
  //   u >= x0  <=>  -fx X - (cx - x0) Z <= 0,   u <= x1  <=>  fx X + (cx - x1) Z <= 0
  const std::array<Eigen::Vector3d, 4> side_normals{
    Eigen::Vector3d(-cam.fx, 0.0, -(cam.cx - box.x0)),
    Eigen::Vector3d(cam.fx, 0.0, cam.cx - box.x1),
    Eigen::Vector3d(0.0, -cam.fy, -(cam.cy - box.y0)),
    Eigen::Vector3d(0.0, cam.fy, cam.cy - box.y1)};
  const Eigen::Matrix3d r = cam.extrinsic.rotation_matrix();
  const Eigen::Vector3d & t = cam.extrinsic.translation;

  // n . (R p + t) <= d  <=>  (R^T n) . p <= d - n . t
  auto to_lidar = [&](const Eigen::Vector3d & n_cam, double d) {
    const Eigen::Vector3d n = n_cam.normalized();
    const double scale = n_cam.norm();
    return HalfSpace{r.transpose() * n, d / scale - n.dot(t)};
  };

  Frustum f;
  f.near = near;
  f.far = far;
  for (std::size_t i = 0; i < 4; ++i) {
    f.planes[i] = to_lidar(side_normals[i], 0.0);
  }
  f.planes[4] = to_lidar(Eigen::Vector3d(0.0, 0.0, -1.0), -near);
  f.planes[5] = to_lidar(Eigen::Vector3d(0.0, 0.0, 1.0), far);
  return f;
}

inline PointCloud transform_cloud(const PointCloud & cloud, const Pose & pose)
{
  PointCloud out;
  out.timestamp = cloud.timestamp;
  if (pose.translation.isZero(0.0) && pose.rotation.coeffs() == Eigen::Quaterniond::Identity().coeffs()) {
    out.points = cloud.points;
    return out;
  }
  out.points.reserve(cloud.points.size());
  const Eigen::Matrix3d r = pose.rotation_matrix();
  for (const auto & p : cloud.points) {
    out.points.push_back(r * p + pose.translation);
  }
  return out;
}

}  // namespace fusiontrack

#endif  // FUSIONTRACK__RIG_GEOMETRY_HPP_
