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

#ifndef FUSIONTRACK__SIM_RENDER_HPP_
#define FUSIONTRACK__SIM_RENDER_HPP_

#include "fusiontrack/association.hpp"
#include "fusiontrack/box_estimation.hpp"
#include "fusiontrack/rig_geometry.hpp"
#include "fusiontrack/scenario.hpp"

#include <Eigen/Core>
#include <Eigen/Geometry>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <random>
#include <vector>

namespace fusiontrack
{

inline constexpr int kGroundLabel = -1;

enum class RngStream : std::uint64_t { Lidar = 1, Detections = 2, EgoPose = 3, Extrinsics = 4 };

/// Independent generator per (seed, frame, stream).
inline std::mt19937_64 make_rng(std::uint64_t seed, std::int64_t frame, RngStream stream)
{
  std::seed_seq seq{
    static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
    static_cast<std::uint32_t>(frame), static_cast<std::uint32_t>(static_cast<std::uint64_t>(frame) >> 32),
    static_cast<std::uint32_t>(stream)};
  return std::mt19937_64(seq);
}

/// Beta(a, b) sample from two gamma draws.
inline double sample_beta(std::mt19937_64 & rng, double a, double b)
{
  std::gamma_distribution<double> ga(a, 1.0);
  std::gamma_distribution<double> gb(b, 1.0);
  const double x = ga(rng);
  const double y = gb(rng);
  return x + y > 0.0 ? x / (x + y) : 0.5;
}

/// Transform taking global ground-plane coordinates into the ego vehicle frame.
inline Pose vehicle_from_global(const PlanarState & ego)
{
  const Pose global_from_vehicle = Pose::from_xyz_yaw(ego.position.x(), ego.position.y(), 0.0, ego.heading);
  return global_from_vehicle.inverse();
}

struct SensorFrameAgent
{
  int id = 0;
  Box3D box;  // LiDAR frame
  bool hidden = false;
};

/// Agent cuboids expressed in the LiDAR frame of the ego rig.
inline std::vector<SensorFrameAgent> agents_in_lidar_frame(const WorldState & world, const SensorRig & rig)
{
  const Pose lidar_from_global = rig.ego_extrinsic.inverse() * vehicle_from_global(world.ego);
  const double yaw_offset = lidar_from_global.yaw();
  std::vector<SensorFrameAgent> out;
  out.reserve(world.agents.size());
  for (const auto & a : world.agents) {
    Box3D b;
    b.center = lidar_from_global.apply(
      Eigen::Vector3d(a.state.position.x(), a.state.position.y(), 0.5 * a.size.z()));
    b.size = a.size;
    b.yaw = wrap_angle(a.state.heading + yaw_offset);
    b.class_label = a.class_label;
    out.push_back({a.id, b, a.hidden});
  }
  return out;
}

/// Entry distance along a ray from the origin into an oriented cuboid, if hit.
inline std::optional<double> ray_box_distance(const Eigen::Vector3d & dir, const Box3D & box)
{
  const double c = std::cos(box.yaw);
  const double s = std::sin(box.yaw);
  // ray origin and direction in box coordinates
  const Eigen::Vector3d o(
    -(c * box.center.x() + s * box.center.y()), -(-s * box.center.x() + c * box.center.y()), -box.center.z());
  const Eigen::Vector3d d(c * dir.x() + s * dir.y(), -s * dir.x() + c * dir.y(), dir.z());
  const Eigen::Vector3d half = 0.5 * box.size;
  double t0 = -std::numeric_limits<double>::infinity();
  double t1 = std::numeric_limits<double>::infinity();
  for (int k = 0; k < 3; ++k) {
    if (std::abs(d(k)) < 1e-15) {
      if (o(k) < -half(k) || o(k) > half(k)) return std::nullopt;
      continue;
    }
    double a = (-half(k) - o(k)) / d(k);
    double b = (half(k) - o(k)) / d(k);
    if (a > b) std::swap(a, b);
    t0 = std::max(t0, a);
    t1 = std::min(t1, b);
    if (t0 > t1) return std::nullopt;
  }
  if (t0 > 0.0) return t0;
  return std::nullopt;  // origin inside or box behind
}

struct LidarFrame
{
  PointCloud cloud;
  std::vector<int> labels;  // agent id or kGroundLabel
};

/// Single-instant 360 deg scan: nearest hit among agent cuboids and the ground plane.
inline LidarFrame render_lidar(
  const WorldState & world, const SensorRig & rig, const NoiseSpec & noise, std::uint64_t seed, int frame)
{
  const auto & lidar = rig.lidar;
  const int columns = lidar.columns();
  const double res = kTwoPi / columns;
  const auto agents = agents_in_lidar_frame(world, rig);

  // ground plane z_vehicle = 0 in LiDAR coordinates: n . p = offset
  const Eigen::Matrix3d r = rig.ego_extrinsic.rotation_matrix();
  const Eigen::Vector3d ground_n = r.transpose().col(2);
  const double ground_offset = -rig.ego_extrinsic.translation.z();

  // bucket agents by the azimuth columns their footprint spans
  std::vector<std::vector<int>> column_agents(static_cast<std::size_t>(columns));
  for (std::size_t a = 0; a < agents.size(); ++a) {
    if (agents[a].hidden) continue;
    const Box3D & b = agents[a].box;
    const double reach = b.center.head<2>().norm() - 0.5 * b.size.head<2>().norm();
    if (reach > lidar.max_range) continue;
    auto push_range = [&](long first, long last) {
      for (long k = first; k <= last; ++k) {
        const long m = ((k % columns) + columns) % columns;
        column_agents[static_cast<std::size_t>(m)].push_back(static_cast<int>(a));
      }
    };
    if (reach <= 0.0) {
      push_range(0, columns - 1);
      continue;
    }
    const double az_c = std::atan2(b.center.y(), b.center.x());
    double lo = 0.0;
    double hi = 0.0;
    for (const auto & corner : b.bev_corners()) {
      const double d = wrap_angle(std::atan2(corner.y(), corner.x()) - az_c);
      lo = std::min(lo, d);
      hi = std::max(hi, d);
    }
    const long first = static_cast<long>(std::floor((az_c + lo) / res)) - 1;
    const long last = static_cast<long>(std::ceil((az_c + hi) / res)) + 1;
    push_range(first, std::min(last, first + columns - 1));
  }

  std::vector<double> cos_el;
  std::vector<double> sin_el;
  for (double el : lidar.vertical_angles_deg) {
    cos_el.push_back(std::cos(deg2rad(el)));
    sin_el.push_back(std::sin(deg2rad(el)));
  }

  auto rng = make_rng(seed, frame, RngStream::Lidar);
  std::normal_distribution<double> gauss(0.0, 1.0);
  const double sigma = noise.lidar_range_sigma;

  LidarFrame out;
  out.cloud.timestamp = world.t;
  out.cloud.points.reserve(static_cast<std::size_t>(columns) * cos_el.size() / 2);
  out.labels.reserve(out.cloud.points.capacity());
  for (int col = 0; col < columns; ++col) {
    const double az = col * res;
    const double ca = std::cos(az);
    const double sa = std::sin(az);
    const auto & cands = column_agents[static_cast<std::size_t>(col)];
    for (std::size_t layer = 0; layer < cos_el.size(); ++layer) {
      const Eigen::Vector3d dir(cos_el[layer] * ca, cos_el[layer] * sa, sin_el[layer]);
      double best = std::numeric_limits<double>::infinity();
      int label = kGroundLabel;
      const double nd = ground_n.dot(dir);
      if (nd < 0.0) {
        best = ground_offset / nd;
      }
      for (int a : cands) {
        const auto hit = ray_box_distance(dir, agents[static_cast<std::size_t>(a)].box);
        if (hit && *hit < best) {
          best = *hit;
          label = agents[static_cast<std::size_t>(a)].id;
        }
      }
      if (!(best <= lidar.max_range)) continue;
      // truncated at 3 sigma so every return stays within 3 sigma of the surface it came from
      double e = 0.0;
      if (sigma > 0.0) {
        do {
          e = gauss(rng);
        } while (std::abs(e) > 3.0);
      }
      out.cloud.points.push_back((best + sigma * e) * dir);
      out.labels.push_back(label);
    }
  }
  return out;
}

// --- Camera rendering ------------------------------------------------------------

namespace detail
{
/// Keeps the part of a convex polygon with sign * (coord - value) >= 0 on axis `axis`.
inline std::vector<Eigen::Vector2d> clip_axis(
  const std::vector<Eigen::Vector2d> & poly, int axis, double value, double sign)
{
  std::vector<Eigen::Vector2d> out;
  const std::size_t n = poly.size();
  for (std::size_t i = 0; i < n; ++i) {
    const Eigen::Vector2d & a = poly[i];
    const Eigen::Vector2d & b = poly[(i + 1) % n];
    const double da = sign * (a(axis) - value);
    const double db = sign * (b(axis) - value);
    if (da >= 0.0) out.push_back(a);
    if ((da >= 0.0) != (db >= 0.0)) {
      const double t = da / (da - db);
      Eigen::Vector2d p = a + t * (b - a);
      p(axis) = value;
      out.push_back(p);
    }
  }
  return out;
}
}  // namespace detail

/// Image-plane silhouette (convex, counter-clockwise in pixel coordinates) of a LiDAR-frame
/// cuboid, clipped at `z_near` in front of the camera. Empty when entirely behind.
inline std::vector<Eigen::Vector2d> cuboid_silhouette(const Box3D & box, const CameraModel & cam, double z_near = 0.05)
{
  const double c = std::cos(box.yaw);
  const double s = std::sin(box.yaw);
  std::array<Eigen::Vector3d, 8> corners;
  for (int i = 0; i < 8; ++i) {
    const double lx = ((i & 1) ? 0.5 : -0.5) * box.size.x();
    const double ly = ((i & 2) ? 0.5 : -0.5) * box.size.y();
    const double lz = ((i & 4) ? 0.5 : -0.5) * box.size.z();
    const Eigen::Vector3d p = box.center + Eigen::Vector3d(c * lx - s * ly, s * lx + c * ly, lz);
    corners[static_cast<std::size_t>(i)] = cam.extrinsic.apply(p);
  }
  std::vector<Eigen::Vector3d> kept;
  for (const auto & p : corners) {
    if (p.z() >= z_near) kept.push_back(p);
  }
  if (kept.empty()) return {};
  if (kept.size() < 8) {
    for (int i = 0; i < 8; ++i) {
      for (int bit : {1, 2, 4}) {
        const int j = i | bit;
        if (j == i) continue;
        const auto & a = corners[static_cast<std::size_t>(i)];
        const auto & b = corners[static_cast<std::size_t>(j)];
        if ((a.z() >= z_near) != (b.z() >= z_near)) {
          const double t = (z_near - a.z()) / (b.z() - a.z());
          kept.push_back(a + t * (b - a));
        }
      }
    }
  }
  std::vector<Eigen::Vector2d> px;
  px.reserve(kept.size());
  for (const auto & p : kept) {
    px.emplace_back(cam.fx * p.x() / p.z() + cam.cx, cam.fy * p.y() / p.z() + cam.cy);
  }
  return convex_hull(std::move(px));
}

struct PixelSpan
{
  int row = 0;
  int x_begin = 0;  // inclusive
  int x_end = 0;    // inclusive
};

/// Conservative rasterization: pixel (px, py) is covered when its closed unit square
/// [px, px+1] x [py, py+1] meets the polygon. Spans are clipped to the image.
inline std::vector<PixelSpan> rasterize_conservative(
  const std::vector<Eigen::Vector2d> & poly, int width, int height)
{
  std::vector<PixelSpan> spans;
  if (poly.empty()) return spans;
  double y_min = poly[0].y();
  double y_max = poly[0].y();
  for (const auto & p : poly) {
    y_min = std::min(y_min, p.y());
    y_max = std::max(y_max, p.y());
  }
  const int row_first = std::max(0, static_cast<int>(std::ceil(y_min)) - 1);
  const int row_last = std::min(height - 1, static_cast<int>(std::floor(y_max)));
  for (int row = row_first; row <= row_last; ++row) {
    double x_min = std::numeric_limits<double>::infinity();
    double x_max = -std::numeric_limits<double>::infinity();
    if (poly.size() < 3) {
      for (const auto & p : poly) {
        if (p.y() >= row && p.y() <= row + 1) {
          x_min = std::min(x_min, p.x());
          x_max = std::max(x_max, p.x());
        }
      }
    } else {
      const auto strip = detail::clip_axis(detail::clip_axis(poly, 1, row, 1.0), 1, row + 1.0, -1.0);
      for (const auto & p : strip) {
        x_min = std::min(x_min, p.x());
        x_max = std::max(x_max, p.x());
      }
    }
    if (!(x_min <= x_max)) continue;
    const int xb = std::max(0, static_cast<int>(std::ceil(x_min)) - 1);
    const int xe = std::min(width - 1, static_cast<int>(std::floor(x_max)));
    if (xb <= xe) spans.push_back({row, xb, xe});
  }
  return spans;
}

namespace detail
{
/// One 3x3 dilation (grow) or erosion (!grow) step on a dense binary image.
inline void morph_step(std::vector<std::uint8_t> & img, int w, int h, bool grow)
{
  std::vector<std::uint8_t> src = img;
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      bool any = false;
      bool all = true;
      for (int dy = -1; dy <= 1; ++dy) {
        for (int dx = -1; dx <= 1; ++dx) {
          const int xx = x + dx;
          const int yy = y + dy;
          const bool v = xx >= 0 && yy >= 0 && xx < w && yy < h &&
                         src[static_cast<std::size_t>(yy) * static_cast<std::size_t>(w) + static_cast<std::size_t>(xx)];
          any = any || v;
          all = all && v;
        }
      }
      img[static_cast<std::size_t>(y) * static_cast<std::size_t>(w) + static_cast<std::size_t>(x)] = grow ? any : all;
    }
  }
}
}  // namespace detail

struct SimDetection
{
  Detection2D detection;
  int agent_id = 0;
};

/// Camera models as the world sees them: nominal extrinsics rotated and shifted by a fixed
/// per-camera error of the configured magnitude (a static miscalibration, seeded).
inline std::vector<CameraModel> perturbed_cameras(const SensorRig & rig, const NoiseSpec & noise, std::uint64_t seed)
{
  std::vector<CameraModel> cams = rig.cameras;
  if (noise.extrinsic_rot_deg <= 0.0 && noise.extrinsic_trans_m <= 0.0) return cams;
  auto rng = make_rng(seed, -1, RngStream::Extrinsics);
  std::normal_distribution<double> gauss(0.0, 1.0);
  for (auto & cam : cams) {
    Eigen::Vector3d axis(gauss(rng), gauss(rng), gauss(rng));
    Eigen::Vector3d shift(gauss(rng), gauss(rng), gauss(rng));
    axis.normalize();
    shift.normalize();
    Pose delta;
    delta.rotation = Eigen::Quaterniond(Eigen::AngleAxisd(deg2rad(noise.extrinsic_rot_deg), axis));
    delta.translation = noise.extrinsic_trans_m * shift;
    cam.extrinsic = delta * cam.extrinsic;
  }
  return cams;
}

/// Per-camera instance detections rendered from cuboid silhouettes with painter's-order
/// occlusion, mask morphology noise, dropout and Beta-distributed scores.
inline std::vector<std::vector<SimDetection>> render_detections(
  const WorldState & world, const SensorRig & rig, const NoiseSpec & noise, std::uint64_t seed, int frame)
{
  const auto agents = agents_in_lidar_frame(world, rig);
  const auto cams = perturbed_cameras(rig, noise, seed);
  const std::size_t n_cam = cams.size();

  // all random draws up front in a fixed order, independent of visibility
  auto rng = make_rng(seed, frame, RngStream::Detections);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::uniform_int_distribution<int> jitter(-noise.mask_random_px, noise.mask_random_px);
  std::vector<char> dropped(agents.size());
  std::vector<int> offset(agents.size() * n_cam);
  std::vector<double> score(agents.size() * n_cam);
  for (std::size_t a = 0; a < agents.size(); ++a) {
    dropped[a] = unit(rng) < noise.detection_dropout;
    for (std::size_t c = 0; c < n_cam; ++c) {
      offset[a * n_cam + c] = noise.mask_dilate_erode + jitter(rng);
      score[a * n_cam + c] = sample_beta(rng, noise.score_alpha, noise.score_beta);
    }
  }

  std::vector<std::vector<SimDetection>> out(n_cam);
  for (std::size_t c = 0; c < n_cam; ++c) {
    const auto & cam = cams[c];
    const int w = cam.width;
    const int h = cam.height;
    struct Painted
    {
      std::size_t agent;
      double depth;
      std::vector<PixelSpan> spans;
    };
    std::vector<Painted> painted;
    for (std::size_t a = 0; a < agents.size(); ++a) {
      if (agents[a].hidden) continue;
      const Eigen::Vector3d pc = cam.extrinsic.apply(agents[a].box.center);
      auto spans = rasterize_conservative(cuboid_silhouette(agents[a].box, cam), w, h);
      if (!spans.empty()) painted.push_back({a, pc.norm(), std::move(spans)});
    }
    if (painted.empty()) continue;
    std::stable_sort(painted.begin(), painted.end(), [](const Painted & x, const Painted & y) {
      return x.depth > y.depth;
    });
    std::vector<std::int16_t> ids(static_cast<std::size_t>(w) * static_cast<std::size_t>(h), -1);
    for (std::size_t k = 0; k < painted.size(); ++k) {
      for (const auto & sp : painted[k].spans) {
        auto * row = ids.data() + static_cast<std::size_t>(sp.row) * static_cast<std::size_t>(w);
        std::fill(row + sp.x_begin, row + sp.x_end + 1, static_cast<std::int16_t>(k));
      }
    }
    // emit in agent order for a stable detection index
    std::vector<std::size_t> emit(painted.size());
    std::iota(emit.begin(), emit.end(), std::size_t{0});
    std::sort(emit.begin(), emit.end(), [&](std::size_t x, std::size_t y) {
      return painted[x].agent < painted[y].agent;
    });
    for (std::size_t k : emit) {
      const std::size_t a = painted[k].agent;
      if (dropped[a]) continue;
      int x0 = w, y0 = h, x1 = -1, y1 = -1;
      for (const auto & sp : painted[k].spans) {
        const auto * row = ids.data() + static_cast<std::size_t>(sp.row) * static_cast<std::size_t>(w);
        for (int x = sp.x_begin; x <= sp.x_end; ++x) {
          if (row[x] == static_cast<std::int16_t>(k)) {
            x0 = std::min(x0, x);
            x1 = std::max(x1, x);
            y0 = std::min(y0, sp.row);
            y1 = std::max(y1, sp.row);
          }
        }
      }
      if (x1 < 0) continue;  // fully occluded here
      const int off = offset[a * n_cam + c];
      const int grow = std::max(off, 0);
      const int bx0 = std::max(0, x0 - grow);
      const int by0 = std::max(0, y0 - grow);
      const int bx1 = std::min(w - 1, x1 + grow);
      const int by1 = std::min(h - 1, y1 + grow);
      const int bw = bx1 - bx0 + 1;
      const int bh = by1 - by0 + 1;
      std::vector<std::uint8_t> local(static_cast<std::size_t>(bw) * static_cast<std::size_t>(bh), 0);
      for (int y = by0; y <= by1; ++y) {
        for (int x = bx0; x <= bx1; ++x) {
          local[static_cast<std::size_t>(y - by0) * static_cast<std::size_t>(bw) + static_cast<std::size_t>(x - bx0)] =
            ids[static_cast<std::size_t>(y) * static_cast<std::size_t>(w) + static_cast<std::size_t>(x)] ==
            static_cast<std::int16_t>(k);
        }
      }
      for (int i = 0; i < std::abs(off); ++i) {
        detail::morph_step(local, bw, bh, off > 0);
      }
      int mx0 = bw, my0 = bh, mx1 = -1, my1 = -1;
      for (int y = 0; y < bh; ++y) {
        for (int x = 0; x < bw; ++x) {
          if (local[static_cast<std::size_t>(y) * static_cast<std::size_t>(bw) + static_cast<std::size_t>(x)]) {
            mx0 = std::min(mx0, x);
            mx1 = std::max(mx1, x);
            my0 = std::min(my0, y);
            my1 = std::max(my1, y);
          }
        }
      }
      if (mx1 < 0) continue;  // eroded away
      SimDetection sd;
      sd.agent_id = agents[a].id;
      auto & det = sd.detection;
      det.camera_id = static_cast<int>(c);
      det.class_label = agents[a].box.class_label;
      det.score = score[a * n_cam + c];
      det.box = PixelRect{
        static_cast<double>(bx0 + mx0), static_cast<double>(by0 + my0), static_cast<double>(bx0 + mx1 + 1),
        static_cast<double>(by0 + my1 + 1)};
      det.mask = Bitmask(mx1 - mx0 + 1, my1 - my0 + 1);
      for (int y = my0; y <= my1; ++y) {
        for (int x = mx0; x <= mx1; ++x) {
          if (local[static_cast<std::size_t>(y) * static_cast<std::size_t>(bw) + static_cast<std::size_t>(x)]) {
            det.mask.set(x - mx0, y - my0);
          }
        }
      }
      out[c].push_back(std::move(sd));
    }
  }
  return out;
}

}  // namespace fusiontrack

#endif  // FUSIONTRACK__SIM_RENDER_HPP_
