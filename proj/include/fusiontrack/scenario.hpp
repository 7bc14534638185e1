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

#ifndef FUSIONTRACK__SCENARIO_HPP_
#define FUSIONTRACK__SCENARIO_HPP_

#include "fusiontrack/common.hpp"

#include <Eigen/Core>

#include <cmath>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace fusiontrack
{

enum class ScriptKind { ConstantVelocity, ConstantTurn, WaypointSpline };

struct Waypoint
{
  double t = 0.0;
  Eigen::Vector2d position = Eigen::Vector2d::Zero();
};

/// Planar kinematic state of a scripted body at one instant (global frame).
struct PlanarState
{
  Eigen::Vector2d position = Eigen::Vector2d::Zero();
  double heading = 0.0;
  double speed = 0.0;
  double yaw_rate = 0.0;
};

/// Analytic motion. ConstantVelocity / ConstantTurn start at `start` with `heading` at t = 0;
/// `radius` is signed (positive turns left). WaypointSpline interpolates timed positions with
/// a cubic Hermite spline; repeated positions mark a stop.
struct MotionScript
{
  ScriptKind kind = ScriptKind::ConstantVelocity;
  Eigen::Vector2d start = Eigen::Vector2d::Zero();
  double heading = 0.0;
  double speed = 0.0;
  double radius = 0.0;
  std::vector<Waypoint> waypoints;

  void validate() const
  {
    if (!start.allFinite() || !std::isfinite(heading) || !std::isfinite(speed)) {
      throw std::invalid_argument("motion parameters must be finite");
    }
    if (speed < 0.0) {
      throw std::invalid_argument("motion speed must be >= 0");
    }
    if (kind == ScriptKind::ConstantTurn && (radius == 0.0 || !std::isfinite(radius))) {
      throw std::invalid_argument("constant-turn radius must be finite and nonzero");
    }
    if (kind == ScriptKind::WaypointSpline) {
      if (waypoints.size() < 2) {
        throw std::invalid_argument("waypoint-spline needs at least two waypoints");
      }
      for (std::size_t i = 1; i < waypoints.size(); ++i) {
        if (!(waypoints[i].t > waypoints[i - 1].t)) {
          throw std::invalid_argument("waypoint times must be strictly increasing");
        }
      }
    }
  }

  PlanarState at(double t) const;
};

namespace detail
{
inline Eigen::Vector2d spline_tangent(const std::vector<Waypoint> & w, std::size_t i)
{
  const std::size_t n = w.size();
  auto same = [&](std::size_t a, std::size_t b) { return w[a].position == w[b].position; };
  // a waypoint shared with a neighbour is a stop: zero velocity there
  if ((i > 0 && same(i, i - 1)) || (i + 1 < n && same(i, i + 1))) {
    return Eigen::Vector2d::Zero();
  }
  if (i == 0) {
    return (w[1].position - w[0].position) / (w[1].t - w[0].t);
  }
  if (i + 1 == n) {
    return (w[n - 1].position - w[n - 2].position) / (w[n - 1].t - w[n - 2].t);
  }
  return (w[i + 1].position - w[i - 1].position) / (w[i + 1].t - w[i - 1].t);
}

inline PlanarState spline_at(const std::vector<Waypoint> & w, double t)
{
  const std::size_t n = w.size();
  PlanarState s;
  // heading held from the nearest preceding moving chord while stopped
  auto chord_heading = [&](std::size_t seg) {
    for (std::size_t k = seg + 1; k-- > 0;) {
      const Eigen::Vector2d d = w[k + 1].position - w[k].position;
      if (d.norm() > 0.0) return std::atan2(d.y(), d.x());
    }
    for (std::size_t k = seg + 1; k + 1 < n; ++k) {
      const Eigen::Vector2d d = w[k + 1].position - w[k].position;
      if (d.norm() > 0.0) return std::atan2(d.y(), d.x());
    }
    return 0.0;
  };
  if (t <= w.front().t) {
    s.position = w.front().position;
    s.heading = chord_heading(0);
    return s;
  }
  if (t >= w.back().t) {
    s.position = w.back().position;
    s.heading = chord_heading(n - 2);
    return s;
  }
  std::size_t seg = 0;
  while (seg + 2 < n && t >= w[seg + 1].t) ++seg;
  const double h = w[seg + 1].t - w[seg].t;
  const double u = (t - w[seg].t) / h;
  const Eigen::Vector2d p0 = w[seg].position;
  const Eigen::Vector2d p1 = w[seg + 1].position;
  const Eigen::Vector2d m0 = spline_tangent(w, seg) * h;
  const Eigen::Vector2d m1 = spline_tangent(w, seg + 1) * h;
  const double u2 = u * u;
  const double u3 = u2 * u;
  s.position = (2 * u3 - 3 * u2 + 1) * p0 + (u3 - 2 * u2 + u) * m0 + (-2 * u3 + 3 * u2) * p1 +
               (u3 - u2) * m1;
  const Eigen::Vector2d vel =
    ((6 * u2 - 6 * u) * p0 + (3 * u2 - 4 * u + 1) * m0 + (-6 * u2 + 6 * u) * p1 + (3 * u2 - 2 * u) * m1) / h;
  const Eigen::Vector2d acc =
    ((12 * u - 6) * p0 + (6 * u - 4) * m0 + (-12 * u + 6) * p1 + (6 * u - 2) * m1) / (h * h);
  s.speed = vel.norm();
  if (s.speed > 1e-9) {
    s.heading = std::atan2(vel.y(), vel.x());
    s.yaw_rate = (vel.x() * acc.y() - vel.y() * acc.x()) / (s.speed * s.speed);
  } else {
    s.speed = 0.0;
    s.heading = chord_heading(seg);
  }
  return s;
}
}  // namespace detail

inline PlanarState MotionScript::at(double t) const
{
  PlanarState s;
  switch (kind) {
    case ScriptKind::ConstantVelocity: {
      s.position = start + speed * t * Eigen::Vector2d(std::cos(heading), std::sin(heading));
      s.heading = wrap_angle(heading);
      s.speed = speed;
      return s;
    }
    case ScriptKind::ConstantTurn: {
      const double w = speed / radius;
      const double a = heading + w * t;
      s.position = start + radius * Eigen::Vector2d(std::sin(a) - std::sin(heading), std::cos(heading) - std::cos(a));
      s.heading = wrap_angle(a);
      s.speed = speed;
      s.yaw_rate = w;
      return s;
    }
    case ScriptKind::WaypointSpline:
      return detail::spline_at(waypoints, t);
  }
  return s;
}

struct AgentScript
{
  int id = 0;
  ClassLabel class_label = ClassLabel::Car;
  Eigen::Vector3d size{4.5, 1.8, 1.5};  // l, w, h
  MotionScript motion;
  double spawn = 0.0;
  double despawn = std::numeric_limits<double>::infinity();
  std::vector<std::pair<double, double>> hidden;  // [t0, t1) windows with no sensor returns

  bool alive(double t) const { return t >= spawn && t < despawn; }

  bool is_hidden(double t) const
  {
    for (const auto & [a, b] : hidden) {
      if (t >= a && t < b) return true;
    }
    return false;
  }
};

struct NoiseSpec
{
  double lidar_range_sigma = 0.03;
  int mask_dilate_erode = 0;  // fixed signed offset, pixels
  int mask_random_px = 1;     // plus a uniform per-detection offset in [-k, k]
  double detection_dropout = 0.05;
  double extrinsic_rot_deg = 0.0;
  double extrinsic_trans_m = 0.0;
  double score_alpha = 8.0;  // Beta(alpha, beta)
  double score_beta = 2.0;
  double ego_pose_sigma = 0.0;  // position noise on the reported ego pose, m

  void validate() const
  {
    if (!(lidar_range_sigma >= 0.0)) throw std::invalid_argument("lidar_range_sigma must be >= 0");
    if (mask_random_px < 0) throw std::invalid_argument("mask_random_px must be >= 0");
    if (!(detection_dropout >= 0.0 && detection_dropout <= 1.0)) {
      throw std::invalid_argument("detection_dropout must be in [0, 1]");
    }
    if (!(extrinsic_rot_deg >= 0.0) || !(extrinsic_trans_m >= 0.0)) {
      throw std::invalid_argument("extrinsic perturbation magnitudes must be >= 0");
    }
    if (!(score_alpha > 0.0) || !(score_beta > 0.0)) {
      throw std::invalid_argument("score model parameters must be > 0");
    }
    if (!(ego_pose_sigma >= 0.0)) throw std::invalid_argument("ego_pose_sigma must be >= 0");
  }
};

struct Scenario
{
  std::string name = "scenario";
  std::uint64_t seed = 0;
  double duration = 30.0;
  double rate = 10.0;
  MotionScript ego;
  std::vector<AgentScript> agents;
  NoiseSpec noise;
  int primary_agent = -1;  // agent id evaluated for the sequence metrics, -1 for all

  int frame_count() const { return static_cast<int>(std::floor(duration * rate + 1e-9)) + 1; }
  double time_of(int frame) const { return frame / rate; }

  void validate() const
  {
    if (!(rate > 0.0)) throw std::invalid_argument("rate must be > 0");
    if (!(duration >= 0.0)) throw std::invalid_argument("duration must be >= 0");
    ego.validate();
    noise.validate();
    for (const auto & a : agents) {
      if (!(a.size.minCoeff() > 0.0)) throw std::invalid_argument("agent sizes must be positive");
      a.motion.validate();
    }
  }
};

struct AgentState
{
  int id = 0;
  ClassLabel class_label = ClassLabel::Car;
  Eigen::Vector3d size = Eigen::Vector3d::Ones();
  PlanarState state;
  bool hidden = false;
};

struct WorldState
{
  double t = 0.0;
  PlanarState ego;
  std::vector<AgentState> agents;  // alive agents in script order
};

/// Ground truth at time t; agents stand on the z = 0 ground plane.
inline WorldState world_at(const Scenario & s, double t)
{
  if (!(t >= 0.0 && t <= s.duration + 1e-9)) {
    throw std::out_of_range("world_at: t outside [0, duration]");
  }
  WorldState w;
  w.t = t;
  w.ego = s.ego.at(t);
  for (const auto & a : s.agents) {
    if (!a.alive(t)) continue;
    w.agents.push_back({a.id, a.class_label, a.size, a.motion.at(t), a.is_hidden(t)});
  }
  return w;
}

}  // namespace fusiontrack

#endif  // FUSIONTRACK__SCENARIO_HPP_
