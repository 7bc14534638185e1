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

#ifndef FUSIONTRACK__MOTION_MODELS_HPP_
#define FUSIONTRACK__MOTION_MODELS_HPP_

#include "fusiontrack/common.hpp"

#include <Eigen/Core>

#include <cmath>

namespace fusiontrack
{

enum class MotionKind { CTRV, CV };

// cspell: ignore CTRV
// CTRV: constant turn rate and velocity. State (x, y, v, yaw, yaw_rate); measures (x, y, yaw).
struct CtrvModel
{
  static constexpr int kStateDim = 5;
  static constexpr int kMeasDim = 3;
  static constexpr int kNoiseDim = 2;
  static constexpr int kStateAngle = 3;
  static constexpr int kMeasAngle = 2;

  // below this yaw rate the straight-line limit is used
  static constexpr double kMinYawRate = 1e-4;

  using State = Eigen::Matrix<double, 5, 1>;
  using Meas = Eigen::Matrix<double, 3, 1>;

  double sigma_accel = 2.0;      // [m/s^2]
  double sigma_yaw_accel = 0.6;  // [rad/s^2]

  State propagate(const State & s, double dt) const
  {
    State out = s;
    const double v = s(2);
    const double yaw = s(3);
    const double yaw_rate = s(4);
    if (std::abs(yaw_rate) < kMinYawRate) {
      out(0) += v * std::cos(yaw) * dt;
      out(1) += v * std::sin(yaw) * dt;
    } else {
      out(0) += v / yaw_rate * (std::sin(yaw + yaw_rate * dt) - std::sin(yaw));
      out(1) += v / yaw_rate * (std::cos(yaw) - std::cos(yaw + yaw_rate * dt));
    }
    out(3) = wrap_angle(yaw + yaw_rate * dt);
    return out;
  }

  /// G diag(sigma) with G mapping (longitudinal accel, yaw accel) into the state.
  Eigen::Matrix<double, 5, 2> process_noise_sqrt(const State & mean, double dt) const
  {
    const double half_dt2 = 0.5 * dt * dt;
    Eigen::Matrix<double, 5, 2> g = Eigen::Matrix<double, 5, 2>::Zero();
    g(0, 0) = half_dt2 * std::cos(mean(3));
    g(1, 0) = half_dt2 * std::sin(mean(3));
    g(2, 0) = dt;
    g(3, 1) = half_dt2;
    g(4, 1) = dt;
    g.col(0) *= sigma_accel;
    g.col(1) *= sigma_yaw_accel;
    return g;
  }

  Meas measure(const State & s) const { return {s(0), s(1), s(3)}; }
};

// CV: constant velocity. State (x, y, vx, vy); measures (x, y).
struct CvModel
{
  static constexpr int kStateDim = 4;
  static constexpr int kMeasDim = 2;
  static constexpr int kNoiseDim = 2;
  static constexpr int kStateAngle = -1;
  static constexpr int kMeasAngle = -1;

  using State = Eigen::Matrix<double, 4, 1>;
  using Meas = Eigen::Matrix<double, 2, 1>;

  double sigma_accel = 1.0;  // [m/s^2] per axis

  State propagate(const State & s, double dt) const
  {
    State out = s;
    out(0) += s(2) * dt;
    out(1) += s(3) * dt;
    return out;
  }

  Eigen::Matrix<double, 4, 2> process_noise_sqrt(const State &, double dt) const
  {
    Eigen::Matrix<double, 4, 2> g = Eigen::Matrix<double, 4, 2>::Zero();
    g(0, 0) = 0.5 * dt * dt;
    g(1, 1) = 0.5 * dt * dt;
    g(2, 0) = dt;
    g(3, 1) = dt;
    return sigma_accel * g;
  }

  Meas measure(const State & s) const { return {s(0), s(1)}; }
};

}  // namespace fusiontrack

#endif  // FUSIONTRACK__MOTION_MODELS_HPP_
