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

#ifndef FUSIONTRACK__COMMON_HPP_
#define FUSIONTRACK__COMMON_HPP_

#include <Eigen/Core>

#include <array>
#include <cmath>
#include <numbers>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace fusiontrack
{

inline constexpr double kPi = std::numbers::pi;
inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

inline constexpr double deg2rad(double deg) { return deg * kPi / 180.0; }
inline constexpr double rad2deg(double rad) { return rad * 180.0 / kPi; }

/// Wraps an angle to (-pi, pi].
inline double wrap_angle(double a)
{
  a = std::remainder(a, kTwoPi);
  if (a <= -kPi) {
    a += kTwoPi;
  }
  return a;
}

enum class ClassLabel { Car = 0, Pedestrian = 1, Cyclist = 2 };
inline constexpr std::array<ClassLabel, 3> kAllClasses{
  ClassLabel::Car, ClassLabel::Pedestrian, ClassLabel::Cyclist};

inline std::string_view to_string(ClassLabel label)
{
  switch (label) {
    case ClassLabel::Car:
      return "Car";
    case ClassLabel::Pedestrian:
      return "Pedestrian";
    case ClassLabel::Cyclist:
      return "Cyclist";
  }
  return "Car";
}

inline std::optional<ClassLabel> parse_class_label(std::string_view name)
{
  for (auto label : kAllClasses) {
    if (to_string(label) == name) {
      return label;
    }
  }
  return std::nullopt;
}

/// Timestamped LiDAR returns, expressed in the LiDAR frame.
struct PointCloud
{
  std::vector<Eigen::Vector3d> points;
  double timestamp = 0.0;

  std::size_t size() const { return points.size(); }
  bool empty() const { return points.empty(); }
};

}  // namespace fusiontrack

#endif  // FUSIONTRACK__COMMON_HPP_
