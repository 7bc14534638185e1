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

#ifndef FUSIONTRACK__SVG_HPP_
#define FUSIONTRACK__SVG_HPP_

#include "fusiontrack/evaluation.hpp"
#include "fusiontrack/rig_geometry.hpp"

#include <Eigen/Core>

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <sstream>
#include <string>

namespace fusiontrack
{

struct SvgParams
{
  double range_m = 40.0;     // half-extent of the drawing
  double px_per_m = 10.0;
  double wedge_radius_m = 30.0;
};

namespace detail
{
class SvgCanvas
{
public:
  explicit SvgCanvas(const SvgParams & p) : p_(p), half_(p.range_m * p.px_per_m) {}

  // vehicle x forward points up, y left points left
  Eigen::Vector2d map(const Eigen::Vector2d & v) const
  {
    return {half_ - v.y() * p_.px_per_m, half_ - v.x() * p_.px_per_m};
  }

  std::string points(const std::vector<Eigen::Vector2d> & pts) const
  {
    std::ostringstream os;
    os << std::fixed << std::setprecision(2);
    for (std::size_t i = 0; i < pts.size(); ++i) {
      const auto q = map(pts[i]);
      os << (i ? " " : "") << q.x() << ',' << q.y();
    }
    return os.str();
  }

  std::vector<Eigen::Vector2d> wedge(const Eigen::Vector2d & apex, double start, double span) const
  {
    std::vector<Eigen::Vector2d> pts{apex};
    const int steps = std::max(2, static_cast<int>(std::ceil(span / deg2rad(2.0))));
    for (int i = 0; i <= steps; ++i) {
      const double a = start + span * i / steps;
      pts.push_back(apex + p_.wedge_radius_m * Eigen::Vector2d(std::cos(a), std::sin(a)));
    }
    return pts;
  }

  double size() const { return 2.0 * half_; }

private:
  SvgParams p_;
  double half_;
};

inline std::vector<Eigen::Vector2d> footprint(const BevEntry & e)
{
  const Eigen::Vector2d u(std::cos(e.yaw), std::sin(e.yaw));
  const Eigen::Vector2d v(-u.y(), u.x());
  const double hl = 0.5 * e.size.x();
  const double hw = 0.5 * e.size.y();
  return {
    e.position + hl * u + hw * v, e.position - hl * u + hw * v, e.position - hl * u - hw * v,
    e.position + hl * u - hw * v};
}
}  // namespace detail

/// Top-down drawing of one frame in the ego vehicle frame: camera wedges (overlaps shaded
/// darker), track footprints labelled with id and class, and truth outlines.
inline std::string emit_bev_plot(
  double t, const BevFrame & tracks, const BevFrame & truth, const SensorRig & rig, const SvgParams & params = {})
{
  const detail::SvgCanvas canvas(params);
  const Eigen::Vector2d apex = rig.ego_extrinsic.translation.head<2>();
  const double yaw0 = rig.ego_extrinsic.yaw();
  std::ostringstream os;
  os << std::fixed << std::setprecision(2);
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << canvas.size() << "\" height=\""
     << canvas.size() << "\" viewBox=\"0 0 " << canvas.size() << ' ' << canvas.size() << "\" data-t=\""
     << std::setprecision(3) << t << std::setprecision(2) << "\">\n";
  os << "<rect width=\"100%\" height=\"100%\" fill=\"#ffffff\"/>\n";
  for (std::size_t i = 0; i < rig.cameras.size(); ++i) {
    const auto fov = rig.camera_fovs()[i];
    os << "<polygon class=\"fov\" data-camera=\"" << i << "\" points=\""
       << canvas.points(canvas.wedge(apex, fov.start + yaw0, fov.width))
       << "\" fill=\"#9ecae1\" fill-opacity=\"0.35\" stroke=\"none\"/>\n";
  }
  for (const auto & s : camera_overlap_sectors(rig)) {
    os << "<polygon class=\"overlap\" data-start=\"" << std::setprecision(9) << s.start << "\" data-span=\""
       << s.width << std::setprecision(2) << "\" points=\"" << canvas.points(canvas.wedge(apex, s.start + yaw0, s.width))
       << "\" fill=\"#08519c\" fill-opacity=\"0.45\" stroke=\"none\"/>\n";
  }
  os << "<polygon class=\"ego\" points=\""
     << canvas.points({{4.0, 0.0}, {-1.0, 1.0}, {-1.0, -1.0}}) << "\" fill=\"#222222\"/>\n";
  for (const auto & e : truth.entries) {
    os << "<polygon class=\"truth\" data-id=\"" << e.id << "\" points=\"" << canvas.points(detail::footprint(e))
       << "\" fill=\"none\" stroke=\"#2ca02c\" stroke-width=\"1.5\" stroke-dasharray=\"4 2\"/>\n";
  }
  for (const auto & e : tracks.entries) {
    const auto label = canvas.map(e.position + Eigen::Vector2d(0.5 * e.size.x() + 1.0, 0.0));
    os << "<polygon class=\"track\" data-id=\"" << e.id << "\" points=\"" << canvas.points(detail::footprint(e))
       << "\" fill=\"#d62728\" fill-opacity=\"0.3\" stroke=\"#d62728\" stroke-width=\"1.5\"/>\n";
    os << "<text class=\"track-label\" x=\"" << label.x() << "\" y=\"" << label.y()
       << "\" font-size=\"10\" text-anchor=\"middle\">" << e.id << ' ' << to_string(e.class_label) << "</text>\n";
  }
  os << "</svg>\n";
  return os.str();
}

}  // namespace fusiontrack

#endif  // FUSIONTRACK__SVG_HPP_
