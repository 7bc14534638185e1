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

#ifndef FUSIONTRACK__IO__LOGS_HPP_
#define FUSIONTRACK__IO__LOGS_HPP_

#include "fusiontrack/association.hpp"
#include "fusiontrack/evaluation.hpp"
#include "fusiontrack/scenario.hpp"
#include "fusiontrack/tracker.hpp"

#include <json.hpp>

#include <istream>
#include <map>
#include <ostream>
#include <stdexcept>
#include <string>
#include <vector>

namespace fusiontrack
{

struct TrackRecord
{
  int id = 0;
  ClassLabel class_label = ClassLabel::Car;
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;
  double yaw = 0.0;
  double v = 0.0;
  Eigen::Vector3d size = Eigen::Vector3d::Ones();
  TrackStatus status = TrackStatus::Tentative;
};

struct TrackLogFrame
{
  double t = 0.0;
  std::vector<TrackRecord> tracks;
};

struct TruthRecord
{
  int id = 0;
  ClassLabel class_label = ClassLabel::Car;
  double x = 0.0;
  double y = 0.0;
  double yaw = 0.0;
  double v = 0.0;
  Eigen::Vector3d size = Eigen::Vector3d::Ones();
};

struct TruthLogFrame
{
  double t = 0.0;
  std::vector<TruthRecord> agents;
  double ego_x = 0.0;
  double ego_y = 0.0;
  double ego_yaw = 0.0;
};

class LogFormatError : public std::runtime_error
{
public:
  using std::runtime_error::runtime_error;
};

inline TrackRecord to_record(const Track & t)
{
  const auto p = t.position();
  return {t.id, t.class_label, p.x(), p.y(), t.z, wrap_angle(t.yaw()), t.speed(), t.box_size, t.status};
}

inline TrackLogFrame track_frame(double t, const std::vector<Track> & tracks)
{
  TrackLogFrame f;
  f.t = t;
  for (const auto & tr : tracks) {
    f.tracks.push_back(to_record(tr));
  }
  return f;
}

inline TruthLogFrame truth_frame(const WorldState & w)
{
  TruthLogFrame f;
  f.t = w.t;
  for (const auto & a : w.agents) {
    f.agents.push_back(
      {a.id, a.class_label, a.state.position.x(), a.state.position.y(), wrap_angle(a.state.heading),
       a.state.speed, a.size});
  }
  f.ego_x = w.ego.position.x();
  f.ego_y = w.ego.position.y();
  f.ego_yaw = wrap_angle(w.ego.heading);
  return f;
}

/// Tracks (ego frame) re-expressed in the global frame of `ego`; Tentative tracks are skipped
/// unless `include_tentative`.
inline BevFrame tracks_to_global(const TrackLogFrame & f, const TruthLogFrame & ego, bool include_tentative = false)
{
  BevFrame out;
  out.t = f.t;
  const double c = std::cos(ego.ego_yaw);
  const double s = std::sin(ego.ego_yaw);
  for (const auto & r : f.tracks) {
    if (r.status == TrackStatus::Tentative && !include_tentative) continue;
    BevEntry e;
    e.id = r.id;
    e.class_label = r.class_label;
    e.position = Eigen::Vector2d(ego.ego_x + c * r.x - s * r.y, ego.ego_y + s * r.x + c * r.y);
    e.yaw = wrap_angle(r.yaw + ego.ego_yaw);
    e.speed = r.v;
    e.size = r.size;
    out.entries.push_back(e);
  }
  return out;
}

inline BevFrame truth_to_bev(const TruthLogFrame & f)
{
  BevFrame out;
  out.t = f.t;
  for (const auto & a : f.agents) {
    out.entries.push_back({a.id, a.class_label, Eigen::Vector2d(a.x, a.y), a.yaw, a.v, a.size});
  }
  return out;
}

/// Truth agents in the ego vehicle frame, for plotting next to tracks.
inline BevFrame truth_in_ego_frame(const TruthLogFrame & f)
{
  BevFrame out = truth_to_bev(f);
  const double c = std::cos(f.ego_yaw);
  const double s = std::sin(f.ego_yaw);
  for (auto & e : out.entries) {
    const Eigen::Vector2d d = e.position - Eigen::Vector2d(f.ego_x, f.ego_y);
    e.position = Eigen::Vector2d(c * d.x() + s * d.y(), -s * d.x() + c * d.y());
    e.yaw = wrap_angle(e.yaw - f.ego_yaw);
  }
  return out;
}

inline BevFrame tracks_in_ego_frame(const TrackLogFrame & f, bool include_tentative = false)
{
  BevFrame out;
  out.t = f.t;
  for (const auto & r : f.tracks) {
    if (r.status == TrackStatus::Tentative && !include_tentative) continue;
    out.entries.push_back({r.id, r.class_label, Eigen::Vector2d(r.x, r.y), r.yaw, r.v, r.size});
  }
  return out;
}

// --- JSON lines -----------------------------------------------------------------

namespace detail
{
inline ClassLabel class_from_json(const nlohmann::json & j)
{
  const auto name = j.get<std::string>();
  const auto label = parse_class_label(name);
  if (!label) throw LogFormatError("unknown class '" + name + "'");
  return *label;
}

inline TrackStatus status_from_json(const nlohmann::json & j)
{
  const auto name = j.get<std::string>();
  for (auto s : {TrackStatus::Tentative, TrackStatus::Confirmed, TrackStatus::Coasting}) {
    if (name == to_string(s)) return s;
  }
  throw LogFormatError("unknown track status '" + name + "'");
}

inline nlohmann::json size_json(const Eigen::Vector3d & s) { return nlohmann::json::array({s.x(), s.y(), s.z()}); }

inline Eigen::Vector3d size_from_json(const nlohmann::json & j)
{
  if (!j.is_array() || j.size() != 3) throw LogFormatError("size must be [l, w, h]");
  return {j[0].get<double>(), j[1].get<double>(), j[2].get<double>()};
}

template <class Fn>
void for_each_line(std::istream & in, Fn && fn)
{
  std::string line;
  std::size_t n = 0;
  while (std::getline(in, line)) {
    ++n;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      fn(nlohmann::json::parse(line));
    } catch (const nlohmann::json::exception & e) {
      throw LogFormatError("line " + std::to_string(n) + ": " + e.what());
    } catch (const LogFormatError & e) {
      throw LogFormatError("line " + std::to_string(n) + ": " + e.what());
    }
  }
}
}  // namespace detail

inline void write_track_frame(std::ostream & out, const TrackLogFrame & f)
{
  nlohmann::json tracks = nlohmann::json::array();
  for (const auto & r : f.tracks) {
    tracks.push_back({
      {"id", r.id},
      {"class", std::string(to_string(r.class_label))},
      {"x", r.x},
      {"y", r.y},
      {"z", r.z},
      {"yaw", r.yaw},
      {"v", r.v},
      {"size", detail::size_json(r.size)},
      {"status", std::string(to_string(r.status))},
    });
  }
  out << nlohmann::json{{"t", f.t}, {"tracks", tracks}}.dump() << '\n';
}

inline void write_truth_frame(std::ostream & out, const TruthLogFrame & f)
{
  nlohmann::json agents = nlohmann::json::array();
  for (const auto & a : f.agents) {
    agents.push_back({
      {"id", a.id},
      {"class", std::string(to_string(a.class_label))},
      {"x", a.x},
      {"y", a.y},
      {"yaw", a.yaw},
      {"v", a.v},
      {"size", detail::size_json(a.size)},
    });
  }
  out << nlohmann::json{{"t", f.t}, {"agents", agents}, {"ego", {{"x", f.ego_x}, {"y", f.ego_y}, {"yaw", f.ego_yaw}}}}
           .dump()
      << '\n';
}

inline std::vector<TrackLogFrame> read_track_log(std::istream & in)
{
  std::vector<TrackLogFrame> frames;
  detail::for_each_line(in, [&](const nlohmann::json & j) {
    TrackLogFrame f;
    f.t = j.at("t").get<double>();
    for (const auto & r : j.at("tracks")) {
      f.tracks.push_back(
        {r.at("id").get<int>(), detail::class_from_json(r.at("class")), r.at("x").get<double>(),
         r.at("y").get<double>(), r.at("z").get<double>(), r.at("yaw").get<double>(), r.at("v").get<double>(),
         detail::size_from_json(r.at("size")), detail::status_from_json(r.at("status"))});
    }
    frames.push_back(std::move(f));
  });
  return frames;
}

inline std::vector<TruthLogFrame> read_truth_log(std::istream & in)
{
  std::vector<TruthLogFrame> frames;
  detail::for_each_line(in, [&](const nlohmann::json & j) {
    TruthLogFrame f;
    f.t = j.at("t").get<double>();
    for (const auto & a : j.at("agents")) {
      f.agents.push_back(
        {a.at("id").get<int>(), detail::class_from_json(a.at("class")), a.at("x").get<double>(),
         a.at("y").get<double>(), a.at("yaw").get<double>(), a.at("v").get<double>(),
         detail::size_from_json(a.at("size"))});
    }
    const auto & ego = j.at("ego");
    f.ego_x = ego.at("x").get<double>();
    f.ego_y = ego.at("y").get<double>();
    f.ego_yaw = ego.at("yaw").get<double>();
    frames.push_back(std::move(f));
  });
  return frames;
}

/// One detection per line: camera_id, class, score, box [x0, y0, x1, y1], mask (run lengths
/// over the box, row-major, starting with an unset run), optional frame (default 0).
inline void write_detection(std::ostream & out, const Detection2D & d, int frame)
{
  const auto runs = encode_rle(d.mask);
  out << nlohmann::json{
           {"frame", frame},
           {"camera_id", d.camera_id},
           {"class", std::string(to_string(d.class_label))},
           {"score", d.score},
           {"box", {d.box.x0, d.box.y0, d.box.x1, d.box.y1}},
           {"mask", runs},
         }
           .dump()
      << '\n';
}

/// Detections keyed by frame index.
inline std::map<int, std::vector<Detection2D>> read_detections(std::istream & in)
{
  std::map<int, std::vector<Detection2D>> out;
  detail::for_each_line(in, [&](const nlohmann::json & j) {
    Detection2D d;
    d.camera_id = j.at("camera_id").get<int>();
    d.class_label = detail::class_from_json(j.at("class"));
    d.score = j.at("score").get<double>();
    const auto & b = j.at("box");
    if (!b.is_array() || b.size() != 4) throw LogFormatError("box must be [x0, y0, x1, y1]");
    d.box = PixelRect{b[0].get<double>(), b[1].get<double>(), b[2].get<double>(), b[3].get<double>()};
    const auto runs = j.at("mask").get<std::vector<std::uint32_t>>();
    const int w = static_cast<int>(std::lround(d.box.width()));
    const int h = static_cast<int>(std::lround(d.box.height()));
    if (w <= 0 || h <= 0) throw LogFormatError("degenerate detection box");
    try {
      d.mask = decode_rle(runs, w, h);
      d.validate();
    } catch (const std::invalid_argument & e) {
      throw LogFormatError(e.what());
    }
    out[j.value("frame", 0)].push_back(std::move(d));
  });
  return out;
}

}  // namespace fusiontrack

#endif  // FUSIONTRACK__IO__LOGS_HPP_
