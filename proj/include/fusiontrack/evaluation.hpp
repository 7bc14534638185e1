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

#ifndef FUSIONTRACK__EVALUATION_HPP_
#define FUSIONTRACK__EVALUATION_HPP_

#include "fusiontrack/common.hpp"

#include <Eigen/Core>

#include <algorithm>
#include <cmath>
#include <span>
#include <stdexcept>
#include <string>
#include <tuple>
#include <vector>

namespace fusiontrack
{

/// One object on the ground plane, in whatever frame the caller chose for both logs.
struct BevEntry
{
  int id = 0;
  ClassLabel class_label = ClassLabel::Car;
  Eigen::Vector2d position = Eigen::Vector2d::Zero();
  double yaw = 0.0;
  double speed = 0.0;
  Eigen::Vector3d size = Eigen::Vector3d::Ones();
};

struct BevFrame
{
  double t = 0.0;
  std::vector<BevEntry> entries;
};

struct EvaluationParams
{
  double match_cap = 2.0;  // m
  bool yaw_flip_forgiveness = false;
};

struct MatchedPair
{
  int truth_id = 0;
  int track_id = 0;
  double distance = 0.0;
  double heading_error = 0.0;  // [0, pi]
  double speed_error = 0.0;
};

struct FrameCorrespondence
{
  double t = 0.0;
  std::vector<MatchedPair> matches;
  std::vector<int> missed_truth;
  std::vector<int> false_tracks;
};

class EvaluationError : public std::runtime_error
{
public:
  using std::runtime_error::runtime_error;
};

inline double heading_error(double a, double b, bool flip_forgiveness = false)
{
  const double e = std::abs(wrap_angle(a - b));
  return flip_forgiveness ? std::min(e, kPi - e) : e;
}

/// Per frame, greedy nearest-neighbour pairing in BEV (closest pairs first) up to `match_cap`.
inline std::vector<FrameCorrespondence> match_tracks_to_truth(
  std::span<const BevFrame> tracks, std::span<const BevFrame> truth, const EvaluationParams & params = {})
{
  if (tracks.size() != truth.size()) {
    throw EvaluationError("track and truth logs have different frame counts");
  }
  std::vector<FrameCorrespondence> out;
  out.reserve(truth.size());
  for (std::size_t f = 0; f < truth.size(); ++f) {
    if (std::abs(tracks[f].t - truth[f].t) > 1e-6) {
      throw EvaluationError("timestamp mismatch at frame " + std::to_string(f));
    }
    const auto & tr = tracks[f].entries;
    const auto & gt = truth[f].entries;
    std::vector<std::tuple<double, std::size_t, std::size_t>> pairs;
    for (std::size_t g = 0; g < gt.size(); ++g) {
      for (std::size_t k = 0; k < tr.size(); ++k) {
        const double d = (tr[k].position - gt[g].position).norm();
        if (d <= params.match_cap) pairs.emplace_back(d, g, k);
      }
    }
    std::sort(pairs.begin(), pairs.end());
    std::vector<char> gt_used(gt.size(), 0);
    std::vector<char> tr_used(tr.size(), 0);
    FrameCorrespondence fc;
    fc.t = truth[f].t;
    for (const auto & [d, g, k] : pairs) {
      if (gt_used[g] || tr_used[k]) continue;
      gt_used[g] = 1;
      tr_used[k] = 1;
      fc.matches.push_back(
        {gt[g].id, tr[k].id, d, heading_error(tr[k].yaw, gt[g].yaw, params.yaw_flip_forgiveness),
         std::abs(tr[k].speed - gt[g].speed)});
    }
    std::sort(fc.matches.begin(), fc.matches.end(), [](const MatchedPair & a, const MatchedPair & b) {
      return a.truth_id < b.truth_id;
    });
    for (std::size_t g = 0; g < gt.size(); ++g) {
      if (!gt_used[g]) fc.missed_truth.push_back(gt[g].id);
    }
    for (std::size_t k = 0; k < tr.size(); ++k) {
      if (!tr_used[k]) fc.false_tracks.push_back(tr[k].id);
    }
    out.push_back(std::move(fc));
  }
  return out;
}

struct SeriesPoint
{
  double t = 0.0;
  int truth_id = 0;
  int track_id = 0;
  double distance = 0.0;
  double heading_error = 0.0;
  double speed_error = 0.0;
};

struct SequenceErrors
{
  double mean_distance_m = 0.0;
  double mean_heading_rad = 0.0;
  double mean_speed_mps = 0.0;
  std::size_t matched = 0;
  std::size_t truth_total = 0;
  double matched_fraction = 0.0;
  std::vector<SeriesPoint> series;
};

/// Means over matched entries. `truth_id` >= 0 restricts to one ground-truth agent.
inline SequenceErrors sequence_errors(std::span<const FrameCorrespondence> corr, int truth_id = -1)
{
  SequenceErrors e;
  for (const auto & fc : corr) {
    for (const auto & m : fc.matches) {
      if (truth_id >= 0 && m.truth_id != truth_id) continue;
      e.series.push_back({fc.t, m.truth_id, m.track_id, m.distance, m.heading_error, m.speed_error});
      e.mean_distance_m += m.distance;
      e.mean_heading_rad += m.heading_error;
      e.mean_speed_mps += m.speed_error;
    }
    for (int id : fc.missed_truth) {
      if (truth_id < 0 || id == truth_id) ++e.truth_total;
    }
  }
  e.matched = e.series.size();
  e.truth_total += e.matched;
  if (e.matched == 0) {
    throw EvaluationError("no matched frames to evaluate");
  }
  const double n = static_cast<double>(e.matched);
  e.mean_distance_m /= n;
  e.mean_heading_rad /= n;
  e.mean_speed_mps /= n;
  e.matched_fraction = n / static_cast<double>(e.truth_total);
  return e;
}

/// Number of distinct track ids ever matched to `truth_id`, and how often the id changed.
struct IdentityStats
{
  std::size_t distinct_tracks = 0;
  std::size_t switches = 0;
};

inline IdentityStats identity_stats(std::span<const FrameCorrespondence> corr, int truth_id)
{
  IdentityStats s;
  std::vector<int> seen;
  int last = -1;
  for (const auto & fc : corr) {
    for (const auto & m : fc.matches) {
      if (m.truth_id != truth_id) continue;
      if (std::find(seen.begin(), seen.end(), m.track_id) == seen.end()) seen.push_back(m.track_id);
      if (last >= 0 && m.track_id != last) ++s.switches;
      last = m.track_id;
    }
  }
  s.distinct_tracks = seen.size();
  return s;
}

}  // namespace fusiontrack

#endif  // FUSIONTRACK__EVALUATION_HPP_
