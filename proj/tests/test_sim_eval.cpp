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

#include "support/checks.hpp"

#include <gtest/gtest.h>

#include <regex>
#include <sstream>

namespace ft = fusiontrack;
using Eigen::Vector2d;
using Eigen::Vector3d;

namespace
{

ft::Scenario one_car(double x, double y, double heading = 0.0)
{
  ft::Scenario sc;
  ft::AgentScript a;
  a.id = 1;
  a.motion.start = {x, y};
  a.motion.heading = heading;
  sc.agents.push_back(a);
  return sc;
}

std::size_t count_of(const std::string & s, const std::string & needle)
{
  std::size_t n = 0;
  for (std::size_t p = s.find(needle); p != std::string::npos; p = s.find(needle, p + 1)) ++n;
  return n;
}

}  // namespace

// --- scripted world --------------------------------------------------------------------

TEST(World, ConstantVelocity)
{
  ft::Scenario sc;
  ft::AgentScript a;
  a.motion.speed = 5.0;
  sc.agents.push_back(a);
  const auto w = ft::world_at(sc, 2.0);
  ASSERT_EQ(w.agents.size(), 1U);
  EXPECT_LT((w.agents[0].state.position - Vector2d(10, 0)).norm(), 1e-12);
  EXPECT_EQ(w.agents[0].state.speed, 5.0);
}

TEST(World, FullCircleReturnsToStart)
{
  ft::MotionScript m;
  m.kind = ft::ScriptKind::ConstantTurn;
  m.start = {3, 4};
  m.heading = 0.4;
  m.speed = 6.0;
  m.radius = -12.0;
  const double period = ft::kTwoPi * 12.0 / 6.0;
  const auto s = m.at(period);
  EXPECT_LT((s.position - m.start).norm(), 1e-9);
  EXPECT_NEAR(ft::wrap_angle(s.heading - 0.4), 0.0, 1e-9);
  EXPECT_NEAR(m.at(0.25 * period).heading, ft::wrap_angle(0.4 - ft::kPi / 2), 1e-9);
}

TEST(World, SplinePassesThroughWaypoints)
{
  ft::MotionScript m;
  m.kind = ft::ScriptKind::WaypointSpline;
  m.waypoints = {{0, {0, 0}}, {2, {10, 0}}, {4, {10, 0}}, {6, {20, 5}}};
  for (const auto & w : m.waypoints) EXPECT_LT((m.at(w.t).position - w.position).norm(), 1e-12);
  EXPECT_NEAR(m.at(3.0).speed, 0.0, 1e-9);  // repeated position is a stop
}

TEST(World, SpawnHiddenAndRange)
{
  ft::Scenario sc = one_car(10, 0);
  sc.agents[0].spawn = 1.0;
  sc.agents[0].hidden = {{2.0, 2.5}};
  EXPECT_TRUE(ft::world_at(sc, 0.5).agents.empty());
  EXPECT_FALSE(ft::world_at(sc, 1.5).agents[0].hidden);
  EXPECT_TRUE(ft::world_at(sc, 2.2).agents[0].hidden);
  EXPECT_THROW(ft::world_at(sc, -0.1), std::out_of_range);
  EXPECT_THROW(ft::world_at(sc, sc.duration + 0.5), std::out_of_range);
}

// --- LiDAR -------------------------------------------------------------------------------

TEST(Lidar, EmptyWorldIsGroundOnly)
{
  const auto rig = ft::default_rig();
  const ft::Scenario sc;
  const auto f = ft::render_lidar(ft::world_at(sc, 0), rig, sc.noise, 1, 0);
  ASSERT_FALSE(f.cloud.empty());
  std::size_t downward = 0;
  for (double a : rig.lidar.vertical_angles_deg) downward += a < 0.0;
  EXPECT_LE(f.cloud.size(), downward * static_cast<std::size_t>(rig.lidar.columns()));
  const double tol = 3.0 * sc.noise.lidar_range_sigma + 1e-9;
  for (std::size_t i = 0; i < f.cloud.size(); ++i) {
    EXPECT_EQ(f.labels[i], ft::kGroundLabel);
    EXPECT_NEAR(f.cloud.points[i].z(), rig.ground_z(), tol);
    EXPECT_LE(f.cloud.points[i].norm(), rig.lidar.max_range + tol);
  }
}

TEST(Lidar, ReturnsMatchRayCastWithinThreeSigma)
{
  const auto rig = ft::default_rig();
  const auto sc = one_car(12, 1, 0.6);
  const auto world = ft::world_at(sc, 0);
  const auto f = ft::render_lidar(world, rig, sc.noise, 3, 0);
  const auto box = ft::agents_in_lidar_frame(world, rig)[0].box;
  const double tol = 3.0 * sc.noise.lidar_range_sigma + 1e-9;
  std::size_t hits = 0;
  for (std::size_t i = 0; i < f.cloud.size(); ++i) {
    if (f.labels[i] != 1) continue;
    ++hits;
    const Vector3d p = f.cloud.points[i];
    const auto d = ft::ray_box_distance(p.normalized(), box);
    ASSERT_TRUE(d);
    EXPECT_NEAR(p.norm(), *d, tol);
    EXPECT_TRUE(box.contains(p, tol));
  }
  EXPECT_GT(hits, 200U);
  EXPECT_LE(f.cloud.size(), static_cast<std::size_t>(rig.lidar.n_layers * rig.lidar.columns()));
}

TEST(Lidar, DeterministicPerSeedAndFrame)
{
  const auto rig = ft::default_rig();
  const auto sc = one_car(8, -3);
  const auto w = ft::world_at(sc, 0);
  const auto a = ft::render_lidar(w, rig, sc.noise, 11, 4);
  const auto b = ft::render_lidar(w, rig, sc.noise, 11, 4);
  const auto c = ft::render_lidar(w, rig, sc.noise, 11, 5);
  EXPECT_EQ(a.cloud.points, b.cloud.points);
  EXPECT_EQ(a.labels, b.labels);
  EXPECT_NE(a.cloud.points, c.cloud.points);
}

TEST(Lidar, HiddenAgentHasNoReturns)
{
  auto sc = one_car(10, 0);
  sc.agents[0].hidden = {{0.0, 1.0}};
  const auto f = ft::render_lidar(ft::world_at(sc, 0), ft::default_rig(), sc.noise, 1, 0);
  EXPECT_TRUE(std::all_of(f.labels.begin(), f.labels.end(), [](int l) { return l == ft::kGroundLabel; }));
}

TEST(RayBox, Examples)
{
  ft::Box3D b;
  b.center = {10, 0, 0};
  b.size = {2, 2, 2};
  EXPECT_NEAR(*ft::ray_box_distance({1, 0, 0}, b), 9.0, 1e-12);
  EXPECT_FALSE(ft::ray_box_distance({-1, 0, 0}, b));
  EXPECT_FALSE(ft::ray_box_distance({0, 1, 0}, b));
}

// --- detections --------------------------------------------------------------------------

TEST(Detections, HiddenAndDroppedAgentsAreAbsent)
{
  const auto rig = ft::default_rig();
  auto sc = one_car(10, 0);
  sc.noise.detection_dropout = 0.0;
  auto dets = ft::render_detections(ft::world_at(sc, 0), rig, sc.noise, 1, 0);
  std::size_t n = 0;
  for (const auto & c : dets) n += c.size();
  EXPECT_GE(n, 1U);

  sc.agents[0].hidden = {{0.0, 1.0}};
  dets = ft::render_detections(ft::world_at(sc, 0), rig, sc.noise, 1, 0);
  for (const auto & c : dets) EXPECT_TRUE(c.empty());

  sc.agents[0].hidden.clear();
  sc.noise.detection_dropout = 1.0;
  dets = ft::render_detections(ft::world_at(sc, 0), rig, sc.noise, 1, 0);
  for (const auto & c : dets) EXPECT_TRUE(c.empty());
}

TEST(Detections, FullyOccludedAgentIsNotDetected)
{
  // a pedestrian directly behind a car, as seen from the rig
  ft::Scenario sc = one_car(10, 0);
  sc.noise.detection_dropout = 0.0;
  ft::AgentScript p;
  p.id = 2;
  p.class_label = ft::ClassLabel::Pedestrian;
  p.size = {0.5, 0.5, 1.2};
  p.motion.start = {14, 0};
  sc.agents.push_back(p);
  const auto dets = ft::render_detections(ft::world_at(sc, 0), ft::default_rig(), sc.noise, 1, 0);
  for (const auto & c : dets) {
    for (const auto & d : c) EXPECT_NE(d.agent_id, 2);
  }
}

TEST(Detections, MaskEqualsConservativeSilhouetteAtZeroNoise)
{
  const auto rig = ft::default_rig();
  std::mt19937_64 rng(8);
  for (int trial = 0; trial < 10; ++trial) {
    auto sc = one_car(oracle::uniform(rng, 6, 25), oracle::uniform(rng, -8, 8), oracle::uniform(rng, -3, 3));
    sc.noise.mask_random_px = 0;
    sc.noise.detection_dropout = 0.0;
    const auto world = ft::world_at(sc, 0);
    const auto box = ft::agents_in_lidar_frame(world, rig)[0].box;
    const auto dets = ft::render_detections(world, rig, sc.noise, 1, 0);
    for (std::size_t c = 0; c < rig.cameras.size(); ++c) {
      const auto poly = ft::cuboid_silhouette(box, rig.cameras[c]);
      if (dets[c].empty()) continue;
      const auto & d = dets[c][0].detection;
      EXPECT_NO_THROW(d.validate());
      std::size_t mismatches = 0;
      for (int y = 0; y < rig.cameras[c].height; ++y) {
        for (int x = 0; x < rig.cameras[c].width; ++x) {
          mismatches += d.mask_at(x, y) != oracle::pixel_meets_polygon(x, y, poly);
        }
      }
      EXPECT_EQ(mismatches, 0U) << "camera " << c;
    }
  }
}

TEST(Detections, ScoresInUnitInterval)
{
  auto sc = one_car(10, 0);
  sc.noise.detection_dropout = 0.0;
  for (int frame = 0; frame < 20; ++frame) {
    for (const auto & c : ft::render_detections(ft::world_at(sc, 0), ft::default_rig(), sc.noise, 1, frame)) {
      for (const auto & d : c) {
        EXPECT_GE(d.detection.score, 0.0);
        EXPECT_LE(d.detection.score, 1.0);
      }
    }
  }
}

TEST(SimFrames, FrustumEquivalenceSubsetAndRecovery)
{
  std::mt19937_64 rng(31);
  auto rig = ft::default_rig();
  rig.lidar.horizontal_resolution_deg = 0.2;
  std::size_t labeled = 0;
  std::size_t recovered = 0;
  for (int frame = 0; frame < 10; ++frame) {
    const auto st = checks::check_sim_frame(rng, rig);
    EXPECT_EQ(st.frustum_mismatches, 0U);
    EXPECT_EQ(st.subset_violations, 0U);
    labeled += st.labeled;
    recovered += st.recovered;
  }
  ASSERT_GT(labeled, 0U);
  EXPECT_GE(static_cast<double>(recovered) / static_cast<double>(labeled), 0.99);
}

// --- evaluation ------------------------------------------------------------------------

namespace
{
std::vector<ft::BevFrame> straight_log(double offset_y, int frames = 3, int id = 1)
{
  std::vector<ft::BevFrame> out;
  for (int k = 0; k < frames; ++k) {
    ft::BevFrame f;
    f.t = 0.1 * k;
    ft::BevEntry e;
    e.id = id;
    e.position = {k * 1.0, offset_y};
    e.speed = 10.0;
    f.entries.push_back(e);
    out.push_back(f);
  }
  return out;
}
}  // namespace

TEST(Evaluation, IdenticalLogsScoreZero)
{
  const auto log = straight_log(0.0);
  const auto e = ft::sequence_errors(ft::match_tracks_to_truth(log, log));
  EXPECT_EQ(e.mean_distance_m, 0.0);
  EXPECT_EQ(e.mean_heading_rad, 0.0);
  EXPECT_EQ(e.mean_speed_mps, 0.0);
  EXPECT_EQ(e.matched, 3U);
  EXPECT_EQ(e.matched_fraction, 1.0);
}

TEST(Evaluation, ConstantOffset)
{
  const auto e = ft::sequence_errors(ft::match_tracks_to_truth(straight_log(0.5), straight_log(0.0)));
  EXPECT_NEAR(e.mean_distance_m, 0.5, 1e-12);
}

TEST(Evaluation, MeanOverFrames)
{
  auto tracks = straight_log(0.0);
  const double off[] = {0.3, 0.6, 0.9};
  for (int k = 0; k < 3; ++k) tracks[static_cast<std::size_t>(k)].entries[0].position.y() = off[k];
  const auto e = ft::sequence_errors(ft::match_tracks_to_truth(tracks, straight_log(0.0)));
  EXPECT_NEAR(e.mean_distance_m, 0.6, 1e-12);
}

TEST(Evaluation, BeyondCapIsUnmatched)
{
  const auto corr = ft::match_tracks_to_truth(straight_log(3.0), straight_log(0.0));
  EXPECT_TRUE(corr[0].matches.empty());
  EXPECT_THROW(ft::sequence_errors(corr), ft::EvaluationError);
  EXPECT_EQ(corr[0].missed_truth, std::vector<int>{1});
  EXPECT_EQ(corr[0].false_tracks, std::vector<int>{1});
}

TEST(Evaluation, EmptyLogs)
{
  const std::vector<ft::BevFrame> none;
  const auto corr = ft::match_tracks_to_truth(none, none);
  EXPECT_TRUE(corr.empty());
  EXPECT_THROW(ft::sequence_errors(corr), ft::EvaluationError);
}

TEST(Evaluation, SymmetricInRoles)
{
  auto a = straight_log(0.4);
  a[1].entries[0].yaw = 0.2;
  a[2].entries[0].speed = 11.0;
  const auto b = straight_log(-0.2);
  const auto ab = ft::sequence_errors(ft::match_tracks_to_truth(a, b));
  const auto ba = ft::sequence_errors(ft::match_tracks_to_truth(b, a));
  EXPECT_DOUBLE_EQ(ab.mean_distance_m, ba.mean_distance_m);
  EXPECT_DOUBLE_EQ(ab.mean_heading_rad, ba.mean_heading_rad);
  EXPECT_DOUBLE_EQ(ab.mean_speed_mps, ba.mean_speed_mps);
}

TEST(Evaluation, MonotoneInOffset)
{
  double last = -1.0;
  for (double off : {0.0, 0.2, 0.7, 1.5, 1.9}) {
    const auto e = ft::sequence_errors(ft::match_tracks_to_truth(straight_log(off), straight_log(0.0)));
    EXPECT_GT(e.mean_distance_m, last);
    last = e.mean_distance_m;
  }
}

TEST(Evaluation, TimestampMismatchThrows)
{
  auto a = straight_log(0.0);
  a[1].t += 0.05;
  EXPECT_THROW(ft::match_tracks_to_truth(a, straight_log(0.0)), ft::EvaluationError);
  EXPECT_THROW(ft::match_tracks_to_truth(straight_log(0.0, 2), straight_log(0.0, 3)), ft::EvaluationError);
}

TEST(Evaluation, IdentitySwitchesAreCounted)
{
  auto tracks = straight_log(0.0, 6);
  for (std::size_t k = 3; k < tracks.size(); ++k) tracks[k].entries[0].id = 9;
  const auto corr = ft::match_tracks_to_truth(tracks, straight_log(0.0, 6));
  const auto s = ft::identity_stats(corr, 1);
  EXPECT_EQ(s.distinct_tracks, 2U);
  EXPECT_EQ(s.switches, 1U);
  EXPECT_EQ(ft::identity_stats(ft::match_tracks_to_truth(straight_log(0.0, 6), straight_log(0.0, 6)), 1).switches, 0U);
}

TEST(Evaluation, HeadingErrorWraps)
{
  EXPECT_NEAR(ft::heading_error(ft::kPi - 0.1, -ft::kPi + 0.1), 0.2, 1e-12);
  EXPECT_NEAR(ft::heading_error(0.0, ft::kPi - 0.1, true), 0.1, 1e-12);
}

// --- BEV plot ----------------------------------------------------------------------------

TEST(BevPlot, EmptyFrameShowsRig)
{
  const auto rig = ft::default_rig();
  const auto svg = ft::emit_bev_plot(0.0, {}, {}, rig);
  EXPECT_EQ(count_of(svg, "class=\"fov\""), 5U);
  EXPECT_EQ(count_of(svg, "class=\"overlap\""), 5U);
  EXPECT_EQ(count_of(svg, "class=\"ego\""), 1U);
  EXPECT_EQ(count_of(svg, "class=\"track\""), 0U);
  EXPECT_EQ(svg.rfind("</svg>"), svg.size() - 7);
}

TEST(BevPlot, OneTrackOneLabel)
{
  ft::BevFrame tracks;
  ft::BevEntry e;
  e.id = 42;
  e.position = {10, 2};
  e.size = {4.5, 1.8, 1.5};
  tracks.entries.push_back(e);
  const auto svg = ft::emit_bev_plot(0.5, tracks, {}, ft::default_rig());
  EXPECT_EQ(count_of(svg, "class=\"track\""), 1U);
  EXPECT_EQ(count_of(svg, "class=\"track-label\""), 1U);
  EXPECT_NE(svg.find(">42 Car</text>"), std::string::npos);
}

TEST(BevPlot, OverlapWedgesMatchSectors)
{
  const auto rig = ft::default_rig();
  const auto sectors = ft::camera_overlap_sectors(rig);
  const auto svg = ft::emit_bev_plot(0.0, {}, {}, rig);
  const std::regex re("data-start=\"([-0-9.e]+)\" data-span=\"([-0-9.e]+)\"");
  std::size_t k = 0;
  for (auto it = std::sregex_iterator(svg.begin(), svg.end(), re); it != std::sregex_iterator(); ++it, ++k) {
    ASSERT_LT(k, sectors.size());
    EXPECT_NEAR(std::stod((*it)[1]), sectors[k].start, 1e-6);
    EXPECT_NEAR(std::stod((*it)[2]), sectors[k].width, 1e-6);
  }
  EXPECT_EQ(k, sectors.size());
}

// --- configuration and logs --------------------------------------------------------------

TEST(Config, ErrorsNameTheKey)
{
  auto key_of = [](const std::string & text) -> std::string {
    try {
      ft::parse_config(text);
    } catch (const ft::ConfigError & e) {
      EXPECT_NE(std::string(e.what()).find(e.key()), std::string::npos);
      return e.key();
    }
    return "";
  };
  EXPECT_EQ(key_of("[nms]\niou_threshold = 1.5\n"), "nms.iou_threshold");
  EXPECT_EQ(key_of("[association]\nmode = \"psychic\"\n"), "association.mode");
  EXPECT_EQ(key_of("[tracker]\nbogus = 1\n"), "tracker.bogus");
  EXPECT_EQ(key_of("[nms]\niou_threshold = \"high\"\n"), "nms.iou_threshold");
  EXPECT_EQ(key_of(""), "");
}

TEST(Config, BundledFilesLoad)
{
  const auto cfg = ft::load_config(FUSIONTRACK_SOURCE_DIR "/config/default.toml");
  EXPECT_EQ(cfg.rig.cameras.size(), 5U);
  EXPECT_EQ(ft::camera_overlap_sectors(cfg.rig).size(), 5U);
  for (const char * name : {"roundabout", "lane_change", "ped_crossing", "occlusion", "bench_20"}) {
    const auto sc = ft::load_scenario(std::string(FUSIONTRACK_SOURCE_DIR "/scenarios/") + name + ".toml");
    EXPECT_EQ(sc.name, name);
    EXPECT_NO_THROW(sc.validate());
  }
}

TEST(Logs, TrackAndTruthRoundTrip)
{
  ft::Tracker tr;
  ft::Box3D b;
  b.center = {10, 2, -1};
  b.yaw = 0.3;
  tr.step(std::vector<ft::Box3D>{b}, {}, {}, 0.1);
  const auto frame = ft::track_frame(0.1, tr.tracks());
  std::stringstream s;
  ft::write_track_frame(s, frame);
  ft::write_track_frame(s, frame);
  const auto back = ft::read_track_log(s);
  ASSERT_EQ(back.size(), 2U);
  ASSERT_EQ(back[0].tracks.size(), 1U);
  EXPECT_EQ(back[0].tracks[0].id, frame.tracks[0].id);
  EXPECT_DOUBLE_EQ(back[0].tracks[0].x, frame.tracks[0].x);
  EXPECT_DOUBLE_EQ(back[0].tracks[0].yaw, frame.tracks[0].yaw);
  EXPECT_EQ(back[0].tracks[0].status, frame.tracks[0].status);

  const auto truth = ft::truth_frame(ft::world_at(one_car(5, 6, 0.2), 0.0));
  std::stringstream g;
  ft::write_truth_frame(g, truth);
  const auto tb = ft::read_truth_log(g);
  ASSERT_EQ(tb.size(), 1U);
  ASSERT_EQ(tb[0].agents.size(), 1U);
  EXPECT_DOUBLE_EQ(tb[0].agents[0].x, 5.0);
  EXPECT_DOUBLE_EQ(tb[0].agents[0].yaw, 0.2);
}

TEST(Logs, DetectionRoundTrip)
{
  auto sc = one_car(10, 1);
  sc.noise.detection_dropout = 0.0;
  const auto dets = ft::render_detections(ft::world_at(sc, 0), ft::default_rig(), sc.noise, 1, 0);
  std::stringstream s;
  std::size_t n = 0;
  for (const auto & c : dets) {
    for (const auto & d : c) {
      ft::write_detection(s, d.detection, 7);
      ++n;
    }
  }
  const auto back = ft::read_detections(s);
  ASSERT_EQ(back.size(), 1U);
  ASSERT_EQ(back.at(7).size(), n);
  std::size_t i = 0;
  for (const auto & c : dets) {
    for (const auto & d : c) {
      const auto & r = back.at(7)[i++];
      EXPECT_EQ(r.mask, d.detection.mask);
      EXPECT_EQ(r.camera_id, d.detection.camera_id);
      EXPECT_DOUBLE_EQ(r.box.x0, d.detection.box.x0);
    }
  }
}
