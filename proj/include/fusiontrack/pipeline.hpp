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

#ifndef FUSIONTRACK__PIPELINE_HPP_
#define FUSIONTRACK__PIPELINE_HPP_

#include "fusiontrack/association.hpp"
#include "fusiontrack/bev_nms.hpp"
#include "fusiontrack/box_estimation.hpp"
#include "fusiontrack/config.hpp"
#include "fusiontrack/evaluation.hpp"
#include "fusiontrack/io/logs.hpp"
#include "fusiontrack/parallel.hpp"
#include "fusiontrack/scenario.hpp"
#include "fusiontrack/sim_render.hpp"
#include "fusiontrack/svg.hpp"
#include "fusiontrack/tracker.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <random>
#include <string>
#include <vector>

namespace fusiontrack
{

struct StageTimes
{
  double render_ms = 0.0;       // simulation, outside the perception budget
  double association_ms = 0.0;
  double estimation_ms = 0.0;
  double nms_ms = 0.0;
  double tracking_ms = 0.0;
  double perception_ms = 0.0;   // association through tracking
};

namespace detail
{
using Clock = std::chrono::steady_clock;

inline double ms_since(Clock::time_point t0)
{
  return std::chrono::duration<double, std::milli>(Clock::now() - t0).count();
}
}  // namespace detail

/// LiDAR-frame box re-expressed in the vehicle frame.
inline Box3D to_vehicle_frame(const Box3D & b, const SensorRig & rig)
{
  Box3D out = b;
  out.center = rig.ego_extrinsic.apply(b.center);
  out.yaw = wrap_angle(b.yaw + rig.ego_extrinsic.yaw());
  return out;
}

/// Per-camera association and box estimation (fanned out), order-normalized merge and
/// sector NMS. Returned boxes are in the LiDAR frame.
inline std::vector<Box3D> perceive(
  const PipelineConfig & cfg, const PointCloud & cloud, const std::vector<std::vector<Detection2D>> & per_camera,
  StageTimes & times, unsigned threads = thread_budget())
{
  const auto & rig = cfg.rig;
  const std::size_t n_cam = std::min(per_camera.size(), rig.cameras.size());

  auto t0 = detail::Clock::now();
  std::vector<std::vector<InstancePoints>> instances(n_cam);
  parallel_for(
    n_cam,
    [&](std::size_t c) {
      if (per_camera[c].empty()) return;
      instances[c] = cfg.association_mode == AssociationMode::Mask
                       ? associate_mask(cloud, per_camera[c], rig.cameras[c], cfg.association)
                       : associate_frustum(cloud, per_camera[c], rig.cameras[c], cfg.association);
    },
    threads);
  times.association_ms = detail::ms_since(t0);

  // camera order, then detection order: independent of which worker finished first
  std::vector<const InstancePoints *> flat;
  for (const auto & cam : instances) {
    for (const auto & inst : cam) flat.push_back(&inst);
  }
  t0 = detail::Clock::now();
  std::vector<std::optional<Box3D>> boxes(flat.size());
  const GeometricBoxEstimator estimator(cfg.segmentation, cfg.amodal);
  const double ground_z = rig.ground_z();
  parallel_for(
    flat.size(),
    [&](std::size_t i) { boxes[i] = estimator.estimate(*flat[i], cfg.priors, ground_z, Eigen::Vector3d::Zero()); },
    threads);
  times.estimation_ms = detail::ms_since(t0);

  t0 = detail::Clock::now();
  std::vector<Box3D> merged;
  for (const auto & b : boxes) {
    if (b) merged.push_back(*b);
  }
  auto kept = suppress(merged, rig, cfg.nms.iou_threshold);
  times.nms_ms = detail::ms_since(t0);
  return kept;
}

/// Simulated world, detections (simulated or ingested) and tracker for one sequence.
class SequenceRunner
{
public:
  struct Frame
  {
    int index = 0;
    TrackLogFrame tracks;
    TruthLogFrame truth;
    StageTimes times;
    std::size_t points = 0;
    std::size_t detections = 0;
    std::size_t boxes = 0;
  };

  SequenceRunner(
    PipelineConfig cfg, Scenario scenario,
    std::optional<std::map<int, std::vector<Detection2D>>> external = std::nullopt)
  : cfg_(std::move(cfg)), scenario_(std::move(scenario)), external_(std::move(external)), tracker_(cfg_.tracker)
  {
    scenario_.validate();
  }

  const PipelineConfig & config() const { return cfg_; }
  const Scenario & scenario() const { return scenario_; }
  const Tracker & tracker() const { return tracker_; }

  Frame step(int frame)
  {
    Frame out;
    out.index = frame;
    const double t = scenario_.time_of(frame);

    auto t0 = detail::Clock::now();
    const WorldState world = world_at(scenario_, t);
    const LidarFrame lidar = render_lidar(world, cfg_.rig, scenario_.noise, scenario_.seed, frame);
    std::vector<std::vector<Detection2D>> per_camera(cfg_.rig.cameras.size());
    if (external_) {
      if (auto it = external_->find(frame); it != external_->end()) {
        for (const auto & d : it->second) {
          if (d.camera_id >= 0 && static_cast<std::size_t>(d.camera_id) < per_camera.size()) {
            per_camera[static_cast<std::size_t>(d.camera_id)].push_back(d);
          }
        }
      }
    } else {
      const auto sim = render_detections(world, cfg_.rig, scenario_.noise, scenario_.seed, frame);
      for (std::size_t c = 0; c < sim.size(); ++c) {
        for (const auto & sd : sim[c]) per_camera[c].push_back(sd.detection);
      }
    }
    out.times.render_ms = detail::ms_since(t0);
    for (const auto & c : per_camera) out.detections += c.size();
    out.points = lidar.cloud.size();

    const auto perception_start = detail::Clock::now();
    const auto boxes = perceive(cfg_, lidar.cloud, per_camera, out.times);
    out.boxes = boxes.size();

    t0 = detail::Clock::now();
    std::vector<Box3D> vehicle_boxes;
    vehicle_boxes.reserve(boxes.size());
    for (const auto & b : boxes) vehicle_boxes.push_back(to_vehicle_frame(b, cfg_.rig));
    const EgoPose ego_now = ego_pose(world, frame);
    const EgoPose ego_prev = frame_ > 0 ? last_ego_ : ego_now;
    const double dt = frame_ > 0 ? t - last_ego_.timestamp : 1.0 / scenario_.rate;
    tracker_.step(vehicle_boxes, ego_prev, ego_now, dt);
    last_ego_ = ego_now;
    ++frame_;
    out.times.tracking_ms = detail::ms_since(t0);
    out.times.perception_ms = detail::ms_since(perception_start);

    out.tracks = track_frame(t, tracker_.tracks());
    out.truth = truth_frame(world);
    for (const auto & tr : tracker_.tracks()) {
      if (!tr.is_finite()) throw std::runtime_error("non-finite track state at frame " + std::to_string(frame));
    }
    return out;
  }

private:
  EgoPose ego_pose(const WorldState & world, int frame) const
  {
    EgoPose p{world.ego.position, world.ego.heading, world.t};
    if (scenario_.noise.ego_pose_sigma > 0.0) {
      auto rng = make_rng(scenario_.seed, frame, RngStream::EgoPose);
      std::normal_distribution<double> g(0.0, scenario_.noise.ego_pose_sigma);
      p.position += Eigen::Vector2d(g(rng), g(rng));
    }
    return p;
  }

  PipelineConfig cfg_;
  Scenario scenario_;
  std::optional<std::map<int, std::vector<Detection2D>>> external_;
  Tracker tracker_;
  EgoPose last_ego_;
  int frame_ = 0;
};

// --- Evaluation over a run ------------------------------------------------------

/// Correspondences between confirmed/coasting tracks and truth, both in the global frame.
inline std::vector<FrameCorrespondence> correspond(
  const std::vector<TrackLogFrame> & tracks, const std::vector<TruthLogFrame> & truth, const EvaluationParams & p)
{
  if (tracks.size() != truth.size()) throw EvaluationError("track and truth logs have different frame counts");
  std::vector<BevFrame> tr;
  std::vector<BevFrame> gt;
  for (std::size_t i = 0; i < truth.size(); ++i) {
    tr.push_back(tracks_to_global(tracks[i], truth[i]));
    gt.push_back(truth_to_bev(truth[i]));
  }
  return match_tracks_to_truth(tr, gt, p);
}

// --- run ------------------------------------------------------------------------

struct RunOptions
{
  std::filesystem::path out_dir = "out";
  int frames = -1;     // -1: whole scenario
  int svg_every = 0;   // 0: no snapshots
  std::optional<std::uint64_t> seed;
  std::optional<std::map<int, std::vector<Detection2D>>> detections;
};

struct RunSummary
{
  int frames = 0;
  std::optional<SequenceErrors> errors;
  std::string evaluation_note;
};

inline int frames_to_run(const Scenario & s, int requested)
{
  return requested < 0 ? s.frame_count() : std::min(requested, s.frame_count());
}

/// Runs a sequence end to end and writes tracks.jsonl, truth.jsonl, metrics.csv,
/// series.csv, timing.csv and optional svg/frame_NNNNN.svg snapshots.
inline RunSummary run(const PipelineConfig & cfg, Scenario scenario, const RunOptions & opt)
{
  if (opt.seed) scenario.seed = *opt.seed;
  namespace fs = std::filesystem;
  fs::create_directories(opt.out_dir);
  if (opt.svg_every > 0) fs::create_directories(opt.out_dir / "svg");

  std::ofstream track_log(opt.out_dir / "tracks.jsonl", std::ios::binary);
  std::ofstream truth_log(opt.out_dir / "truth.jsonl", std::ios::binary);
  std::ofstream timing(opt.out_dir / "timing.csv", std::ios::binary);
  if (!track_log || !truth_log || !timing) throw std::runtime_error("cannot write to " + opt.out_dir.string());
  timing << "frame,t,points,detections,boxes,render_ms,association_ms,estimation_ms,nms_ms,tracking_ms,perception_ms\n";

  SequenceRunner runner(cfg, scenario, opt.detections);
  const int n = frames_to_run(runner.scenario(), opt.frames);
  std::vector<TrackLogFrame> tracks;
  std::vector<TruthLogFrame> truth;
  RunSummary summary;
  for (int k = 0; k < n; ++k) {
    SequenceRunner::Frame f;
    try {
      f = runner.step(k);
    } catch (...) {
      track_log.flush();
      truth_log.flush();
      timing.flush();
      throw;
    }
    write_track_frame(track_log, f.tracks);
    write_truth_frame(truth_log, f.truth);
    char line[256];
    std::snprintf(
      line, sizeof(line), "%d,%.3f,%zu,%zu,%zu,%.3f,%.3f,%.3f,%.3f,%.3f,%.3f\n", k, f.tracks.t, f.points,
      f.detections, f.boxes, f.times.render_ms, f.times.association_ms, f.times.estimation_ms, f.times.nms_ms,
      f.times.tracking_ms, f.times.perception_ms);
    timing << line;
    if (opt.svg_every > 0 && k % opt.svg_every == 0) {
      char name[64];
      std::snprintf(name, sizeof(name), "frame_%05d.svg", k);
      std::ofstream svg(opt.out_dir / "svg" / name, std::ios::binary);
      svg << emit_bev_plot(f.tracks.t, tracks_in_ego_frame(f.tracks), truth_in_ego_frame(f.truth), cfg.rig);
    }
    tracks.push_back(std::move(f.tracks));
    truth.push_back(std::move(f.truth));
    summary.frames = k + 1;
  }

  std::ofstream metrics(opt.out_dir / "metrics.csv", std::ios::binary);
  std::ofstream series(opt.out_dir / "series.csv", std::ios::binary);
  metrics << "sequence,mean_distance_m,mean_heading_rad,mean_speed_mps\n";
  series << "t,truth_id,track_id,distance_m,heading_rad,speed_mps\n";
  try {
    const auto corr = correspond(tracks, truth, cfg.evaluation);
    summary.errors = sequence_errors(corr, scenario.primary_agent);
    const auto & e = *summary.errors;
    char line[256];
    std::snprintf(
      line, sizeof(line), "%s,%.6f,%.6f,%.6f\n", scenario.name.c_str(), e.mean_distance_m, e.mean_heading_rad,
      e.mean_speed_mps);
    metrics << line;
    for (const auto & p : e.series) {
      std::snprintf(
        line, sizeof(line), "%.3f,%d,%d,%.6f,%.6f,%.6f\n", p.t, p.truth_id, p.track_id, p.distance,
        p.heading_error, p.speed_error);
      series << line;
    }
  } catch (const EvaluationError & e) {
    // short runs may end before any track is confirmed
    metrics << scenario.name << ",nan,nan,nan\n";
    summary.evaluation_note = e.what();
  }
  return summary;
}

// --- bench ----------------------------------------------------------------------

struct Percentiles
{
  double p50 = 0.0;
  double p95 = 0.0;
};

/// Nearest-rank percentiles.
inline Percentiles percentiles(std::vector<double> v)
{
  Percentiles p;
  if (v.empty()) return p;
  std::sort(v.begin(), v.end());
  auto rank = [&](double q) {
    const auto idx = static_cast<std::size_t>(std::ceil(q * static_cast<double>(v.size())));
    return v[std::min(v.size() - 1, idx > 0 ? idx - 1 : 0)];
  };
  p.p50 = rank(0.50);
  p.p95 = rank(0.95);
  return p;
}

struct BenchReport
{
  int frames = 0;
  double mean_points = 0.0;
  double mean_detections = 0.0;
  std::size_t cameras = 0;
  std::map<std::string, Percentiles> stages;  // association, estimation, nms, tracking, end_to_end, render
};

/// Times the perception path (association, estimation, NMS, tracking) per frame. Scene
/// rendering is timed separately and excluded from end_to_end; no file IO is performed.
inline BenchReport bench(const PipelineConfig & cfg, const Scenario & scenario, int frames)
{
  SequenceRunner runner(cfg, scenario);
  const int n = frames_to_run(runner.scenario(), frames);
  std::map<std::string, std::vector<double>> samples;
  BenchReport r;
  r.cameras = cfg.rig.cameras.size();
  for (int k = 0; k < n; ++k) {
    const auto f = runner.step(k);
    samples["render"].push_back(f.times.render_ms);
    samples["association"].push_back(f.times.association_ms);
    samples["estimation"].push_back(f.times.estimation_ms);
    samples["nms"].push_back(f.times.nms_ms);
    samples["tracking"].push_back(f.times.tracking_ms);
    samples["end_to_end"].push_back(f.times.perception_ms);
    r.mean_points += static_cast<double>(f.points);
    r.mean_detections += static_cast<double>(f.detections);
  }
  r.frames = n;
  if (n > 0) {
    r.mean_points /= n;
    r.mean_detections /= n;
  }
  for (auto & [k, v] : samples) r.stages[k] = percentiles(v);
  return r;
}

}  // namespace fusiontrack

#endif  // FUSIONTRACK__PIPELINE_HPP_
