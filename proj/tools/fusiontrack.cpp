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

#include "fusiontrack/fusiontrack.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

namespace ft = fusiontrack;

namespace
{

int cmd_run(
  const std::string & config, const std::string & scenario, const std::string & out, int frames, int svg_every,
  std::optional<std::uint64_t> seed, const std::string & detections)
{
  const auto cfg = ft::load_config(config);
  const auto sc = ft::load_scenario(scenario);
  ft::RunOptions opt;
  opt.out_dir = out;
  opt.frames = frames;
  opt.svg_every = svg_every;
  opt.seed = seed;
  if (!detections.empty()) {
    std::ifstream in(detections);
    if (!in) {
      std::cerr << "error: cannot open detections file " << detections << '\n';
      return 2;
    }
    opt.detections = ft::read_detections(in);
  }
  const auto summary = ft::run(cfg, sc, opt);
  std::printf("frames: %d\n", summary.frames);
  if (summary.errors) {
    const auto & e = *summary.errors;
    std::printf(
      "%s: mean distance %.3f m, mean heading %.4f rad, mean speed %.3f m/s, matched %.1f%%\n", sc.name.c_str(),
      e.mean_distance_m, e.mean_heading_rad, e.mean_speed_mps, 100.0 * e.matched_fraction);
  } else {
    std::printf("%s: no evaluation (%s)\n", sc.name.c_str(), summary.evaluation_note.c_str());
  }
  return 0;
}

int cmd_bench(const std::string & config, const std::string & scenario, int frames)
{
  const auto cfg = ft::load_config(config);
  const auto sc = ft::load_scenario(scenario);
  const auto r = ft::bench(cfg, sc, frames);
  std::printf(
    "frames %d, cameras %zu, threads %u, mean points/frame %.0f, mean detections/frame %.1f\n", r.frames, r.cameras,
    ft::thread_budget(), r.mean_points, r.mean_detections);
  std::printf("%-12s %10s %10s\n", "stage", "p50_ms", "p95_ms");
  for (const char * stage : {"association", "estimation", "nms", "tracking", "end_to_end", "render"}) {
    const auto it = r.stages.find(stage);
    if (it == r.stages.end()) continue;
    std::printf("%-12s %10.3f %10.3f\n", stage, it->second.p50, it->second.p95);
  }
  return 0;
}

int cmd_evaluate(const std::string & config, const std::string & tracks, const std::string & truth, int truth_id)
{
  const auto cfg = config.empty() ? ft::PipelineConfig{} : ft::load_config(config);
  std::ifstream tin(tracks);
  std::ifstream gin(truth);
  if (!tin || !gin) {
    std::cerr << "error: cannot open log files\n";
    return 2;
  }
  const auto corr = ft::correspond(ft::read_track_log(tin), ft::read_truth_log(gin), cfg.evaluation);
  const auto e = ft::sequence_errors(corr, truth_id);
  std::printf("mean_distance_m,mean_heading_rad,mean_speed_mps,matched_fraction\n");
  std::printf("%.6f,%.6f,%.6f,%.6f\n", e.mean_distance_m, e.mean_heading_rad, e.mean_speed_mps, e.matched_fraction);
  return 0;
}

}  // namespace

int main(int argc, char ** argv)
{
  CLI::App app{"Camera-LiDAR fusion and SR-UKF tracking on simulated scenarios"};
  app.require_subcommand(1);

  std::string config;
  std::string scenario;
  std::string out = "out";
  int frames = -1;
  int svg_every = 0;
  std::uint64_t seed = 0;
  std::string detections;
  auto * run = app.add_subcommand("run", "Run a scenario and write logs, metrics and timings");
  run->add_option("--config", config, "Main configuration file")->required()->check(CLI::ExistingFile);
  run->add_option("--scenario", scenario, "Scenario file")->required()->check(CLI::ExistingFile);
  run->add_option("--out", out, "Output directory")->required();
  run->add_option("--frames", frames, "Number of frames (default: whole scenario)")->check(CLI::PositiveNumber);
  run->add_option("--svg-every", svg_every, "Write a BEV snapshot every K frames")->check(CLI::NonNegativeNumber);
  auto * seed_opt = run->add_option("--seed", seed, "Override the scenario seed");
  run->add_option("--detections", detections, "JSON-lines detections replacing the simulated detector")
    ->check(CLI::ExistingFile);

  std::string bench_config;
  std::string bench_scenario;
  int bench_frames = 100;
  auto * bench = app.add_subcommand("bench", "Time the perception and tracking path");
  bench->add_option("--config", bench_config, "Main configuration file")->required()->check(CLI::ExistingFile);
  bench->add_option("--scenario", bench_scenario, "Scenario file")->required()->check(CLI::ExistingFile);
  bench->add_option("--frames", bench_frames, "Number of frames")->required()->check(CLI::PositiveNumber);

  std::string eval_config;
  std::string eval_tracks;
  std::string eval_truth;
  int eval_id = -1;
  auto * evaluate = app.add_subcommand("evaluate", "Score a track log against a truth log");
  evaluate->add_option("--config", eval_config, "Main configuration file")->check(CLI::ExistingFile);
  evaluate->add_option("--tracks", eval_tracks, "Track log (JSON lines)")->required()->check(CLI::ExistingFile);
  evaluate->add_option("--truth", eval_truth, "Truth log (JSON lines)")->required()->check(CLI::ExistingFile);
  evaluate->add_option("--agent", eval_id, "Restrict to one ground-truth agent id");

  CLI11_PARSE(app, argc, argv);

  try {
    if (run->parsed()) {
      return cmd_run(
        config, scenario, out, frames, svg_every, seed_opt->count() ? std::optional<std::uint64_t>(seed) : std::nullopt,
        detections);
    }
    if (bench->parsed()) {
      return cmd_bench(bench_config, bench_scenario, bench_frames);
    }
    if (evaluate->parsed()) {
      return cmd_evaluate(eval_config, eval_tracks, eval_truth, eval_id);
    }
  } catch (const ft::ConfigError & e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception & e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
