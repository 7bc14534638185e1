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

#ifndef FUSIONTRACK__CONFIG_HPP_
#define FUSIONTRACK__CONFIG_HPP_

#include "fusiontrack/association.hpp"
#include "fusiontrack/bev_nms.hpp"
#include "fusiontrack/box_estimation.hpp"
#include "fusiontrack/evaluation.hpp"
#include "fusiontrack/rig_geometry.hpp"
#include "fusiontrack/scenario.hpp"
#include "fusiontrack/tracker.hpp"

#include <toml.hpp>

#include <algorithm>
#include <cctype>
#include <filesystem>
#include <fstream>
#include <optional>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace fusiontrack
{

/// Configuration problem; `key()` is the dotted path of the offending entry.
class ConfigError : public std::runtime_error
{
public:
  ConfigError(std::string key, const std::string & message)
  : std::runtime_error("config key '" + key + "': " + message), key_(std::move(key))
  {
  }

  const std::string & key() const { return key_; }

private:
  std::string key_;
};

enum class AssociationMode { Mask, Frustum };

struct PipelineConfig
{
  SensorRig rig = default_rig();
  SizePriors priors;
  NmsParams nms;
  TrackerParams tracker;
  AssociationMode association_mode = AssociationMode::Mask;
  AssociationParams association;
  SegmentationParams segmentation;
  AmodalFitParams amodal;
  EvaluationParams evaluation;
};

namespace detail
{
inline std::string lower(std::string_view s)
{
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(), [](unsigned char c) { return std::tolower(c); });
  return out;
}

/// Typed access to one TOML table that remembers which keys were consumed.
class TableReader
{
public:
  TableReader(const toml::table & table, std::string path) : table_(table), path_(std::move(path)) {}

  std::string key_path(std::string_view key) const
  {
    return path_.empty() ? std::string(key) : path_ + "." + std::string(key);
  }

  bool has(std::string_view key) const { return table_.contains(key); }

  const toml::node * node(std::string_view key)
  {
    used_.insert(std::string(key));
    return table_.get(key);
  }

  double number(std::string_view key, double fallback)
  {
    const auto * n = node(key);
    return n ? as_number(*n, key_path(key)) : fallback;
  }

  double required_number(std::string_view key)
  {
    const auto * n = node(key);
    if (!n) throw ConfigError(key_path(key), "missing required value");
    return as_number(*n, key_path(key));
  }

  std::int64_t integer(std::string_view key, std::int64_t fallback)
  {
    const auto * n = node(key);
    if (!n) return fallback;
    const auto v = n->value_exact<std::int64_t>();
    if (!v) throw ConfigError(key_path(key), "expected an integer");
    return *v;
  }

  std::int64_t required_integer(std::string_view key)
  {
    if (!has(key)) {
      used_.insert(std::string(key));
      throw ConfigError(key_path(key), "missing required value");
    }
    return integer(key, 0);
  }

  bool boolean(std::string_view key, bool fallback)
  {
    const auto * n = node(key);
    if (!n) return fallback;
    const auto v = n->value_exact<bool>();
    if (!v) throw ConfigError(key_path(key), "expected true or false");
    return *v;
  }

  std::optional<std::string> string(std::string_view key)
  {
    const auto * n = node(key);
    if (!n) return std::nullopt;
    const auto v = n->value_exact<std::string>();
    if (!v) throw ConfigError(key_path(key), "expected a string");
    return *v;
  }

  std::optional<std::vector<double>> numbers(std::string_view key, std::size_t expected = 0)
  {
    const auto * n = node(key);
    if (!n) return std::nullopt;
    const auto * arr = n->as_array();
    if (!arr) throw ConfigError(key_path(key), "expected an array of numbers");
    std::vector<double> out;
    for (std::size_t i = 0; i < arr->size(); ++i) {
      out.push_back(as_number(*arr->get(i), key_path(key) + "[" + std::to_string(i) + "]"));
    }
    if (expected && out.size() != expected) {
      throw ConfigError(key_path(key), "expected " + std::to_string(expected) + " numbers");
    }
    return out;
  }

  std::optional<TableReader> table(std::string_view key)
  {
    const auto * n = node(key);
    if (!n) return std::nullopt;
    const auto * t = n->as_table();
    if (!t) throw ConfigError(key_path(key), "expected a table");
    return TableReader(*t, key_path(key));
  }

  const toml::array * array(std::string_view key)
  {
    const auto * n = node(key);
    if (!n) return nullptr;
    const auto * a = n->as_array();
    if (!a) throw ConfigError(key_path(key), "expected an array");
    return a;
  }

  /// Rejects keys that were never read.
  void finish() const
  {
    for (const auto & [k, v] : table_) {
      if (!used_.count(std::string(k.str()))) {
        throw ConfigError(key_path(k.str()), "unknown key");
      }
    }
  }

  const std::string & path() const { return path_; }

private:
  static double as_number(const toml::node & n, const std::string & path)
  {
    if (const auto * f = n.as_floating_point()) return f->get();
    if (const auto * i = n.as_integer()) return static_cast<double>(i->get());
    throw ConfigError(path, "expected a number");
  }

  const toml::table & table_;
  std::string path_;
  std::set<std::string> used_;
};

inline void require(bool ok, const std::string & key, const std::string & message)
{
  if (!ok) throw ConfigError(key, message);
}

inline Pose read_pose(TableReader & t)
{
  const auto tr = t.numbers("translation", 3);
  const auto q = t.numbers("rotation_quat", 4);
  require(tr.has_value(), t.key_path("translation"), "missing required value");
  require(q.has_value(), t.key_path("rotation_quat"), "missing required value");
  Eigen::Quaterniond quat((*q)[0], (*q)[1], (*q)[2], (*q)[3]);
  require(std::abs(quat.norm() - 1.0) < 1e-6, t.key_path("rotation_quat"), "quaternion must have unit norm");
  Pose p;
  p.translation = Eigen::Vector3d((*tr)[0], (*tr)[1], (*tr)[2]);
  p.rotation = quat.normalized();
  return p;
}

inline toml::table parse_toml(std::string_view text, const std::string & source)
{
  try {
    return toml::parse(text, source);
  } catch (const toml::parse_error & e) {
    std::ostringstream os;
    os << e.description() << " (line " << e.source().begin.line << ")";
    throw ConfigError(source, os.str());
  }
}

inline std::string read_file(const std::filesystem::path & path)
{
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError(path.string(), "cannot open file");
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

inline MotionKind parse_motion_kind(const std::string & s, const std::string & key)
{
  const auto l = lower(s);
  if (l == "ctrv") return MotionKind::CTRV;
  if (l == "cv") return MotionKind::CV;
  throw ConfigError(key, "expected \"CTRV\" or \"CV\"");
}

inline ClassLabel parse_class(const std::string & s, const std::string & key)
{
  for (auto c : kAllClasses) {
    if (lower(to_string(c)) == lower(s)) return c;
  }
  throw ConfigError(key, "unknown class '" + s + "'");
}

inline void read_rig(TableReader & top, SensorRig & rig)
{
  if (const auto * cams = top.array("camera")) {
    rig.cameras.clear();
    for (std::size_t i = 0; i < cams->size(); ++i) {
      const auto * tbl = cams->get(i)->as_table();
      const std::string path = "camera[" + std::to_string(i) + "]";
      require(tbl != nullptr, path, "expected a table");
      TableReader t(*tbl, path);
      CameraModel cam;
      cam.fx = t.required_number("fx");
      cam.fy = t.required_number("fy");
      cam.cx = t.required_number("cx");
      cam.cy = t.required_number("cy");
      cam.width = static_cast<int>(t.required_integer("width"));
      cam.height = static_cast<int>(t.required_integer("height"));
      require(cam.fx > 0.0, t.key_path("fx"), "must be > 0");
      require(cam.fy > 0.0, t.key_path("fy"), "must be > 0");
      require(cam.width > 0, t.key_path("width"), "must be > 0");
      require(cam.height > 0, t.key_path("height"), "must be > 0");
      require(cam.cx > 0.0 && cam.cx < cam.width, t.key_path("cx"), "must lie inside the image");
      require(cam.cy > 0.0 && cam.cy < cam.height, t.key_path("cy"), "must lie inside the image");
      cam.hfov_deg = t.number("hfov_deg", CameraModel::hfov_from_intrinsics(cam.fx, cam.width));
      cam.extrinsic = read_pose(t);
      t.finish();
      try {
        cam.validate();
      } catch (const std::invalid_argument & e) {
        throw ConfigError(path, e.what());
      }
      rig.cameras.push_back(cam);
    }
  }
  if (auto l = top.table("lidar")) {
    auto & lidar = rig.lidar;
    const int n = static_cast<int>(l->integer("n_layers", lidar.n_layers));
    require(n > 0, l->key_path("n_layers"), "must be > 0");
    if (auto angles = l->numbers("vertical_angles_deg")) {
      require(angles->size() == static_cast<std::size_t>(n), l->key_path("vertical_angles_deg"),
              "length must equal n_layers");
      lidar.vertical_angles_deg = *angles;
    } else if (l->has("vertical_min_deg") || l->has("vertical_max_deg")) {
      const double lo = l->required_number("vertical_min_deg");
      const double hi = l->required_number("vertical_max_deg");
      require(hi > lo, l->key_path("vertical_max_deg"), "must exceed vertical_min_deg");
      lidar.vertical_angles_deg = LidarModel::uniform_angles(n, lo, hi);
    }
    lidar.n_layers = n;
    lidar.horizontal_resolution_deg = l->number("horizontal_resolution_deg", lidar.horizontal_resolution_deg);
    lidar.max_range = l->number("max_range_m", lidar.max_range);
    lidar.range_noise_sigma = l->number("range_noise_sigma_m", lidar.range_noise_sigma);
    require(lidar.horizontal_resolution_deg > 0.0, l->key_path("horizontal_resolution_deg"), "must be > 0");
    require(lidar.max_range > 0.0, l->key_path("max_range_m"), "must be > 0");
    require(lidar.range_noise_sigma >= 0.0, l->key_path("range_noise_sigma_m"), "must be >= 0");
    try {
      lidar.validate();
    } catch (const std::invalid_argument & e) {
      throw ConfigError("lidar", e.what());
    }
    l->finish();
  }
  if (auto e = top.table("ego_extrinsic")) {
    rig.ego_extrinsic = read_pose(*e);
    e->finish();
  }
  try {
    rig.validate();
  } catch (const std::invalid_argument & e) {
    throw ConfigError("camera", e.what());
  }
}
}  // namespace detail

/// Main configuration from TOML text. Missing sections keep their defaults; unknown keys
/// and out-of-range values raise ConfigError naming the key.
inline PipelineConfig parse_config(std::string_view text, const std::string & source = "config")
{
  using detail::require;
  toml::table root = detail::parse_toml(text, source);
  detail::TableReader top(root, "");
  PipelineConfig cfg;
  detail::read_rig(top, cfg.rig);

  if (auto pr = top.table("priors")) {
    for (auto c : kAllClasses) {
      if (auto t = pr->table(detail::lower(to_string(c)))) {
        auto & prior = cfg.priors[c];
        if (auto v = t->numbers("mean", 3)) prior.mean_size = {(*v)[0], (*v)[1], (*v)[2]};
        if (auto v = t->numbers("min", 3)) prior.min_size = {(*v)[0], (*v)[1], (*v)[2]};
        if (auto v = t->numbers("max", 3)) prior.max_size = {(*v)[0], (*v)[1], (*v)[2]};
        try {
          prior.validate();
        } catch (const std::invalid_argument & e) {
          throw ConfigError(t->path(), e.what());
        }
        t->finish();
      }
    }
    pr->finish();
  }
  if (auto t = top.table("nms")) {
    cfg.nms.iou_threshold = t->number("iou_threshold", cfg.nms.iou_threshold);
    require(cfg.nms.iou_threshold >= 0.0 && cfg.nms.iou_threshold <= 1.0, t->key_path("iou_threshold"),
            "must be in [0, 1]");
    t->finish();
  }
  if (auto t = top.table("association")) {
    if (auto mode = t->string("mode")) {
      const auto m = detail::lower(*mode);
      require(m == "mask" || m == "frustum", t->key_path("mode"), "expected \"mask\" or \"frustum\"");
      cfg.association_mode = m == "mask" ? AssociationMode::Mask : AssociationMode::Frustum;
    }
    const auto min_points = t->integer("min_points", static_cast<std::int64_t>(cfg.association.min_points));
    require(min_points >= 1, t->key_path("min_points"), "must be >= 1");
    cfg.association.min_points = static_cast<std::size_t>(min_points);
    cfg.association.near = t->number("near_m", cfg.association.near);
    cfg.association.far = t->number("far_m", cfg.association.far);
    require(cfg.association.near > 0.0, t->key_path("near_m"), "must be > 0");
    require(cfg.association.far > cfg.association.near, t->key_path("far_m"), "must exceed near_m");
    require(cfg.association.far <= cfg.rig.lidar.max_range, t->key_path("far_m"), "must not exceed the lidar range");
    t->finish();
  }
  if (auto t = top.table("segmentation")) {
    cfg.segmentation.ground_margin = t->number("ground_margin_m", cfg.segmentation.ground_margin);
    cfg.segmentation.cluster_radius = t->number("cluster_radius_m", cfg.segmentation.cluster_radius);
    require(cfg.segmentation.ground_margin >= 0.0, t->key_path("ground_margin_m"), "must be >= 0");
    require(cfg.segmentation.cluster_radius > 0.0, t->key_path("cluster_radius_m"), "must be > 0");
    t->finish();
  }
  if (auto t = top.table("amodal")) {
    cfg.amodal.unobserved_extent = t->number("unobserved_extent_m", cfg.amodal.unobserved_extent);
    require(cfg.amodal.unobserved_extent >= 0.0, t->key_path("unobserved_extent_m"), "must be >= 0");
    t->finish();
  }
  if (auto t = top.table("tracker")) {
    auto & p = cfg.tracker;
    auto positive = [&](std::string_view key, double & field) {
      field = t->number(key, field);
      require(field > 0.0 && std::isfinite(field), t->key_path(key), "must be > 0");
    };
    positive("ctrv_alpha", p.ctrv_ukf.alpha);
    positive("cv_alpha", p.cv_ukf.alpha);
    p.ctrv_ukf.beta = p.cv_ukf.beta = t->number("beta", p.ctrv_ukf.beta);
    p.ctrv_ukf.kappa = p.cv_ukf.kappa = t->number("kappa", p.ctrv_ukf.kappa);
    require(p.ctrv_ukf.beta >= 0.0, t->key_path("beta"), "must be >= 0");
    positive("ctrv_sigma_accel", p.ctrv_sigma_accel);
    positive("ctrv_sigma_yaw_accel", p.ctrv_sigma_yaw_accel);
    positive("cv_sigma_accel", p.cv_sigma_accel);
    positive("meas_sigma_xy", p.meas_sigma_xy);
    positive("meas_sigma_yaw", p.meas_sigma_yaw);
    positive("gate_3dof", p.gate_3dof);
    positive("gate_2dof", p.gate_2dof);
    positive("init_sigma_xy", p.init_sigma_xy);
    positive("init_sigma_speed", p.init_sigma_speed);
    positive("init_sigma_yaw", p.init_sigma_yaw);
    positive("init_sigma_yaw_rate", p.init_sigma_yaw_rate);
    positive("heading_flip_speed", p.heading_flip_speed);
    p.size_ema_alpha = t->number("size_ema_alpha", p.size_ema_alpha);
    require(p.size_ema_alpha > 0.0 && p.size_ema_alpha <= 1.0, t->key_path("size_ema_alpha"), "must be in (0, 1]");
    p.confirm_hits = static_cast<int>(t->integer("confirm_hits", p.confirm_hits));
    p.confirm_window = static_cast<int>(t->integer("confirm_window", p.confirm_window));
    p.max_misses = static_cast<int>(t->integer("max_misses", p.max_misses));
    require(p.confirm_hits >= 1, t->key_path("confirm_hits"), "must be >= 1");
    require(p.confirm_window >= p.confirm_hits, t->key_path("confirm_window"), "must be >= confirm_hits");
    require(p.max_misses >= 0, t->key_path("max_misses"), "must be >= 0");
    if (auto m = t->table("models")) {
      for (auto c : kAllClasses) {
        const auto key = detail::lower(to_string(c));
        if (auto v = m->string(key)) {
          p.models[static_cast<std::size_t>(c)] = detail::parse_motion_kind(*v, m->key_path(key));
        }
      }
      m->finish();
    }
    t->finish();
  }
  if (auto t = top.table("evaluation")) {
    cfg.evaluation.match_cap = t->number("match_cap_m", cfg.evaluation.match_cap);
    cfg.evaluation.yaw_flip_forgiveness = t->boolean("yaw_flip_forgiveness", cfg.evaluation.yaw_flip_forgiveness);
    require(cfg.evaluation.match_cap > 0.0, t->key_path("match_cap_m"), "must be > 0");
    t->finish();
  }
  top.finish();
  return cfg;
}

inline PipelineConfig load_config(const std::filesystem::path & path)
{
  return parse_config(detail::read_file(path), path.string());
}

namespace detail
{
inline MotionScript read_motion(TableReader & t)
{
  MotionScript m;
  const auto kind = t.string("motion").value_or("constant-velocity");
  if (kind == "constant-velocity") {
    m.kind = ScriptKind::ConstantVelocity;
  } else if (kind == "constant-turn") {
    m.kind = ScriptKind::ConstantTurn;
  } else if (kind == "waypoint-spline") {
    m.kind = ScriptKind::WaypointSpline;
  } else {
    throw ConfigError(t.key_path("motion"), "expected constant-velocity, constant-turn or waypoint-spline");
  }
  if (m.kind == ScriptKind::WaypointSpline) {
    const auto * wps = t.array("waypoints");
    require(wps != nullptr, t.key_path("waypoints"), "missing required value");
    for (std::size_t i = 0; i < wps->size(); ++i) {
      const auto * row = wps->get(i)->as_array();
      const std::string key = t.key_path("waypoints") + "[" + std::to_string(i) + "]";
      require(row != nullptr && row->size() == 3, key, "expected [t, x, y]");
      double v[3];
      for (std::size_t k = 0; k < 3; ++k) {
        const auto * n = row->get(k);
        if (const auto * f = n->as_floating_point()) {
          v[k] = f->get();
        } else if (const auto * iv = n->as_integer()) {
          v[k] = static_cast<double>(iv->get());
        } else {
          throw ConfigError(key, "expected numbers");
        }
      }
      m.waypoints.push_back({v[0], {v[1], v[2]}});
    }
  } else {
    const auto start = t.numbers("start", 2);
    if (start) m.start = {(*start)[0], (*start)[1]};
    m.heading = deg2rad(t.number("heading_deg", 0.0));
    m.speed = t.number("speed", 0.0);
    require(m.speed >= 0.0, t.key_path("speed"), "must be >= 0");
    if (m.kind == ScriptKind::ConstantTurn) {
      m.radius = t.required_number("radius");
      require(m.radius != 0.0, t.key_path("radius"), "must be nonzero");
    }
  }
  try {
    m.validate();
  } catch (const std::invalid_argument & e) {
    throw ConfigError(t.path(), e.what());
  }
  return m;
}
}  // namespace detail

/// Scenario from TOML text: top-level name, seed, duration, rate, primary_agent; an [ego]
/// motion table; [noise]; and [[agent]] tables.
inline Scenario parse_scenario(std::string_view text, const std::string & source = "scenario")
{
  using detail::require;
  toml::table root = detail::parse_toml(text, source);
  detail::TableReader top(root, "");
  Scenario s;
  if (auto name = top.string("name")) s.name = *name;
  const auto seed = top.integer("seed", 0);
  require(seed >= 0, "seed", "must be >= 0");
  s.seed = static_cast<std::uint64_t>(seed);
  s.duration = top.number("duration", s.duration);
  s.rate = top.number("rate", s.rate);
  require(s.duration >= 0.0, "duration", "must be >= 0");
  require(s.rate > 0.0, "rate", "must be > 0");
  s.primary_agent = static_cast<int>(top.integer("primary_agent", -1));
  if (auto ego = top.table("ego")) {
    s.ego = detail::read_motion(*ego);
    ego->finish();
  }
  if (auto n = top.table("noise")) {
    auto & ns = s.noise;
    ns.lidar_range_sigma = n->number("lidar_range_sigma", ns.lidar_range_sigma);
    ns.mask_dilate_erode = static_cast<int>(n->integer("mask_dilate_erode", ns.mask_dilate_erode));
    ns.mask_random_px = static_cast<int>(n->integer("mask_random_px", ns.mask_random_px));
    ns.detection_dropout = n->number("detection_dropout", ns.detection_dropout);
    if (auto e = n->numbers("extrinsic_perturb", 2)) {
      ns.extrinsic_rot_deg = (*e)[0];
      ns.extrinsic_trans_m = (*e)[1];
    }
    if (auto b = n->numbers("score_model", 2)) {
      ns.score_alpha = (*b)[0];
      ns.score_beta = (*b)[1];
    }
    ns.ego_pose_sigma = n->number("ego_pose_sigma", ns.ego_pose_sigma);
    require(ns.lidar_range_sigma >= 0.0, n->key_path("lidar_range_sigma"), "must be >= 0");
    require(ns.mask_random_px >= 0, n->key_path("mask_random_px"), "must be >= 0");
    require(ns.detection_dropout >= 0.0 && ns.detection_dropout <= 1.0, n->key_path("detection_dropout"),
            "must be in [0, 1]");
    require(ns.extrinsic_rot_deg >= 0.0 && ns.extrinsic_trans_m >= 0.0, n->key_path("extrinsic_perturb"),
            "magnitudes must be >= 0");
    require(ns.score_alpha > 0.0 && ns.score_beta > 0.0, n->key_path("score_model"), "parameters must be > 0");
    require(ns.ego_pose_sigma >= 0.0, n->key_path("ego_pose_sigma"), "must be >= 0");
    n->finish();
  }
  if (const auto * agents = top.array("agent")) {
    std::set<int> ids;
    for (std::size_t i = 0; i < agents->size(); ++i) {
      const std::string path = "agent[" + std::to_string(i) + "]";
      const auto * tbl = agents->get(i)->as_table();
      require(tbl != nullptr, path, "expected a table");
      detail::TableReader t(*tbl, path);
      AgentScript a;
      a.id = static_cast<int>(t.required_integer("id"));
      require(a.id >= 0, t.key_path("id"), "must be >= 0");
      require(ids.insert(a.id).second, t.key_path("id"), "duplicate agent id");
      const auto cls = t.string("class");
      require(cls.has_value(), t.key_path("class"), "missing required value");
      a.class_label = detail::parse_class(*cls, t.key_path("class"));
      if (auto size = t.numbers("size", 3)) a.size = {(*size)[0], (*size)[1], (*size)[2]};
      require(a.size.minCoeff() > 0.0, t.key_path("size"), "must be positive");
      a.motion = detail::read_motion(t);
      a.spawn = t.number("spawn", 0.0);
      a.despawn = t.number("despawn", a.despawn);
      require(a.despawn > a.spawn, t.key_path("despawn"), "must exceed spawn");
      if (const auto * hidden = t.array("hidden")) {
        for (std::size_t k = 0; k < hidden->size(); ++k) {
          const auto * row = hidden->get(k)->as_array();
          const std::string key = t.key_path("hidden") + "[" + std::to_string(k) + "]";
          require(row != nullptr && row->size() == 2, key, "expected [t0, t1]");
          const auto t0 = row->get(0)->value<double>();
          const auto t1 = row->get(1)->value<double>();
          require(t0 && t1 && *t1 > *t0, key, "expected increasing [t0, t1]");
          a.hidden.emplace_back(*t0, *t1);
        }
      }
      t.finish();
      s.agents.push_back(std::move(a));
    }
  }
  top.finish();
  if (s.primary_agent >= 0) {
    const bool found = std::any_of(s.agents.begin(), s.agents.end(), [&](const AgentScript & a) {
      return a.id == s.primary_agent;
    });
    require(found, "primary_agent", "no agent with this id");
  }
  return s;
}

inline Scenario load_scenario(const std::filesystem::path & path)
{
  return parse_scenario(detail::read_file(path), path.string());
}

}  // namespace fusiontrack

#endif  // FUSIONTRACK__CONFIG_HPP_
