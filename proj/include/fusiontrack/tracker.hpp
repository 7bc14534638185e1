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

#ifndef FUSIONTRACK__TRACKER_HPP_
#define FUSIONTRACK__TRACKER_HPP_

#include "fusiontrack/box_estimation.hpp"
#include "fusiontrack/common.hpp"
#include "fusiontrack/hungarian.hpp"
#include "fusiontrack/motion_models.hpp"
#include "fusiontrack/sr_ukf.hpp"

#include <Eigen/Core>

#include <array>
#include <cmath>
#include <limits>
#include <span>
#include <string_view>
#include <utility>
#include <variant>
#include <vector>

namespace fusiontrack
{

struct TrackerParams
{
  UkfParams ctrv_ukf{0.5, 2.0, 0.0};
  UkfParams cv_ukf{1e-3, 2.0, 0.0};
  double ctrv_sigma_accel = 2.0;
  double ctrv_sigma_yaw_accel = 0.6;
  double cv_sigma_accel = 1.0;
  double meas_sigma_xy = 0.3;
  double meas_sigma_yaw = 0.1;
  int confirm_hits = 3;     // M
  int confirm_window = 5;   // N
  int max_misses = 5;
  double gate_3dof = 11.345;  // chi2 99th percentile
  double gate_2dof = 9.210;
  double size_ema_alpha = 0.3;
  // birth uncertainty
  double init_sigma_xy = 0.5;
  double init_sigma_speed = 5.0;
  double init_sigma_yaw = 0.3;
  double init_sigma_yaw_rate = 0.3;
  // heading is flipped by pi once the filter settles on a backwards speed beyond this
  double heading_flip_speed = 1.0;
  std::array<MotionKind, 3> models{MotionKind::CTRV, MotionKind::CV, MotionKind::CTRV};

  MotionKind model_for(ClassLabel label) const { return models[static_cast<std::size_t>(label)]; }
};

enum class TrackStatus { Tentative, Confirmed, Coasting };

inline std::string_view to_string(TrackStatus s)
{
  switch (s) {
    case TrackStatus::Tentative:
      return "Tentative";
    case TrackStatus::Confirmed:
      return "Confirmed";
    case TrackStatus::Coasting:
      return "Coasting";
  }
  return "Tentative";
}

using CtrvFilter = SquareRootUkf<CtrvModel>;
using CvFilter = SquareRootUkf<CvModel>;

struct Track
{
  int id = 0;
  ClassLabel class_label = ClassLabel::Car;
  std::variant<CtrvFilter, CvFilter> filter;
  Eigen::Vector3d box_size = Eigen::Vector3d::Ones();
  double z = 0.0;
  double yaw_obs = 0.0;
  int hits = 0;
  int misses = 0;
  int age = 0;
  TrackStatus status = TrackStatus::Tentative;

  MotionKind kind() const
  {
    return std::holds_alternative<CtrvFilter>(filter) ? MotionKind::CTRV : MotionKind::CV;
  }

  Eigen::Vector2d position() const
  {
    return std::visit([](const auto & f) { return Eigen::Vector2d(f.mean()(0), f.mean()(1)); }, filter);
  }

  /// Heading: CTRV yaw state; CV velocity direction when moving, else last observed box yaw.
  double yaw() const
  {
    if (const auto * f = std::get_if<CtrvFilter>(&filter)) {
      return f->mean()(3);
    }
    const auto & m = std::get<CvFilter>(filter).mean();
    if (std::hypot(m(2), m(3)) > 0.5) {
      return std::atan2(m(3), m(2));
    }
    return yaw_obs;
  }

  double speed() const
  {
    if (const auto * f = std::get_if<CtrvFilter>(&filter)) {
      return f->mean()(2);
    }
    const auto & m = std::get<CvFilter>(filter).mean();
    return std::hypot(m(2), m(3));
  }

  bool is_finite() const
  {
    return std::visit(
      [](const auto & f) { return f.mean().allFinite() && f.sqrt_cov().allFinite(); }, filter);
  }
};

struct EgoPose
{
  Eigen::Vector2d position = Eigen::Vector2d::Zero();  // global frame
  double heading = 0.0;
  double timestamp = 0.0;
};

/// Of the two headings compatible with a box yaw (yaw, yaw + pi), the one closest to `reference`.
inline double resolve_yaw(double observed, double reference)
{
  const double a = wrap_angle(observed);
  const double b = wrap_angle(observed + kPi);
  return std::abs(wrap_angle(a - reference)) <= std::abs(wrap_angle(b - reference)) ? a : b;
}

inline Track make_track(int id, const Box3D & box, const TrackerParams & p)
{
  Track t{
    id, box.class_label,
    CvFilter(CvModel{}, p.cv_ukf, CvFilter::State::Zero(), CvFilter::Factor::Identity())};
  if (p.model_for(box.class_label) == MotionKind::CTRV) {
    CtrvFilter::State mean;
    mean << box.center.x(), box.center.y(), 0.0, wrap_angle(box.yaw), 0.0;
    CtrvFilter::Factor s = CtrvFilter::Factor::Zero();
    s.diagonal() << p.init_sigma_xy, p.init_sigma_xy, p.init_sigma_speed, p.init_sigma_yaw,
      p.init_sigma_yaw_rate;
    t.filter = CtrvFilter(CtrvModel{p.ctrv_sigma_accel, p.ctrv_sigma_yaw_accel}, p.ctrv_ukf, mean, s);
  } else {
    CvFilter::State mean;
    mean << box.center.x(), box.center.y(), 0.0, 0.0;
    CvFilter::Factor s = CvFilter::Factor::Zero();
    s.diagonal() << p.init_sigma_xy, p.init_sigma_xy, p.init_sigma_speed, p.init_sigma_speed;
    t.filter = CvFilter(CvModel{p.cv_sigma_accel}, p.cv_ukf, mean, s);
  }
  t.box_size = box.size;
  t.z = box.center.z();
  t.yaw_obs = box.yaw;
  t.hits = 1;
  t.age = 1;
  t.status = p.confirm_hits <= 1 ? TrackStatus::Confirmed : TrackStatus::Tentative;
  return t;
}

namespace detail
{
template <class Filter>
typename Filter::MeasFactor measurement_sqrt_noise(const TrackerParams & p)
{
  typename Filter::MeasFactor r = Filter::MeasFactor::Zero();
  r(0, 0) = p.meas_sigma_xy;
  r(1, 1) = p.meas_sigma_xy;
  if constexpr (Filter::M == 3) {
    r(2, 2) = p.meas_sigma_yaw;
  }
  return r;
}

template <class Filter>
typename Filter::Meas observation_vector(const Filter & f, const Box3D & obs)
{
  typename Filter::Meas z;
  z(0) = obs.center.x();
  z(1) = obs.center.y();
  if constexpr (Filter::M == 3) {
    z(2) = resolve_yaw(obs.yaw, f.mean()(3));
  }
  return z;
}

template <class Filter>
void retriangularize(Filter & f, const typename Filter::Factor & j, const typename Filter::State & mean)
{
  const typename Filter::Factor js = j * f.sqrt_cov();
  f.set_state(mean, triangularize<Filter::N, Filter::N>(js));
}
}  // namespace detail

/// Squared Mahalanobis distance of `obs` to the track's predicted measurement, or
/// kInfeasibleCost for class mismatch, singular innovation covariance, or a failed gate.
inline double mahalanobis_cost(const Track & track, const Box3D & obs, const TrackerParams & p)
{
  if (track.class_label != obs.class_label) {
    return kInfeasibleCost;
  }
  return std::visit(
    [&](const auto & f) -> double {
      using F = std::decay_t<decltype(f)>;
      const auto pred = f.predict_measurement(detail::measurement_sqrt_noise<F>(p));
      const auto sz = pred.sqrt_cov;
      if (!sz.allFinite() || sz.diagonal().cwiseAbs().minCoeff() <= 1e-12) {
        return kInfeasibleCost;
      }
      const auto r = residual<F::M>(detail::observation_vector(f, obs), pred.mean, F::ModelType::kMeasAngle);
      const typename F::Meas w = sz.template triangularView<Eigen::Lower>().solve(r);
      const double d2 = w.squaredNorm();
      const double gate = F::M == 3 ? p.gate_3dof : p.gate_2dof;
      if (!std::isfinite(d2) || d2 > gate) {
        return kInfeasibleCost;
      }
      return d2;
    },
    track.filter);
}

/// Re-expresses tracks from the previous ego frame into the current one.
inline void compensate_ego(std::span<Track> tracks, const EgoPose & prev, const EgoPose & now)
{
  const double dh = prev.heading - now.heading;
  const Eigen::Rotation2Dd to_now(-now.heading);
  const Eigen::Rotation2Dd from_prev(prev.heading);
  const Eigen::Matrix2d rot = Eigen::Rotation2Dd(dh).toRotationMatrix();
  for (auto & t : tracks) {
    std::visit(
      [&](auto & f) {
        using F = std::decay_t<decltype(f)>;
        typename F::State mean = f.mean();
        const Eigen::Vector2d global = from_prev * mean.template head<2>() + prev.position;
        mean.template head<2>() = to_now * (global - now.position);
        typename F::Factor j = F::Factor::Identity();
        j.template topLeftCorner<2, 2>() = rot;
        if constexpr (F::N == 5) {
          mean(3) = wrap_angle(mean(3) + dh);
        } else {
          mean.template segment<2>(2) = rot * mean.template segment<2>(2);
          j.template block<2, 2>(2, 2) = rot;
        }
        detail::retriangularize(f, j, mean);
      },
      t.filter);
    t.yaw_obs = wrap_angle(t.yaw_obs + dh);
  }
}

/// Time update of one track; false if the state became non-finite.
inline bool predict_track(Track & t, double dt)
{
  return std::visit([dt](auto & f) { return f.predict(dt); }, t.filter);
}

/// Measurement update with a box; false if the observation was rejected.
inline bool update_track(Track & t, const Box3D & obs, const TrackerParams & p)
{
  const bool ok = std::visit(
    [&](auto & f) {
      using F = std::decay_t<decltype(f)>;
      const auto pred = f.predict_measurement(detail::measurement_sqrt_noise<F>(p));
      return f.update(detail::observation_vector(f, obs), pred);
    },
    t.filter);
  if (!ok) {
    return false;
  }
  if (auto * f = std::get_if<CtrvFilter>(&t.filter)) {
    // the box yaw only fixes heading mod pi; a settled backwards speed means the track faces the wrong way
    if (f->mean()(2) < -p.heading_flip_speed) {
      CtrvFilter::State mean = f->mean();
      mean(2) = -mean(2);
      mean(3) = wrap_angle(mean(3) + kPi);
      CtrvFilter::Factor j = CtrvFilter::Factor::Identity();
      j(2, 2) = -1.0;
      detail::retriangularize(*f, j, mean);
    }
  }
  const double a = p.size_ema_alpha;
  t.box_size = (1.0 - a) * t.box_size + a * obs.size;
  t.z = (1.0 - a) * t.z + a * obs.center.z();
  t.yaw_obs = obs.yaw;
  return true;
}

struct FrameReport
{
  std::vector<std::pair<int, std::size_t>> matches;  // (track id, detection index)
  std::vector<int> births;
  std::vector<int> deaths;
};

/// Multi-object tracker state machine; `step` advances it by one frame.
class Tracker
{
public:
  explicit Tracker(TrackerParams params = {}) : params_(params) {}

  const TrackerParams & params() const { return params_; }
  const std::vector<Track> & tracks() const { return tracks_; }
  std::vector<Track> & mutable_tracks() { return tracks_; }

  FrameReport step(
    std::span<const Box3D> detections, const EgoPose & ego_prev, const EgoPose & ego_now, double dt)
  {
    if (!(dt > 0.0)) {
      throw std::invalid_argument("tracker step requires dt > 0");
    }
    FrameReport report;
    compensate_ego(tracks_, ego_prev, ego_now);

    std::vector<char> dead(tracks_.size(), 0);
    for (std::size_t i = 0; i < tracks_.size(); ++i) {
      ++tracks_[i].age;
      if (!predict_track(tracks_[i], dt) || !tracks_[i].is_finite()) {
        dead[i] = 1;
      }
    }

    Eigen::MatrixXd costs(
      static_cast<Eigen::Index>(tracks_.size()), static_cast<Eigen::Index>(detections.size()));
    for (std::size_t i = 0; i < tracks_.size(); ++i) {
      for (std::size_t j = 0; j < detections.size(); ++j) {
        costs(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
          dead[i] ? kInfeasibleCost : mahalanobis_cost(tracks_[i], detections[j], params_);
      }
    }
    const Assignment assignment = hungarian(costs);

    std::vector<char> matched(tracks_.size(), 0);
    std::vector<char> used(detections.size(), 0);
    for (const auto & [row, col] : assignment.pairs) {
      auto & t = tracks_[static_cast<std::size_t>(row)];
      if (!update_track(t, detections[static_cast<std::size_t>(col)], params_)) {
        continue;
      }
      matched[static_cast<std::size_t>(row)] = 1;
      used[static_cast<std::size_t>(col)] = 1;
      ++t.hits;
      t.misses = 0;
      if (t.status == TrackStatus::Coasting) {
        t.status = TrackStatus::Confirmed;
      } else if (
        t.status == TrackStatus::Tentative && t.hits >= params_.confirm_hits &&
        t.age <= params_.confirm_window) {
        t.status = TrackStatus::Confirmed;
      }
      report.matches.emplace_back(t.id, static_cast<std::size_t>(col));
    }
    for (std::size_t i = 0; i < tracks_.size(); ++i) {
      if (!matched[i] && !dead[i]) {
        ++tracks_[i].misses;
        if (tracks_[i].status == TrackStatus::Confirmed) {
          tracks_[i].status = TrackStatus::Coasting;
        }
      }
    }

    std::vector<Track> survivors;
    survivors.reserve(tracks_.size() + detections.size());
    for (std::size_t i = 0; i < tracks_.size(); ++i) {
      const auto & t = tracks_[i];
      const bool expired = t.misses > params_.max_misses ||
                           (t.status == TrackStatus::Tentative && t.age >= params_.confirm_window);
      if (dead[i] || expired) {
        report.deaths.push_back(t.id);
      } else {
        survivors.push_back(t);
      }
    }
    for (std::size_t j = 0; j < detections.size(); ++j) {
      if (!used[j]) {
        survivors.push_back(make_track(next_id_, detections[j], params_));
        report.births.push_back(next_id_);
        ++next_id_;
      }
    }
    tracks_ = std::move(survivors);
    return report;
  }

private:
  TrackerParams params_;
  std::vector<Track> tracks_;
  int next_id_ = 1;
};

}  // namespace fusiontrack

#endif  // FUSIONTRACK__TRACKER_HPP_
