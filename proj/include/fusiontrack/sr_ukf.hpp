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

#ifndef FUSIONTRACK__SR_UKF_HPP_
#define FUSIONTRACK__SR_UKF_HPP_

#include "fusiontrack/common.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Core>
#include <Eigen/QR>

#include <cmath>
#include <limits>
#include <optional>

namespace fusiontrack
{

struct UkfParams
{
  double alpha = 1e-3;
  double beta = 2.0;
  double kappa = 0.0;
};

/// Scaled unscented transform weights for an n-dimensional state.
struct SigmaWeights
{
  double mean0 = 0.0;
  double cov0 = 0.0;
  double rest = 0.0;  // shared by the 2n outer points
  double gamma = 0.0;

  static SigmaWeights make(int n, const UkfParams & p)
  {
    const double lambda = p.alpha * p.alpha * (n + p.kappa) - n;
    const double c = n + lambda;
    SigmaWeights w;
    w.gamma = std::sqrt(c);
    w.mean0 = lambda / c;
    w.cov0 = w.mean0 + (1.0 - p.alpha * p.alpha + p.beta);
    w.rest = 1.0 / (2.0 * c);
    return w;
  }

  double mean(int i) const { return i == 0 ? mean0 : rest; }
  double cov(int i) const { return i == 0 ? cov0 : rest; }
};

/// Columns: mean, mean + gamma S_i, mean - gamma S_i.
template <int N>
Eigen::Matrix<double, N, 2 * N + 1> sigma_points(
  const Eigen::Matrix<double, N, 1> & mean, const Eigen::Matrix<double, N, N> & sqrt_cov, double gamma)
{
  Eigen::Matrix<double, N, 2 * N + 1> x;
  x.col(0) = mean;
  for (int i = 0; i < N; ++i) {
    x.col(1 + i) = mean + gamma * sqrt_cov.col(i);
    x.col(1 + N + i) = mean - gamma * sqrt_cov.col(i);
  }
  return x;
}

/// Rank-1 update (sign > 0) or downdate (sign < 0) of a lower Cholesky factor:
/// L L^T +/- x x^T. Returns false if a downdate would lose positive definiteness.
template <int N>
bool cholupdate(Eigen::Matrix<double, N, N> & l, Eigen::Matrix<double, N, 1> x, double sign)
{
  for (int k = 0; k < N; ++k) {
    const double lkk = l(k, k);
    const double r2 = lkk * lkk + (sign >= 0.0 ? 1.0 : -1.0) * x(k) * x(k);
    if (!(r2 > 0.0)) {
      return false;
    }
    const double r = std::sqrt(r2);
    const double c = r / lkk;
    const double s = x(k) / lkk;
    l(k, k) = r;
    for (int i = k + 1; i < N; ++i) {
      l(i, k) = (l(i, k) + (sign >= 0.0 ? 1.0 : -1.0) * s * x(i)) / c;
      x(i) = c * x(i) - s * l(i, k);
    }
  }
  return true;
}

/// Lower-triangular L with positive diagonal such that L L^T = A A^T (QR of A^T).
template <int N, int K>
Eigen::Matrix<double, N, N> triangularize(const Eigen::Matrix<double, N, K> & a)
{
  static_assert(K >= N, "compound matrix needs at least N columns");
  const Eigen::Matrix<double, K, N> at = a.transpose();
  Eigen::HouseholderQR<Eigen::Matrix<double, K, N>> qr(at);
  Eigen::Matrix<double, N, N> r =
    qr.matrixQR().template topRows<N>().template triangularView<Eigen::Upper>();
  for (int i = 0; i < N; ++i) {
    if (r(i, i) < 0.0) {
      r.row(i) *= -1.0;
    }
  }
  return r.transpose();
}

/// Weighted mean of sigma-point columns. Row `angle_index` (if >= 0) is averaged on the
/// circle via atan2 of weighted sines and cosines, relative to column 0.
template <int M, int Cols>
Eigen::Matrix<double, M, 1> weighted_mean(
  const Eigen::Matrix<double, M, Cols> & pts, const SigmaWeights & w, int angle_index)
{
  Eigen::Matrix<double, M, 1> mean = pts.col(0);
  Eigen::Matrix<double, M, 1> acc = Eigen::Matrix<double, M, 1>::Zero();
  for (int i = 1; i < Cols; ++i) {
    acc += w.mean(i) * (pts.col(i) - pts.col(0));
  }
  mean += acc;
  if (angle_index >= 0) {
    const double ref = pts(angle_index, 0);
    double s = 0.0;
    double c = 0.0;
    for (int i = 0; i < Cols; ++i) {
      const double d = pts(angle_index, i) - ref;
      s += w.mean(i) * std::sin(d);
      c += w.mean(i) * std::cos(d);
    }
    mean(angle_index) = wrap_angle(ref + std::atan2(s, c));
  }
  return mean;
}

template <int M>
Eigen::Matrix<double, M, 1> residual(
  const Eigen::Matrix<double, M, 1> & a, const Eigen::Matrix<double, M, 1> & b, int angle_index)
{
  Eigen::Matrix<double, M, 1> d = a - b;
  if (angle_index >= 0) {
    d(angle_index) = wrap_angle(d(angle_index));
  }
  return d;
}

/// Square-root unscented Kalman filter with additive process and measurement noise.
///
/// Model requirements:
///   kStateDim, kMeasDim, kNoiseDim, kStateAngle, kMeasAngle (-1 when none)
///   State propagate(const State&, double dt) const
///   Matrix<N, kNoiseDim> process_noise_sqrt(const State& mean, double dt) const
///   Meas measure(const State&) const
template <class Model>
class SquareRootUkf
{
public:
  static constexpr int N = Model::kStateDim;
  static constexpr int M = Model::kMeasDim;
  static constexpr int Q = Model::kNoiseDim;
  static constexpr int kSigma = 2 * N + 1;

  using State = Eigen::Matrix<double, N, 1>;
  using Factor = Eigen::Matrix<double, N, N>;
  using Meas = Eigen::Matrix<double, M, 1>;
  using MeasFactor = Eigen::Matrix<double, M, M>;
  using CrossCov = Eigen::Matrix<double, N, M>;
  using ModelType = Model;

  struct MeasurementPrediction
  {
    Meas mean;
    MeasFactor sqrt_cov;  // innovation covariance factor, noise included
    CrossCov cross_cov;
  };

  SquareRootUkf(Model model, UkfParams params, const State & mean, const Factor & sqrt_cov)
  : model_(model), params_(params), weights_(SigmaWeights::make(N, params)), mean_(mean), sqrt_cov_(sqrt_cov)
  {
  }

  const Model & model() const { return model_; }
  const UkfParams & params() const { return params_; }
  const State & mean() const { return mean_; }
  const Factor & sqrt_cov() const { return sqrt_cov_; }
  Factor covariance() const { return sqrt_cov_ * sqrt_cov_.transpose(); }

  void set_state(const State & mean, const Factor & sqrt_cov)
  {
    mean_ = mean;
    sqrt_cov_ = sqrt_cov;
    if constexpr (Model::kStateAngle >= 0) {
      mean_(Model::kStateAngle) = wrap_angle(mean_(Model::kStateAngle));
    }
  }

  /// Time update. Returns false (state untouched) if the result is not finite.
  bool predict(double dt)
  {
    const auto x = sigma_points<N>(mean_, sqrt_cov_, weights_.gamma);
    Eigen::Matrix<double, N, kSigma> y;
    for (int i = 0; i < kSigma; ++i) {
      y.col(i) = model_.propagate(x.col(i), dt);
    }
    const State y_mean = weighted_mean<N, kSigma>(y, weights_, Model::kStateAngle);

    Eigen::Matrix<double, N, 2 * N + Q> compound;
    for (int i = 1; i < kSigma; ++i) {
      compound.col(i - 1) =
        std::sqrt(weights_.rest) * residual<N>(y.col(i), y_mean, Model::kStateAngle);
    }
    compound.template rightCols<Q>() = model_.process_noise_sqrt(mean_, dt);
    Factor s = triangularize<N, 2 * N + Q>(compound);
    const State d0 = residual<N>(y.col(0), y_mean, Model::kStateAngle);
    if (!rank_one<N>(s, std::sqrt(std::abs(weights_.cov0)) * d0, weights_.cov0)) {
      return false;
    }
    if (!y_mean.allFinite() || !s.allFinite()) {
      return false;
    }
    mean_ = y_mean;
    sqrt_cov_ = s;
    return true;
  }

  MeasurementPrediction predict_measurement(const MeasFactor & sqrt_r) const
  {
    const auto x = sigma_points<N>(mean_, sqrt_cov_, weights_.gamma);
    Eigen::Matrix<double, M, kSigma> z;
    for (int i = 0; i < kSigma; ++i) {
      z.col(i) = model_.measure(x.col(i));
    }
    MeasurementPrediction pred;
    pred.mean = weighted_mean<M, kSigma>(z, weights_, Model::kMeasAngle);

    Eigen::Matrix<double, M, 2 * N + M> compound;
    for (int i = 1; i < kSigma; ++i) {
      compound.col(i - 1) =
        std::sqrt(weights_.rest) * residual<M>(z.col(i), pred.mean, Model::kMeasAngle);
    }
    compound.template rightCols<M>() = sqrt_r;
    pred.sqrt_cov = triangularize<M, 2 * N + M>(compound);
    const Meas dz0 = residual<M>(z.col(0), pred.mean, Model::kMeasAngle);
    if (!rank_one<M>(pred.sqrt_cov, std::sqrt(std::abs(weights_.cov0)) * dz0, weights_.cov0)) {
      pred.sqrt_cov.setConstant(std::numeric_limits<double>::quiet_NaN());
    }

    pred.cross_cov.setZero();
    for (int i = 0; i < kSigma; ++i) {
      pred.cross_cov += weights_.cov(i) * residual<N>(x.col(i), mean_, Model::kStateAngle) *
                        residual<M>(z.col(i), pred.mean, Model::kMeasAngle).transpose();
    }
    return pred;
  }

  /// Measurement update. Returns false (state untouched) on a non-finite innovation or gain.
  bool update(const Meas & z, const MeasurementPrediction & pred)
  {
    const Meas innovation = residual<M>(z, pred.mean, Model::kMeasAngle);
    if (!innovation.allFinite() || !pred.sqrt_cov.allFinite()) {
      return false;
    }
    // K = Pxz (Sz Sz^T)^-1
    const auto sz = pred.sqrt_cov.template triangularView<Eigen::Lower>();
    Eigen::Matrix<double, M, N> kt = sz.solve(pred.cross_cov.transpose());
    kt = sz.transpose().solve(kt);
    const CrossCov gain = kt.transpose();
    State mean = mean_ + gain * innovation;
    if constexpr (Model::kStateAngle >= 0) {
      mean(Model::kStateAngle) = wrap_angle(mean(Model::kStateAngle));
    }
    const CrossCov u = gain * pred.sqrt_cov;
    Factor s = sqrt_cov_;
    for (int j = 0; j < M; ++j) {
      if (!rank_one<N>(s, u.col(j), -1.0)) {
        return false;
      }
    }
    if (!mean.allFinite() || !s.allFinite()) {
      return false;
    }
    mean_ = mean;
    sqrt_cov_ = s;
    return true;
  }

  bool update(const Meas & z, const MeasFactor & sqrt_r) { return update(z, predict_measurement(sqrt_r)); }

private:
  /// Rank-1 modification with a dense-refactorization fallback for round-off failures.
  template <int D>
  static bool rank_one(Eigen::Matrix<double, D, D> & l, const Eigen::Matrix<double, D, 1> & v, double sign)
  {
    Eigen::Matrix<double, D, D> trial = l;
    if (cholupdate<D>(trial, v, sign)) {
      l = trial;
      return true;
    }
    Eigen::Matrix<double, D, D> p = l * l.transpose() + (sign >= 0.0 ? 1.0 : -1.0) * v * v.transpose();
    p = 0.5 * (p + p.transpose()).eval();
    Eigen::LLT<Eigen::Matrix<double, D, D>> llt(p);
    if (llt.info() != Eigen::Success) {
      return false;
    }
    l = llt.matrixL();
    return true;
  }

  Model model_;
  UkfParams params_;
  SigmaWeights weights_;
  State mean_;
  Factor sqrt_cov_;
};

}  // namespace fusiontrack

#endif  // FUSIONTRACK__SR_UKF_HPP_
