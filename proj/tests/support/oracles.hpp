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

// Reference implementations used only by tests. They are written the slow, obvious way
// and share no code paths with the library beyond the motion models and data types.

#ifndef FUSIONTRACK_TESTS__ORACLES_HPP_
#define FUSIONTRACK_TESTS__ORACLES_HPP_

#include "fusiontrack/fusiontrack.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <optional>
#include <random>
#include <span>
#include <utility>
#include <vector>

namespace oracle
{

namespace ft = fusiontrack;

inline double wrap(double a) { return std::atan2(std::sin(a), std::cos(a)); }

// --- Dense-covariance UKF -----------------------------------------------------------

/// Textbook unscented Kalman filter carrying the full covariance. Sigma points use the
/// Cholesky factor of P, which is the unique lower factor with positive diagonal.
template <class Model>
class DenseUkf
{
public:
  static constexpr int N = Model::kStateDim;
  static constexpr int M = Model::kMeasDim;
  using Vec = Eigen::Matrix<double, N, 1>;
  using Mat = Eigen::Matrix<double, N, N>;
  using ZVec = Eigen::Matrix<double, M, 1>;
  using ZMat = Eigen::Matrix<double, M, M>;

  DenseUkf(Model model, double alpha, double beta, double kappa, const Vec & x, const Mat & p)
  : model_(model), x_(x), p_(p)
  {
    lambda_ = alpha * alpha * (N + kappa) - N;
    wm_.assign(2 * N + 1, 1.0 / (2.0 * (N + lambda_)));
    wc_ = wm_;
    wm_[0] = lambda_ / (N + lambda_);
    wc_[0] = wm_[0] + 1.0 - alpha * alpha + beta;
  }

  const Vec & x() const { return x_; }
  const Mat & p() const { return p_; }

  bool predict(double dt)
  {
    std::vector<Vec> pts;
    if (!sigma(pts)) return false;
    std::vector<Vec> y;
    for (const auto & s : pts) y.push_back(model_.propagate(s, dt));
    const Vec ym = mean_of<N>(y, Model::kStateAngle);
    Mat p = Mat::Zero();
    for (std::size_t i = 0; i < y.size(); ++i) {
      const Vec d = diff<N>(y[i], ym, Model::kStateAngle);
      p += wc_[i] * d * d.transpose();
    }
    const auto g = model_.process_noise_sqrt(x_, dt);
    p += g * g.transpose();
    x_ = ym;
    p_ = p;
    return true;
  }

  bool update(const ZVec & z, const ZMat & r)
  {
    std::vector<Vec> pts;
    if (!sigma(pts)) return false;
    std::vector<ZVec> zs;
    for (const auto & s : pts) zs.push_back(model_.measure(s));
    const ZVec zm = mean_of<M>(zs, Model::kMeasAngle);
    ZMat pzz = r;
    Eigen::Matrix<double, N, M> pxz = Eigen::Matrix<double, N, M>::Zero();
    for (std::size_t i = 0; i < zs.size(); ++i) {
      const ZVec dz = diff<M>(zs[i], zm, Model::kMeasAngle);
      const Vec dx = diff<N>(pts[i], x_, Model::kStateAngle);
      pzz += wc_[i] * dz * dz.transpose();
      pxz += wc_[i] * dx * dz.transpose();
    }
    const Eigen::Matrix<double, N, M> k = pxz * pzz.inverse();
    x_ += k * diff<M>(z, zm, Model::kMeasAngle);
    if (Model::kStateAngle >= 0) x_(Model::kStateAngle) = wrap(x_(Model::kStateAngle));
    p_ -= k * pzz * k.transpose();
    return true;
  }

private:
  bool sigma(std::vector<Vec> & pts) const
  {
    Eigen::LLT<Mat> llt(p_);
    if (llt.info() != Eigen::Success) return false;
    const Mat l = llt.matrixL();
    const double g = std::sqrt(N + lambda_);
    pts.assign(1, x_);
    for (int i = 0; i < N; ++i) pts.push_back(x_ + g * l.col(i));
    for (int i = 0; i < N; ++i) pts.push_back(x_ - g * l.col(i));
    return true;
  }

  template <int D>
  Eigen::Matrix<double, D, 1> mean_of(const std::vector<Eigen::Matrix<double, D, 1>> & v, int angle) const
  {
    // accumulate deviations from the central point to keep large weights well conditioned
    Eigen::Matrix<double, D, 1> m = v[0];
    for (std::size_t i = 1; i < v.size(); ++i) m += wm_[i] * (v[i] - v[0]);
    if (angle >= 0) {
      double s = 0.0;
      double c = 0.0;
      for (std::size_t i = 0; i < v.size(); ++i) {
        s += wm_[i] * std::sin(v[i](angle));
        c += wm_[i] * std::cos(v[i](angle));
      }
      m(angle) = std::atan2(s, c);
    }
    return m;
  }

  template <int D>
  static Eigen::Matrix<double, D, 1> diff(
    const Eigen::Matrix<double, D, 1> & a, const Eigen::Matrix<double, D, 1> & b, int angle)
  {
    Eigen::Matrix<double, D, 1> d = a - b;
    if (angle >= 0) d(angle) = wrap(d(angle));
    return d;
  }

  Model model_;
  Vec x_;
  Mat p_;
  double lambda_ = 0.0;
  std::vector<double> wm_;
  std::vector<double> wc_;
};

// --- Linear Kalman filter for the constant-velocity model ---------------------------

struct CvKalman
{
  Eigen::Vector4d x;
  Eigen::Matrix4d p;
  double sigma_accel = 1.0;

  void predict(double dt)
  {
    Eigen::Matrix4d f = Eigen::Matrix4d::Identity();
    f(0, 2) = dt;
    f(1, 3) = dt;
    Eigen::Matrix<double, 4, 2> g = Eigen::Matrix<double, 4, 2>::Zero();
    g(0, 0) = g(1, 1) = 0.5 * dt * dt;
    g(2, 0) = g(3, 1) = dt;
    x = f * x;
    p = f * p * f.transpose() + sigma_accel * sigma_accel * g * g.transpose();
  }

  void update(const Eigen::Vector2d & z, const Eigen::Matrix2d & r)
  {
    Eigen::Matrix<double, 2, 4> h = Eigen::Matrix<double, 2, 4>::Zero();
    h(0, 0) = h(1, 1) = 1.0;
    const Eigen::Matrix2d s = h * p * h.transpose() + r;
    const Eigen::Matrix<double, 4, 2> k = p * h.transpose() * s.inverse();
    x += k * (z - h * x);
    p = (Eigen::Matrix4d::Identity() - k * h) * p;
  }
};

// --- Assignment by exhaustive permutation --------------------------------------------

struct BruteAssignment
{
  int pairs = 0;
  double cost = 0.0;
};

/// Best matching over all permutations of the zero-padded square matrix. Infinite
/// entries mean "leave both unmatched"; more pairs beat fewer, then lower cost wins.
inline BruteAssignment brute_force_assignment(const Eigen::MatrixXd & c)
{
  const int n = static_cast<int>(c.rows());
  const int m = static_cast<int>(c.cols());
  const int k = std::max(n, m);
  std::vector<int> perm(static_cast<std::size_t>(k));
  std::iota(perm.begin(), perm.end(), 0);
  BruteAssignment best{-1, 0.0};
  do {
    BruteAssignment cur;
    for (int i = 0; i < n; ++i) {
      const int j = perm[static_cast<std::size_t>(i)];
      if (j < m && std::isfinite(c(i, j))) {
        ++cur.pairs;
        cur.cost += c(i, j);
      }
    }
    if (cur.pairs > best.pairs || (cur.pairs == best.pairs && cur.cost < best.cost)) best = cur;
  } while (std::next_permutation(perm.begin(), perm.end()));
  return best;
}

// --- Geometry ----------------------------------------------------------------------------

/// Smallest bounding-rectangle area over all directions given by hull edges.
inline double hull_edge_min_area(const std::vector<Eigen::Vector2d> & pts)
{
  const auto hull = ft::convex_hull(pts);
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t e = 0; e < hull.size(); ++e) {
    const Eigen::Vector2d u = (hull[(e + 1) % hull.size()] - hull[e]).normalized();
    const Eigen::Vector2d v(-u.y(), u.x());
    double u0 = std::numeric_limits<double>::infinity(), u1 = -u0, v0 = u0, v1 = -u0;
    for (const auto & p : pts) {
      u0 = std::min(u0, p.dot(u));
      u1 = std::max(u1, p.dot(u));
      v0 = std::min(v0, p.dot(v));
      v1 = std::max(v1, p.dot(v));
    }
    best = std::min(best, (u1 - u0) * (v1 - v0));
  }
  return best;
}

/// Frustum membership by projecting the point and testing the rectangle and depth window.
inline bool projects_into(
  const Eigen::Vector3d & p, const ft::PixelRect & box, const ft::CameraModel & cam, double near, double far)
{
  const Eigen::Vector3d pc = cam.extrinsic.rotation_matrix() * p + cam.extrinsic.translation;
  if (!(pc.z() > 0.0)) return false;
  const double u = cam.fx * pc.x() / pc.z() + cam.cx;
  const double v = cam.fy * pc.y() / pc.z() + cam.cy;
  return u >= box.x0 && u <= box.x1 && v >= box.y0 && v <= box.y1 && pc.z() >= near && pc.z() <= far;
}

/// Separating-axis test between the closed pixel square [px, px+1] x [py, py+1] and a
/// convex polygon.
inline bool pixel_meets_polygon(int px, int py, const std::vector<Eigen::Vector2d> & poly)
{
  if (poly.empty()) return false;
  const std::array<Eigen::Vector2d, 4> sq{
    Eigen::Vector2d(px, py), Eigen::Vector2d(px + 1, py), Eigen::Vector2d(px + 1, py + 1),
    Eigen::Vector2d(px, py + 1)};
  std::vector<Eigen::Vector2d> axes{Eigen::Vector2d::UnitX(), Eigen::Vector2d::UnitY()};
  for (std::size_t i = 0; poly.size() > 1 && i < poly.size(); ++i) {
    const Eigen::Vector2d e = poly[(i + 1) % poly.size()] - poly[i];
    if (e.norm() > 0.0) axes.emplace_back(-e.y(), e.x());
  }
  for (const auto & a : axes) {
    double p0 = std::numeric_limits<double>::infinity(), p1 = -p0, q0 = p0, q1 = -p0;
    for (const auto & s : sq) {
      p0 = std::min(p0, s.dot(a));
      p1 = std::max(p1, s.dot(a));
    }
    for (const auto & s : poly) {
      q0 = std::min(q0, s.dot(a));
      q1 = std::max(q1, s.dot(a));
    }
    if (p1 < q0 || q1 < p0) return false;
  }
  return true;
}

// --- Random helpers ----------------------------------------------------------------------

inline double uniform(std::mt19937_64 & rng, double a, double b)
{
  return std::uniform_real_distribution<double>(a, b)(rng);
}

template <int D>
Eigen::Matrix<double, D, D> random_spd(std::mt19937_64 & rng, double scale)
{
  Eigen::Matrix<double, D, D> a;
  for (int i = 0; i < D; ++i) {
    for (int j = 0; j < D; ++j) a(i, j) = uniform(rng, -1.0, 1.0);
  }
  return scale * (a * a.transpose() / D + 0.2 * Eigen::Matrix<double, D, D>::Identity());
}

/// Relative Frobenius distance, falling back to absolute near zero.
template <class A, class B>
double rel_error(const A & a, const B & b)
{
  return (a - b).norm() / std::max(1.0, b.norm());
}

}  // namespace oracle

#endif  // FUSIONTRACK_TESTS__ORACLES_HPP_
