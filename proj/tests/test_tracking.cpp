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

#include <map>

namespace ft = fusiontrack;
using Eigen::Vector2d;
using Eigen::Vector3d;

// --- Hungarian ------------------------------------------------------------------------

TEST(Hungarian, TwoByTwoExample)
{
  Eigen::MatrixXd c(2, 2);
  c << 1, 2, 2, 4;
  const auto a = ft::hungarian(c);
  const std::vector<std::pair<int, int>> expected{{0, 1}, {1, 0}};
  EXPECT_EQ(a.pairs, expected);
  EXPECT_DOUBLE_EQ(a.total_cost, 4.0);
}

TEST(Hungarian, DiagonalIsIdentity)
{
  Eigen::MatrixXd c = Eigen::MatrixXd::Constant(4, 4, 10.0);
  c.diagonal().setZero();
  const auto a = ft::hungarian(c);
  ASSERT_EQ(a.pairs.size(), 4U);
  for (int i = 0; i < 4; ++i) EXPECT_EQ(a.pairs[static_cast<std::size_t>(i)], std::make_pair(i, i));
  EXPECT_EQ(a.total_cost, 0.0);
}

TEST(Hungarian, InfeasiblePairsStayUnmatched)
{
  Eigen::MatrixXd c(2, 3);
  c << 1, ft::kInfeasibleCost, ft::kInfeasibleCost, ft::kInfeasibleCost, ft::kInfeasibleCost, ft::kInfeasibleCost;
  const auto a = ft::hungarian(c);
  const std::vector<std::pair<int, int>> pairs{{0, 0}};
  EXPECT_EQ(a.pairs, pairs);
  EXPECT_EQ(a.unmatched_rows, std::vector<int>{1});
  EXPECT_EQ(a.unmatched_cols, (std::vector<int>{1, 2}));

  const auto none = ft::hungarian(Eigen::MatrixXd::Constant(3, 3, ft::kInfeasibleCost));
  EXPECT_TRUE(none.pairs.empty());
  EXPECT_EQ(none.unmatched_rows.size(), 3U);
}

TEST(Hungarian, EmptyAndRectangular)
{
  EXPECT_TRUE(ft::hungarian(Eigen::MatrixXd(0, 3)).pairs.empty());
  EXPECT_EQ(ft::hungarian(Eigen::MatrixXd(0, 3)).unmatched_cols.size(), 3U);
  Eigen::MatrixXd c(1, 3);
  c << 5, 1, 3;
  const auto a = ft::hungarian(c);
  ASSERT_EQ(a.pairs.size(), 1U);
  EXPECT_EQ(a.pairs[0], std::make_pair(0, 1));
}

TEST(Hungarian, PrefersMorePairsOverCheaperFewer)
{
  // (0,0) alone costs 1; (0,1) + (1,0) cost 200 but match both rows
  Eigen::MatrixXd c(2, 2);
  c << 1, 100, 100, ft::kInfeasibleCost;
  const auto a = ft::hungarian(c);
  EXPECT_EQ(a.pairs.size(), 2U);
  EXPECT_DOUBLE_EQ(a.total_cost, 200.0);
}

TEST(Hungarian, MatchesBruteForce)
{
  std::mt19937_64 rng(99);
  for (int trial = 0; trial < 200; ++trial) {
    const auto c = checks::random_costs(rng, 6);
    const auto msg = checks::check_assignment(c, ft::hungarian(c));
    ASSERT_TRUE(msg.empty()) << msg << "\n" << c;
  }
}

// --- unscented transform --------------------------------------------------------------

TEST(SigmaWeights, SumToOne)
{
  for (int n : {1, 2, 4, 5}) {
    for (double alpha : {1e-3, 0.5, 1.0}) {
      const auto w = ft::SigmaWeights::make(n, {alpha, 2.0, 0.0});
      EXPECT_NEAR(w.mean0 + 2 * n * w.rest, 1.0, 1e-9);
      EXPECT_NEAR(w.cov0 - w.mean0, 1.0 - alpha * alpha + 2.0, 1e-9);
    }
  }
  const auto ctrv = ft::SigmaWeights::make(5, {0.5, 2.0, 0.0});
  EXPECT_NEAR(ctrv.cov0, -0.25, 1e-12);
}

TEST(SigmaWeights, ScalarUnitExample)
{
  const auto w = ft::SigmaWeights::make(1, {1.0, 0.0, 0.0});
  EXPECT_DOUBLE_EQ(w.gamma, 1.0);
  EXPECT_DOUBLE_EQ(w.mean0, 0.0);
  EXPECT_DOUBLE_EQ(w.rest, 0.5);
  const auto x = ft::sigma_points<1>(Eigen::Matrix<double, 1, 1>::Zero(), Eigen::Matrix<double, 1, 1>::Ones(), w.gamma);
  EXPECT_EQ(x(0, 0), 0.0);
  EXPECT_EQ(x(0, 1), 1.0);
  EXPECT_EQ(x(0, 2), -1.0);
}

TEST(Cholupdate, MatchesRefactorization)
{
  std::mt19937_64 rng(17);
  for (int trial = 0; trial < 200; ++trial) {
    const Eigen::Matrix4d p = oracle::random_spd<4>(rng, 1.0);
    Eigen::Matrix4d l = Eigen::LLT<Eigen::Matrix4d>(p).matrixL();
    Eigen::Vector4d v(oracle::uniform(rng, -1, 1), oracle::uniform(rng, -1, 1), oracle::uniform(rng, -1, 1),
                      oracle::uniform(rng, -1, 1));
    ASSERT_TRUE(ft::cholupdate<4>(l, v, 1.0));
    EXPECT_LT(oracle::rel_error(l * l.transpose(), Eigen::Matrix4d(p + v * v.transpose())), 1e-12);
    ASSERT_TRUE(ft::cholupdate<4>(l, v, -1.0));
    EXPECT_LT(oracle::rel_error(l * l.transpose(), p), 1e-10);
  }
  Eigen::Matrix2d l = Eigen::Matrix2d::Identity();
  EXPECT_FALSE(ft::cholupdate<2>(l, Eigen::Vector2d(2.0, 0.0), -1.0));
}

TEST(SrUkf, CtrvMatchesDenseOracle)
{
  std::mt19937_64 rng(1);
  const ft::TrackerParams tp;
  int cycles = 0;
  for (int trial = 0; trial < 30; ++trial) {
    const auto e = checks::ukf_trial(rng, ft::CtrvModel{}, tp.ctrv_ukf, 10);
    EXPECT_LE(e.worst, 1e-9);
    cycles += e.cycles;
  }
  EXPECT_GT(cycles, 250);
}

TEST(SrUkf, CvMatchesDenseOracle)
{
  std::mt19937_64 rng(2);
  const ft::TrackerParams tp;
  for (int trial = 0; trial < 30; ++trial) {
    const auto e = checks::ukf_trial(rng, ft::CvModel{}, tp.cv_ukf, 10);
    EXPECT_LE(e.worst, 1e-9);
    EXPECT_EQ(e.cycles, 10);
  }
}

TEST(SrUkf, CvMatchesKalmanFilter)
{
  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 10; ++trial) EXPECT_LE(checks::kalman_sequence_error(rng, 100), 1e-9);
}

TEST(SrUkf, FactorIsLowerTriangularWithPositiveDiagonal)
{
  std::mt19937_64 rng(4);
  ft::CtrvFilter f(ft::CtrvModel{}, {0.5, 2, 0}, checks::random_state<ft::CtrvModel>(rng),
                   ft::CtrvFilter::Factor::Identity());
  for (int k = 0; k < 20; ++k) {
    ASSERT_TRUE(f.predict(0.1));
    ASSERT_TRUE(f.update(f.model().measure(f.mean()), Eigen::Matrix3d::Identity() * 0.3));
    const auto & s = f.sqrt_cov();
    EXPECT_TRUE(s.isLowerTriangular());
    EXPECT_GT(s.diagonal().minCoeff(), 0.0);
  }
}

TEST(SrUkf, ZeroInnovationUpdateShrinksCovariance)
{
  ft::CvFilter f(ft::CvModel{}, {}, Eigen::Vector4d(1, 2, 3, 4), Eigen::Matrix4d::Identity());
  const double before = f.covariance().trace();
  ASSERT_TRUE(f.update(Eigen::Vector2d(1, 2), Eigen::Matrix2d::Identity() * 0.5));
  EXPECT_LT(f.covariance().trace(), before);
  EXPECT_LT((f.mean() - Eigen::Vector4d(1, 2, 3, 4)).norm(), 1e-9);
}

TEST(Ctrv, StationaryStaysPut)
{
  const ft::CtrvModel m;
  ft::CtrvModel::State s;
  s << 3, -2, 0, 0.7, 0;
  EXPECT_EQ(m.propagate(s, 0.5), s);
}

TEST(Ctrv, StraightLineAndQuarterTurn)
{
  const ft::CtrvModel m;
  ft::CtrvModel::State s;
  s << 0, 0, 10, 0, 0;
  const auto a = m.propagate(s, 1.0);
  EXPECT_NEAR(a(0), 10, 1e-12);
  EXPECT_NEAR(a(1), 0, 1e-12);

  // radius v / omega = 2; a quarter circle to the left ends at (2, 2)
  s << 0, 0, 2, 0, 1;
  const auto q = m.propagate(s, ft::kPi / 2);
  EXPECT_NEAR(q(0), 2, 1e-12);
  EXPECT_NEAR(q(1), 2, 1e-12);
  EXPECT_NEAR(q(3), ft::kPi / 2, 1e-12);
  auto full = s;
  for (int i = 0; i < 4; ++i) full = m.propagate(full, ft::kPi / 2);
  EXPECT_LT(full.head<2>().norm(), 1e-12);
}

TEST(Ctrv, SmallYawRateIsContinuous)
{
  const ft::CtrvModel m;
  ft::CtrvModel::State a;
  ft::CtrvModel::State b;
  a << 0, 0, 10, 0.3, 0.99e-4;
  b << 0, 0, 10, 0.3, 1.01e-4;
  // the straight-line branch drops a lateral term of v * omega * dt^2 / 2 = 5e-6 m
  EXPECT_LT((m.propagate(a, 0.1) - m.propagate(b, 0.1)).norm(), 1e-5);
}

// --- ego compensation -----------------------------------------------------------------

namespace
{
ft::Track car_track(double x, double y, double yaw)
{
  ft::Box3D b;
  b.center = {x, y, 0};
  b.yaw = yaw;
  return ft::make_track(1, b, ft::TrackerParams{});
}

ft::Track pedestrian_track(double x, double y)
{
  ft::Box3D b;
  b.center = {x, y, 0};
  b.class_label = ft::ClassLabel::Pedestrian;
  return ft::make_track(2, b, ft::TrackerParams{});
}
}  // namespace

TEST(EgoCompensation, ForwardMotion)
{
  std::vector<ft::Track> t{car_track(10, 0, 0)};
  ft::compensate_ego(t, {{0, 0}, 0, 0}, {{1, 0}, 0, 0.1});
  EXPECT_LT((t[0].position() - Vector2d(9, 0)).norm(), 1e-12);
  EXPECT_NEAR(t[0].yaw(), 0.0, 1e-12);
}

TEST(EgoCompensation, LeftTurn)
{
  std::vector<ft::Track> t{car_track(10, 0, 0)};
  ft::compensate_ego(t, {{0, 0}, 0, 0}, {{0, 0}, ft::kPi / 2, 0.1});
  EXPECT_LT((t[0].position() - Vector2d(0, -10)).norm(), 1e-12);
  EXPECT_NEAR(t[0].yaw(), -ft::kPi / 2, 1e-12);
}

TEST(EgoCompensation, IdentityLeavesStateUnchanged)
{
  std::vector<ft::Track> t{car_track(4, 5, 0.3), pedestrian_track(-3, 2)};
  const auto before = t;
  ft::compensate_ego(t, {{7, 8}, 0.4, 0}, {{7, 8}, 0.4, 0.1});
  for (std::size_t i = 0; i < t.size(); ++i) {
    EXPECT_LT((t[i].position() - before[i].position()).norm(), 1e-12);
    std::visit(
      [&](const auto & f) {
        using F = std::decay_t<decltype(f)>;
        EXPECT_LT(oracle::rel_error(f.covariance(), std::get<F>(before[i].filter).covariance()), 1e-12);
      },
      t[i].filter);
  }
}

TEST(EgoCompensation, CompositionMatchesSingleStep)
{
  std::mt19937_64 rng(12);
  for (int trial = 0; trial < 200; ++trial) {
    auto pose = [&] {
      return ft::EgoPose{{oracle::uniform(rng, -50, 50), oracle::uniform(rng, -50, 50)},
                         oracle::uniform(rng, -ft::kPi, ft::kPi), 0};
    };
    const auto a = pose();
    const auto b = pose();
    const auto c = pose();
    std::vector<ft::Track> two{car_track(oracle::uniform(rng, -30, 30), oracle::uniform(rng, -30, 30), 0.2),
                               pedestrian_track(oracle::uniform(rng, -30, 30), oracle::uniform(rng, -30, 30))};
    // give the pedestrian a velocity so the rotation of (vx, vy) is exercised
    auto & cv = std::get<ft::CvFilter>(two[1].filter);
    ft::CvFilter::State m = cv.mean();
    m.tail<2>() << 1.5, -0.5;
    cv.set_state(m, cv.sqrt_cov());
    auto one = two;
    ft::compensate_ego(two, a, b);
    ft::compensate_ego(two, b, c);
    ft::compensate_ego(one, a, c);
    for (std::size_t i = 0; i < one.size(); ++i) {
      std::visit(
        [&](const auto & f) {
          using F = std::decay_t<decltype(f)>;
          const auto & g = std::get<F>(two[i].filter);
          typename F::State d = f.mean() - g.mean();
          if constexpr (F::N == 5) d(3) = ft::wrap_angle(d(3));
          EXPECT_LT(d.norm(), 1e-9);
          EXPECT_LT(oracle::rel_error(f.covariance(), g.covariance()), 1e-9);
        },
        one[i].filter);
    }
  }
}

// --- association cost -----------------------------------------------------------------

TEST(Mahalanobis, UnitExamples)
{
  ft::TrackerParams p;
  p.meas_sigma_xy = 0.0;
  auto t = pedestrian_track(0, 0);
  ft::CvFilter::Factor s = ft::CvFilter::Factor::Zero();
  s.diagonal() << 1.0, 2.0, 1e-3, 1e-3;
  std::get<ft::CvFilter>(t.filter).set_state(ft::CvFilter::State::Zero(), s);

  ft::Box3D obs;
  obs.class_label = ft::ClassLabel::Pedestrian;
  obs.center = {0, 0, 0};
  EXPECT_NEAR(ft::mahalanobis_cost(t, obs, p), 0.0, 1e-12);
  obs.center = {1, 0, 0};
  EXPECT_NEAR(ft::mahalanobis_cost(t, obs, p), 1.0, 1e-9);
  obs.center = {0, 2, 0};
  EXPECT_NEAR(ft::mahalanobis_cost(t, obs, p), 1.0, 1e-9);
  obs.center = {10, 0, 0};
  EXPECT_EQ(ft::mahalanobis_cost(t, obs, p), ft::kInfeasibleCost);
  obs.center = {0, 0, 0};
  obs.class_label = ft::ClassLabel::Car;
  EXPECT_EQ(ft::mahalanobis_cost(t, obs, p), ft::kInfeasibleCost);
}

TEST(Mahalanobis, HeadingAmbiguityIsResolved)
{
  const auto t = car_track(0, 0, 0.1);
  ft::Box3D obs;
  obs.center = {0, 0, 0};
  obs.yaw = 0.1 - ft::kPi;  // same box, reported backwards
  EXPECT_NEAR(ft::mahalanobis_cost(t, obs, ft::TrackerParams{}), 0.0, 1e-9);
}

// --- tracker --------------------------------------------------------------------------

namespace
{
ft::Box3D box_at(double x, double y, double yaw = 0.0, ft::ClassLabel label = ft::ClassLabel::Car)
{
  ft::Box3D b;
  b.center = {x, y, 0};
  b.yaw = yaw;
  b.size = {4.5, 1.8, 1.5};
  b.class_label = label;
  return b;
}

const ft::EgoPose kStill{};
}  // namespace

TEST(Tracker, SteadyTargetKeepsOneId)
{
  ft::Tracker tr;
  std::vector<int> ids;
  for (int k = 0; k < 20; ++k) {
    const std::vector<ft::Box3D> d{box_at(10 + 1.0 * k, 2)};
    tr.step(d, kStill, kStill, 0.1);
    ASSERT_EQ(tr.tracks().size(), 1U);
    ids.push_back(tr.tracks()[0].id);
    if (k >= 2) {
      EXPECT_EQ(tr.tracks()[0].status, ft::TrackStatus::Confirmed);
    }
  }
  EXPECT_TRUE(std::all_of(ids.begin(), ids.end(), [&](int i) { return i == ids[0]; }));
  EXPECT_NEAR(tr.tracks()[0].speed(), 10.0, 0.5);
}

TEST(Tracker, CoastsThroughMaxMisses)
{
  const ft::TrackerParams p;
  ft::Tracker tr(p);
  int id = -1;
  for (int k = 0; k < 40; ++k) {
    const bool occluded = k >= 15 && k < 15 + p.max_misses;
    std::vector<ft::Box3D> d;
    if (!occluded) d.push_back(box_at(10 + 1.0 * k, 0));
    const auto rep = tr.step(d, kStill, kStill, 0.1);
    ASSERT_EQ(tr.tracks().size(), 1U) << "frame " << k;
    if (id < 0) id = tr.tracks()[0].id;
    EXPECT_EQ(tr.tracks()[0].id, id);
    if (occluded) {
      EXPECT_EQ(tr.tracks()[0].status, ft::TrackStatus::Coasting);
    }
    if (k > 0) {
      EXPECT_TRUE(rep.births.empty());
    }
  }
}

TEST(Tracker, DiesAfterTooManyMisses)
{
  const ft::TrackerParams p;
  ft::Tracker tr(p);
  for (int k = 0; k < 5; ++k) {
    const std::vector<ft::Box3D> d{box_at(10, 0)};
    tr.step(d, kStill, kStill, 0.1);
  }
  bool died = false;
  for (int k = 0; k <= p.max_misses; ++k) {
    const auto rep = tr.step({}, kStill, kStill, 0.1);
    died = died || !rep.deaths.empty();
    if (k < p.max_misses) {
      EXPECT_FALSE(died);
    }
  }
  EXPECT_TRUE(died);
  EXPECT_TRUE(tr.tracks().empty());
}

TEST(Tracker, TentativeTrackExpires)
{
  ft::Tracker tr;
  tr.step(std::vector<ft::Box3D>{box_at(10, 0)}, kStill, kStill, 0.1);
  for (int k = 0; k < 6; ++k) tr.step({}, kStill, kStill, 0.1);
  EXPECT_TRUE(tr.tracks().empty());
}

TEST(Tracker, TwoAgentsKeepDistinctIds)
{
  ft::Tracker tr;
  std::map<int, int> id_of_agent;
  for (int k = 0; k < 100; ++k) {
    const double t = 0.1 * k;
    const std::vector<ft::Box3D> d{box_at(-20 + 8 * t, -2.0), box_at(40 - 6 * t, 2.0, ft::kPi)};
    const auto rep = tr.step(d, kStill, kStill, 0.1);
    ASSERT_EQ(rep.matches.size() + rep.births.size(), 2U);
    for (const auto & [track, det] : rep.matches) {
      const int agent = static_cast<int>(det);
      if (!id_of_agent.count(agent)) id_of_agent[agent] = track;
      EXPECT_EQ(id_of_agent[agent], track) << "frame " << k;
    }
  }
  ASSERT_EQ(id_of_agent.size(), 2U);
  EXPECT_NE(id_of_agent[0], id_of_agent[1]);
  EXPECT_EQ(tr.tracks().size(), 2U);
}

TEST(Tracker, GateRejectsDistantDetection)
{
  ft::Tracker tr;
  for (int k = 0; k < 5; ++k) tr.step(std::vector<ft::Box3D>{box_at(10, 0)}, kStill, kStill, 0.1);
  const auto rep = tr.step(std::vector<ft::Box3D>{box_at(40, 0)}, kStill, kStill, 0.1);
  EXPECT_TRUE(rep.matches.empty());
  EXPECT_EQ(rep.births.size(), 1U);
}

TEST(Tracker, GateSoundness)
{
  // every reported match satisfies the gate at the prediction it was made against
  std::mt19937_64 rng(5);
  ft::Tracker tr;
  for (int k = 0; k < 60; ++k) {
    std::vector<ft::Box3D> d;
    for (int a = 0; a < 4; ++a) {
      d.push_back(box_at(5 * a + 0.5 * k + oracle::uniform(rng, -0.3, 0.3), 6.0 * a + oracle::uniform(rng, -0.3, 0.3),
                         oracle::uniform(rng, -0.05, 0.05)));
    }
    if (rng() % 3 == 0) d.push_back(box_at(oracle::uniform(rng, -40, 40), oracle::uniform(rng, -40, 40)));
    auto predicted = tr.tracks();
    for (auto & t : predicted) ft::predict_track(t, 0.1);
    const auto rep = tr.step(d, kStill, kStill, 0.1);
    for (const auto & [id, det] : rep.matches) {
      const auto it = std::find_if(predicted.begin(), predicted.end(), [id = id](const ft::Track & t) {
        return t.id == id;
      });
      ASSERT_NE(it, predicted.end());
      EXPECT_LE(ft::mahalanobis_cost(*it, d[det], tr.params()), tr.params().gate_3dof);
    }
  }
}

TEST(Tracker, RejectsNonPositiveDt)
{
  ft::Tracker tr;
  EXPECT_THROW(tr.step({}, kStill, kStill, 0.0), std::invalid_argument);
}
