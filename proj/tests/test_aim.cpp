/* Copyright 2026 The sddkit Authors. All Rights Reserved.

Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at

    http://www.apache.org/licenses/LICENSE-2.0

Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License.
==============================================================================*/

#include <cmath>
#include <numbers>
#include <random>

#include <gtest/gtest.h>

#include "fixtures.hpp"
#include "sddkit/aim.hpp"

namespace sddkit {
namespace {

using testing::line;
using testing::make_track;

RhoConfig fixed_scales() {
  RhoConfig c;
  c.velocity_scale = 2.0;
  c.distance_scale = 100.0;
  c.acceleration_scale = 0.5;
  return c;
}

InteractionPair pair_of(std::vector<Point2> a, std::vector<Point2> b) {
  InteractionPair p;
  p.agent = "1";
  p.other = "2";
  for (std::size_t i = 0; i < a.size(); ++i) p.frames.push_back(static_cast<std::int64_t>(i));
  p.agent_pos = std::move(a);
  p.other_pos = std::move(b);
  return p;
}

std::vector<double> random_terms(std::mt19937& rng, std::size_t n) {
  std::uniform_real_distribution<double> u(0.0, 3.0);
  std::vector<double> v(n);
  for (auto& x : v) x = u(rng);
  return v;
}

// --- interactions ---------------------------------------------------------

TEST(Interactions, DisjointRangesGiveNoPairs) {
  const std::vector<Trajectory> ts{make_track(1, 0, line({0, 0}, {1, 0}, 50)),
                                   make_track(2, 60, line({0, 0}, {1, 0}, 50))};
  EXPECT_TRUE(extract_interactions(ts, 30).empty());
}

TEST(Interactions, HundredCoPresentFramesGiveTwoDirectedPairs) {
  const std::vector<Trajectory> ts{make_track(1, 200, line({0, 0}, {1, 0}, 100)),
                                   make_track(2, 200, line({0, 50}, {1, 0}, 100))};
  const auto pairs = extract_interactions(ts, 30);
  ASSERT_EQ(pairs.size(), 2u);
  EXPECT_EQ(pairs[0].agent, "1");
  EXPECT_EQ(pairs[0].other, "2");
  EXPECT_EQ(pairs[1].agent, "2");
  EXPECT_EQ(pairs[1].other, "1");
  for (const auto& p : pairs) {
    EXPECT_EQ(p.size(), 100u);
    EXPECT_EQ(p.buffer_frame(), 230);
  }
}

TEST(Interactions, ThreeMutuallyCoPresentGiveSixPairs) {
  const std::vector<Trajectory> ts{make_track(1, 0, line({0, 0}, {1, 0}, 80)),
                                   make_track(2, 5, line({0, 9}, {1, 0}, 80)),
                                   make_track(3, 10, line({9, 0}, {0, 1}, 80))};
  EXPECT_EQ(extract_interactions(ts, 30).size(), 6u);
}

TEST(Interactions, OnlyCommonFramesAreAligned) {
  const auto a = make_track(1, 0, line({0, 0}, {1, 0}, 60));
  const auto b = make_track(2, 20, line({100, 0}, {0, 1}, 60));
  const auto p = make_interaction(a, b, 5);
  ASSERT_TRUE(p);
  EXPECT_EQ(p->frames.front(), 20);
  EXPECT_EQ(p->frames.back(), 59);
  EXPECT_EQ(p->agent_pos.front(), (Point2{20, 0}));
  EXPECT_EQ(p->other_pos.front(), (Point2{100, 0}));
  EXPECT_EQ(p->buffer_frame(), 29);  // max(N, n_min - 1) = 9
}

TEST(Interactions, TooShortForBufferIsDropped) {
  const auto a = make_track(1, 0, line({0, 0}, {1, 0}, 30));
  const auto b = make_track(2, 0, line({0, 5}, {1, 0}, 30));
  EXPECT_FALSE(make_interaction(a, b, 30));
  EXPECT_TRUE(make_interaction(a, b, 29));
}

TEST(Interactions, BufferRuleHonoursOffset) {
  EXPECT_EQ(BufferRule{}.index(30), 30u);
  EXPECT_EQ((BufferRule{50, 10}.index(30)), 50u);
  EXPECT_EQ((BufferRule{5, 10}.index(30)), 30u);
  EXPECT_EQ((BufferRule{-1, 40}.index(5)), 39u);
}

// --- kinematics -----------------------------------------------------------

TEST(Kinematics, StationaryAgents) {
  const auto p = pair_of(std::vector<Point2>(40, {5, 5}), std::vector<Point2>(40, {8, 9}));
  const auto k = compute_kinematics(p, 35, 30);
  EXPECT_EQ(k.velocity, 0.0);
  EXPECT_EQ(k.heading, 0.0);
  EXPECT_EQ(k.distance, 5.0);
  EXPECT_EQ(k.acceleration, 0.0);
}

TEST(Kinematics, StepTowardFixedOtherHasZeroHeading) {
  const auto p = pair_of(line({0, 0}, {1, 0}, 40), std::vector<Point2>(40, {500, 0}));
  EXPECT_EQ(compute_kinematics(p, 35, 30).heading, 0.0);
}

TEST(Kinematics, StepAwayFromFixedOtherHasHeadingPi) {
  const auto p = pair_of(line({0, 0}, {-1, 0}, 40), std::vector<Point2>(40, {500, 0}));
  EXPECT_EQ(compute_kinematics(p, 35, 30).heading, std::numbers::pi);
}

TEST(Kinematics, PerpendicularStepHasHeadingHalfPi) {
  const auto p = pair_of(line({0, 0}, {0, 1}, 40), line({500, 0}, {0, 1}, 40));
  EXPECT_NEAR(compute_kinematics(p, 35, 30).heading, std::numbers::pi / 2, 1e-12);
}

TEST(Kinematics, ConstantVelocityIsExactStepSum) {
  const auto p = pair_of(line({0, 0}, {3, 4}, 60), line({0, 100}, {-6, 8}, 60));
  for (std::size_t t = 30; t < 60; ++t) {
    const auto k = compute_kinematics(p, t, 30);
    EXPECT_EQ(k.velocity, 15.0);
    EXPECT_EQ(k.acceleration, 0.0);
  }
}

TEST(Kinematics, DistanceAveragesWindowPoints) {
  // Separation grows 0, 1, ..., 10 over the 11 points of an N = 10 window.
  const auto p = pair_of(std::vector<Point2>(11, {0, 0}), line({0, 0}, {1, 0}, 11));
  EXPECT_DOUBLE_EQ(compute_kinematics(p, 10, 10).distance, 5.0);
}

TEST(Kinematics, WindowBeforeInteractionIsRangeError) {
  const auto p = pair_of(line({0, 0}, {1, 0}, 40), line({0, 9}, {1, 0}, 40));
  EXPECT_THROW(compute_kinematics(p, 29, 30), std::out_of_range);
  EXPECT_THROW(compute_kinematics(p, 40, 30), std::out_of_range);
  EXPECT_NO_THROW(compute_kinematics(p, 30, 30));
}

TEST(Kinematics, RangesHoldOnRandomWalks) {
  std::mt19937 rng(3);
  std::normal_distribution<double> step(0.0, 2.0);
  std::vector<Point2> a{{0, 0}}, b{{50, 50}};
  for (int i = 0; i < 300; ++i) {
    a.push_back(a.back() + Point2{step(rng), step(rng)});
    b.push_back(b.back() + Point2{step(rng), step(rng)});
  }
  const auto p = pair_of(a, b);
  for (std::size_t t = 30; t < p.size(); ++t) {
    const auto k = compute_kinematics(p, t, 30);
    EXPECT_GE(k.velocity, 0.0);
    EXPECT_GE(k.distance, 0.0);
    EXPECT_GE(k.heading, 0.0);
    EXPECT_LE(k.heading, std::numbers::pi);
  }
}

// --- rho ------------------------------------------------------------------

TEST(Rho, ZeroVelocityKeepsAlphaFloor) {
  const auto cfg = fixed_scales();
  const Kinematics k{0.0, 40.0, 0.3, 0.0};
  const double d = std::exp(-40.0 / 100.0);
  const double h = 1.0 - 2.0 * 0.3 / std::numbers::pi;
  EXPECT_DOUBLE_EQ(compute_rho(k, cfg), 0.3 * d * (1.0 + h));
  EXPECT_GT(compute_rho(k, cfg), 0.0);
}

TEST(Rho, DirectlyBehindIsZero) {
  const auto cfg = fixed_scales();
  for (double v : {0.0, 1.0, 50.0}) {
    EXPECT_EQ(compute_rho({v, 10.0, std::numbers::pi, 0.0}, cfg), 0.0);
  }
  EXPECT_EQ(normalize_heading(std::numbers::pi), -1.0);
  EXPECT_EQ(normalize_heading(0.0), 1.0);
}

TEST(Rho, StrictlyDecreasingInDistance) {
  const auto cfg = fixed_scales();
  double prev = compute_rho({1.0, 0.0, 0.5, 0.0}, cfg);
  for (double d = 0.5; d < 2000.0; d += 0.5) {
    const double r = compute_rho({1.0, d, 0.5, 0.0}, cfg);
    ASSERT_LT(r, prev) << d;
    prev = r;
  }
}

TEST(Rho, NormalizersStayInRange) {
  for (double v : {1e-9, 0.5, 2.0, 1e6}) {
    EXPECT_GT(normalize_velocity(v, 2.0), 0.0);
    EXPECT_LT(normalize_velocity(v, 2.0), 1.0);
  }
  for (double d : {0.0, 1.0, 100.0, 1000.0}) {
    EXPECT_GT(normalize_distance(d, 100.0), 0.0);
    EXPECT_LE(normalize_distance(d, 100.0), 1.0);
  }
}

TEST(Rho, WithoutHeadingDirectionDoesNotMatter) {
  std::mt19937 rng(5);
  std::normal_distribution<double> step(0.0, 3.0);
  std::vector<Point2> a{{0, 0}}, b{{80, 20}};
  for (int i = 0; i < 120; ++i) {
    a.push_back(a.back() + Point2{1.0 + step(rng), step(rng)});
    b.push_back(b.back() + Point2{-1.0 + step(rng), step(rng)});
  }
  const auto ij = pair_of(a, b);
  const auto ji = pair_of(b, a);
  auto cfg = fixed_scales();
  cfg.use_heading = false;
  bool any_diff_with_heading = false;
  for (std::size_t t = 30; t < ij.size(); ++t) {
    const auto kij = compute_kinematics(ij, t, 30);
    const auto kji = compute_kinematics(ji, t, 30);
    EXPECT_EQ(compute_rho(kij, cfg), compute_rho(kji, cfg));
    if (compute_rho(kij, fixed_scales()) != compute_rho(kji, fixed_scales())) any_diff_with_heading = true;
  }
  EXPECT_TRUE(any_diff_with_heading);
}

TEST(Rho, AblationSwitches) {
  const Kinematics k{4.0, 50.0, 1.0, 0.5};
  const double vs = 4.0 / 6.0;
  const double ds = std::exp(-0.5);
  const double hs = 1.0 - 2.0 / std::numbers::pi;
  auto cfg = fixed_scales();
  EXPECT_DOUBLE_EQ(compute_rho(k, cfg), (0.3 + vs) * ds * (1 + hs));
  cfg.use_velocity = false;
  EXPECT_DOUBLE_EQ(compute_rho(k, cfg), ds * (1 + hs));
  cfg = fixed_scales();
  cfg.use_distance = false;
  EXPECT_DOUBLE_EQ(compute_rho(k, cfg), (0.3 + vs) * (1 + hs));
  cfg = fixed_scales();
  cfg.use_heading = false;
  EXPECT_DOUBLE_EQ(compute_rho(k, cfg), (0.3 + vs) * ds);
  cfg = fixed_scales();
  cfg.use_acceleration = true;
  EXPECT_DOUBLE_EQ(compute_rho(k, cfg), (0.3 + 0.5 * (vs + 0.5)) * ds * (1 + hs));
}

TEST(Rho, UnresolvedScalesAndBadConfig) {
  EXPECT_THROW(compute_rho({}, RhoConfig{}), ConfigError);
  auto cfg = fixed_scales();
  cfg.window = 1;
  EXPECT_THROW(compute_rho({}, cfg), ConfigError);
  cfg = fixed_scales();
  cfg.alpha = -0.1;
  EXPECT_THROW(compute_rho({}, cfg), ConfigError);
}

TEST(Rho, CalibrationUsesMedianAndDiagonal) {
  const auto p = pair_of(line({0, 0}, {3, 4}, 91), std::vector<Point2>(91, {0, 300}));
  const std::vector<InteractionPair> pairs{p};
  const auto cfg = calibrate_rho(RhoConfig{}, pairs, 800.0);
  EXPECT_EQ(cfg.velocity_scale, 5.0);
  EXPECT_EQ(cfg.distance_scale, 100.0);
  EXPECT_EQ(cfg.acceleration_scale, 1.0);  // all-zero median falls back to 1
  const auto still = pair_of(std::vector<Point2>(91, {0, 0}), std::vector<Point2>(91, {0, 0}));
  const std::vector<InteractionPair> still_pairs{still};
  EXPECT_EQ(calibrate_rho(RhoConfig{}, still_pairs, 0.0).velocity_scale, 1.0);
  RhoConfig preset = fixed_scales();
  EXPECT_EQ(calibrate_rho(preset, pairs, 800.0).distance_scale, 100.0);
  EXPECT_EQ(calibrate_rho(preset, pairs, 800.0).velocity_scale, 2.0);
}

TEST(Rho, SceneDiagonalFromAnnotations) {
  const std::vector<Trajectory> ts{make_track(1, 0, {{10, 20}, {300, 5}}),
                                   make_track(2, 0, {{0, 400}})};
  EXPECT_EQ(scene_diagonal(ts), 500.0);
}

// --- accumulation ---------------------------------------------------------

TEST(Accumulate, DeltaOneIsMonotoneRunningSum) {
  std::mt19937 rng(11);
  for (int trial = 0; trial < 100; ++trial) {
    const auto mi = random_terms(rng, 200);
    const auto rho = random_terms(rng, 200);
    const auto aim = accumulate_aim(mi, rho, 1.0);
    for (std::size_t i = 1; i < aim.size(); ++i) ASSERT_GE(aim[i], aim[i - 1]);
    EXPECT_GE(aim.front(), 0.0);
  }
}

TEST(Accumulate, SmallerDeltaNeverExceedsLarger) {
  std::mt19937 rng(12);
  for (int trial = 0; trial < 100; ++trial) {
    const auto mi = random_terms(rng, 300);
    const auto rho = random_terms(rng, 300);
    const auto hi = accumulate_aim(mi, rho, 0.98);
    const auto lo = accumulate_aim(mi, rho, 0.95);
    for (std::size_t i = 0; i < hi.size(); ++i) ASSERT_LE(lo[i], hi[i]);
  }
}

TEST(Accumulate, RecurrenceMatchesDirectSum) {
  std::mt19937 rng(13);
  for (std::size_t n : {1u, 10u, 1000u, 10000u}) {
    const auto mi = random_terms(rng, n);
    const auto rho = random_terms(rng, n);
    for (double delta : {1.0, 0.999, 0.98, 0.5}) {
      const auto aim = accumulate_aim(mi, rho, delta);
      long double direct = 0.0L;
      for (std::size_t t = 0; t < n; ++t) {
        direct += std::pow(static_cast<long double>(delta), static_cast<long double>(n - 1 - t)) *
                  static_cast<long double>(rho[t]) * static_cast<long double>(mi[t]);
      }
      const double rel = std::abs(aim.back() - static_cast<double>(direct)) / static_cast<double>(direct);
      EXPECT_LE(rel, 1e-9) << "n=" << n << " delta=" << delta;
    }
  }
}

TEST(Accumulate, ConstantTermConvergesToGeometricLimit) {
  const std::vector<double> mi(3000, 0.5), rho(3000, 2.0);
  const auto aim = accumulate_aim(mi, rho, 0.98);
  EXPECT_NEAR(aim.back(), 1.0 / (1.0 - 0.98), 1e-9);
  for (std::size_t i = 1; i < aim.size(); ++i) ASSERT_GE(aim[i], aim[i - 1]);
}

TEST(Accumulate, SingleTerm) {
  const std::vector<double> mi{0.25}, rho{1.5};
  EXPECT_EQ(accumulate_aim(mi, rho, 0.9), (std::vector<double>{0.375}));
}

TEST(Accumulate, Errors) {
  const std::vector<double> a(3, 1.0), b(4, 1.0);
  EXPECT_THROW(accumulate_aim(a, b, 0.98), StructuralError);
  EXPECT_THROW(accumulate_aim(a, a, 0.0), ConfigError);
  EXPECT_THROW(accumulate_aim(a, a, 1.01), ConfigError);
}

// --- series and sweeps ----------------------------------------------------

InteractionPair walking_pair(std::uint32_t seed, std::size_t n) {
  std::mt19937 rng(seed);
  std::normal_distribution<double> jitter(0.0, 1.5);
  std::vector<Point2> a{{100, 100}}, b{{140, 110}};
  for (std::size_t i = 1; i < n; ++i) {
    a.push_back(a.back() + Point2{1.0 + jitter(rng), 0.5 + jitter(rng)});
    b.push_back(b.back() + Point2{0.8 + jitter(rng), 0.6 + jitter(rng)});
  }
  auto p = pair_of(a, b);
  p.buffer_index = BufferRule{}.index(30);
  return p;
}

TEST(Series, CoversBufferToEndAndIsNonNegative) {
  const auto p = walking_pair(21, 200);
  const auto s = compute_measure_series(p, fixed_scales(), MiConfig{}, 0.98);
  ASSERT_EQ(s.frames.size(), 170u);
  EXPECT_EQ(s.frames.front(), 30);
  EXPECT_EQ(s.frames.back(), 199);
  EXPECT_EQ(s.mi.size(), s.aim.size());
  EXPECT_EQ(s.rho.size(), s.aim.size());
  for (std::size_t i = 0; i < s.aim.size(); ++i) {
    EXPECT_GE(s.mi[i], 0.0);
    EXPECT_GE(s.rho[i], 0.0);
    EXPECT_GE(s.aim[i], 0.0);
    EXPECT_TRUE(std::isfinite(s.aim[i]));
  }
  EXPECT_DOUBLE_EQ(s.aim.front(), s.rho.front() * s.mi.front());
}

TEST(Series, BufferBeforeFullWindowIsRejected) {
  auto p = walking_pair(22, 100);
  p.buffer_index = 10;
  EXPECT_THROW(compute_measure_series(p, fixed_scales(), MiConfig{}, 0.98), ConfigError);
}

TEST(Sweep, DeltaOneDominates) {
  const auto p = walking_pair(23, 300);
  const std::vector<double> deltas{1.0, 0.98, 0.95};
  const std::vector<int> windows{30};
  const auto out = sweep(p, deltas, windows, fixed_scales(), MiConfig{});
  ASSERT_EQ(out.size(), 3u);
  for (std::size_t i = 0; i < out[0].aim.size(); ++i) {
    EXPECT_GE(out[0].aim[i], out[1].aim[i]);
    EXPECT_GE(out[1].aim[i], out[2].aim[i]);
  }
  EXPECT_EQ(out[2].delta, 0.95);
}

TEST(Sweep, EmptyListsGiveNothing) {
  const auto p = walking_pair(24, 100);
  const std::vector<double> none_d;
  const std::vector<int> none_n;
  const std::vector<double> one_d{0.98};
  const std::vector<int> one_n{30};
  EXPECT_TRUE(sweep(p, none_d, one_n, fixed_scales(), MiConfig{}).empty());
  EXPECT_TRUE(sweep(p, one_d, none_n, fixed_scales(), MiConfig{}).empty());
}

TEST(Sweep, LargerWindowSmoothsRho) {
  const auto p = walking_pair(25, 600);
  const std::vector<double> deltas{0.98};
  const std::vector<int> windows{5, 30, 100};
  const auto out = sweep(p, deltas, windows, fixed_scales(), MiConfig{});
  ASSERT_EQ(out.size(), 3u);
  // Per-frame total variation over the frames every window covers.
  auto tv = [](const MeasureSeries& s, std::int64_t from) {
    double sum = 0.0;
    std::size_t steps = 0;
    for (std::size_t i = 1; i < s.frames.size(); ++i) {
      if (s.frames[i - 1] < from) continue;
      sum += std::abs(s.rho[i] - s.rho[i - 1]);
      ++steps;
    }
    return sum / static_cast<double>(steps);
  };
  const std::int64_t from = out[2].frames.front();
  EXPECT_GT(tv(out[0], from), tv(out[1], from));
  EXPECT_GT(tv(out[1], from), tv(out[2], from));
}

}  // namespace
}  // namespace sddkit
