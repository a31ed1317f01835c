#include <gtest/gtest.h>

#include <cmath>

#include "swarm/sim.hpp"
#include "test_support.hpp"

using namespace swarm;

namespace {

SimParams quiet(std::size_t n) {
  SimParams p = swarm::testing::small_params(n);
  p.rep_strength = 0.0;
  p.form_strength = 0.0;
  p.obs_strength = 0.0;
  p.noise_idio = 0.0;
  p.noise_common = 0.0;
  p.tau_max = 0.0;
  p.leaders.leader_ids.clear();
  return p;
}

SwarmState lattice(std::size_t n, double vx, double vy) {
  SwarmState s{0.0, Points(n, 2), Points(n, 2)};
  for (std::size_t i = 0; i < n; ++i) {
    s.x[i][0] = static_cast<double>(i);
    s.x[i][1] = static_cast<double>(2 * i);
    s.v[i][0] = vx;
    s.v[i][1] = vy;
  }
  return s;
}

}  // namespace

TEST(EmStep, ZeroDriftZeroNoise) {
  SimParams p = quiet(4);
  SwarmState s = lattice(4, 0.0, 0.0);
  const SwarmState s0 = s;
  VelocityHistory hist(1, s.v, 0.0, p.dt);
  ControlTrace trace;
  RunStreams rng(1, p.N);
  em_step(s, hist, DelayMatrix::zeros(4), p, Policy::baseline(), trace, rng);
  EXPECT_EQ(s.x, s0.x);
  EXPECT_EQ(s.v, s0.v);
  EXPECT_DOUBLE_EQ(s.t, p.dt);
}

TEST(EmStep, PureTransportIsExact) {
  SimParams p = quiet(3);
  p.dt = 0.25;
  p.T = 10.0;
  SwarmState s = lattice(3, 2.0, -1.0);
  const SwarmState s0 = s;
  VelocityHistory hist(1, s.v, 0.0, p.dt);
  ControlTrace trace;
  RunStreams rng(1, p.N);
  for (int k = 1; k <= 40; ++k) {
    em_step(s, hist, DelayMatrix::zeros(3), p, Policy::baseline(), trace, rng);
    const double t = 0.25 * k;
    for (std::size_t i = 0; i < 3; ++i) {
      ASSERT_EQ(s.x[i][0], s0.x[i][0] + 2.0 * t);
      ASSERT_EQ(s.x[i][1], s0.x[i][1] - 1.0 * t);
    }
  }
}

TEST(EmStep, IncrementVarianceMatchesDt) {
  SimParams p = quiet(2);
  p.noise_idio = 1.0;
  p.availability = AvailabilityMode::Range;
  p.comm_range = 0.0;
  SwarmState s{0.0, Points(2, 2), Points(2, 2)};
  s.x[1][0] = 1e6;
  VelocityHistory hist(1, s.v, 0.0, p.dt);
  ControlTrace trace;
  RunStreams rng(99, p.N);
  const int steps = 100000;
  double sum = 0.0, sum2 = 0.0;
  for (int k = 0; k < steps; ++k) {
    const double before = s.v[0][0];
    em_step(s, hist, DelayMatrix::zeros(2), p, Policy::baseline(), trace, rng);
    const double inc = s.v[0][0] - before;
    sum += inc;
    sum2 += inc * inc;
  }
  const double mean = sum / steps;
  const double var = sum2 / steps - mean * mean;
  EXPECT_NEAR(var, p.dt, 0.05 * p.dt);
}

TEST(EmStep, CommonNoiseIsShared) {
  SimParams p = quiet(3);
  p.noise_common = 0.5;
  p.availability = AvailabilityMode::Range;
  p.comm_range = 0.0;
  SwarmState s = lattice(3, 0.0, 0.0);
  for (std::size_t i = 0; i < 3; ++i) s.x[i][0] = 1e4 * static_cast<double>(i);
  VelocityHistory hist(1, s.v, 0.0, p.dt);
  ControlTrace trace;
  RunStreams rng(5, p.N);
  em_step(s, hist, DelayMatrix::zeros(3), p, Policy::baseline(), trace, rng);
  EXPECT_NE(s.v[0][0], 0.0);
  EXPECT_EQ(to_vec(s.v[0]), to_vec(s.v[1]));
  EXPECT_EQ(to_vec(s.v[1]), to_vec(s.v[2]));
}

TEST(EmStep, CollisionDetected) {
  SimParams p = quiet(2);
  SwarmState s{0.0, Points(2, 1), Points(2, 1)};
  p.d = 1;
  p.v_star = {0.0};
  p.obs_center = {0.0};
  s.x[1][0] = 1.0;
  s.v[0][0] = 1.0 / p.dt;
  VelocityHistory hist(1, s.v, 0.0, p.dt);
  ControlTrace trace;
  RunStreams rng(1, p.N);
  EXPECT_THROW(em_step(s, hist, DelayMatrix::zeros(2), p, Policy::baseline(), trace, rng), CollisionError);
}

TEST(Run, DeterministicRecord) {
  const RunSetup setup = swarm::testing::small_setup(6, Policy::sparse(0.2));
  const RunRecord a = run(setup, 3);
  const RunRecord b = run(setup, 3);
  EXPECT_EQ(a, b);
  EXPECT_EQ(a.steps, step_count(setup.params.T, setup.params.dt));
  EXPECT_NE(run(setup, 4).seed, a.seed);
}

TEST(Run, StartInTubeHitsAtZero) {
  RunSetup setup = swarm::testing::small_setup(5);
  setup.params = quiet(5);
  setup.params.init.vel_spread = 0.0;
  setup.tube.eps_v = 10.0;
  setup.tube.delta_f = 100.0;
  setup.tube.rho = 1e-6;
  const RunRecord r = run(setup, 0);
  ASSERT_TRUE(r.hitting_time.has_value());
  EXPECT_EQ(*r.hitting_time, 0.0);
  EXPECT_TRUE(r.tube_all);
  EXPECT_FALSE(r.collided);
}

TEST(Run, BarrierKeepsSmallSwarmApart) {
  RunSetup setup = swarm::testing::small_setup(5);
  setup.params.noise_idio = 0.0;
  setup.params.noise_common = 0.0;
  setup.params.tau_max = 0.0;
  setup.params.T = 4.0;
  for (std::size_t idx = 0; idx < 5; ++idx) {
    const RunRecord r = run(setup, idx);
    EXPECT_FALSE(r.collided);
    EXPECT_GT(r.min_dist_run, 0.0);
    EXPECT_TRUE(std::isfinite(r.h_max));
  }
}

TEST(Run, InitFailureIsFlagged) {
  RunSetup setup = swarm::testing::small_setup(40);
  setup.params.init.box = 0.5;
  setup.params.init.min_sep = 0.4;
  const RunRecord r = run(setup, 0);
  EXPECT_TRUE(r.init_failed);
  EXPECT_FALSE(r.tube_all);
}

TEST(Run, ObserverSeesEveryGridTime) {
  const RunSetup setup = swarm::testing::small_setup(4);
  std::size_t calls = 0;
  double last = -1.0;
  run(setup, 0, [&](const SwarmState& s) {
    EXPECT_GT(s.t, last);
    last = s.t;
    ++calls;
  });
  EXPECT_EQ(calls, step_count(setup.params.T, setup.params.dt) + 1);
}

TEST(Run, SparseNeverCostsMoreThanBaselineAtInfiniteThreshold) {
  RunSetup setup = swarm::testing::small_setup(6, Policy::sparse(1e9));
  const RunRecord r = run(setup, 1);
  EXPECT_EQ(r.l1_cost, 0.0);
  EXPECT_EQ(r.duty_fraction, 0.0);
}
