#include <gtest/gtest.h>

#include <cmath>

#include "swarm/history.hpp"
#include "test_support.hpp"

using namespace swarm;

namespace {

Points filled(std::size_t n, double c) { return Points(n, 2, c); }

}  // namespace

TEST(VelocityHistory, LagLookupReturnsOlderSnapshots) {
  VelocityHistory h(4, filled(2, 0.0), 0.0, 0.01);
  for (int k = 1; k <= 6; ++k) h.push(0.01 * k, filled(2, k));
  EXPECT_EQ(h.at(0)[1][0], 6.0);
  EXPECT_EQ(h.at(1)[1][0], 5.0);
  EXPECT_EQ(h.at(3)[1][0], 3.0);
  EXPECT_DOUBLE_EQ(h.stamp(3), 0.03);
  EXPECT_THROW(h.at(4), HistoryUnderflow);
}

TEST(VelocityHistory, PrefilledStampsAreDtSpaced) {
  VelocityHistory h(26, filled(1, 1.0), 0.0, 0.01);
  for (std::size_t l = 0; l < 26; ++l) EXPECT_NEAR(h.stamp(l), -0.01 * static_cast<double>(l), 1e-15);
  EXPECT_NEAR(h.stamp(0) - h.stamp(25), 0.25, 1e-15);
}

TEST(DelayedVelocity, RoundingRule) {
  EXPECT_EQ(lag_for(0.014, 0.01), 1u);
  EXPECT_EQ(lag_for(0.016, 0.01), 2u);
  EXPECT_EQ(lag_for(0.0, 0.01), 0u);
  EXPECT_EQ(lag_for(0.25, 0.01), 25u);
  VelocityHistory h(3, filled(2, 0.0), 0.0, 0.01);
  h.push(0.01, filled(2, 1.0));
  h.push(0.02, filled(2, 2.0));
  EXPECT_EQ(delayed_velocity(h, 0, lag_for(0.014, 0.01))[0], 1.0);
  EXPECT_EQ(delayed_velocity(h, 0, 0)[0], 2.0);
  EXPECT_EQ(delayed_velocity(h, 0, 2)[0], 0.0);
}

TEST(InitHistory, CompatibilityIsExact) {
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    SimParams p = swarm::testing::small_params(10);
    p.tau_max = 0.25;
    RunStreams rng(seed, p.N);
    InitialHistory pre;
    auto [hist, s] = init_history(p, rng, &pre);
    ASSERT_EQ(compat_residual(pre), 0.0);
    ASSERT_EQ(hist.length(), 26u);
    for (std::size_t l = 0; l < hist.length(); ++l) ASSERT_EQ(hist.at(l), s.v);
  }
}

TEST(InitHistory, ZeroDelayBufferHasOneSlot) {
  SimParams p = swarm::testing::small_params(5);
  p.tau_max = 0.0;
  RunStreams rng(1, p.N);
  auto [hist, s] = init_history(p, rng);
  EXPECT_EQ(hist.length(), 1u);
}

TEST(InitHistory, MinimumSeparationHolds) {
  SimParams p = swarm::testing::small_params(30);
  p.init.box = 5.0;
  p.init.min_sep = 0.4;
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    RunStreams rng(seed, p.N);
    auto [hist, s] = init_history(p, rng);
    for (std::size_t i = 0; i < p.N; ++i)
      for (std::size_t j = i + 1; j < p.N; ++j) ASSERT_GE(dist(s.x[i], s.x[j]), 0.4);
  }
}

TEST(InitHistory, ExhaustionThrows) {
  SimParams p = swarm::testing::small_params(50);
  p.init.box = 1.0;
  p.init.min_sep = 0.5;
  RunStreams rng(3, p.N);
  EXPECT_THROW(init_history(p, rng), InitError);
}

TEST(SampleDelays, ZeroMaxGivesZeroLags) {
  SimParams p = swarm::testing::small_params(6);
  p.tau_max = 0.0;
  RunStreams rng(2, p.N);
  const auto D = sample_delays(p, rng);
  for (auto l : D.lag) EXPECT_EQ(l, 0u);
}

TEST(SampleDelays, UniformMean) {
  SimParams p = swarm::testing::small_params(101);
  p.tau_max = 0.25;
  RunStreams rng(5, p.N);
  const auto D = sample_delays(p, rng);
  double sum = 0.0;
  std::size_t n = 0;
  for (std::size_t i = 0; i < p.N; ++i)
    for (std::size_t j = 0; j < p.N; ++j) {
      if (i == j) continue;
      const double t = D.tau_at(i, j);
      ASSERT_GE(t, 0.0);
      ASSERT_LE(t, 0.25);
      ASSERT_LE(D.lag_at(i, j), history_length(p.tau_max, p.dt) - 1);
      sum += t;
      ++n;
    }
  const double sigma = 0.25 / std::sqrt(12.0) / std::sqrt(static_cast<double>(n));
  EXPECT_NEAR(sum / static_cast<double>(n), 0.125, 3.0 * sigma);
}

TEST(SampleDelays, Deterministic) {
  SimParams p = swarm::testing::small_params(8);
  RunStreams a(77, p.N), b(77, p.N);
  const auto A = sample_delays(p, a);
  const auto B = sample_delays(p, b);
  EXPECT_EQ(A.tau, B.tau);
  EXPECT_EQ(A.lag, B.lag);
}

TEST(RunStreams, DistinctIndicesDistinctStreams) {
  RunStreams a(run_seed(1, 0), 3), b(run_seed(1, 1), 3), c(run_seed(1, 0), 3);
  EXPECT_NE(a.seed, b.seed);
  EXPECT_EQ(a.common(), c.common());
  EXPECT_NE(a.idio[0](), a.idio[1]());
}
