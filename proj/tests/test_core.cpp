#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>

#include "swarm/core.hpp"
#include "test_support.hpp"

using namespace swarm;

namespace {

bool has(const ValidationReport& r, const std::string& msg) { return std::find(r.begin(), r.end(), msg) != r.end(); }

}  // namespace

TEST(ValidateParams, NominalConfigurationIsValid) {
  SimParams p = default_params();
  ASSERT_EQ(p.N, 100u);
  ASSERT_EQ(p.d, 2u);
  ASSERT_EQ(p.K, 7u);
  ASSERT_DOUBLE_EQ(p.tau_max, 0.25);
  ASSERT_DOUBLE_EQ(p.dt, 0.01);
  ASSERT_DOUBLE_EQ(p.T, 8.0);
  EXPECT_TRUE(validate_params(p).empty());
}

TEST(ValidateParams, ZeroStepIsRejected) {
  SimParams p = default_params();
  p.dt = 0.0;
  EXPECT_TRUE(has(validate_params(p), "dt must be positive"));
}

TEST(ValidateParams, InteractionNumberBoundedByNMinusOne) {
  SimParams p = default_params();
  p.K = p.N;
  EXPECT_TRUE(has(validate_params(p), "K exceeds N-1"));
  p.K = p.N - 1;
  EXPECT_TRUE(validate_params(p).empty());
}

TEST(ValidateParams, ZeroDelayAllowed) {
  SimParams p = default_params();
  p.tau_max = 0.0;
  EXPECT_TRUE(validate_params(p).empty());
  EXPECT_EQ(history_length(0.0, p.dt), 1u);
}

TEST(ValidateParams, CatchesEachInvariant) {
  SimParams p = default_params();
  p.eps = 0.0;
  p.delta = -1.0;
  p.dt = 10.0;
  p.form_strength = -1.0;
  p.leaders.leader_ids = {0, 0};
  p.v_star = {1.0};
  const auto r = validate_params(p);
  EXPECT_TRUE(has(r, "eps must be positive"));
  EXPECT_TRUE(has(r, "delta must be positive"));
  EXPECT_TRUE(has(r, "dt must not exceed T"));
  EXPECT_TRUE(has(r, "form_strength must be nonnegative"));
  EXPECT_TRUE(has(r, "leader ids must be distinct and below N"));
  EXPECT_TRUE(has(r, "v_star dimension differs from d"));
}

TEST(ValidateParams, IdempotentAndPure) {
  SimParams p = default_params();
  p.K = 500;
  const auto a = validate_params(p);
  const auto b = validate_params(p);
  EXPECT_EQ(a, b);
  EXPECT_EQ(p.K, 500u);
}

TEST(HistoryLength, NominalBufferHas26Snapshots) {
  EXPECT_EQ(history_length(0.25, 0.01), 26u);
  EXPECT_EQ(history_length(0.55, 0.01), 56u);
  EXPECT_EQ(history_length(0.014, 0.01), 3u);
  EXPECT_EQ(step_count(8.0, 0.01), 800u);
  EXPECT_EQ(step_count(1.0, 0.3), 4u);
}

TEST(FormationSpec, UnitSquare) {
  const auto f = build_formation_spec(4, 1.0);
  EXPECT_DOUBLE_EQ(f(0, 1), 1.0);
  EXPECT_DOUBLE_EQ(f(0, 3), std::sqrt(2.0));
  EXPECT_DOUBLE_EQ(f(1, 2), std::sqrt(2.0));
}

TEST(FormationSpec, TwoAgents) {
  const auto f = build_formation_spec(2, 2.5);
  EXPECT_DOUBLE_EQ(f(0, 1), 2.5);
}

TEST(FormationSpec, SymmetricZeroDiagonalForAllSizes) {
  for (std::size_t n = 2; n <= 200; ++n) {
    const auto f = build_formation_spec(n, 0.7);
    for (std::size_t i = 0; i < n; ++i) {
      ASSERT_EQ(f(i, i), 0.0);
      for (std::size_t j = 0; j < n; ++j) {
        ASSERT_EQ(f(i, j), f(j, i));
        if (i != j) {
          ASSERT_GT(f(i, j), 0.0);
        }
      }
    }
  }
}

TEST(FormationSpec, RejectsDegenerateInput) {
  EXPECT_THROW(build_formation_spec(1, 1.0), ConfigError);
  EXPECT_THROW(build_formation_spec(3, 0.0), ConfigError);
}
