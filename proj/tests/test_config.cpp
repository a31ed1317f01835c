#include <gtest/gtest.h>

#include "swarm/config.hpp"

using namespace swarm;

TEST(Config, DefaultsRoundTripThroughText) {
  const Scenario s;
  const std::string text = to_config_text(s);
  const Scenario back = load_scenario(text);
  EXPECT_EQ(to_config_text(back), text);
  EXPECT_EQ(config_hash(back), config_hash(s));
}

TEST(Config, ParsesCommentsAndLists) {
  const auto s = load_scenario(
      "# nominal\n"
      "N = 20   # agents\n"
      "v_star = 0.5, -0.5\n"
      "leaders.count = 3\n"
      "availability = range\n"
      "comm_range = 2.5\n"
      "policy = baseline\n");
  EXPECT_EQ(s.params.N, 20u);
  ASSERT_EQ(s.params.v_star.size(), 2u);
  EXPECT_DOUBLE_EQ(s.params.v_star[1], -0.5);
  EXPECT_EQ(s.params.leaders.leader_ids, (std::vector<std::size_t>{0, 1, 2}));
  EXPECT_EQ(s.params.availability, AvailabilityMode::Range);
  EXPECT_EQ(s.policy, "baseline");
}

TEST(Config, UnknownKeyIsAnError) { EXPECT_THROW(load_scenario("bogus = 1\n"), ConfigError); }

TEST(Config, MalformedValuesAreErrors) {
  EXPECT_THROW(load_scenario("N = ten\n"), ConfigError);
  EXPECT_THROW(load_scenario("dt = 0.01x\n"), ConfigError);
  EXPECT_THROW(load_scenario("policy = greedy\n"), ConfigError);
  EXPECT_THROW(load_scenario("sweep.axis = gain\n"), ConfigError);
  EXPECT_THROW(load_scenario("just a line\n"), ConfigError);
  EXPECT_THROW(load_scenario("N = 3\nN = 4\n"), ConfigError);
}

TEST(Config, OverridesApplyAfterFile) {
  ConfigBuilder b;
  b.add_text("N = 20\nT = 4\n");
  b.add_override("T=2.5");
  const auto s = b.build();
  EXPECT_EQ(s.params.N, 20u);
  EXPECT_DOUBLE_EQ(s.params.T, 2.5);
}

TEST(Config, DimensionDefaultsFollowD) {
  const auto s = load_scenario("d = 3\n");
  EXPECT_EQ(s.params.v_star, (Vec{1.0, 0.0, 0.0}));
  EXPECT_EQ(s.params.obs_center, (Vec{0.0, 0.0, 0.0}));
  EXPECT_TRUE(validate_scenario(s).empty());
}

TEST(Config, ThetaDefaultsToFifthOfBound) {
  auto s = load_scenario("leaders.M = 2\n");
  EXPECT_DOUBLE_EQ(s.params.leaders.threshold(), 0.4);
  s = load_scenario("leaders.M = 2\nleaders.theta = 0\n");
  EXPECT_DOUBLE_EQ(s.params.leaders.threshold(), 0.0);
}

TEST(Config, HashChangesWithContent) {
  Scenario a;
  Scenario b;
  b.params.T = 7.0;
  EXPECT_NE(config_hash(a), config_hash(b));
}

TEST(Config, ValidationFlagsTubeAndProtocol) {
  const auto s = load_scenario("tube.alpha = 1.5\nmc.M = 0\n");
  const auto r = validate_scenario(s);
  EXPECT_NE(std::find(r.begin(), r.end(), "alpha must lie in (0,1)"), r.end());
  EXPECT_NE(std::find(r.begin(), r.end(), "mc.M must be at least 1"), r.end());
}
