#include <gtest/gtest.h>

#include <cmath>

#include "steeplab/analysis.hpp"
#include "steeplab/errors.hpp"
#include "steeplab/heaviside.hpp"
#include "steeplab/scenarios.hpp"
#include "steeplab/volterra.hpp"

using namespace steeplab;

namespace {

double dist_to(const Trajectory& tr, ClosedFormName name, double omega = 1.2, double u_theta = 0.6) {
  ClosedForm cf;
  cf.name = name;
  cf.omega = omega;
  cf.u_theta = u_theta;
  return sup_distance(tr, closed_form_trajectory(cf, tr.horizon()), 10000);
}

// N = 1, u(0) = 0 below u_theta = 0.5, constant drive 1: crosses upward at t = ln 2.
Scenario rising() {
  Scenario s = multi_solution(1.2, 0.5, 0.5);
  s.name = "rising";
  s.params.u_init[0] = 0.0;
  s.source = SourceFamily::constant(Eigen::VectorXd::Constant(1, 1.0));
  return s;
}

}  // namespace

TEST(Heaviside, ConventionSelectsSolution) {
  const auto one = solve_heaviside_right_smooth(multi_solution(1.2, 0.6, 1.0));
  EXPECT_LT(dist_to(one.trajectory, ClosedFormName::kV1), 1e-8);
  EXPECT_TRUE(one.right_smooth);
  const auto zero = solve_heaviside_right_smooth(multi_solution(1.2, 0.6, 0.0));
  EXPECT_LT(dist_to(zero.trajectory, ClosedFormName::kV2), 1e-8);
  EXPECT_TRUE(zero.right_smooth);
  const auto half = solve_heaviside_right_smooth(multi_solution(1.2, 0.6, 0.5));
  EXPECT_LT(dist_to(half.trajectory, ClosedFormName::kV3), 1e-8);
  EXPECT_TRUE(half.right_smooth);
  EXPECT_EQ(half.z_values(0, 0), 0.5);
}

TEST(Heaviside, FixedPointHoldsAtEveryTime) {
  const Scenario s = multi_solution(1.2, 0.6, 0.5);
  const auto sol = solve_heaviside_right_smooth(s);
  for (double t : {0.0, 1e-9, 0.5, 5.0}) {
    EXPECT_EQ(sol.trajectory.value(t)[0], 0.6);
    EXPECT_EQ(rhs(s, Steepness::infinite(), t, sol.trajectory.value(t))[0], 0.0);
  }
}

TEST(Heaviside, InconsistentConventionIsFlagged) {
  // omega != 2 u_theta with S(0) = 1/2: the solution must leave the threshold.
  const auto sol = solve_heaviside_right_smooth(multi_solution(1.5, 0.6, 0.5));
  EXPECT_FALSE(sol.right_smooth);
  EXPECT_FALSE(sol.warnings.empty());
  EXPECT_LT(dist_to(sol.trajectory, ClosedFormName::kV1, 1.5), 1e-8);
}

TEST(Heaviside, CrossingTimeAndSegments) {
  const auto sol = solve_heaviside_right_smooth(rising());
  ASSERT_EQ(sol.crossings.size(), 1u);
  EXPECT_NEAR(sol.crossings[0].t, std::log(2.0), 1e-14);
  EXPECT_EQ(sol.crossings[0].direction, Direction::kUpward);
  // After the crossing: u' = -u + 2.2, u(ln 2) = 1/2.
  const double a = std::log(2.0);
  for (double t : {1.0, 2.0, 5.0}) {
    EXPECT_NEAR(sol.trajectory.value(t)[0], 2.2 + (0.5 - 2.2) * std::exp(-(t - a)), 1e-13);
  }
  EXPECT_EQ(sol.event_times.size(), 2u);
}

TEST(Heaviside, SolveModeUsesIncomingSlope) {
  HeavisideOptions o;
  o.mode = AtThresholdMode::kSolve;
  const auto sol = solve_heaviside_right_smooth(rising(), o);
  ASSERT_EQ(sol.z_values.cols(), 2);
  // tau v'(a-) = 1/2 = -1/2 + 1.2 z + 1  gives z = 0, which the upward departure overrides.
  EXPECT_NEAR(sol.z_values(0, 1), 0.0, 1e-14);
  EXPECT_FALSE(sol.right_smooth);
  // At t = 0 there is no incoming segment.
  const auto start = solve_heaviside_right_smooth(multi_solution(1.2, 0.6, 0.5), o);
  EXPECT_FALSE(start.warnings.empty());
}

TEST(Heaviside, Errors) {
  HeavisideOptions o;
  o.mode = AtThresholdMode::kSolve;
  Scenario s = multi_solution();
  s.params.omega(0, 0) = 0.0;
  s.params.u_init[0] = 0.3;
  try {
    solve_heaviside_right_smooth(s, o);
    FAIL();
  } catch (const ConfigError& e) {
    EXPECT_NE(std::string(e.what()).find("connectivity matrix singular"), std::string::npos);
  }
  HeavisideOptions budget;
  budget.max_crossings = 0;
  try {
    solve_heaviside_right_smooth(rising(), budget);
    FAIL();
  } catch (const NumericalError& e) {
    EXPECT_NE(std::string(e.what()).find("crossing budget exceeded"), std::string::npos);
  }
  EXPECT_THROW(solve_heaviside_right_smooth(builtin("decay")), ConfigError);
  EXPECT_THROW(at_threshold_mode_from_string("vote"), ConfigError);
}

TEST(Heaviside, OscillatorChattersIntoBudget) {
  // Two units inhibit/excite each other around the threshold. The orbit spirals
  // into the origin with amplitude ~ 1/(2n) after n crossings, so the count grows
  // roughly like e^t: finite on [0, 5], budget-bound on long horizons.
  Scenario s;
  s.name = "osc";
  s.params.tau = Eigen::Vector2d(1.0, 1.0);
  s.params.omega.resize(2, 2);
  s.params.omega << 0.0, -1.0, 1.0, 0.0;
  s.params.u_theta = 0.0;
  s.params.u_init = Eigen::Vector2d(0.3, -0.2);
  s.params.horizon = 5.0;
  s.firing = FiringRate::heaviside(0.5);
  s.source = SourceFamily::constant(Eigen::Vector2d(0.5, -0.5));
  const auto sol = solve_heaviside_right_smooth(s);
  EXPECT_GT(sol.crossings.size(), 4u);
  EXPECT_LT(volterra_residual(sol.trajectory, s, Steepness::infinite(), 20000).sup_residual, 1e-6);
  HeavisideOptions small;
  small.max_crossings = 3;
  EXPECT_THROW(solve_heaviside_right_smooth(s, small), NumericalError);
  s.params.horizon = 20.0;
  EXPECT_THROW(solve_heaviside_right_smooth(s), NumericalError);
}

TEST(Heaviside, ResidualOfRightSmoothOutput) {
  for (double z : {0.0, 0.5, 1.0}) {
    const Scenario s = multi_solution(1.2, 0.6, z);
    const auto sol = solve_heaviside_right_smooth(s);
    EXPECT_LT(volterra_residual(sol.trajectory, s, Steepness::infinite(), 10000).sup_residual, 1e-6) << z;
  }
  const Scenario r = rising();
  EXPECT_LT(volterra_residual(solve_heaviside_right_smooth(r).trajectory, r, Steepness::infinite(), 10000).sup_residual,
            1e-6);
}
