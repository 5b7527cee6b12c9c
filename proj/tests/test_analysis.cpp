#include <gtest/gtest.h>

#include <cmath>

#include "gen.hpp"
#include "steeplab/analysis.hpp"
#include "steeplab/errors.hpp"
#include "steeplab/heaviside.hpp"
#include "steeplab/integrator.hpp"
#include "steeplab/quadrature.hpp"
#include "steeplab/scenarios.hpp"
#include "steeplab/volterra.hpp"

using namespace steeplab;

namespace {

Trajectory v(ClosedFormName name, double horizon = 5.0) {
  ClosedForm cf;
  cf.name = name;
  return closed_form_trajectory(cf, horizon);
}

Trajectory scalar(double horizon, std::function<double(double)> f) {
  return Trajectory::closed_form("f", {}, 1, horizon, [f](double t) { return Eigen::VectorXd::Constant(1, f(t)); });
}

}  // namespace

TEST(MMin, KnownValues) {
  EXPECT_EQ(m_min(v(ClosedFormName::kV3), 2.0, 0.6), 0.0);
  EXPECT_EQ(m_min(constant_trajectory(2, 1.6, 5.0, "c"), 3.0, 0.6), 1.0);
  EXPECT_NEAR(m_min(v(ClosedFormName::kV1), 1.0, 0.6), 0.6 * (1.0 - std::exp(-1.0)), 1e-15);
  EXPECT_NEAR(m_min(v(ClosedFormName::kV1), 1.0, 0.6), 0.3793, 1e-4);
}

TEST(Diagnostics, V3IsThresholdAdvanced) {
  const auto d = threshold_diagnostics(v(ClosedFormName::kV3), 0.6, 10000, {0.1});
  EXPECT_EQ(d.z_measure, 5.0);
  EXPECT_EQ(d.classification, Classification::kThresholdAdvanced);
}

TEST(Diagnostics, V1IsExtraThresholdSimple) {
  const auto d = threshold_diagnostics(v(ClosedFormName::kV1), 0.6, 10000, {0.06, 0.006, 0.0006});
  EXPECT_LE(d.z_measure, d.resolution);
  ASSERT_TRUE(d.crossing_count.has_value());
  EXPECT_EQ(*d.crossing_count, 0);
  EXPECT_EQ(d.classification, Classification::kExtraThresholdSimple);
  for (const auto& [delta, m] : d.r_curve) EXPECT_NEAR(m, -std::log(1.0 - delta / 0.6), 2.0 * d.resolution);
  EXPECT_NEAR(d.r_curve[1].second, 0.01005, 1e-5);
}

TEST(Diagnostics, ThresholdAdvancedLimitCandidate) {
  const auto d = threshold_diagnostics(constant_trajectory(1, 0.6, 5.0, "bar-v"), 0.6, 10000, {});
  EXPECT_EQ(d.classification, Classification::kThresholdAdvanced);
  EXPECT_FALSE(d.crossing_count.has_value());
}

TEST(Diagnostics, AccumulatingCrossingsAreThresholdSimple) {
  // (T - t)^2 sin(1/(T - t)): crossings pile up at T, the zero set has measure zero.
  const double T = 1.0;
  const auto tr = scalar(T, [T](double t) {
    const double s = T - t;
    return s == 0.0 ? 0.0 : s * s * std::sin(1.0 / s);
  });
  const auto d = threshold_diagnostics(tr, 0.0, 1000, {1e-2, 1e-4});
  EXPECT_EQ(d.classification, Classification::kThresholdSimple) << to_string(d.classification);
}

TEST(Diagnostics, FastOscillationOnCoarseGridIsUndetermined) {
  // Evenly spaced crossings, several per grid cell: no accumulation, just under-resolution.
  const auto tr = scalar(1.0, [](double t) { return std::sin(20000.0 * t + 0.3); });
  const auto d = threshold_diagnostics(tr, 0.0, 1000, {0.1});
  EXPECT_EQ(d.classification, Classification::kUndetermined);
  EXPECT_FALSE(d.warnings.empty());
}

TEST(Diagnostics, InputValidation) {
  EXPECT_THROW(threshold_diagnostics(v(ClosedFormName::kV1), 0.6, 100, {0.1}), ConfigError);
  EXPECT_THROW(threshold_diagnostics(v(ClosedFormName::kV1), 0.6, 1000, {0.01, 0.1}), ConfigError);
}

TEST(MeasureProperty, PartitionAndContainment) {
  test_support::Gen g;
  const Trajectory v1 = v(ClosedFormName::kV1);
  const auto wavy = scalar(5.0, [](double t) { return 0.6 + 0.3 * std::sin(3.0 * t) * std::exp(-0.2 * t); });
  for (const Trajectory* tr : {&v1, &wavy}) {
    for (int i = 0; i < 20; ++i) {
      const double t = g.uniform(0.1, 5.0);
      const double d1 = g.log_uniform(1e-4, 0.5);
      const double d2 = d1 * g.uniform(0.01, 1.0);
      const int n = 2000;
      const auto r1 = measure_near(*tr, 0.6, d1, t, n);
      const auto r2 = measure_near(*tr, 0.6, d2, t, n);
      const auto p1 = measure_away(*tr, 0.6, d1, t, n);
      const auto p2 = measure_away(*tr, 0.6, d2, t, n);
      EXPECT_NEAR(p1.measure + r1.measure, t, 2.0 * r1.resolution);
      EXPECT_LE(r2.measure, r1.measure + 1e-12);
      EXPECT_LE(p1.measure, p2.measure + 1e-12);
    }
  }
}

TEST(MeasureProperty, TailShrinksOnThresholdSimple) {
  const auto d = threshold_diagnostics(v(ClosedFormName::kV1), 0.6, 10000, {1e-2, 1e-4, 1e-6, 1e-8});
  EXPECT_LT(d.r_curve.back().second, 2.0 * d.resolution);
}

TEST(SupDistance, Examples) {
  EXPECT_EQ(sup_distance(v(ClosedFormName::kV1), v(ClosedFormName::kV1), 1000), 0.0);
  EXPECT_NEAR(sup_distance(v(ClosedFormName::kV1), v(ClosedFormName::kV2), 10000), 1.2 * (1 - std::exp(-5.0)), 1e-12);
  EXPECT_NEAR(1.2 * (1 - std::exp(-5.0)), 1.19192, 1e-5);
  EXPECT_THROW(sup_distance(v(ClosedFormName::kV1), constant_trajectory(2, 0, 5, "c"), 100), ConfigError);
  EXPECT_THROW(sup_distance(v(ClosedFormName::kV1), v(ClosedFormName::kV1, 4.0), 100), ConfigError);
}

TEST(SupDistanceProperty, MetricAxiomsOnFixedNodes) {
  test_support::Gen g;
  const std::vector<double> nodes = uniform_nodes(0.0, 5.0, 500);
  std::vector<Trajectory> trs;
  for (int i = 0; i < 12; ++i) {
    const double a = g.uniform(-1, 1);
    const double w = g.uniform(0.1, 5);
    trs.push_back(scalar(5.0, [a, w](double t) { return a * std::sin(w * t) + a * a; }));
  }
  for (const auto& a : trs) {
    for (const auto& b : trs) {
      EXPECT_EQ(sup_distance_on(a, b, nodes), sup_distance_on(b, a, nodes));
      for (const auto& c : trs) {
        EXPECT_LE(sup_distance_on(a, c, nodes), sup_distance_on(a, b, nodes) + sup_distance_on(b, c, nodes));
      }
    }
  }
}

TEST(Volterra, MultiSolutionCandidates) {
  for (auto [name, z] : {std::pair{ClosedFormName::kV1, 1.0}, std::pair{ClosedFormName::kV2, 0.0},
                         std::pair{ClosedFormName::kV1, 0.5}, std::pair{ClosedFormName::kV2, 0.5},
                         std::pair{ClosedFormName::kV3, 0.5}}) {
    const auto r = volterra_residual(v(name), multi_solution(1.2, 0.6, z), Steepness::infinite(), 10000);
    EXPECT_LE(r.sup_residual, 1e-6) << to_string(name) << " z=" << z;
  }
}

TEST(Volterra, WrongCandidateHasLargeResidual) {
  const auto r = volterra_residual(v(ClosedFormName::kDecay), multi_solution(), Steepness::infinite(), 10000);
  EXPECT_GT(r.sup_residual, 0.1);
}

TEST(Volterra, ThresholdAdvancedConstantCandidate) {
  const auto r = volterra_residual(constant_trajectory(1, 0.6, 5.0, "bar-v"), builtin("threshold-advanced"),
                                   Steepness::infinite(), 10000);
  for (const auto& [t, val] : r.curve) ASSERT_NEAR(val, 0.6 * t, 1e-6);
  EXPECT_NEAR(r.sup_residual, 3.0, 1e-6);
}

TEST(Volterra, NumericalTrajectoriesAgainstOwnBeta) {
  for (const auto& name : builtin_names()) {
    if (name == "multi-solution") continue;
    const Scenario s = builtin(name);
    for (double beta : {10.0, 1e3, 1e6}) {
      // Sitting on the pwl ramp, the residual amplifies integrator error by omega beta / 2.
      if (name == "threshold-advanced" && beta > 1e3) continue;
      const Trajectory tr = integrate(s, Steepness(beta));
      const auto r = volterra_residual(tr, s, Steepness(beta), 10000);
      EXPECT_LE(r.sup_residual, 10.0 * (1e-9 + r.quad_error_estimate)) << name << " beta=" << beta;
    }
  }
}

TEST(Volterra, RejectsShortTrajectory) {
  EXPECT_THROW(volterra_residual(v(ClosedFormName::kV1, 4.0), multi_solution(), Steepness::infinite(), 1000),
               ConfigError);
}
