#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "steeplab/crossings.hpp"
#include "steeplab/trajectory.hpp"

namespace steeplab {

/// min_j |z_j(s) - u_theta|.
double m_min(const Trajectory& traj, double s, double u_theta);

/// A Lebesgue-measure estimate and the grid cell width it was computed on.
struct MeasureEstimate {
  double measure = 0.0;
  double resolution = 0.0;
};

/// |{s in [0,t] : m(s) <= delta}| (the set r(delta; t)).
MeasureEstimate measure_near(const Trajectory& traj, double u_theta, double delta, double t, int grid_n);
/// |{s in [0,t] : m(s) > delta}| (the set p(delta; t)).
MeasureEstimate measure_away(const Trajectory& traj, double u_theta, double delta, double t, int grid_n);

enum class Classification { kExtraThresholdSimple, kThresholdSimple, kThresholdAdvanced, kUndetermined };
std::string to_string(Classification c);

struct DiagnosticsOptions {
  /// m(s) <= atol counts as "on the threshold" when estimating |Z|.
  double atol = 1e-10;
  /// Root tolerance for crossing detection; 0 means 1e-12 T.
  double root_tol = 0.0;
  /// |Z| above this many grid cells means threshold advanced.
  double advanced_cells = 10.0;
  /// |Z| at most this many grid cells counts as measure zero.
  double simple_cells = 1.0;
  /// A run of this many shrinking crossing gaps is read as accumulation.
  int accumulation_run = 8;
};

struct ThresholdDiagnostics {
  /// Empty optional means a plateau (no finite crossing list).
  std::optional<int> crossing_count;
  std::vector<CrossingEvent> crossings;
  double z_measure = 0.0;
  double resolution = 0.0;
  std::vector<std::pair<double, double>> r_curve;  ///< (delta, |r(delta; T)|)
  Classification classification = Classification::kUndetermined;
  std::vector<std::string> warnings;
};

ThresholdDiagnostics threshold_diagnostics(const Trajectory& traj, double u_theta, int grid_n,
                                           const std::vector<double>& deltas,
                                           const DiagnosticsOptions& options = {});

/// max over a uniform grid plus both trajectories' knots of ||a(t) - b(t)||_inf.
/// Throws ConfigError on dimension or domain mismatch.
double sup_distance(const Trajectory& a, const Trajectory& b, int grid_n);
/// Same metric on a caller-fixed node set.
double sup_distance_on(const Trajectory& a, const Trajectory& b, const std::vector<double>& nodes);

}  // namespace steeplab
