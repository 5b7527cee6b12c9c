#pragma once

#include <string>
#include <vector>

#include "steeplab/crossings.hpp"
#include "steeplab/model.hpp"
#include "steeplab/trajectory.hpp"

namespace steeplab {

/// How the firing value of a component sitting exactly on the threshold is chosen.
enum class AtThresholdMode {
  kConvention,  ///< the family's heaviside zero value
  kSolve,       ///< from tau v'(a) = -v(a) + omega z + q(a), v'(a) from the incoming segment
};

struct HeavisideOptions {
  AtThresholdMode mode = AtThresholdMode::kConvention;
  /// More threshold attainments than this is reported as a failure.
  int max_crossings = 10'000;
};

struct HeavisideSolution {
  Trajectory trajectory;
  std::vector<CrossingEvent> crossings;
  /// Times a_k where at-threshold firing values were fixed (0 and every crossing).
  std::vector<double> event_times;
  /// Column k: firing vector chosen at event_times[k] (N x K).
  Eigen::MatrixXd z_values;
  /// True if at every a_k the segment's right derivative equals the ODE
  /// evaluated with the chosen firing values.
  bool right_smooth = true;
  std::vector<std::string> warnings;
};

/// Solves the Heaviside-limit network forward in time. Between threshold
/// attainments the firing vector is constant and the source is linear, so
/// each segment is the exact affine-exponential solution.
/// Throws ConfigError for non-heaviside families or (in kSolve mode) a
/// singular omega; NumericalError when the crossing budget is exceeded.
HeavisideSolution solve_heaviside_right_smooth(const Scenario& scenario,
                                               const HeavisideOptions& options = {});

std::string to_string(AtThresholdMode mode);
AtThresholdMode at_threshold_mode_from_string(const std::string& s);

}  // namespace steeplab
