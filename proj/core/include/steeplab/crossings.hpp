#pragma once

#include <string>
#include <vector>

#include "steeplab/trajectory.hpp"

namespace steeplab {

enum class Direction { kUpward, kDownward, kTangential };

std::string to_string(Direction d);
Direction direction_from_string(const std::string& s);

/// A time where one component reaches the threshold.
struct CrossingEvent {
  double t = 0.0;
  int component = 0;
  Direction direction = Direction::kUpward;

  friend bool operator==(const CrossingEvent&, const CrossingEvent&) = default;
};

/// A stretch where a component sits on the threshold (within root_tol).
struct Plateau {
  int component = 0;
  double t_start = 0.0;
  double t_end = 0.0;
};

struct CrossingReport {
  /// Threshold attainments in (0, T], sorted by time then component.
  std::vector<CrossingEvent> events;
  /// Degenerate stretches; when nonempty the crossing list is not finite.
  std::vector<Plateau> plateaus;
  /// Some component starts exactly at the threshold.
  bool starts_at_threshold = false;

  bool degenerate() const { return !plateaus.empty(); }
};

/// Locates threshold crossings by sign changes over a sampling of the
/// trajectory (uniform grid of `min_samples` cells, knots, and interior
/// points of every knot interval), refined by bisection to root_tol.
/// Near-zero local extrema of |u_j - u_theta| are reported as tangential.
CrossingReport detect_crossings(const Trajectory& traj, double u_theta, double root_tol,
                                int min_samples = 10'000);

}  // namespace steeplab
