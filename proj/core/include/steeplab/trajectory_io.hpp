#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "steeplab/crossings.hpp"
#include "steeplab/trajectory.hpp"

namespace steeplab {

/// CSV with header "t,u_1,...,u_N", numbers printed with 17 significant digits.
void write_trajectory_csv(std::ostream& os, const Trajectory& traj, const std::vector<double>& times);
void save_trajectory_csv(const std::string& path, const Trajectory& traj, const std::vector<double>& times);

/// Reads a CSV written by write_trajectory_csv as a piecewise-linear trajectory.
/// Throws ConfigError on malformed input.
Trajectory read_trajectory_csv(std::istream& is, const std::string& name = "csv");
Trajectory load_trajectory_csv(const std::string& path);

/// JSON array of {"t", "component" (1-based), "direction"}.
std::string crossings_to_json(const std::vector<CrossingEvent>& events);
std::vector<CrossingEvent> crossings_from_json(const std::string& text);

/// "%.16e".
std::string format_double(double x);

}  // namespace steeplab
