#pragma once

#include <cstddef>

#include "steeplab/model.hpp"
#include "steeplab/trajectory.hpp"

namespace steeplab {

struct IntegratorOptions {
  double rel_tol = 1e-9;
  double abs_tol = 1e-9;
  /// Cap the step near the firing-rate transition layer so steep families
  /// cannot be stepped over.
  bool layer_cap = true;
  /// Inside the layer zone a step may move a component by at most this
  /// fraction of the layer half-width.
  double layer_fraction = 0.25;
  std::size_t max_steps = 20'000'000;
};

struct IntegrationStats {
  std::size_t accepted = 0;
  std::size_t rejected = 0;
  std::size_t layer_limited = 0;
  std::size_t rhs_evals = 0;
  double min_step = 0.0;
};

/// Adaptive Dormand-Prince 5(4) integration of the network at finite
/// steepness, with the 4th-order dense output. The integration restarts at
/// every source breakpoint. Throws NumericalError on step underflow
/// (< 1e-14 T) or non-finite right-hand sides.
Trajectory integrate(const Scenario& scenario, Steepness beta, const IntegratorOptions& options = {},
                     IntegrationStats* stats = nullptr);

}  // namespace steeplab
