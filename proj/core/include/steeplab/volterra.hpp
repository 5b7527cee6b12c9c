#pragma once

#include <utility>
#include <vector>

#include "steeplab/model.hpp"
#include "steeplab/trajectory.hpp"

namespace steeplab {

struct VolterraResult {
  double sup_residual = 0.0;
  std::vector<std::pair<double, double>> curve;  ///< (t, R(t))
  /// Richardson estimate from repeating the quadrature with half the uniform nodes.
  double quad_error_estimate = 0.0;
};

/// R(t) = || tau (v(t) - u_init) + int_0^t v - int_0^t omega S_beta[v - u_theta] - int_0^t q_beta ||_inf
/// by composite trapezoid on quad_n uniform cells plus source breakpoints,
/// trajectory knots and (for infinite beta) threshold crossings. With beta
/// infinite the firing term is constant on each cell and is taken at the
/// cell midpoint. Throws ConfigError if the trajectory does not cover [0, T].
VolterraResult volterra_residual(const Trajectory& traj, const Scenario& scenario, Steepness beta, int quad_n);

}  // namespace steeplab
