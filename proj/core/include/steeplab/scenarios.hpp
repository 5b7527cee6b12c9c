#pragma once

#include <string>
#include <vector>

#include "steeplab/model.hpp"
#include "steeplab/trajectory.hpp"

namespace steeplab {

enum class ClosedFormName { kV1, kV2, kV3, kDecay, kZBeta, kQBeta, kQInfty };
std::string to_string(ClosedFormName n);
ClosedFormName closed_form_name_from_string(const std::string& s);

/// A named scalar formula. v1/v2/v3/decay use tau; z_beta, q_beta need beta.
struct ClosedForm {
  ClosedFormName name = ClosedFormName::kV1;
  double omega = 1.2;
  double u_theta = 0.6;
  double tau = 1.0;
  double beta = 1.0;
  double u0 = 1.0;  ///< initial value of decay
};

struct ClosedFormValue {
  double value = 0.0;
  /// q_beta queried exactly at its jump t = 1/beta (value is the right limit).
  bool at_breakpoint = false;
};

/// v1 = omega + (u_theta - omega) e^{-t/tau}, v2 = u_theta e^{-t/tau}, v3 = u_theta,
/// decay = u0 e^{-t/tau}, z_beta = S_beta[2t - 1/beta]/beta + u_theta with the
/// piecewise-linear family, q_beta its driving source, q_infty the limit source.
ClosedFormValue closed_form_eval(const ClosedForm& cf, double t);
double closed_form_derivative(const ClosedForm& cf, double t);

/// Scalar closed form as a trajectory on [0, horizon] (not q_beta / q_infty).
Trajectory closed_form_trajectory(const ClosedForm& cf, double horizon);

/// Every component constant at `level`.
Trajectory constant_trajectory(int dim, double level, double horizon, std::string name);

/// Names accepted by builtin().
std::vector<std::string> builtin_names();

/// multi-solution, alt-subseq, threshold-advanced or decay with default parameters.
Scenario builtin(const std::string& name);

/// The v1/v2/v3 example; requires omega > u_theta >= 0.
Scenario multi_solution(double omega = 1.2, double u_theta = 0.6, double zero_value = 0.5, double horizon = 5.0);
/// Shifted piecewise-linear family, parity-dependent limits.
Scenario alt_subseq(double omega = 1.2, double u_theta = 0.6, double horizon = 5.0);
/// Scalar network driven so that z_beta is the exact solution.
Scenario threshold_advanced(double omega = 1.2, double u_theta = 0.6, double horizon = 5.0);
Scenario decay(double u0 = 1.0, double horizon = 5.0);

/// A trajectory a sweep cluster can be identified with.
struct LimitCandidate {
  std::string name;
  Trajectory trajectory;
};

/// Closed forms that are solutions or natural limits of the given scenario:
/// v1, v2 (scalar, tau = 1, u_init = u_theta, q = 0); v3 when additionally
/// omega = 2 u_theta and S_inf(0) = 1/2; decay when omega = 0 and q = 0; the
/// constant u_theta always.
std::vector<LimitCandidate> match_library(const Scenario& scenario);

}  // namespace steeplab
