#include "steeplab/scenarios.hpp"

#include <cmath>

#include "steeplab/errors.hpp"

namespace steeplab {

std::string to_string(ClosedFormName n) {
  switch (n) {
    case ClosedFormName::kV1: return "v1";
    case ClosedFormName::kV2: return "v2";
    case ClosedFormName::kV3: return "v3";
    case ClosedFormName::kDecay: return "decay";
    case ClosedFormName::kZBeta: return "z_beta";
    case ClosedFormName::kQBeta: return "q_beta";
    case ClosedFormName::kQInfty: return "q_infty";
  }
  return "?";
}

ClosedFormName closed_form_name_from_string(const std::string& s) {
  for (auto n : {ClosedFormName::kV1, ClosedFormName::kV2, ClosedFormName::kV3, ClosedFormName::kDecay,
                 ClosedFormName::kZBeta, ClosedFormName::kQBeta, ClosedFormName::kQInfty}) {
    if (to_string(n) == s) return n;
  }
  throw ConfigError("unknown closed form '" + s + "'");
}

ClosedFormValue closed_form_eval(const ClosedForm& cf, double t) {
  const double e = std::exp(-t / cf.tau);
  switch (cf.name) {
    case ClosedFormName::kV1: return {cf.u_theta - (cf.omega - cf.u_theta) * std::expm1(-t / cf.tau)};
    case ClosedFormName::kV2: return {cf.u_theta * e};
    case ClosedFormName::kV3: return {cf.u_theta};
    case ClosedFormName::kDecay: return {cf.u0 * e};
    case ClosedFormName::kZBeta: {
      const FiringRate pwl = FiringRate::piecewise_linear();
      return {pwl.eval(Steepness(cf.beta), 2.0 * t - 1.0 / cf.beta) / cf.beta + cf.u_theta};
    }
    case ClosedFormName::kQBeta: {
      const auto src = SourceFamily::threshold_advanced(cf.omega, cf.u_theta, FiringRate::piecewise_linear());
      const bool jump = t == 1.0 / cf.beta;
      return {src.eval(Steepness(cf.beta), t, jump ? Limit::kFromRight : Limit::kValue)[0], jump};
    }
    case ClosedFormName::kQInfty:
      return {t == 0.0 ? 1.0 + cf.u_theta - cf.omega : cf.u_theta - cf.omega};
  }
  return {};
}

double closed_form_derivative(const ClosedForm& cf, double t) {
  const double e = std::exp(-t / cf.tau);
  switch (cf.name) {
    case ClosedFormName::kV1: return -(cf.u_theta - cf.omega) * e / cf.tau;
    case ClosedFormName::kV2: return -cf.u_theta * e / cf.tau;
    case ClosedFormName::kV3: return 0.0;
    case ClosedFormName::kDecay: return -cf.u0 * e / cf.tau;
    case ClosedFormName::kZBeta: return t < 1.0 / cf.beta ? 1.0 : 0.0;
    case ClosedFormName::kQBeta:
    case ClosedFormName::kQInfty:
      break;
  }
  throw ConfigError("no derivative for closed form " + to_string(cf.name));
}

Trajectory closed_form_trajectory(const ClosedForm& cf, double horizon) {
  if (cf.name == ClosedFormName::kQBeta || cf.name == ClosedFormName::kQInfty) {
    throw ConfigError(to_string(cf.name) + " is a source term, not a trajectory");
  }
  std::map<std::string, double> params{{"omega", cf.omega}, {"u_theta", cf.u_theta}, {"tau", cf.tau}};
  std::vector<double> knots;
  if (cf.name == ClosedFormName::kZBeta) {
    params["beta"] = cf.beta;
    if (1.0 / cf.beta < horizon) knots.push_back(1.0 / cf.beta);
  }
  if (cf.name == ClosedFormName::kDecay) params["u0"] = cf.u0;
  return Trajectory::closed_form(
      to_string(cf.name), std::move(params), 1, horizon,
      [cf](double t) { return Eigen::VectorXd::Constant(1, closed_form_eval(cf, t).value); },
      [cf](double t) { return Eigen::VectorXd::Constant(1, closed_form_derivative(cf, t)); }, std::move(knots));
}

Trajectory constant_trajectory(int dim, double level, double horizon, std::string name) {
  return Trajectory::closed_form(
      std::move(name), {{"level", level}}, dim, horizon,
      [dim, level](double) { return Eigen::VectorXd::Constant(dim, level); },
      [dim](double) { return Eigen::VectorXd::Zero(dim); });
}

namespace {

NetworkParams scalar_params(double omega, double u_theta, double u_init, double horizon) {
  NetworkParams p;
  p.tau = Eigen::VectorXd::Ones(1);
  p.omega = Eigen::MatrixXd::Constant(1, 1, omega);
  p.u_theta = u_theta;
  p.u_init = Eigen::VectorXd::Constant(1, u_init);
  p.horizon = horizon;
  return p;
}

}  // namespace

std::vector<std::string> builtin_names() { return {"alt-subseq", "decay", "multi-solution", "threshold-advanced"}; }

Scenario multi_solution(double omega, double u_theta, double zero_value, double horizon) {
  if (!(omega > u_theta && u_theta >= 0.0)) {
    throw ConfigError("multi-solution needs omega > u_theta >= 0");
  }
  Scenario s{"multi-solution", scalar_params(omega, u_theta, u_theta, horizon), FiringRate::heaviside(zero_value),
             SourceFamily::constant(Eigen::VectorXd::Zero(1))};
  s.validate();
  return s;
}

Scenario alt_subseq(double omega, double u_theta, double horizon) {
  Scenario s{"alt-subseq", scalar_params(omega, u_theta, u_theta, horizon),
             FiringRate::shifted(FiringRate::piecewise_linear()), SourceFamily::constant(Eigen::VectorXd::Zero(1))};
  s.validate();
  return s;
}

Scenario threshold_advanced(double omega, double u_theta, double horizon) {
  // z_beta(0) = S_beta[-1/beta]/beta + u_theta = u_theta.
  const FiringRate pwl = FiringRate::piecewise_linear();
  Scenario s{"threshold-advanced", scalar_params(omega, u_theta, u_theta, horizon), pwl,
             SourceFamily::threshold_advanced(omega, u_theta, pwl)};
  s.validate();
  return s;
}

Scenario decay(double u0, double horizon) {
  Scenario s{"decay", scalar_params(0.0, 0.6, u0, horizon), FiringRate::tanh_family(),
             SourceFamily::constant(Eigen::VectorXd::Zero(1))};
  s.validate();
  return s;
}

Scenario builtin(const std::string& name) {
  if (name == "multi-solution") return multi_solution();
  if (name == "alt-subseq") return alt_subseq();
  if (name == "threshold-advanced") return threshold_advanced();
  if (name == "decay") return decay();
  throw ConfigError("unknown built-in scenario '" + name + "'");
}

std::vector<LimitCandidate> match_library(const Scenario& scenario) {
  const NetworkParams& p = scenario.params;
  const double horizon = p.horizon;
  const int n = p.size();
  const bool zero_source =
      scenario.source.kind() == SourceKind::kConstant && scenario.source.constant_value().isZero(0.0);
  std::vector<LimitCandidate> out;

  if (n == 1 && p.tau[0] == 1.0 && p.u_init[0] == p.u_theta && zero_source) {
    ClosedForm cf;
    cf.omega = p.omega(0, 0);
    cf.u_theta = p.u_theta;
    cf.name = ClosedFormName::kV1;
    out.push_back({"v1", closed_form_trajectory(cf, horizon)});
    cf.name = ClosedFormName::kV2;
    out.push_back({"v2", closed_form_trajectory(cf, horizon)});
    if (std::abs(cf.omega - 2.0 * cf.u_theta) < 1e-12 && scenario.firing.zero_value() == 0.5) {
      cf.name = ClosedFormName::kV3;
      out.push_back({"v3", closed_form_trajectory(cf, horizon)});
    }
  }
  if (p.omega.isZero(0.0) && zero_source) {
    const Eigen::VectorXd u0 = p.u_init;
    const Eigen::VectorXd tau = p.tau;
    out.push_back({"decay", Trajectory::closed_form(
                                "decay", {}, n, horizon,
                                [u0, tau](double t) { return (u0.array() * (-t / tau.array()).exp()).matrix(); },
                                [u0, tau](double t) {
                                  return (-u0.array() / tau.array() * (-t / tau.array()).exp()).matrix();
                                })});
  }
  out.push_back({"constant-u_theta", constant_trajectory(n, p.u_theta, horizon, "constant-u_theta")});
  return out;
}

}  // namespace steeplab
