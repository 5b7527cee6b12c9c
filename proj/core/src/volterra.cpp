#include "steeplab/volterra.hpp"

#include <algorithm>
#include <cmath>

#include "steeplab/crossings.hpp"
#include "steeplab/errors.hpp"
#include "steeplab/quadrature.hpp"

namespace steeplab {

namespace {

std::vector<double> residual_pass(const Trajectory& traj, const Scenario& scenario, Steepness beta,
                                  const std::vector<double>& nodes, std::vector<std::pair<double, double>>* curve) {
  const NetworkParams& p = scenario.params;
  const Eigen::Index n = p.size();
  auto firing = [&](const Eigen::VectorXd& v) {
    Eigen::VectorXd f(n);
    for (Eigen::Index j = 0; j < n; ++j) f[j] = scenario.firing.eval_or_limit(beta, v[j] - p.u_theta);
    return f;
  };

  std::vector<double> residuals;
  residuals.reserve(nodes.size());
  Eigen::VectorXd integral = Eigen::VectorXd::Zero(n);
  Eigen::VectorXd v_prev = traj.value(nodes.front());
  Eigen::VectorXd s_prev = beta.is_infinite() ? Eigen::VectorXd() : firing(v_prev);
  auto record = [&](double t, const Eigen::VectorXd& v) {
    const double r = (p.tau.cwiseProduct(v - p.u_init) + integral).lpNorm<Eigen::Infinity>();
    residuals.push_back(r);
    if (curve) curve->emplace_back(t, r);
  };
  record(nodes.front(), v_prev);

  for (std::size_t k = 0; k + 1 < nodes.size(); ++k) {
    const double a = nodes[k];
    const double b = nodes[k + 1];
    const double h = b - a;
    const Eigen::VectorXd v_next = traj.value(b);
    Eigen::VectorXd s_term;
    if (beta.is_infinite()) {
      s_term = firing(traj.value(0.5 * (a + b))) * h;
    } else {
      const Eigen::VectorXd s_next = firing(v_next);
      s_term = 0.5 * h * (s_prev + s_next);
      s_prev = s_next;
    }
    const Eigen::VectorXd q_term =
        0.5 * h * (scenario.source.eval(beta, a, Limit::kFromRight) + scenario.source.eval(beta, b, Limit::kFromLeft));
    integral += 0.5 * h * (v_prev + v_next) - p.omega * s_term - q_term;
    v_prev = v_next;
    record(b, v_next);
  }
  return residuals;
}

}  // namespace

VolterraResult volterra_residual(const Trajectory& traj, const Scenario& scenario, Steepness beta, int quad_n) {
  scenario.validate();
  if (quad_n < 2) throw ConfigError("quad_n must be at least 2");
  const double horizon = scenario.params.horizon;
  if (traj.horizon() < horizon * (1.0 - 1e-12)) {
    throw ConfigError("trajectory covers [0, " + std::to_string(traj.horizon()) + "] but the scenario needs [0, " +
                      std::to_string(horizon) + "]");
  }
  if (traj.dim() != scenario.size()) throw ConfigError("trajectory and scenario differ in dimension");

  std::vector<double> mandatory = scenario.source.breakpoints(beta, horizon);
  for (double k : traj.knots()) mandatory.push_back(k);
  if (beta.is_infinite()) {
    const auto report = detect_crossings(traj, scenario.params.u_theta, 1e-12 * horizon, quad_n);
    for (const auto& e : report.events) mandatory.push_back(e.t);
    for (const auto& pl : report.plateaus) {
      mandatory.push_back(pl.t_start);
      mandatory.push_back(pl.t_end);
    }
  }

  auto build = [&](int cells) {
    std::vector<double> nodes = uniform_nodes(0.0, horizon, cells);
    nodes.insert(nodes.end(), mandatory.begin(), mandatory.end());
    return merge_nodes(std::move(nodes), 0.0, horizon);
  };

  VolterraResult out;
  const std::vector<double> fine_nodes = build(quad_n);
  const std::vector<double> fine = residual_pass(traj, scenario, beta, fine_nodes, &out.curve);
  out.sup_residual = *std::max_element(fine.begin(), fine.end());

  const std::vector<double> coarse = residual_pass(traj, scenario, beta, build(std::max(1, quad_n / 2)), nullptr);
  out.quad_error_estimate = std::abs(out.sup_residual - *std::max_element(coarse.begin(), coarse.end())) / 3.0;
  return out;
}

}  // namespace steeplab
