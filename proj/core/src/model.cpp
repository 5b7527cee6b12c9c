#include "steeplab/model.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "steeplab/errors.hpp"
#include "steeplab/quadrature.hpp"

namespace steeplab {

namespace {

bool all_finite(const Eigen::MatrixXd& m) { return m.allFinite(); }

// S_1 slope for the base function of a tanh/pwl family; `left` selects the
// left derivative at the pwl kinks.
double base_slope(const FiringRate& f, double y, bool left) {
  if (f.kind() == FiringKind::kPiecewiseLinear) {
    const bool inside = left ? (y > -1.0 && y <= 1.0) : (y >= -1.0 && y < 1.0);
    return inside ? 0.5 : 0.0;
  }
  return f.derivative(Steepness(1.0), y);
}

}  // namespace

void NetworkParams::validate() const {
  const auto n = tau.size();
  if (n < 1) throw ConfigError("network needs at least one unit");
  if (omega.rows() != n || omega.cols() != n) {
    std::ostringstream msg;
    msg << "omega is " << omega.rows() << "x" << omega.cols() << ", expected " << n << "x" << n;
    throw ConfigError(msg.str());
  }
  if (u_init.size() != n) throw ConfigError("u_init length does not match tau");
  if (!all_finite(tau) || !all_finite(omega) || !all_finite(u_init) || !std::isfinite(u_theta)) {
    throw ConfigError("network parameters must be finite");
  }
  if ((tau.array() <= 0.0).any()) throw ConfigError("all tau_i must be positive");
  if (!(horizon > 0.0) || !std::isfinite(horizon)) throw ConfigError("horizon T must be positive");
}

SourceFamily SourceFamily::constant(Eigen::VectorXd c) {
  if (c.size() < 1 || !c.allFinite()) throw ConfigError("constant source needs finite entries");
  SourceFamily s;
  s.kind_ = SourceKind::kConstant;
  s.constant_ = std::move(c);
  return s;
}

SourceFamily SourceFamily::tabulated(std::vector<double> times, Eigen::MatrixXd values) {
  if (times.size() < 2) throw ConfigError("tabulated source needs at least two rows");
  if (static_cast<Eigen::Index>(times.size()) != values.rows()) {
    throw ConfigError("tabulated source: times and value rows differ in length");
  }
  if (values.cols() < 1 || !values.allFinite()) {
    throw ConfigError("tabulated source values must be finite");
  }
  for (std::size_t k = 0; k + 1 < times.size(); ++k) {
    if (!std::isfinite(times[k]) || times[k + 1] < times[k]) {
      throw ConfigError("tabulated source times must be finite and nondecreasing");
    }
    if (k + 2 < times.size() && times[k] == times[k + 2]) {
      throw ConfigError("tabulated source: at most two rows per time");
    }
  }
  SourceFamily s;
  s.kind_ = SourceKind::kTabulated;
  s.times_ = std::move(times);
  s.values_ = std::move(values);
  return s;
}

SourceFamily SourceFamily::threshold_advanced(double omega, double u_theta, const FiringRate& inner) {
  if (inner.kind() != FiringKind::kPiecewiseLinear && inner.kind() != FiringKind::kTanh) {
    throw ConfigError("threshold-advanced source needs a pwl or tanh inner family");
  }
  if (!std::isfinite(omega) || !std::isfinite(u_theta)) {
    throw ConfigError("threshold-advanced parameters must be finite");
  }
  SourceFamily s;
  s.kind_ = SourceKind::kThresholdAdvanced;
  s.ta_omega_ = omega;
  s.ta_u_theta_ = u_theta;
  s.ta_firing_ = std::make_shared<const FiringRate>(inner);
  return s;
}

const FiringRate& SourceFamily::ta_firing() const {
  if (!ta_firing_) throw ConfigError("source is not threshold-advanced");
  return *ta_firing_;
}

int SourceFamily::size() const {
  switch (kind_) {
    case SourceKind::kConstant:
      return static_cast<int>(constant_.size());
    case SourceKind::kTabulated:
      return static_cast<int>(values_.cols());
    case SourceKind::kThresholdAdvanced:
      return 1;
  }
  return 0;
}

Eigen::VectorXd SourceFamily::eval_tabulated(double t, Limit limit) const {
  const auto n = static_cast<std::ptrdiff_t>(times_.size());
  auto row = [&](std::ptrdiff_t k) -> Eigen::VectorXd { return values_.row(k).transpose(); };
  auto lerp = [&](std::ptrdiff_t k0, std::ptrdiff_t k1) -> Eigen::VectorXd {
    const double w = (t - times_[k0]) / (times_[k1] - times_[k0]);
    return (1.0 - w) * row(k0) + w * row(k1);
  };
  if (limit == Limit::kFromLeft) {
    const auto idx = std::lower_bound(times_.begin(), times_.end(), t) - times_.begin();
    if (idx == 0) return row(0);
    if (idx == n) return row(n - 1);
    if (times_[idx] == t) return row(idx);
    return lerp(idx - 1, idx);
  }
  const auto idx = std::upper_bound(times_.begin(), times_.end(), t) - times_.begin();
  if (idx == 0) return row(0);
  if (idx == n) return row(n - 1);
  if (times_[idx - 1] == t) return row(idx - 1);
  return lerp(idx - 1, idx);
}

double SourceFamily::eval_threshold_advanced(Steepness beta, double t, Limit limit) const {
  const FiringRate& f = *ta_firing_;
  const Steepness one(1.0);
  const double w = ta_omega_;
  const double u = ta_u_theta_;
  if (beta.is_infinite()) {
    // q_inf = u_theta - omega S_1(1) for t > 0. At t = 0 the defined value keeps
    // the z' term: 2 S_1'(-1) + u_theta - omega S_1(1) (= 1 + u_theta - omega for pwl).
    const double tail = u - w * f.eval(one, 1.0);
    if (t > 0.0 || limit == Limit::kFromRight) return tail;
    return 2.0 * base_slope(f, -1.0, false) + tail;
  }
  const double b = beta.value();
  // z = u_theta + S_1(y)/beta, z' = 2 S_1'(y), S_beta[z - u_theta] = S_1(S_1(y)), y = 2 beta t - 1.
  const double y = 2.0 * b * t - 1.0;
  const double s1 = f.eval(one, y);
  const double dz = 2.0 * base_slope(f, y, limit == Limit::kFromLeft);
  if (f.kind() == FiringKind::kPiecewiseLinear) {
    // Closed branches avoid rounding in S_1(S_1(y)) near the kink.
    const bool first_branch = t < 1.0 / b || (t == 1.0 / b && limit == Limit::kFromLeft);
    if (first_branch) return 1.0 + t + u - w * (0.5 + 0.5 * b * t);
    return 1.0 / b + u - w;
  }
  return dz + (u + s1 / b) - w * f.eval(one, s1);
}

Eigen::VectorXd SourceFamily::eval(Steepness beta, double t, Limit limit) const {
  switch (kind_) {
    case SourceKind::kConstant:
      return constant_;
    case SourceKind::kTabulated:
      return eval_tabulated(t, limit);
    case SourceKind::kThresholdAdvanced:
      return Eigen::VectorXd::Constant(1, eval_threshold_advanced(beta, t, limit));
  }
  return {};
}

std::vector<double> SourceFamily::breakpoints(Steepness beta, double horizon) const {
  std::vector<double> out;
  if (kind_ == SourceKind::kTabulated) {
    for (double t : times_) {
      if (t > 0.0 && t < horizon) out.push_back(t);
    }
  } else if (kind_ == SourceKind::kThresholdAdvanced && !beta.is_infinite() &&
             ta_firing_->kind() == FiringKind::kPiecewiseLinear) {
    const double t = 1.0 / beta.value();
    if (t < horizon) out.push_back(t);
  }
  return merge_nodes(std::move(out), 0.0, horizon);
}

std::vector<double> SourceFamily::limit_anomalies() const {
  if (kind_ == SourceKind::kThresholdAdvanced) return {0.0};
  return {};
}

void Scenario::validate() const {
  params.validate();
  if (source.size() != params.size()) {
    std::ostringstream msg;
    msg << "source has " << source.size() << " components, network has " << params.size();
    throw ConfigError(msg.str());
  }
  if (source.kind() == SourceKind::kTabulated &&
      (source.times().front() > 0.0 || source.times().back() < params.horizon)) {
    throw ConfigError("tabulated source must cover [0, T]");
  }
}

Eigen::VectorXd rhs(const Scenario& scenario, Steepness beta, double t, const Eigen::VectorXd& u,
                    Limit limit) {
  const NetworkParams& p = scenario.params;
  const auto n = p.tau.size();
  if (u.size() != n) throw ConfigError("state length does not match the network size");
  Eigen::VectorXd rate(n);
  for (Eigen::Index j = 0; j < n; ++j) rate[j] = scenario.firing.eval(beta, u[j] - p.u_theta);
  const Eigen::VectorXd q = scenario.source.eval(beta, t, limit);
  if (q.size() != n) throw ConfigError("source length does not match the network size");
  return ((-u + p.omega * rate + q).array() / p.tau.array()).matrix();
}

AssumptionBReport check_assumption_b(const SourceFamily& source, const std::vector<double>& betas,
                                     const std::vector<double>& t_grid) {
  if (betas.empty() || t_grid.empty()) throw ConfigError("beta and t grids must be nonempty");
  if (std::any_of(t_grid.begin(), t_grid.end(), [](double t) { return !(t >= 0.0); })) {
    throw ConfigError("t grid must lie in [0, T]");
  }
  std::vector<double> sorted_betas = betas;
  std::sort(sorted_betas.begin(), sorted_betas.end());
  const std::vector<double> grid = merge_nodes(t_grid, 0.0, *std::max_element(t_grid.begin(), t_grid.end()));
  const double horizon = grid.back();
  const auto anomalies = source.limit_anomalies();
  const Steepness inf = Steepness::infinite();

  AssumptionBReport report;
  auto fail = [&](double beta, double t, const char* what) {
    std::ostringstream msg;
    msg << what << " at beta=" << beta << ", t=" << t;
    report.pass = false;
    report.diagnostic = msg.str();
    report.bound = std::numeric_limits<double>::infinity();
    return report;
  };

  // Cumulative integrals need nodes at every breakpoint and some refinement of
  // the grid cells; the refinement is shared by q_beta and q_inf.
  auto integration_nodes = [&](Steepness beta) {
    std::vector<double> nodes;
    constexpr int kSub = 8;
    for (std::size_t k = 0; k + 1 < grid.size(); ++k) {
      for (int s = 0; s < kSub; ++s) nodes.push_back(grid[k] + (grid[k + 1] - grid[k]) * s / kSub);
    }
    nodes.push_back(horizon);
    nodes.push_back(0.0);
    for (double t : source.breakpoints(beta, horizon)) nodes.push_back(t);
    for (double t : source.breakpoints(inf, horizon)) nodes.push_back(t);
    return merge_nodes(std::move(nodes), 0.0, horizon);
  };

  for (double b : sorted_betas) {
    const Steepness beta(b);
    double pointwise = 0.0;
    for (double t : grid) {
      const Eigen::VectorXd q = source.eval(beta, t);
      if (!q.allFinite()) return fail(b, t, "non-finite source value");
      report.bound = std::max(report.bound, q.lpNorm<Eigen::Infinity>());
      if (std::find(anomalies.begin(), anomalies.end(), t) != anomalies.end()) continue;
      pointwise = std::max(pointwise, (q - source.eval(inf, t)).lpNorm<Eigen::Infinity>());
    }
    for (double t : source.breakpoints(beta, horizon)) {
      for (Limit side : {Limit::kFromLeft, Limit::kFromRight}) {
        const Eigen::VectorXd q = source.eval(beta, t, side);
        if (!q.allFinite()) return fail(b, t, "non-finite source value");
        report.bound = std::max(report.bound, q.lpNorm<Eigen::Infinity>());
      }
    }

    const auto nodes = integration_nodes(beta);
    const auto int_beta = cumulative_trapezoid(nodes, [&](double t, Limit side) { return source.eval(beta, t, side); });
    const auto int_inf = cumulative_trapezoid(nodes, [&](double t, Limit side) { return source.eval(inf, t, side); });
    double integral = 0.0;
    std::size_t g = 0;
    for (std::size_t k = 0; k < nodes.size() && g < grid.size(); ++k) {
      if (nodes[k] != grid[g]) continue;
      integral = std::max(integral, (int_beta[k] - int_inf[k]).lpNorm<Eigen::Infinity>());
      ++g;
    }
    report.pointwise_dev_by_beta.push_back(pointwise);
    report.integral_dev_by_beta.push_back(integral);
  }

  report.pointwise_dev = report.pointwise_dev_by_beta.back();
  report.integral_dev = report.integral_dev_by_beta.back();
  constexpr double kSlack = 1e-12;
  bool decreasing = true;
  for (std::size_t k = 0; k + 1 < sorted_betas.size(); ++k) {
    decreasing = decreasing &&
                 report.pointwise_dev_by_beta[k + 1] <= report.pointwise_dev_by_beta[k] + kSlack &&
                 report.integral_dev_by_beta[k + 1] <= report.integral_dev_by_beta[k] + kSlack;
  }
  report.pass = std::isfinite(report.bound) && decreasing;
  if (!decreasing) report.diagnostic = "deviations from the limit source do not decrease along the beta grid";
  return report;
}

double uniform_bound(const Scenario& scenario, double source_bound) {
  if (source_bound < 0.0) throw ConfigError("source bound B must be nonnegative");
  const NetworkParams& p = scenario.params;
  return p.u_init.lpNorm<Eigen::Infinity>() + p.omega.cwiseAbs().rowwise().sum().maxCoeff() +
         source_bound;
}

}  // namespace steeplab
