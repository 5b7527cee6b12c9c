#pragma once

#include <Eigen/Dense>
#include <memory>
#include <string>
#include <vector>

#include "steeplab/firing.hpp"
#include "steeplab/types.hpp"

namespace steeplab {

/// Parameters of the point neuron network
///   tau_i u_i'(t) = -u_i(t) + sum_j omega_ij S_beta[u_j(t) - u_theta] + q_i(t),  u(0) = u_init.
struct NetworkParams {
  Eigen::VectorXd tau;      ///< membrane time constants, all > 0
  Eigen::MatrixXd omega;    ///< connectivities, N x N
  double u_theta = 0.0;     ///< firing threshold
  Eigen::VectorXd u_init;   ///< initial potentials
  double horizon = 1.0;     ///< T

  int size() const { return static_cast<int>(tau.size()); }
  /// Throws ConfigError on inconsistent dimensions, tau <= 0, T <= 0 or non-finite entries.
  void validate() const;
};

enum class SourceKind { kConstant, kTabulated, kThresholdAdvanced };

/// A steepness-indexed external drive q_beta(t), including its limit q_inf.
class SourceFamily {
 public:
  static SourceFamily constant(Eigen::VectorXd c);
  /// Piecewise-linear interpolation of `values` (one row per time) over `times`.
  /// A repeated time encodes a jump; the later row is the value at the jump.
  static SourceFamily tabulated(std::vector<double> times, Eigen::MatrixXd values);
  /// Scalar drive that makes z_beta(t) = S_beta[2t - 1/beta]/beta + u_theta an exact
  /// solution of the N = 1 network with the given omega, u_theta and firing family.
  static SourceFamily threshold_advanced(double omega, double u_theta, const FiringRate& inner);

  SourceKind kind() const { return kind_; }
  int size() const;
  bool depends_on_steepness() const { return kind_ == SourceKind::kThresholdAdvanced; }

  /// q_beta(t); beta may be infinite (the limit source).
  Eigen::VectorXd eval(Steepness beta, double t, Limit limit = Limit::kValue) const;
  /// Interior points of [0, horizon] where q_beta is discontinuous or not smooth.
  std::vector<double> breakpoints(Steepness beta, double horizon) const;
  /// Points where the limit q_inf is a measure-zero outlier of lim q_beta
  /// (excluded from pointwise deviation checks).
  std::vector<double> limit_anomalies() const;

  const Eigen::VectorXd& constant_value() const { return constant_; }
  const std::vector<double>& times() const { return times_; }
  const Eigen::MatrixXd& values() const { return values_; }
  double ta_omega() const { return ta_omega_; }
  double ta_u_theta() const { return ta_u_theta_; }
  const FiringRate& ta_firing() const;

 private:
  SourceFamily() = default;
  Eigen::VectorXd eval_tabulated(double t, Limit limit) const;
  double eval_threshold_advanced(Steepness beta, double t, Limit limit) const;

  SourceKind kind_ = SourceKind::kConstant;
  Eigen::VectorXd constant_;
  std::vector<double> times_;
  Eigen::MatrixXd values_;
  double ta_omega_ = 0.0;
  double ta_u_theta_ = 0.0;
  std::shared_ptr<const FiringRate> ta_firing_;
};

/// A complete problem: network, firing family and source.
struct Scenario {
  std::string name;
  NetworkParams params;
  FiringRate firing = FiringRate::tanh_family();
  SourceFamily source = SourceFamily::constant(Eigen::VectorXd::Zero(1));

  int size() const { return params.size(); }
  /// Network validation plus source/network dimension agreement.
  void validate() const;
};

/// du/dt at (t, u). Throws ConfigError on dimension mismatch and for infinite
/// beta with a non-heaviside family.
Eigen::VectorXd rhs(const Scenario& scenario, Steepness beta, double t, const Eigen::VectorXd& u,
                    Limit limit = Limit::kValue);

struct AssumptionBReport {
  double bound = 0.0;            ///< B: max sampled sup norm over finite beta
  double pointwise_dev = 0.0;    ///< at the largest beta
  double integral_dev = 0.0;     ///< at the largest beta
  std::vector<double> pointwise_dev_by_beta;
  std::vector<double> integral_dev_by_beta;
  bool pass = false;
  std::string diagnostic;
};

/// Samples the boundedness and convergence conditions on q_beta over the given grids.
AssumptionBReport check_assumption_b(const SourceFamily& source, const std::vector<double>& betas,
                                     const std::vector<double>& t_grid);

/// ||u_init||_inf + max_i sum_j |omega_ij| + B.
double uniform_bound(const Scenario& scenario, double source_bound);

}  // namespace steeplab
