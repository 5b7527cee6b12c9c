#pragma once

#include <Eigen/Dense>
#include <functional>
#include <map>
#include <memory>
#include <string>
#include <vector>

namespace steeplab {

/// A vector-valued function on [0, T], either produced numerically (dense
/// output, sampled data) or given in closed form. Immutable; copies share state.
class Trajectory {
 public:
  enum class Origin { kNumerical, kClosedForm };
  using ValueFn = std::function<Eigen::VectorXd(double)>;

  class Impl {
   public:
    virtual ~Impl() = default;
    virtual Eigen::VectorXd value(double t) const = 0;
    /// Right derivative at knots.
    virtual Eigen::VectorXd derivative(double t) const = 0;
    /// Points where the representation changes (step ends, segment starts, kinks), including 0 and T.
    const std::vector<double>& knots() const { return knots_; }

   protected:
    std::vector<double> knots_;
  };

  Trajectory(std::shared_ptr<const Impl> impl, Origin origin, int dim, double horizon,
             std::string name, std::map<std::string, double> params = {});

  /// Closed-form trajectory; `derivative` may be empty (then estimated by central differences).
  static Trajectory closed_form(std::string name, std::map<std::string, double> params, int dim,
                                double horizon, ValueFn value, ValueFn derivative = {},
                                std::vector<double> knots = {});
  /// Piecewise-linear interpolation through samples (e.g. re-ingested CSV).
  static Trajectory from_samples(std::vector<double> times, std::vector<Eigen::VectorXd> values,
                                 std::string name = "samples");

  Origin origin() const { return origin_; }
  int dim() const { return dim_; }
  double horizon() const { return horizon_; }
  const std::string& name() const { return name_; }
  const std::map<std::string, double>& params() const { return params_; }

  /// Throws std::out_of_range outside [0, T].
  Eigen::VectorXd value(double t) const;
  Eigen::VectorXd derivative(double t) const;
  const std::vector<double>& knots() const { return impl_->knots(); }

  /// Union of `n` uniform cells on [0, T] and the knots.
  std::vector<double> sample_times(int n) const;

 private:
  void check_domain(double t) const;

  std::shared_ptr<const Impl> impl_;
  Origin origin_;
  int dim_;
  double horizon_;
  std::string name_;
  std::map<std::string, double> params_;
};

}  // namespace steeplab
