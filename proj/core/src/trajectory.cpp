#include "steeplab/trajectory.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include "steeplab/errors.hpp"
#include "steeplab/quadrature.hpp"

namespace steeplab {

namespace {

class ClosedFormImpl final : public Trajectory::Impl {
 public:
  ClosedFormImpl(Trajectory::ValueFn value, Trajectory::ValueFn derivative, double horizon,
                 std::vector<double> knots)
      : value_(std::move(value)), derivative_(std::move(derivative)), horizon_(horizon) {
    knots.push_back(0.0);
    knots.push_back(horizon);
    knots_ = merge_nodes(std::move(knots), 0.0, horizon);
  }

  Eigen::VectorXd value(double t) const override { return value_(t); }

  Eigen::VectorXd derivative(double t) const override {
    if (derivative_) return derivative_(t);
    const double h = 1e-6 * std::max(1.0, horizon_);
    if (t + h <= horizon_) {
      // one-sided forward difference keeps right derivatives at kinks
      return (-3.0 * value_(t) + 4.0 * value_(t + h) - value_(t + 2.0 * h)) / (2.0 * h);
    }
    return (3.0 * value_(t) - 4.0 * value_(t - h) + value_(t - 2.0 * h)) / (2.0 * h);
  }

 private:
  Trajectory::ValueFn value_;
  Trajectory::ValueFn derivative_;
  double horizon_;
};

class SampledImpl final : public Trajectory::Impl {
 public:
  SampledImpl(std::vector<double> times, std::vector<Eigen::VectorXd> values)
      : times_(std::move(times)), values_(std::move(values)) {
    knots_ = times_;
  }

  Eigen::VectorXd value(double t) const override {
    const auto k = segment(t);
    if (t == times_[k]) return values_[k];
    if (t == times_[k + 1]) return values_[k + 1];
    const double w = (t - times_[k]) / (times_[k + 1] - times_[k]);
    return values_[k] + w * (values_[k + 1] - values_[k]);
  }

  Eigen::VectorXd derivative(double t) const override {
    const auto k = segment(t);
    return (values_[k + 1] - values_[k]) / (times_[k + 1] - times_[k]);
  }

 private:
  // Index k with times[k] <= t < times[k+1] (last segment for t = T).
  std::size_t segment(double t) const {
    auto it = std::upper_bound(times_.begin(), times_.end(), t);
    std::size_t k = it == times_.begin() ? 0 : static_cast<std::size_t>(it - times_.begin()) - 1;
    return std::min(k, times_.size() - 2);
  }

  std::vector<double> times_;
  std::vector<Eigen::VectorXd> values_;
};

}  // namespace

Trajectory::Trajectory(std::shared_ptr<const Impl> impl, Origin origin, int dim, double horizon,
                       std::string name, std::map<std::string, double> params)
    : impl_(std::move(impl)),
      origin_(origin),
      dim_(dim),
      horizon_(horizon),
      name_(std::move(name)),
      params_(std::move(params)) {
  if (!impl_) throw ConfigError("trajectory needs an implementation");
  if (dim_ < 1) throw ConfigError("trajectory dimension must be positive");
  if (!(horizon_ > 0.0)) throw ConfigError("trajectory horizon must be positive");
}

Trajectory Trajectory::closed_form(std::string name, std::map<std::string, double> params, int dim,
                                   double horizon, ValueFn value, ValueFn derivative,
                                   std::vector<double> knots) {
  if (!value) throw ConfigError("closed form needs a value function");
  auto impl = std::make_shared<ClosedFormImpl>(std::move(value), std::move(derivative), horizon,
                                               std::move(knots));
  return {std::move(impl), Origin::kClosedForm, dim, horizon, std::move(name), std::move(params)};
}

Trajectory Trajectory::from_samples(std::vector<double> times, std::vector<Eigen::VectorXd> values,
                                    std::string name) {
  if (times.size() < 2 || times.size() != values.size()) {
    throw ConfigError("sampled trajectory needs at least two (t, value) rows");
  }
  if (times.front() != 0.0) throw ConfigError("sampled trajectory must start at t = 0");
  for (std::size_t k = 0; k + 1 < times.size(); ++k) {
    if (!(times[k + 1] > times[k])) throw ConfigError("sample times must be strictly increasing");
  }
  const auto dim = values.front().size();
  for (const auto& v : values) {
    if (v.size() != dim) throw ConfigError("samples differ in dimension");
  }
  const double horizon = times.back();
  auto impl = std::make_shared<SampledImpl>(std::move(times), std::move(values));
  return {std::move(impl), Origin::kNumerical, static_cast<int>(dim), horizon, std::move(name)};
}

void Trajectory::check_domain(double t) const {
  if (!(t >= 0.0 && t <= horizon_)) {
    std::ostringstream msg;
    msg << "trajectory '" << name_ << "' queried at t=" << t << " outside [0, " << horizon_ << "]";
    throw std::out_of_range(msg.str());
  }
}

Eigen::VectorXd Trajectory::value(double t) const {
  check_domain(t);
  return impl_->value(t);
}

Eigen::VectorXd Trajectory::derivative(double t) const {
  check_domain(t);
  return impl_->derivative(t);
}

std::vector<double> Trajectory::sample_times(int n) const {
  std::vector<double> nodes = uniform_nodes(0.0, horizon_, n);
  const auto& k = knots();
  nodes.insert(nodes.end(), k.begin(), k.end());
  return merge_nodes(std::move(nodes), 0.0, horizon_);
}

}  // namespace steeplab
