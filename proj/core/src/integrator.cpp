#include "steeplab/integrator.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <map>
#include <sstream>

#include "steeplab/errors.hpp"

namespace steeplab {

namespace {

// Dormand-Prince 5(4) tableau with Hairer's dense output coefficients.
constexpr double c2 = 1.0 / 5.0, c3 = 3.0 / 10.0, c4 = 4.0 / 5.0, c5 = 8.0 / 9.0;
constexpr double a21 = 1.0 / 5.0;
constexpr double a31 = 3.0 / 40.0, a32 = 9.0 / 40.0;
constexpr double a41 = 44.0 / 45.0, a42 = -56.0 / 15.0, a43 = 32.0 / 9.0;
constexpr double a51 = 19372.0 / 6561.0, a52 = -25360.0 / 2187.0, a53 = 64448.0 / 6561.0,
                 a54 = -212.0 / 729.0;
constexpr double a61 = 9017.0 / 3168.0, a62 = -355.0 / 33.0, a63 = 46732.0 / 5247.0,
                 a64 = 49.0 / 176.0, a65 = -5103.0 / 18656.0;
constexpr double a71 = 35.0 / 384.0, a73 = 500.0 / 1113.0, a74 = 125.0 / 192.0,
                 a75 = -2187.0 / 6784.0, a76 = 11.0 / 84.0;
constexpr double e1 = 71.0 / 57600.0, e3 = -71.0 / 16695.0, e4 = 71.0 / 1920.0,
                 e5 = -17253.0 / 339200.0, e6 = 22.0 / 525.0, e7 = -1.0 / 40.0;
constexpr double d1 = -12715105075.0 / 11282082432.0, d3 = 87487479700.0 / 32700410799.0,
                 d4 = -10690763975.0 / 1880347072.0, d5 = 701980252875.0 / 199316789632.0,
                 d6 = -1453857185.0 / 822651844.0, d7 = 69997945.0 / 29380423.0;

constexpr double kSafety = 0.9;
constexpr double kFacMin = 0.2;
constexpr double kFacMax = 10.0;
constexpr double kUnderflow = 1e-14;

struct Step {
  double t0;
  double t1;
  Eigen::MatrixXd coeff;  // N x 5, Hairer's rcont1..rcont5
  Eigen::VectorXd y1;
};

class DenseOutput final : public Trajectory::Impl {
 public:
  explicit DenseOutput(std::vector<Step> steps) : steps_(std::move(steps)) {
    knots_.reserve(steps_.size() + 1);
    for (const auto& s : steps_) knots_.push_back(s.t0);
    knots_.push_back(steps_.back().t1);
  }

  Eigen::VectorXd value(double t) const override {
    const Step& s = locate(t);
    if (t == s.t1) return s.y1;
    const double theta = (t - s.t0) / (s.t1 - s.t0);
    const double theta1 = 1.0 - theta;
    const auto& r = s.coeff;
    return r.col(0) +
           theta * (r.col(1) + theta1 * (r.col(2) + theta * (r.col(3) + theta1 * r.col(4))));
  }

  Eigen::VectorXd derivative(double t) const override {
    const Step& s = locate(t);
    const double h = s.t1 - s.t0;
    const double theta = (t - s.t0) / h;
    const double theta1 = 1.0 - theta;
    const auto& r = s.coeff;
    const Eigen::VectorXd c = r.col(3) + theta1 * r.col(4);
    const Eigen::VectorXd b = r.col(2) + theta * c;
    const Eigen::VectorXd a = r.col(1) + theta1 * b;
    const Eigen::VectorXd dc = -r.col(4);
    const Eigen::VectorXd db = c + theta * dc;
    const Eigen::VectorXd da = -b + theta1 * db;
    return (a + theta * da) / h;
  }

 private:
  // Step with t0 <= t < t1; the last step also owns t = T.
  const Step& locate(double t) const {
    auto it = std::upper_bound(steps_.begin(), steps_.end(), t,
                               [](double v, const Step& s) { return v < s.t0; });
    if (it != steps_.begin()) --it;
    return *it;
  }

  std::vector<Step> steps_;
};

double error_norm(const Eigen::VectorXd& err, const Eigen::VectorXd& scale) {
  return std::sqrt((err.array() / scale.array()).square().mean());
}

std::string where(double t, const Eigen::VectorXd& y) {
  std::ostringstream msg;
  msg << "t=" << t << ", u=[" << y.transpose() << "]";
  return msg.str();
}

}  // namespace

Trajectory integrate(const Scenario& scenario, Steepness beta, const IntegratorOptions& options,
                     IntegrationStats* stats) {
  scenario.validate();
  if (beta.is_infinite()) throw ConfigError("integrate needs a finite steepness; use the Heaviside solver");
  if (scenario.firing.is_heaviside()) {
    throw ConfigError("integrate needs a finite-steepness firing family, got " + scenario.firing.code());
  }
  for (double tol : {options.rel_tol, options.abs_tol}) {
    if (!(tol > 0.0 && tol <= 1e-2)) throw ConfigError("tolerances must lie in (0, 1e-2]");
  }

  const NetworkParams& p = scenario.params;
  const double horizon = p.horizon;
  const double b = beta.value();
  const TransitionBand band = scenario.firing.transition_band(b);
  const auto n = p.tau.size();

  IntegrationStats local;
  IntegrationStats& st = stats ? *stats : local;
  st = IntegrationStats{};
  st.min_step = horizon;

  std::vector<double> pieces = scenario.source.breakpoints(beta, horizon);
  pieces.insert(pieces.begin(), 0.0);
  pieces.push_back(horizon);

  auto f = [&](double t, const Eigen::VectorXd& y, Limit limit) {
    ++st.rhs_evals;
    Eigen::VectorXd dy = rhs(scenario, beta, t, y, limit);
    if (!dy.allFinite()) throw NumericalError("non-finite right-hand side at " + where(t, y));
    return dy;
  };
  auto scale_of = [&](const Eigen::VectorXd& y0, const Eigen::VectorXd& y1) -> Eigen::VectorXd {
    return (options.abs_tol + options.rel_tol * y0.cwiseAbs().cwiseMax(y1.cwiseAbs()).array()).matrix();
  };

  // Largest step that keeps every component whose path meets the layer zone
  // moving by at most layer_fraction * halfwidth.
  auto layer_cap = [&](const Eigen::VectorXd& y0, const Eigen::VectorXd& y1,
                       const std::array<const Eigen::VectorXd*, 7>& k) {
    double cap = std::numeric_limits<double>::infinity();
    if (!options.layer_cap || !(band.halfwidth > 0.0)) return cap;
    const double lo = band.center - 2.0 * band.halfwidth;
    const double hi = band.center + 2.0 * band.halfwidth;
    for (Eigen::Index j = 0; j < n; ++j) {
      const double x0 = y0[j] - p.u_theta;
      const double x1 = y1[j] - p.u_theta;
      if (std::max(x0, x1) < lo || std::min(x0, x1) > hi) continue;
      double speed = 0.0;
      for (const auto* kk : k) speed = std::max(speed, std::abs((*kk)[j]));
      if (speed > 0.0) cap = std::min(cap, options.layer_fraction * band.halfwidth / speed);
    }
    return cap;
  };

  std::vector<Step> steps;
  Eigen::VectorXd y = p.u_init;
  double h = 0.0;

  for (std::size_t piece = 0; piece + 1 < pieces.size(); ++piece) {
    const double a = pieces[piece];
    const double end = pieces[piece + 1];
    if (!(end > a)) continue;
    auto limit_at = [&](double t) {
      if (t == a) return Limit::kFromRight;
      if (t == end) return Limit::kFromLeft;
      return Limit::kValue;
    };
    double t = a;
    Eigen::VectorXd k1 = f(t, y, Limit::kFromRight);

    if (h == 0.0) {
      // Hairer's starting step heuristic.
      const Eigen::VectorXd sk = scale_of(y, y);
      const double dn0 = error_norm(y, sk);
      const double dn1 = error_norm(k1, sk);
      double h0 = (dn0 < 1e-5 || dn1 < 1e-5) ? 1e-6 : 0.01 * dn0 / dn1;
      h0 = std::min(h0, end - a);
      const Eigen::VectorXd y1 = y + h0 * k1;
      const Eigen::VectorXd f1 = f(t + h0, y1, limit_at(t + h0));
      const double dn2 = error_norm(f1 - k1, sk) / h0;
      const double dmax = std::max(dn1, dn2);
      const double h1 = dmax <= 1e-15 ? std::max(1e-6, h0 * 1e-3) : std::pow(0.01 / dmax, 0.2);
      h = std::min(100.0 * h0, h1);
    }

    bool last_rejected = false;
    while (t < end) {
      if (st.accepted + st.rejected >= options.max_steps) {
        throw NumericalError("step budget exhausted at " + where(t, y));
      }
      bool final_step = false;
      const double h_planned = h;
      if (t + h >= end) {
        h = end - t;
        final_step = true;
      }
      if (h < kUnderflow * horizon && !final_step) {
        throw NumericalError("stiffness/step underflow at " + where(t, y));
      }
      const double t1 = final_step ? end : t + h;

      const Eigen::VectorXd k2 = f(t + c2 * h, y + h * a21 * k1, limit_at(t + c2 * h));
      const Eigen::VectorXd k3 = f(t + c3 * h, y + h * (a31 * k1 + a32 * k2), limit_at(t + c3 * h));
      const Eigen::VectorXd k4 =
          f(t + c4 * h, y + h * (a41 * k1 + a42 * k2 + a43 * k3), limit_at(t + c4 * h));
      const Eigen::VectorXd k5 = f(t + c5 * h, y + h * (a51 * k1 + a52 * k2 + a53 * k3 + a54 * k4),
                                   limit_at(t + c5 * h));
      const Eigen::VectorXd k6 =
          f(t1, y + h * (a61 * k1 + a62 * k2 + a63 * k3 + a64 * k4 + a65 * k5), limit_at(t1));
      const Eigen::VectorXd y_new = y + h * (a71 * k1 + a73 * k3 + a74 * k4 + a75 * k5 + a76 * k6);
      const Eigen::VectorXd k7 = f(t1, y_new, limit_at(t1));

      const double cap = layer_cap(y, y_new, {&k1, &k2, &k3, &k4, &k5, &k6, &k7});
      if (h > cap * (1.0 + 1e-12)) {
        ++st.layer_limited;
        h = cap;
        continue;
      }

      const Eigen::VectorXd err = h * (e1 * k1 + e3 * k3 + e4 * k4 + e5 * k5 + e6 * k6 + e7 * k7);
      const double en = error_norm(err, scale_of(y, y_new));
      if (!std::isfinite(en)) throw NumericalError("non-finite error estimate at " + where(t, y));

      if (en <= 1.0) {
        Step s;
        s.t0 = t;
        s.t1 = t1;
        s.coeff.resize(n, 5);
        const Eigen::VectorXd ydiff = y_new - y;
        const Eigen::VectorXd bspl = h * k1 - ydiff;
        s.coeff.col(0) = y;
        s.coeff.col(1) = ydiff;
        s.coeff.col(2) = bspl;
        s.coeff.col(3) = ydiff - h * k7 - bspl;
        s.coeff.col(4) = h * (d1 * k1 + d3 * k3 + d4 * k4 + d5 * k5 + d6 * k6 + d7 * k7);
        s.y1 = y_new;
        steps.push_back(std::move(s));
        ++st.accepted;
        st.min_step = std::min(st.min_step, t1 - t);

        double fac = en == 0.0 ? kFacMax : kSafety * std::pow(en, -0.2);
        fac = std::clamp(fac, kFacMin, last_rejected ? 1.0 : kFacMax);
        t = t1;
        y = y_new;
        k1 = k7;
        h = final_step ? std::max(h * fac, h_planned) : h * fac;
        last_rejected = false;
      } else {
        ++st.rejected;
        h *= std::max(kFacMin, kSafety * std::pow(en, -0.2));
        last_rejected = true;
      }
    }
  }

  std::map<std::string, double> params{{"beta", b}, {"rel_tol", options.rel_tol}, {"abs_tol", options.abs_tol}};
  return Trajectory(std::make_shared<DenseOutput>(std::move(steps)), Trajectory::Origin::kNumerical,
                    static_cast<int>(n), horizon, "integrate(" + scenario.name + ", beta=" + beta.to_string() + ")",
                    std::move(params));
}

}  // namespace steeplab
