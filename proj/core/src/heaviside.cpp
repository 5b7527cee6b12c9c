#include "steeplab/heaviside.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <set>
#include <sstream>

#include "steeplab/errors.hpp"

namespace steeplab {

namespace {

// tau v' = -v + b + m s on s = t - a in [0, end - a].
struct Segment {
  double a = 0.0;
  double end = 0.0;
  Eigen::VectorXd v0;
  Eigen::VectorXd b;
  Eigen::VectorXd m;
};

Eigen::VectorXd segment_value(const Segment& seg, const Eigen::VectorXd& tau, double t) {
  const double s = t - seg.a;
  const Eigen::ArrayXd decay = (-s / tau.array()).exp();
  const Eigen::ArrayXd amp = seg.v0.array() - seg.b.array() + seg.m.array() * tau.array();
  return (seg.b.array() + seg.m.array() * (s - tau.array()) + amp * decay).matrix();
}

Eigen::VectorXd segment_derivative(const Segment& seg, const Eigen::VectorXd& tau, double t) {
  const double s = t - seg.a;
  const Eigen::ArrayXd decay = (-s / tau.array()).exp();
  const Eigen::ArrayXd amp = seg.v0.array() - seg.b.array() + seg.m.array() * tau.array();
  return (seg.m.array() - amp / tau.array() * decay).matrix();
}

class PiecewiseSolution final : public Trajectory::Impl {
 public:
  PiecewiseSolution(std::vector<Segment> segments, Eigen::VectorXd tau)
      : segments_(std::move(segments)), tau_(std::move(tau)) {
    for (const auto& s : segments_) knots_.push_back(s.a);
    knots_.push_back(segments_.back().end);
  }

  Eigen::VectorXd value(double t) const override {
    const Segment& seg = locate(t);
    if (t == seg.a) return seg.v0;
    return segment_value(seg, tau_, t);
  }

  Eigen::VectorXd derivative(double t) const override { return segment_derivative(locate(t), tau_, t); }

 private:
  const Segment& locate(double t) const {
    auto it = std::upper_bound(segments_.begin(), segments_.end(), t,
                               [](double v, const Segment& s) { return v < s.a; });
    if (it != segments_.begin()) --it;
    return *it;
  }

  std::vector<Segment> segments_;
  Eigen::VectorXd tau_;
};

int sign(double x) { return (x > 0.0) - (x < 0.0); }

// First s in (0, length] where component j of the segment reaches u_theta,
// given that it leaves s = 0 with sign `start_sign` relative to the threshold.
std::optional<double> first_hit(const Segment& seg, const Eigen::VectorXd& tau, Eigen::Index j,
                                double u_theta, int start_sign, double length) {
  const double v0 = seg.v0[j];
  const double b = seg.b[j];
  const double m = seg.m[j];
  const double tj = tau[j];
  auto g = [&](double s) {
    return b + m * (s - tj) + (v0 - b + m * tj) * std::exp(-s / tj) - u_theta;
  };
  if (m == 0.0) {
    // Monotone relaxation toward b: crosses u_theta once iff u_theta lies strictly between v0 and b.
    if (v0 == b) return std::nullopt;
    const double r = (u_theta - b) / (v0 - b);
    if (!(r > 0.0 && r < 1.0)) return std::nullopt;
    const double s = -tj * std::log(r);
    if (s > 0.0 && s <= length) return s;
    return std::nullopt;
  }
  constexpr int kSamples = 512;
  double prev = 0.0;
  for (int k = 1; k <= kSamples; ++k) {
    const double s = length * k / kSamples;
    const double gs = g(s);
    if (gs == 0.0 && k < kSamples) return s;
    if (sign(gs) == -start_sign || (gs == 0.0)) {
      double lo = prev;
      double hi = s;
      for (int it = 0; it < 200 && hi - lo > 1e-15 * std::max(1.0, hi); ++it) {
        const double mid = 0.5 * (lo + hi);
        if (sign(g(mid)) == start_sign) {
          lo = mid;
        } else {
          hi = mid;
        }
      }
      return hi;
    }
    prev = s;
  }
  return std::nullopt;
}

}  // namespace

std::string to_string(AtThresholdMode mode) {
  return mode == AtThresholdMode::kConvention ? "convention" : "solve";
}

AtThresholdMode at_threshold_mode_from_string(const std::string& s) {
  if (s == "convention") return AtThresholdMode::kConvention;
  if (s == "solve") return AtThresholdMode::kSolve;
  throw ConfigError("unknown at-threshold mode '" + s + "' (expected convention or solve)");
}

HeavisideSolution solve_heaviside_right_smooth(const Scenario& scenario, const HeavisideOptions& options) {
  scenario.validate();
  if (!scenario.firing.is_heaviside()) {
    throw ConfigError("the Heaviside solver needs a heaviside firing family, got " + scenario.firing.code());
  }
  if (options.max_crossings < 0) throw ConfigError("max_crossings must be nonnegative");

  const NetworkParams& p = scenario.params;
  const Eigen::Index n = p.size();
  const double horizon = p.horizon;
  const double u_theta = p.u_theta;
  const double snap_tol = 1e-12 * (1.0 + std::abs(u_theta));
  const Steepness inf = Steepness::infinite();
  const SourceFamily& source = scenario.source;

  std::optional<Eigen::FullPivLU<Eigen::MatrixXd>> lu;
  if (options.mode == AtThresholdMode::kSolve) {
    lu.emplace(p.omega);
    if (lu->rank() < n) throw ConfigError("connectivity matrix singular");
  }

  std::vector<double> stops = source.breakpoints(inf, horizon);
  stops.push_back(horizon);

  HeavisideSolution out{Trajectory::closed_form("pending", {}, 1, 1.0, [](double) { return Eigen::VectorXd(); }),
                        {}, {}, {}, true, {}};
  std::vector<Segment> segments;
  std::vector<Eigen::VectorXd> z_columns;

  double t = 0.0;
  Eigen::VectorXd v = p.u_init;
  std::optional<Eigen::VectorXd> incoming;  // left derivative at t
  std::set<Eigen::Index> forced;             // components that just hit the threshold
  bool warned_solve_start = false;
  bool record_event = true;
  int crossing_count = 0;

  while (t < horizon) {
    const double stop = *std::upper_bound(stops.begin(), stops.end(), t);
    const double length = stop - t;
    const Eigen::VectorXd q_a = source.eval(inf, t, Limit::kFromRight);
    const Eigen::VectorXd q_e = source.eval(inf, stop, Limit::kFromLeft);
    const Eigen::VectorXd slope = (q_e - q_a) / length;

    std::vector<bool> at(static_cast<std::size_t>(n), false);
    for (Eigen::Index j = 0; j < n; ++j) {
      if (forced.count(j) || std::abs(v[j] - u_theta) <= snap_tol) {
        at[j] = true;
        v[j] = u_theta;
      }
    }
    const bool any_at = std::any_of(at.begin(), at.end(), [](bool x) { return x; });

    Eigen::VectorXd firing(n);
    for (Eigen::Index j = 0; j < n; ++j) firing[j] = scenario.firing.pointwise_limit(v[j] - u_theta);
    if (any_at && options.mode == AtThresholdMode::kSolve) {
      if (incoming) {
        const Eigen::VectorXd rhs_vec =
            p.tau.cwiseProduct(*incoming) + v - source.eval(inf, t, Limit::kValue);
        const Eigen::VectorXd z = lu->solve(rhs_vec);
        for (Eigen::Index j = 0; j < n; ++j) {
          if (!at[j]) continue;
          firing[j] = z[j];
          if (z[j] < -1e-12 || z[j] > 1.0 + 1e-12) {
            std::ostringstream msg;
            msg << "solved firing value z=" << z[j] << " for unit " << j + 1 << " at t=" << t
                << " lies outside [0,1]";
            out.warnings.push_back(msg.str());
          }
        }
      } else if (!warned_solve_start) {
        out.warnings.push_back("no incoming segment at t=0; at-threshold firing uses the convention value");
        warned_solve_start = true;
      }
    }
    const Eigen::VectorXd chosen = firing;
    if (record_event) {
      out.event_times.push_back(t);
      z_columns.push_back(chosen);
      record_event = false;
    }

    // At-threshold components must leave in the direction their firing value
    // implies; otherwise the firing is switched to the departure side.
    std::vector<int> depart(static_cast<std::size_t>(n), 0);
    bool settled = false;
    for (Eigen::Index iter = 0; iter <= n + 1 && !settled; ++iter) {
      settled = true;
      const Eigen::VectorXd b = p.omega * firing + q_a;
      for (Eigen::Index j = 0; j < n; ++j) {
        if (!at[j]) continue;
        int d = sign(b[j] - u_theta);
        if (d == 0) d = sign(slope[j]);
        depart[j] = d;
        if (d == 0) continue;
        const double required = d > 0 ? 1.0 : 0.0;
        if (firing[j] != required) {
          firing[j] = required;
          settled = false;
        }
      }
    }
    if (!settled) {
      std::ostringstream msg;
      msg << "no consistent continuation from the threshold at t=" << t;
      throw NumericalError(msg.str());
    }

    Segment seg{t, stop, v, p.omega * firing + q_a, slope};
    if (any_at) {
      const Eigen::VectorXd ode = ((-v + p.omega * chosen + source.eval(inf, t, Limit::kValue)).array() /
                                   p.tau.array()).matrix();
      const Eigen::VectorXd right = segment_derivative(seg, p.tau, t);
      if ((ode - right).lpNorm<Eigen::Infinity>() > 1e-12 * (1.0 + ode.lpNorm<Eigen::Infinity>())) {
        out.right_smooth = false;
        std::ostringstream msg;
        msg << "at t=" << t << " the firing value fixed at the threshold does not match the departure "
            << "direction; the continuation is not right smooth";
        out.warnings.push_back(msg.str());
      }
    }

    double next = length;
    std::vector<Eigen::Index> hitters;
    for (Eigen::Index j = 0; j < n; ++j) {
      if (at[j] && depart[j] == 0) continue;  // stays on the threshold
      const int start_sign = at[j] ? depart[j] : sign(v[j] - u_theta);
      const auto s = first_hit(seg, p.tau, j, u_theta, start_sign, length);
      if (!s) continue;
      if (*s < next) {
        next = *s;
        hitters.assign(1, j);
      } else if (*s == next) {
        hitters.push_back(j);
      }
    }

    const double t_next = hitters.empty() ? stop : t + next;
    seg.end = t_next;
    const Eigen::VectorXd v_end = segment_value(seg, p.tau, t_next);
    incoming = segment_derivative(seg, p.tau, t_next);
    segments.push_back(seg);
    forced.clear();
    if (!hitters.empty()) {
      for (Eigen::Index j : hitters) {
        const double dv = (*incoming)[j];
        const Direction dir = dv > 0 ? Direction::kUpward : (dv < 0 ? Direction::kDownward : Direction::kTangential);
        out.crossings.push_back({t_next, static_cast<int>(j), dir});
        forced.insert(j);
        ++crossing_count;
      }
      if (crossing_count > options.max_crossings) {
        std::ostringstream msg;
        msg << "crossing budget exceeded (" << options.max_crossings << ") at t=" << t_next
            << "; the limit may not be extra threshold simple";
        throw NumericalError(msg.str());
      }
      record_event = true;
    }
    t = t_next;
    v = v_end;
  }

  out.z_values.resize(n, static_cast<Eigen::Index>(z_columns.size()));
  for (std::size_t k = 0; k < z_columns.size(); ++k) out.z_values.col(static_cast<Eigen::Index>(k)) = z_columns[k];
  std::map<std::string, double> params{{"zero_value", scenario.firing.zero_value()},
                                       {"solve_mode", options.mode == AtThresholdMode::kSolve ? 1.0 : 0.0}};
  out.trajectory = Trajectory(std::make_shared<PiecewiseSolution>(std::move(segments), p.tau),
                              Trajectory::Origin::kClosedForm, static_cast<int>(n), horizon,
                              "heaviside-right-smooth(" + scenario.name + ")", std::move(params));
  return out;
}

}  // namespace steeplab
