#include "steeplab/crossings.hpp"

#include <algorithm>
#include <cmath>
#include <optional>

#include "steeplab/errors.hpp"

namespace steeplab {

std::string to_string(Direction d) {
  switch (d) {
    case Direction::kUpward:
      return "upward";
    case Direction::kDownward:
      return "downward";
    case Direction::kTangential:
      return "tangential";
  }
  return "?";
}

Direction direction_from_string(const std::string& s) {
  if (s == "upward") return Direction::kUpward;
  if (s == "downward") return Direction::kDownward;
  if (s == "tangential") return Direction::kTangential;
  throw ConfigError("unknown crossing direction '" + s + "'");
}

namespace {

int sign(double x) { return (x > 0.0) - (x < 0.0); }

class ComponentScan {
 public:
  ComponentScan(const Trajectory& traj, int j, double u_theta, double root_tol)
      : traj_(traj), j_(j), u_theta_(u_theta), root_tol_(root_tol) {}

  double g(double t) const { return traj_.value(t)[j_] - u_theta_; }

  // Root in [lo, hi] where g changes sign.
  double bisect(double lo, double hi) const {
    int s_lo = sign(g(lo));
    for (int it = 0; it < 200 && hi - lo > root_tol_; ++it) {
      const double mid = 0.5 * (lo + hi);
      const int s_mid = sign(g(mid));
      if (s_mid == 0) return mid;
      if (s_mid == s_lo) {
        lo = mid;
      } else {
        hi = mid;
      }
    }
    return 0.5 * (lo + hi);
  }

  // Minimizes |g| on [lo, hi] by golden section. If g flips sign on the way,
  // returns the flip point in `flip`.
  double golden_min(double lo, double hi, int reference_sign, std::optional<double>& flip) const {
    constexpr double kInvPhi = 0.6180339887498949;
    double x1 = hi - kInvPhi * (hi - lo);
    double x2 = lo + kInvPhi * (hi - lo);
    double f1 = g(x1);
    double f2 = g(x2);
    for (int it = 0; it < 200 && hi - lo > root_tol_; ++it) {
      if (sign(f1) == -reference_sign) {
        flip = x1;
        return x1;
      }
      if (sign(f2) == -reference_sign) {
        flip = x2;
        return x2;
      }
      if (std::abs(f1) < std::abs(f2)) {
        hi = x2;
        x2 = x1;
        f2 = f1;
        x1 = hi - kInvPhi * (hi - lo);
        f1 = g(x1);
      } else {
        lo = x1;
        x1 = x2;
        f1 = f2;
        x2 = lo + kInvPhi * (hi - lo);
        f2 = g(x2);
      }
    }
    return std::abs(f1) < std::abs(f2) ? x1 : x2;
  }

 private:
  const Trajectory& traj_;
  int j_;
  double u_theta_;
  double root_tol_;
};

}  // namespace

CrossingReport detect_crossings(const Trajectory& traj, double u_theta, double root_tol,
                                int min_samples) {
  if (!(root_tol > 0.0)) throw ConfigError("root_tol must be positive");
  std::vector<double> s = traj.sample_times(min_samples);
  if (traj.origin() == Trajectory::Origin::kNumerical) {
    // Dense-output polynomials can turn inside a step; look inside each one.
    const auto& knots = traj.knots();
    std::vector<double> extra;
    extra.reserve(3 * knots.size());
    for (std::size_t k = 0; k + 1 < knots.size(); ++k) {
      for (int q = 1; q <= 3; ++q) extra.push_back(knots[k] + (knots[k + 1] - knots[k]) * q / 4.0);
    }
    s.insert(s.end(), extra.begin(), extra.end());
    std::sort(s.begin(), s.end());
    s.erase(std::unique(s.begin(), s.end()), s.end());
  }
  const std::size_t m = s.size();
  const double cell = traj.horizon() / min_samples;

  std::vector<Eigen::VectorXd> values(m);
  for (std::size_t k = 0; k < m; ++k) values[k] = traj.value(s[k]);

  CrossingReport report;
  for (int j = 0; j < traj.dim(); ++j) {
    const ComponentScan scan(traj, j, u_theta, root_tol);
    std::vector<double> g(m);
    for (std::size_t k = 0; k < m; ++k) g[k] = values[k][j] - u_theta;
    auto is_zero = [&](std::size_t k) { return std::abs(g[k]) <= root_tol; };
    auto emit = [&](double t, Direction d) {
      if (t > 0.0) report.events.push_back({t, j, d});
    };

    std::size_t k = 0;
    while (k < m) {
      if (is_zero(k)) {
        std::size_t end = k;
        while (end + 1 < m && is_zero(end + 1)) ++end;
        if (k == 0) report.starts_at_threshold = true;
        if (s[end] - s[k] >= cell) {
          report.plateaus.push_back({j, s[k], s[end]});
        } else if (k > 0) {
          const int before = sign(g[k - 1]);
          const int after = end + 1 < m ? sign(g[end + 1]) : 0;
          if (after == 0) {
            emit(s[k], before < 0 ? Direction::kUpward : Direction::kDownward);
          } else if (before != after) {
            emit(scan.bisect(s[k - 1], s[end + 1]), before < 0 ? Direction::kUpward : Direction::kDownward);
          } else {
            std::size_t best = k;
            for (std::size_t q = k; q <= end; ++q) {
              if (std::abs(g[q]) < std::abs(g[best])) best = q;
            }
            emit(s[best], Direction::kTangential);
          }
        }
        k = end + 1;
        continue;
      }
      if (k + 1 < m && !is_zero(k + 1) && sign(g[k]) != sign(g[k + 1])) {
        emit(scan.bisect(s[k], s[k + 1]), g[k] < 0.0 ? Direction::kUpward : Direction::kDownward);
      }
      if (k > 0 && k + 1 < m && !is_zero(k - 1) && !is_zero(k + 1) && sign(g[k - 1]) == sign(g[k]) &&
          sign(g[k + 1]) == sign(g[k]) && std::abs(g[k]) <= std::abs(g[k - 1]) &&
          std::abs(g[k]) <= std::abs(g[k + 1]) &&
          (std::abs(g[k]) < std::abs(g[k - 1]) || std::abs(g[k]) < std::abs(g[k + 1]))) {
        std::optional<double> flip;
        const double t_min = scan.golden_min(s[k - 1], s[k + 1], sign(g[k]), flip);
        if (flip) {
          const Direction first = g[k] > 0.0 ? Direction::kDownward : Direction::kUpward;
          const Direction second = g[k] > 0.0 ? Direction::kUpward : Direction::kDownward;
          emit(scan.bisect(s[k - 1], *flip), first);
          emit(scan.bisect(*flip, s[k + 1]), second);
        } else if (std::abs(scan.g(t_min)) <= root_tol) {
          emit(t_min, Direction::kTangential);
        }
      }
      ++k;
    }
  }

  auto& ev = report.events;
  std::sort(ev.begin(), ev.end(), [](const CrossingEvent& a, const CrossingEvent& b) {
    return a.t < b.t || (a.t == b.t && a.component < b.component);
  });
  ev.erase(std::unique(ev.begin(), ev.end(),
                       [&](const CrossingEvent& a, const CrossingEvent& b) {
                         return a.component == b.component && std::abs(a.t - b.t) <= root_tol;
                       }),
           ev.end());
  return report;
}

}  // namespace steeplab
