#include "steeplab/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <sstream>

#include "steeplab/errors.hpp"
#include "steeplab/quadrature.hpp"

namespace steeplab {

double m_min(const Trajectory& traj, double s, double u_theta) {
  return (traj.value(s).array() - u_theta).abs().minCoeff();
}

namespace {

// Length of {s in [0,t] : pred(s)} from a uniform grid (plus knots), with
// every cell whose endpoints disagree split at a bisected boundary. Each
// cell is also probed at its midpoint so a single interior excursion is seen.
MeasureEstimate measure_where(const Trajectory& traj, double t, int grid_n,
                              const std::function<bool(double)>& pred) {
  if (grid_n < 1) throw ConfigError("grid_n must be positive");
  if (!(t >= 0.0 && t <= traj.horizon())) throw ConfigError("measure window exceeds the trajectory domain");
  MeasureEstimate out;
  out.resolution = t / grid_n;
  if (t == 0.0) return out;

  std::vector<double> nodes = uniform_nodes(0.0, t, grid_n);
  nodes.insert(nodes.end(), traj.knots().begin(), traj.knots().end());
  nodes = merge_nodes(std::move(nodes), 0.0, t);

  auto boundary = [&](double lo, double hi, bool lo_in) {
    for (int it = 0; it < 60 && hi - lo > 0.0; ++it) {
      const double mid = 0.5 * (lo + hi);
      if (mid <= lo || mid >= hi) break;
      if (pred(mid) == lo_in) {
        lo = mid;
      } else {
        hi = mid;
      }
    }
    return 0.5 * (lo + hi);
  };

  std::vector<std::pair<double, double>> parts;
  auto add_piece = [&](double a, double b, bool ia, bool ib) {
    if (ia && ib) {
      parts.emplace_back(a, b);
    } else if (ia != ib) {
      const double c = boundary(a, b, ia);
      if (ia) {
        parts.emplace_back(a, c);
      } else {
        parts.emplace_back(c, b);
      }
    }
  };

  bool in_prev = pred(nodes.front());
  for (std::size_t k = 0; k + 1 < nodes.size(); ++k) {
    const double a = nodes[k];
    const double b = nodes[k + 1];
    const double mid = 0.5 * (a + b);
    const bool in_mid = pred(mid);
    const bool in_next = pred(b);
    add_piece(a, mid, in_prev, in_mid);
    add_piece(mid, b, in_mid, in_next);
    in_prev = in_next;
  }

  // Merge touching pieces before summing so a fully covered window adds up to t exactly.
  double total = 0.0;
  std::size_t k = 0;
  while (k < parts.size()) {
    const double start = parts[k].first;
    double end = parts[k].second;
    while (k + 1 < parts.size() && parts[k + 1].first <= end) {
      end = std::max(end, parts[k + 1].second);
      ++k;
    }
    total += end - start;
    ++k;
  }
  out.measure = std::min(total, t);
  return out;
}

}  // namespace

MeasureEstimate measure_near(const Trajectory& traj, double u_theta, double delta, double t, int grid_n) {
  return measure_where(traj, t, grid_n, [&](double s) { return m_min(traj, s, u_theta) <= delta; });
}

MeasureEstimate measure_away(const Trajectory& traj, double u_theta, double delta, double t, int grid_n) {
  return measure_where(traj, t, grid_n, [&](double s) { return m_min(traj, s, u_theta) > delta; });
}

std::string to_string(Classification c) {
  switch (c) {
    case Classification::kExtraThresholdSimple: return "extra-threshold-simple";
    case Classification::kThresholdSimple: return "threshold-simple";
    case Classification::kThresholdAdvanced: return "threshold-advanced";
    case Classification::kUndetermined: return "undetermined";
  }
  return "undetermined";
}

namespace {

// Two or more sign changes among the ends and quarter points of one cell:
// crossings the grid-level root search cannot separate.
bool hidden_crossings(const Trajectory& traj, double u_theta, double atol, int grid_n) {
  const double h = traj.horizon() / grid_n;
  const int dim = traj.dim();
  std::vector<Eigen::VectorXd> probe(5);
  for (int k = 0; k < grid_n; ++k) {
    for (int j = 0; j < 5; ++j) probe[j] = traj.value(std::min(traj.horizon(), (k + 0.25 * j) * h));
    for (int i = 0; i < dim; ++i) {
      int changes = 0;
      int last = 0;
      for (int j = 0; j < 5; ++j) {
        const double x = probe[j][i] - u_theta;
        const int sgn = std::abs(x) <= atol ? 0 : (x > 0 ? 1 : -1);
        if (sgn == 0) continue;
        if (last != 0 && sgn != last) ++changes;
        last = sgn;
      }
      if (changes >= 2) return true;
    }
  }
  return false;
}

}  // namespace

ThresholdDiagnostics threshold_diagnostics(const Trajectory& traj, double u_theta, int grid_n,
                                           const std::vector<double>& deltas,
                                           const DiagnosticsOptions& options) {
  if (grid_n < 1000) throw ConfigError("grid_n must be at least 1000");
  for (std::size_t k = 0; k < deltas.size(); ++k) {
    if (!(deltas[k] > 0.0)) throw ConfigError("deltas must be positive");
    if (k > 0 && !(deltas[k] < deltas[k - 1])) throw ConfigError("deltas must be decreasing");
  }
  const double horizon = traj.horizon();
  ThresholdDiagnostics out;

  const MeasureEstimate z = measure_near(traj, u_theta, options.atol, horizon, grid_n);
  out.z_measure = z.measure;
  out.resolution = z.resolution;
  for (double d : deltas) out.r_curve.emplace_back(d, measure_near(traj, u_theta, d, horizon, grid_n).measure);

  const double root_tol = options.root_tol > 0.0 ? options.root_tol : 1e-12 * horizon;
  const CrossingReport report = detect_crossings(traj, u_theta, root_tol, grid_n);
  out.crossings = report.events;
  if (!report.degenerate()) out.crossing_count = static_cast<int>(report.events.size());

  const double cell = out.resolution;
  if (out.z_measure > options.advanced_cells * cell) {
    out.classification = Classification::kThresholdAdvanced;
    return out;
  }

  std::vector<double> times;
  for (const auto& e : report.events) times.push_back(e.t);
  std::sort(times.begin(), times.end());

  // Accumulation toward either end shows up as a run of shrinking (or growing) gaps.
  int shrink = 0;
  int grow = 0;
  int best_run = 0;
  for (std::size_t k = 2; k < times.size(); ++k) {
    const double g_prev = times[k - 1] - times[k - 2];
    const double g = times[k] - times[k - 1];
    shrink = (g < g_prev) ? shrink + 1 : 0;
    grow = (g > g_prev) ? grow + 1 : 0;
    best_run = std::max({best_run, shrink, grow});
  }
  bool crowded = hidden_crossings(traj, u_theta, options.atol, grid_n);
  for (std::size_t k = 1; k < times.size(); ++k) {
    if (std::floor(times[k] / cell) == std::floor(times[k - 1] / cell)) crowded = true;
  }
  // Monotone gaps alone can be a slowly drifting oscillation; accumulation
  // also needs the gaps to reach below the grid resolution.
  const bool accumulates = best_run + 1 >= options.accumulation_run && crowded;

  const bool z_small = out.z_measure <= options.simple_cells * cell;
  if (accumulates && z_small) {
    out.classification = Classification::kThresholdSimple;
  } else if (report.degenerate()) {
    out.classification = Classification::kUndetermined;
    out.warnings.push_back("threshold plateau shorter than the advanced cutoff; measure of Z is ambiguous");
  } else if (crowded) {
    out.classification = Classification::kUndetermined;
    std::ostringstream msg;
    msg << "grid too coarse: several crossings fall in one cell of width " << cell;
    out.warnings.push_back(msg.str());
  } else if (z_small) {
    out.classification = Classification::kExtraThresholdSimple;
  } else {
    out.classification = Classification::kUndetermined;
    out.warnings.push_back("measure of Z lies between the simple and advanced cutoffs");
  }
  return out;
}

double sup_distance_on(const Trajectory& a, const Trajectory& b, const std::vector<double>& nodes) {
  if (a.dim() != b.dim()) throw ConfigError("sup_distance: dimension mismatch");
  double best = 0.0;
  for (double t : nodes) best = std::max(best, (a.value(t) - b.value(t)).lpNorm<Eigen::Infinity>());
  return best;
}

double sup_distance(const Trajectory& a, const Trajectory& b, int grid_n) {
  if (a.dim() != b.dim()) throw ConfigError("sup_distance: dimension mismatch");
  if (std::abs(a.horizon() - b.horizon()) > 1e-12 * std::max(1.0, a.horizon())) {
    throw ConfigError("sup_distance: trajectories live on different domains");
  }
  const double horizon = std::min(a.horizon(), b.horizon());
  std::vector<double> nodes = uniform_nodes(0.0, horizon, grid_n);
  nodes.insert(nodes.end(), a.knots().begin(), a.knots().end());
  nodes.insert(nodes.end(), b.knots().begin(), b.knots().end());
  return sup_distance_on(a, b, merge_nodes(std::move(nodes), 0.0, horizon));
}

}  // namespace steeplab
