#include "steeplab/sweep.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <limits>
#include <numeric>
#include <sstream>
#include <thread>

#include <nlohmann/json.hpp>

#include "steeplab/analysis.hpp"
#include "steeplab/errors.hpp"
#include "steeplab/quadrature.hpp"
#include "steeplab/volterra.hpp"

namespace steeplab {

int default_thread_count() {
  if (const char* env = std::getenv("STEEPLAB_THREADS")) {
    char* end = nullptr;
    const long v = std::strtol(env, &end, 10);
    if (end != env && *end == '\0' && v >= 1) return static_cast<int>(v);
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

std::vector<double> SweepReport::betas() const {
  std::vector<double> out;
  for (const auto& m : members) out.push_back(m.beta);
  return out;
}

SweepReport sweep(const Scenario& scenario, std::vector<double> betas, const SweepOptions& options) {
  scenario.validate();
  if (betas.empty()) throw ConfigError("sweep needs at least one beta");
  if (!(options.cluster_tol > 0.0)) throw ConfigError("cluster_tol must be positive");
  for (double b : betas) Steepness check(b);
  std::sort(betas.begin(), betas.end());
  if (std::adjacent_find(betas.begin(), betas.end()) != betas.end()) throw ConfigError("duplicate beta in sweep");

  SweepReport report;
  report.scenario = scenario.name;
  const std::size_t count = betas.size();
  report.members.resize(count);
  for (std::size_t k = 0; k < count; ++k) report.members[k].beta = betas[k];

  int threads = options.threads > 0 ? options.threads : default_thread_count();
  threads = static_cast<int>(std::min<std::size_t>(static_cast<std::size_t>(threads), count));
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t k = next++; k < count; k = next++) {
      SweepMember& m = report.members[k];
      try {
        m.trajectory = integrate(scenario, Steepness(m.beta), options.integrator, &m.stats);
      } catch (const std::exception& ex) {
        m.error = ex.what();
      }
    }
  };
  if (threads <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int i = 0; i < threads; ++i) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }

  std::vector<std::size_t> ok;
  for (std::size_t k = 0; k < count; ++k) {
    if (report.members[k].trajectory) {
      ok.push_back(k);
    } else {
      report.warnings.push_back("beta=" + Steepness(report.members[k].beta).to_string() +
                                " failed: " + report.members[k].error);
    }
  }

  const double horizon = scenario.params.horizon;
  report.distance_matrix = Eigen::MatrixXd::Constant(static_cast<Eigen::Index>(count), static_cast<Eigen::Index>(count),
                                                     std::numeric_limits<double>::quiet_NaN());
  for (std::size_t a : ok) {
    report.distance_matrix(a, a) = 0.0;
    for (std::size_t b : ok) {
      if (b <= a) continue;
      const double d = sup_distance(*report.members[a].trajectory, *report.members[b].trajectory, options.grid_n);
      report.distance_matrix(a, b) = d;
      report.distance_matrix(b, a) = d;
    }
  }

  // Transitive closure of d < cluster_tol via union-find.
  std::vector<std::size_t> parent(count);
  std::iota(parent.begin(), parent.end(), 0);
  auto find = [&](std::size_t x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  };
  for (std::size_t a : ok) {
    for (std::size_t b : ok) {
      if (b > a && report.distance_matrix(a, b) < options.cluster_tol) parent[find(b)] = find(a);
    }
  }
  for (std::size_t k : ok) {
    const std::size_t root = find(k);
    auto it = std::find_if(report.clusters.begin(), report.clusters.end(),
                           [&](const SweepCluster& c) { return find(c.members.front()) == root; });
    if (it == report.clusters.end()) {
      report.clusters.push_back({{k}, "", 0.0, 0.0, std::nullopt});
    } else {
      it->members.push_back(k);
    }
  }

  std::vector<LimitCandidate> library = match_library(scenario);
  library.insert(library.end(), options.extra_candidates.begin(), options.extra_candidates.end());
  const double match_tol = options.match_tol > 0.0 ? options.match_tol : options.cluster_tol;
  for (auto& c : report.clusters) {
    for (std::size_t a : c.members) {
      for (std::size_t b : c.members) c.diameter = std::max(c.diameter, report.distance_matrix(a, b));
    }
    const Trajectory& rep = *report.members[c.members.back()].trajectory;
    double best = std::numeric_limits<double>::infinity();
    const LimitCandidate* best_candidate = nullptr;
    for (const auto& cand : library) {
      if (cand.trajectory.dim() != rep.dim()) continue;
      const double d = sup_distance(rep, cand.trajectory, options.grid_n);
      if (d < best) {
        best = d;
        best_candidate = &cand;
      }
    }
    c.match_distance = best;
    c.match = (best_candidate && best < match_tol) ? best_candidate->name : "unidentified limit";
    if (options.residual_quad_n > 0) {
      const Trajectory& limit = (best_candidate && best < match_tol) ? best_candidate->trajectory : rep;
      try {
        c.limit_residual = volterra_residual(limit, scenario, Steepness::infinite(), options.residual_quad_n).sup_residual;
      } catch (const std::exception& ex) {
        report.warnings.push_back(std::string("limit residual unavailable: ") + ex.what());
      }
    }
  }

  // Verdict: one cluster holding every member and successive distances that do not grow.
  if (report.clusters.size() == 1 && ok.size() == count) {
    const auto& c = report.clusters.front();
    const double slack = 100.0 * std::max(options.integrator.rel_tol, options.integrator.abs_tol);
    bool shrinking = true;
    for (std::size_t k = 2; k < c.members.size(); ++k) {
      const double prev = report.distance_matrix(c.members[k - 2], c.members[k - 1]);
      const double cur = report.distance_matrix(c.members[k - 1], c.members[k]);
      if (cur > prev + slack) shrinking = false;
    }
    report.convergence_margin = options.cluster_tol - c.diameter;
    report.entire_sequence_converges = shrinking;
    if (!shrinking) report.warnings.push_back("single cluster but successive distances grow with beta");
  } else {
    report.convergence_margin = -std::numeric_limits<double>::infinity();
    if (report.clusters.size() > 1) {
      std::ostringstream msg;
      msg << report.clusters.size() << " clusters: subsequences approach different limits";
      report.warnings.push_back(msg.str());
    }
  }

  // Uniform bound audit on every trajectory.
  const AssumptionBReport b = check_assumption_b(scenario.source, betas, uniform_nodes(0.0, horizon, 1000));
  report.source_bound = b.bound;
  report.uniform_bound = uniform_bound(scenario, b.bound);
  for (std::size_t k : ok) {
    const Trajectory& tr = *report.members[k].trajectory;
    for (double t : tr.sample_times(options.grid_n)) {
      if (tr.value(t).lpNorm<Eigen::Infinity>() > report.uniform_bound + 1e-6) {
        report.bound_audit_pass = false;
        std::ostringstream msg;
        msg << "beta=" << Steepness(report.members[k].beta).to_string() << " exceeds the uniform bound "
            << report.uniform_bound << " at t=" << t;
        report.warnings.push_back(msg.str());
        break;
      }
    }
  }
  return report;
}

std::string sweep_report_to_json(const SweepReport& report) {
  using nlohmann::json;
  auto num = [](double x) { return std::isfinite(x) ? json(x) : json(nullptr); };
  json j;
  j["scenario"] = report.scenario;
  j["betas"] = report.betas();
  json matrix = json::array();
  for (Eigen::Index r = 0; r < report.distance_matrix.rows(); ++r) {
    json row = json::array();
    for (Eigen::Index c = 0; c < report.distance_matrix.cols(); ++c) row.push_back(num(report.distance_matrix(r, c)));
    matrix.push_back(row);
  }
  j["distance_matrix"] = matrix;
  json clusters = json::array();
  for (const auto& c : report.clusters) {
    json cj;
    std::vector<double> bs;
    for (std::size_t k : c.members) bs.push_back(report.members[k].beta);
    cj["betas"] = bs;
    cj["match"] = c.match;
    cj["match_distance"] = num(c.match_distance);
    cj["diameter"] = c.diameter;
    cj["limit_residual"] = c.limit_residual ? num(*c.limit_residual) : json(nullptr);
    clusters.push_back(cj);
  }
  j["clusters"] = clusters;
  j["entire_sequence_converges"] = report.entire_sequence_converges;
  j["convergence_margin"] = num(report.convergence_margin);
  json failures = json::array();
  for (const auto& m : report.members) {
    if (!m.error.empty()) failures.push_back({{"beta", m.beta}, {"error", m.error}});
  }
  j["failures"] = failures;
  j["uniform_bound"] = {{"B", report.source_bound}, {"bound", report.uniform_bound}, {"pass", report.bound_audit_pass}};
  j["warnings"] = report.warnings;
  return j.dump(2);
}

}  // namespace steeplab
