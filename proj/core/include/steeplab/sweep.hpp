#pragma once

#include <optional>
#include <string>
#include <vector>

#include "steeplab/integrator.hpp"
#include "steeplab/model.hpp"
#include "steeplab/scenarios.hpp"
#include "steeplab/trajectory.hpp"

namespace steeplab {

struct SweepOptions {
  IntegratorOptions integrator;
  double cluster_tol = 1e-2;
  /// A cluster is identified with a candidate closer than this; 0 means cluster_tol.
  double match_tol = 0.0;
  int grid_n = 10'000;
  /// Worker threads; 0 means STEEPLAB_THREADS or the hardware count.
  int threads = 0;
  /// Volterra residual of each cluster limit against infinite beta (0 disables).
  int residual_quad_n = 10'000;
  /// Added to the scenario's match library.
  std::vector<LimitCandidate> extra_candidates;
};

struct SweepMember {
  double beta = 1.0;
  std::optional<Trajectory> trajectory;
  IntegrationStats stats;
  std::string error;  ///< nonempty when integration failed
};

struct SweepCluster {
  std::vector<std::size_t> members;  ///< indices into SweepReport::members, increasing beta
  std::string match;                 ///< candidate name or "unidentified limit"
  double match_distance = 0.0;
  double diameter = 0.0;
  /// Volterra residual of the limit (matched candidate, else the largest-beta member) at beta = infinity.
  std::optional<double> limit_residual;
};

struct SweepReport {
  std::string scenario;
  std::vector<SweepMember> members;  ///< sorted by beta
  Eigen::MatrixXd distance_matrix;   ///< NaN where a member failed
  std::vector<SweepCluster> clusters;
  bool entire_sequence_converges = false;
  /// cluster_tol minus the diameter of the single cluster (negative if the verdict fails on that).
  double convergence_margin = 0.0;
  double source_bound = 0.0;
  double uniform_bound = 0.0;
  bool bound_audit_pass = true;
  std::vector<std::string> warnings;

  std::vector<double> betas() const;
};

/// Integrates every beta (concurrently), clusters the trajectories by
/// sup-distance below cluster_tol (transitive closure) and names each cluster
/// by the nearest library candidate. Integration failures are recorded per
/// member and the sweep carries on.
SweepReport sweep(const Scenario& scenario, std::vector<double> betas, const SweepOptions& options = {});

/// {betas, distance_matrix, clusters:[{betas, match, diameter, ...}], entire_sequence_converges, warnings, ...}
/// with sorted keys.
std::string sweep_report_to_json(const SweepReport& report);

/// Parallelism cap from STEEPLAB_THREADS (falls back to the hardware count, at least 1).
int default_thread_count();

}  // namespace steeplab
