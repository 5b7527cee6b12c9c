#pragma once

#include <Eigen/Dense>
#include <functional>
#include <vector>

#include "steeplab/types.hpp"

namespace steeplab {

/// n + 1 equally spaced nodes on [a, b]; the endpoints are exact.
std::vector<double> uniform_nodes(double a, double b, int n);

/// Sorted union of node sets with exact duplicates removed; nodes outside
/// [lo, hi] are dropped.
std::vector<double> merge_nodes(std::vector<double> nodes, double lo, double hi);

/// Integrand evaluated at a node, approached from inside the cell.
using SidedIntegrand = std::function<Eigen::VectorXd(double t, Limit side)>;

/// Running composite-trapezoid integrals over sorted nodes. Each cell
/// [s_k, s_k+1] uses f(s_k, kFromRight) and f(s_k+1, kFromLeft), so jumps
/// located at nodes are integrated exactly. Entry k holds the integral from
/// nodes[0] to nodes[k].
std::vector<Eigen::VectorXd> cumulative_trapezoid(const std::vector<double>& nodes,
                                                  const SidedIntegrand& f);

}  // namespace steeplab
