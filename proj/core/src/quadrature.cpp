#include "steeplab/quadrature.hpp"

#include <algorithm>

#include "steeplab/errors.hpp"

namespace steeplab {

std::vector<double> uniform_nodes(double a, double b, int n) {
  if (n < 1) throw ConfigError("need at least one quadrature cell");
  std::vector<double> nodes(static_cast<std::size_t>(n) + 1);
  const double h = (b - a) / n;
  for (int k = 0; k <= n; ++k) nodes[k] = a + k * h;
  nodes.back() = b;
  return nodes;
}

std::vector<double> merge_nodes(std::vector<double> nodes, double lo, double hi) {
  std::erase_if(nodes, [&](double t) { return !(t >= lo && t <= hi); });
  std::sort(nodes.begin(), nodes.end());
  nodes.erase(std::unique(nodes.begin(), nodes.end()), nodes.end());
  return nodes;
}

std::vector<Eigen::VectorXd> cumulative_trapezoid(const std::vector<double>& nodes,
                                                  const SidedIntegrand& f) {
  std::vector<Eigen::VectorXd> out;
  if (nodes.empty()) return out;
  out.reserve(nodes.size());
  Eigen::VectorXd acc = Eigen::VectorXd::Zero(f(nodes.front(), Limit::kFromRight).size());
  out.push_back(acc);
  for (std::size_t k = 0; k + 1 < nodes.size(); ++k) {
    const double a = nodes[k];
    const double b = nodes[k + 1];
    acc += 0.5 * (b - a) * (f(a, Limit::kFromRight) + f(b, Limit::kFromLeft));
    out.push_back(acc);
  }
  return out;
}

}  // namespace steeplab
