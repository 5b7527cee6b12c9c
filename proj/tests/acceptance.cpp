// Acceptance run: one PASS/FAIL line per criterion, sub-check details indented.
// Exit status is nonzero if any criterion fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include "steeplab/analysis.hpp"
#include "steeplab/firing.hpp"
#include "steeplab/heaviside.hpp"
#include "steeplab/integrator.hpp"
#include "steeplab/quadrature.hpp"
#include "steeplab/scenarios.hpp"
#include "steeplab/sweep.hpp"
#include "steeplab/volterra.hpp"

using namespace steeplab;

namespace {

// Pinned tolerances.
constexpr double kDecayTol = 1e-8;
constexpr double kDecaySeconds = 1.0;
constexpr double kFigureTol = 1e-2;
constexpr double kFigureSeconds = 30.0;
constexpr double kResidualTol = 1e-6;
constexpr int kQuadN = 10'000;
constexpr double kLimitTol = 1e-8;
constexpr double kAdvancedSlack = 1e-8;
constexpr double kCurveTol = 1e-6;
constexpr double kBoundSlack = 1e-6;
constexpr int kGridN = 10'000;
constexpr double kCellsSlack = 2.0;

struct Criterion {
  int id;
  std::string title;
  std::vector<std::string> notes;
  bool ok = true;

  void check(bool pass, const std::string& what) {
    notes.push_back(std::string(pass ? "    ok   " : "    FAIL ") + what);
    ok = ok && pass;
  }
};

std::string num(double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6g", x);
  return buf;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

Trajectory named(ClosedFormName n, double omega = 1.2, double u_theta = 0.6) {
  ClosedForm cf;
  cf.name = n;
  cf.omega = omega;
  cf.u_theta = u_theta;
  return closed_form_trajectory(cf, 5.0);
}

// Everything produced in criteria 1-5, for the bound audit.
struct Produced {
  Scenario scenario;
  std::vector<double> betas;  // finite betas used to derive B (empty: beta-independent source)
  Trajectory trajectory;
};
std::vector<Produced> produced;

void keep(const Scenario& s, std::vector<double> betas, const Trajectory& tr) { produced.push_back({s, betas, tr}); }

Criterion c1() {
  Criterion c{1, "integrator oracle: decay vs exp(-t)"};
  const Scenario s = builtin("decay");
  const auto t0 = std::chrono::steady_clock::now();
  const Trajectory tr = integrate(s, Steepness(10.0));
  const double elapsed = seconds_since(t0);
  double err = 0.0;
  for (double t : tr.sample_times(kGridN)) err = std::max(err, std::abs(tr.value(t)[0] - std::exp(-t)));
  c.check(err <= kDecayTol, "sup error " + num(err) + " <= " + num(kDecayTol));
  c.check(elapsed < kDecaySeconds, "runtime " + num(elapsed) + " s < 1 s");
  keep(s, {10.0}, tr);
  return c;
}

Criterion c2() {
  Criterion c{2, "alt-subseq parity split (beta 1e7 -> v1, 1e7+1 -> v2)"};
  const Scenario s = builtin("alt-subseq");
  const Trajectory v1 = named(ClosedFormName::kV1);
  const Trajectory v2 = named(ClosedFormName::kV2);
  for (int parity = 0; parity < 2; ++parity) {
    const Trajectory& target = parity == 0 ? v1 : v2;
    double prev = INFINITY;
    bool shrinking = true;
    for (double base : {1e3, 1e5, 1e7}) {
      const double beta = base + parity;
      const auto t0 = std::chrono::steady_clock::now();
      const Trajectory tr = integrate(s, Steepness(beta));
      const double elapsed = seconds_since(t0);
      const double d = sup_distance(tr, target, kGridN);
      shrinking = shrinking && d < prev;
      prev = d;
      keep(s, {}, tr);
      c.notes.push_back("         beta=" + Steepness(beta).to_string() + " distance to " + (parity ? "v2 " : "v1 ") +
                        num(d) + ", " + num(elapsed) + " s");
      if (base == 1e7) {
        c.check(d <= kFigureTol, std::string("beta=") + Steepness(beta).to_string() + " within " + num(kFigureTol) +
                                     " of " + (parity ? "v2" : "v1"));
        c.check(elapsed < kFigureSeconds, "runtime " + num(elapsed) + " s < 30 s");
      }
    }
    c.check(shrinking, std::string("monotone shrink over beta in {1e3,1e5,1e7}") + (parity ? "+1" : ""));
  }
  return c;
}

Criterion c3() {
  Criterion c{3, "Volterra residual of v1, v2, v3 at beta = inf"};
  struct Case {
    ClosedFormName name;
    double zero_value;
  };
  for (const Case& k : {Case{ClosedFormName::kV1, 0.5}, Case{ClosedFormName::kV2, 0.5}, Case{ClosedFormName::kV3, 0.5}}) {
    const Scenario s = multi_solution(1.2, 0.6, k.zero_value);
    const Trajectory tr = named(k.name);
    const double r = volterra_residual(tr, s, Steepness::infinite(), kQuadN).sup_residual;
    c.check(r <= kResidualTol, to_string(k.name) + " residual " + num(r) + " <= " + num(kResidualTol));
    keep(s, {}, tr);
  }
  return c;
}

Criterion c4() {
  Criterion c{4, "right-smooth solver conventions S(0) = 1 / 0 / 1/2"};
  struct Case {
    double z;
    ClosedFormName expect;
  };
  for (const Case& k : {Case{1.0, ClosedFormName::kV1}, Case{0.0, ClosedFormName::kV2}, Case{0.5, ClosedFormName::kV3}}) {
    const Scenario s = multi_solution(1.2, 0.6, k.z);
    const HeavisideSolution sol = solve_heaviside_right_smooth(s);
    const double d = sup_distance(sol.trajectory, named(k.expect), kGridN);
    c.check(d <= kLimitTol, "S(0)=" + num(k.z) + " -> " + to_string(k.expect) + " distance " + num(d));
    keep(s, {}, sol.trajectory);
  }
  return c;
}

Criterion c5() {
  Criterion c{5, "threshold-advanced limit is u_theta and does not solve the limit problem"};
  const Scenario s = builtin("threshold-advanced");
  const std::vector<double> betas{1e2, 1e3, 1e4};
  const SweepReport rep = sweep(s, betas);
  for (const auto& m : rep.members) {
    if (m.trajectory) keep(s, betas, *m.trajectory);
  }
  const Trajectory limit = constant_trajectory(1, s.params.u_theta, s.params.horizon, "u_theta");
  bool single = rep.clusters.size() == 1 && rep.clusters[0].match == "constant-u_theta";
  c.check(single, "sweep forms one cluster matched to constant-u_theta (got " + std::to_string(rep.clusters.size()) +
                      " cluster(s), first match '" + (rep.clusters.empty() ? "" : rep.clusters[0].match) + "')");
  const double beta_max = betas.back();
  if (rep.members.back().trajectory) {
    const double d = sup_distance(*rep.members.back().trajectory, limit, kGridN);
    c.check(d <= 1.0 / beta_max + kAdvancedSlack,
            "beta=1e4 member within 1/beta_max + 1e-8 of u_theta (distance " + num(d) + ")");
  }
  for (std::size_t k = 0; k < rep.members.size(); ++k) {
    if (rep.members[k].trajectory) {
      c.notes.push_back("         beta=" + Steepness(rep.members[k].beta).to_string() + " distance to u_theta " +
                        num(sup_distance(*rep.members[k].trajectory, limit, kGridN)));
    }
  }
  const auto diag = threshold_diagnostics(limit, s.params.u_theta, kGridN, {});
  c.check(diag.classification == Classification::kThresholdAdvanced,
          "limit u_theta classified " + to_string(diag.classification));
  Scenario half = s;
  half.firing = s.firing.with_zero_value(0.5);
  const VolterraResult r = volterra_residual(limit, half, Steepness::infinite(), kQuadN);
  double dev = 0.0;
  for (const auto& [t, val] : r.curve) dev = std::max(dev, std::abs(val - 0.5 * s.params.omega(0, 0) * t));
  c.check(dev <= kCurveTol, "residual curve vs omega t / 2: max deviation " + num(dev));
  c.check(std::abs(r.sup_residual - 3.0) <= kCurveTol, "sup residual " + num(r.sup_residual) + " (expected 3.0)");
  return c;
}

Criterion c6() {
  Criterion c{6, "uniform bound audit on every trajectory from criteria 1-5"};
  std::size_t checked = 0;
  for (const auto& p : produced) {
    double b = 0.0;
    if (p.scenario.source.depends_on_steepness()) {
      b = check_assumption_b(p.scenario.source, p.betas, uniform_nodes(0.0, p.scenario.params.horizon, 1000)).bound;
    } else {
      b = check_assumption_b(p.scenario.source, {1.0}, uniform_nodes(0.0, p.scenario.params.horizon, 1000)).bound;
    }
    const double bound = uniform_bound(p.scenario, b);
    double worst = 0.0;
    for (double t : p.trajectory.sample_times(kGridN)) worst = std::max(worst, p.trajectory.value(t).lpNorm<Eigen::Infinity>());
    ++checked;
    if (worst > bound + kBoundSlack) {
      c.check(false, p.scenario.name + " / " + p.trajectory.name() + ": " + num(worst) + " > " + num(bound));
    }
  }
  c.check(checked > 0, std::to_string(checked) + " trajectories audited");
  return c;
}

Criterion c7() {
  Criterion c{7, "Assumption A checker"};
  const FiringRate pwl = FiringRate::piecewise_linear();
  const FiringRate tanh = FiringRate::tanh_family();
  for (double delta : {0.1, 0.03, 0.25}) {
    const long long expect = static_cast<long long>(std::ceil(1.0 / delta - 1e-12));
    for (double eps : {0.01, 0.05, 0.1, 0.25, 0.5, 0.9}) {
      const auto r = check_assumption_a(pwl, eps, delta);
      c.check(r.pass && r.q == expect, "pwl eps=" + num(eps) + " delta=" + num(delta) + ": Q=" + std::to_string(r.q) +
                                           " (ceil(1/delta)=" + std::to_string(expect) + ")");
    }
  }
  for (double delta : {0.1, 0.03, 0.25}) {
    for (double eps : {0.001, 0.01, 0.05, 0.1, 0.25, 0.4}) {
      const double oracle = std::ceil(std::atanh(1.0 - 2.0 * eps) / delta);
      const auto r = check_assumption_a(tanh, eps, delta);
      c.check(r.pass && std::abs(static_cast<double>(r.q) - oracle) <= 1.0,
              "tanh eps=" + num(eps) + " delta=" + num(delta) + ": Q=" + std::to_string(r.q) + " (solve " +
                  num(oracle) + ")");
    }
  }
  for (const FiringRate& inner : {pwl, tanh}) {
    const FiringRate sh = FiringRate::shifted(inner);
    bool all = true;
    for (double eps : {0.01, 0.1, 0.4}) {
      for (double delta : {0.01, 0.1, 1.0}) all = all && check_assumption_a(sh, eps, delta).pass;
    }
    c.check(all, sh.code() + " passes for eps in {0.01,0.1,0.4}, delta in {0.01,0.1,1}");
  }
  return c;
}

Criterion c8() {
  Criterion c{8, "measure diagnostics on v1 and v3"};
  const Trajectory v1 = named(ClosedFormName::kV1);
  std::mt19937_64 rng(8);
  std::uniform_real_distribution<double> td(0.05, 5.0);
  std::uniform_real_distribution<double> dd(std::log(1e-4), std::log(0.5));
  double worst = 0.0;
  double cell = 0.0;
  for (int i = 0; i < 20; ++i) {
    const double t = td(rng);
    const double delta = std::exp(dd(rng));
    const auto r = measure_near(v1, 0.6, delta, t, kGridN);
    const auto p = measure_away(v1, 0.6, delta, t, kGridN);
    cell = r.resolution;
    worst = std::max(worst, std::abs(r.measure + p.measure - t) / r.resolution);
  }
  c.check(worst <= kCellsSlack, "|p|+|r| = t for 20 random (delta,t): worst " + num(worst) + " cells");
  const auto d = threshold_diagnostics(v1, 0.6, kGridN, {0.06, 0.006, 0.0006});
  for (const auto& [delta, m] : d.r_curve) {
    const double expect = -std::log(1.0 - delta / 0.6);
    c.check(std::abs(m - expect) <= kCellsSlack * d.resolution,
            "|r(" + num(delta) + ";5)| = " + num(m) + " vs " + num(expect));
  }
  const auto z = threshold_diagnostics(named(ClosedFormName::kV3), 0.6, kGridN, {});
  c.check(z.z_measure == 5.0, "v3 |Z| = " + num(z.z_measure) + " (T = 5 exactly)");
  (void)cell;
  return c;
}

Criterion c9() {
  Criterion c{9, "sweep clustering"};
  const SweepReport alt = sweep(builtin("alt-subseq"), {1e6, 1e6 + 1, 1e7, 1e7 + 1});
  c.check(alt.clusters.size() == 2, "alt-subseq: " + std::to_string(alt.clusters.size()) + " clusters");
  if (alt.clusters.size() == 2) {
    c.check(alt.clusters[0].match == "v1" && alt.clusters[1].match == "v2",
            "matches " + alt.clusters[0].match + " (even) and " + alt.clusters[1].match + " (odd)");
  }
  c.check(!alt.entire_sequence_converges, "alt-subseq verdict false");
  const SweepReport dec = sweep(builtin("decay"), {10, 100, 1000});
  c.check(dec.clusters.size() == 1 && dec.entire_sequence_converges,
          "decay: " + std::to_string(dec.clusters.size()) + " cluster, verdict " +
              (dec.entire_sequence_converges ? "true" : "false"));
  return c;
}

}  // namespace

int main() {
  const std::vector<std::function<Criterion()>> all{c1, c2, c3, c4, c5, c6, c7, c8, c9};
  int failed = 0;
  for (const auto& run : all) {
    Criterion c = [&] {
      try {
        return run();
      } catch (const std::exception& e) {
        Criterion broken{0, "exception"};
        broken.check(false, e.what());
        return broken;
      }
    }();
    std::printf("%s criterion %d: %s\n", c.ok ? "PASS" : "FAIL", c.id, c.title.c_str());
    for (const auto& n : c.notes) std::printf("%s\n", n.c_str());
    failed += c.ok ? 0 : 1;
  }
  std::printf("%d of %zu criteria passed\n", static_cast<int>(all.size()) - failed, all.size());
  return failed == 0 ? 0 : 1;
}
