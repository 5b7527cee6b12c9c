#include "cli.hpp"

#if __has_include(<CLI/CLI.hpp>)
#include <CLI/CLI.hpp>
#else
#include <CLI11.hpp>
#endif
#include <nlohmann/json.hpp>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <limits>
#include <optional>
#include <ostream>
#include <sstream>

#include "steeplab/analysis.hpp"
#include "steeplab/errors.hpp"
#include "steeplab/firing.hpp"
#include "steeplab/heaviside.hpp"
#include "steeplab/integrator.hpp"
#include "steeplab/model.hpp"
#include "steeplab/quadrature.hpp"
#include "steeplab/scenario_io.hpp"
#include "steeplab/scenarios.hpp"
#include "steeplab/sweep.hpp"
#include "steeplab/trajectory_io.hpp"
#include "steeplab/volterra.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace steeplab::cli {

namespace {

struct Tolerances {
  double rel_tol = 1e-9;
  double abs_tol = 1e-9;
  double root_tol = 0.0;  // 0: 1e-12 T
  int quad_n = 10'000;
  int grid_n = 10'000;
  double cluster_tol = 1e-2;
};

void add_tolerances(CLI::App* cmd, Tolerances& tol) {
  cmd->add_option("--rel-tol", tol.rel_tol, "relative tolerance")->check(CLI::PositiveNumber);
  cmd->add_option("--abs-tol", tol.abs_tol, "absolute tolerance")->check(CLI::PositiveNumber);
  cmd->add_option("--root-tol", tol.root_tol, "crossing root tolerance (default 1e-12 T)")->check(CLI::PositiveNumber);
  cmd->add_option("--quad-n", tol.quad_n, "quadrature cells")->check(CLI::PositiveNumber);
  cmd->add_option("--grid-n", tol.grid_n, "grid cells for measures, distances and output")->check(CLI::PositiveNumber);
}

Steepness parse_beta(const std::string& s) {
  if (s == "inf" || s == "infinity") return Steepness::infinite();
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(s, &used);
  } catch (const std::exception&) {
    throw ConfigError("bad steepness '" + s + "'");
  }
  if (used != s.size()) throw ConfigError("bad steepness '" + s + "'");
  return Steepness(v);
}

std::vector<double> parse_list(const std::string& s, const std::string& what) {
  std::vector<double> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      std::size_t used = 0;
      out.push_back(std::stod(item, &used));
      if (used != item.size()) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      throw ConfigError("bad entry '" + item + "' in " + what);
    }
  }
  if (out.empty()) throw ConfigError(what + " is empty");
  return out;
}

Scenario resolve_scenario(const std::string& ref, std::optional<double> t_end) {
  Scenario s = [&] {
    for (const auto& name : builtin_names()) {
      if (ref == name) return builtin(ref);
    }
    if (!fs::exists(ref)) throw ConfigError("'" + ref + "' is neither a built-in scenario nor a file");
    return load_scenario(ref);
  }();
  if (t_end) {
    s.params.horizon = *t_end;
    s.validate();
  }
  return s;
}

fs::path prepare_out(const std::string& dir) {
  fs::path p(dir);
  std::error_code ec;
  fs::create_directories(p, ec);
  if (ec || !fs::is_directory(p)) throw ConfigError("cannot create output directory " + dir);
  return p;
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream f(path);
  if (!f) throw ConfigError("cannot write " + path.string());
  f << text;
  if (text.empty() || text.back() != '\n') f << '\n';
}

double root_tol_for(const Tolerances& tol, double horizon) {
  return tol.root_tol > 0.0 ? tol.root_tol : 1e-12 * horizon;
}

std::string fmt(double x) {
  std::ostringstream os;
  os << std::setprecision(10) << x;
  return os.str();
}

void print_library_match(std::ostream& out, const Trajectory& traj, const Scenario& s, int grid_n) {
  double best = std::numeric_limits<double>::infinity();
  std::string name;
  for (const auto& cand : match_library(s)) {
    if (cand.trajectory.dim() != traj.dim()) continue;
    const double d = sup_distance(traj, cand.trajectory, grid_n);
    if (d < best) {
      best = d;
      name = cand.name;
    }
  }
  if (!name.empty()) out << "closest closed form: " << name << " (sup distance " << fmt(best) << ")\n";
}

int cmd_simulate(const std::string& ref, const std::string& beta_s, std::optional<double> t_end,
                 const Tolerances& tol, const std::string& out_dir, std::ostream& out) {
  const Scenario s = resolve_scenario(ref, t_end);
  const Steepness beta = parse_beta(beta_s);
  if (beta.is_infinite()) throw ConfigError("simulate needs a finite beta; use limit-solve for the Heaviside limit");
  const fs::path dir = prepare_out(out_dir);
  IntegratorOptions opts;
  opts.rel_tol = tol.rel_tol;
  opts.abs_tol = tol.abs_tol;
  IntegrationStats stats;
  const Trajectory traj = integrate(s, beta, opts, &stats);
  save_trajectory_csv((dir / "trajectory.csv").string(), traj, traj.sample_times(tol.grid_n));
  const CrossingReport cr = detect_crossings(traj, s.params.u_theta, root_tol_for(tol, s.params.horizon), tol.grid_n);
  write_text(dir / "crossings.json", crossings_to_json(cr.events));

  out << "scenario " << s.name << ", beta=" << beta.to_string() << ", T=" << fmt(s.params.horizon) << "\n";
  out << "steps accepted " << stats.accepted << ", rejected " << stats.rejected << ", layer-capped "
      << stats.layer_limited << ", rhs evaluations " << stats.rhs_evals << "\n";
  out << "u(T) =";
  const Eigen::VectorXd uT = traj.value(s.params.horizon);
  for (Eigen::Index j = 0; j < uT.size(); ++j) out << ' ' << fmt(uT[j]);
  out << "\ncrossings in (0,T]: " << cr.events.size() << (cr.degenerate() ? " (plateau present)" : "") << "\n";
  print_library_match(out, traj, s, tol.grid_n);
  out << "wrote " << (dir / "trajectory.csv").string() << ", " << (dir / "crossings.json").string() << "\n";
  return 0;
}

int cmd_sweep(const std::string& ref, const std::string& betas_s, std::optional<double> t_end, const Tolerances& tol,
              const std::string& out_dir, bool write_csv, std::ostream& out) {
  const Scenario s = resolve_scenario(ref, t_end);
  const std::vector<double> betas = parse_list(betas_s, "--betas");
  const fs::path dir = prepare_out(out_dir);
  SweepOptions opts;
  opts.integrator.rel_tol = tol.rel_tol;
  opts.integrator.abs_tol = tol.abs_tol;
  opts.cluster_tol = tol.cluster_tol;
  opts.grid_n = tol.grid_n;
  opts.residual_quad_n = tol.quad_n;
  const SweepReport rep = sweep(s, betas, opts);
  write_text(dir / "sweep.json", sweep_report_to_json(rep));
  if (write_csv) {
    for (const auto& m : rep.members) {
      if (!m.trajectory) continue;
      const auto name = "trajectory_beta" + Steepness(m.beta).to_string() + ".csv";
      save_trajectory_csv((dir / name).string(), *m.trajectory, m.trajectory->sample_times(tol.grid_n));
    }
  }
  out << "scenario " << s.name << ", " << rep.members.size() << " betas, " << rep.clusters.size() << " cluster(s)\n";
  for (const auto& c : rep.clusters) {
    out << "  {";
    for (std::size_t k = 0; k < c.members.size(); ++k) {
      out << (k ? ", " : "") << Steepness(rep.members[c.members[k]].beta).to_string();
    }
    out << "} -> " << c.match << " (distance " << fmt(c.match_distance) << ", diameter " << fmt(c.diameter) << ")";
    if (c.limit_residual) out << ", limit residual " << fmt(*c.limit_residual);
    out << "\n";
  }
  out << "entire sequence converges: " << (rep.entire_sequence_converges ? "yes" : "no") << "\n";
  out << "uniform bound " << fmt(rep.uniform_bound) << (rep.bound_audit_pass ? " holds" : " VIOLATED") << "\n";
  for (const auto& w : rep.warnings) out << "warning: " << w << "\n";
  out << "wrote " << (dir / "sweep.json").string() << "\n";
  bool failed = false;
  for (const auto& m : rep.members) failed = failed || !m.error.empty();
  return failed ? 2 : 0;
}

int cmd_limit_solve(const std::string& ref, std::optional<double> zero_value, const std::string& mode_s,
                    int max_crossings, std::optional<double> t_end, const Tolerances& tol, const std::string& out_dir,
                    std::ostream& out) {
  Scenario s = resolve_scenario(ref, t_end);
  const double z = zero_value.value_or(s.firing.zero_value());
  if (!(z >= 0.0 && z <= 1.0)) throw ConfigError("--s-infty-zero must lie in [0, 1]");
  s.firing = FiringRate::heaviside(z);
  HeavisideOptions opts;
  opts.mode = at_threshold_mode_from_string(mode_s);
  opts.max_crossings = max_crossings;
  const fs::path dir = prepare_out(out_dir);
  const HeavisideSolution sol = solve_heaviside_right_smooth(s, opts);
  save_trajectory_csv((dir / "trajectory.csv").string(), sol.trajectory, sol.trajectory.sample_times(tol.grid_n));
  write_text(dir / "crossings.json", crossings_to_json(sol.crossings));
  const VolterraResult res = volterra_residual(sol.trajectory, s, Steepness::infinite(), tol.quad_n);

  json j;
  j["scenario"] = s.name;
  j["s_infty_zero"] = z;
  j["mode"] = to_string(opts.mode);
  j["right_smooth"] = sol.right_smooth;
  j["event_times"] = sol.event_times;
  json zs = json::array();
  for (Eigen::Index k = 0; k < sol.z_values.cols(); ++k) {
    zs.push_back(std::vector<double>(sol.z_values.col(k).data(), sol.z_values.col(k).data() + sol.z_values.rows()));
  }
  j["z_values"] = zs;
  j["volterra_sup_residual"] = res.sup_residual;
  j["warnings"] = sol.warnings;
  write_text(dir / "limit.json", j.dump(2));

  out << "scenario " << s.name << ", S_inf(0)=" << fmt(z) << ", mode " << to_string(opts.mode) << "\n";
  out << "crossings: " << sol.crossings.size() << ", right smooth: " << (sol.right_smooth ? "yes" : "no") << "\n";
  out << "Volterra residual " << fmt(res.sup_residual) << "\n";
  print_library_match(out, sol.trajectory, s, tol.grid_n);
  for (const auto& w : sol.warnings) out << "warning: " << w << "\n";
  out << "wrote " << (dir / "trajectory.csv").string() << ", " << (dir / "crossings.json").string() << ", "
      << (dir / "limit.json").string() << "\n";
  return 0;
}

int cmd_analyze(const std::string& traj_path, const std::string& ref, std::optional<double> u_theta_opt,
                const std::string& beta_s, const std::string& deltas_s, const Tolerances& tol,
                const std::string& out_dir, std::ostream& out) {
  const Trajectory traj = load_trajectory_csv(traj_path);
  std::optional<Scenario> s;
  if (!ref.empty()) s = resolve_scenario(ref, traj.horizon());
  if (!s && !u_theta_opt) throw ConfigError("analyze needs --scenario or --u-theta");
  const double u_theta = u_theta_opt.value_or(s ? s->params.u_theta : 0.0);
  const std::vector<double> deltas = parse_list(deltas_s, "--deltas");
  const fs::path dir = prepare_out(out_dir);

  DiagnosticsOptions dopts;
  dopts.root_tol = root_tol_for(tol, traj.horizon());
  const ThresholdDiagnostics d = threshold_diagnostics(traj, u_theta, tol.grid_n, deltas, dopts);

  json j;
  j["trajectory"] = traj_path;
  j["u_theta"] = u_theta;
  j["crossing_count"] = d.crossing_count ? json(*d.crossing_count) : json("plateau");
  j["crossings"] = json::parse(crossings_to_json(d.crossings));
  j["Z_measure"] = d.z_measure;
  j["resolution"] = d.resolution;
  json rc = json::array();
  for (const auto& [delta, m] : d.r_curve) rc.push_back({delta, m});
  j["r_curve"] = rc;
  j["classification"] = to_string(d.classification);
  j["warnings"] = d.warnings;

  std::ostringstream rcsv;
  rcsv << "delta,r_measure\n";
  for (const auto& [delta, m] : d.r_curve) rcsv << format_double(delta) << ',' << format_double(m) << '\n';
  write_text(dir / "r_curve.csv", rcsv.str());

  out << "classification: " << to_string(d.classification) << "\n";
  out << "crossings: " << (d.crossing_count ? std::to_string(*d.crossing_count) : std::string("plateau")) << "\n";
  out << "|Z| = " << fmt(d.z_measure) << " (grid cell " << fmt(d.resolution) << ")\n";
  for (const auto& [delta, m] : d.r_curve) out << "|r(" << fmt(delta) << ";T)| = " << fmt(m) << "\n";

  if (s) {
    const Steepness beta = parse_beta(beta_s);
    const VolterraResult res = volterra_residual(traj, *s, beta, tol.quad_n);
    j["volterra"] = {{"beta", beta.to_string()},
                     {"sup_residual", res.sup_residual},
                     {"quad_error_estimate", res.quad_error_estimate}};
    std::ostringstream csv;
    csv << "t,residual\n";
    for (const auto& [t, r] : res.curve) csv << format_double(t) << ',' << format_double(r) << '\n';
    write_text(dir / "residual.csv", csv.str());
    out << "Volterra residual (beta=" << beta.to_string() << "): " << fmt(res.sup_residual) << " (quadrature error ~"
        << fmt(res.quad_error_estimate) << ")\n";
  }
  for (const auto& w : d.warnings) out << "warning: " << w << "\n";
  write_text(dir / "diagnostics.json", j.dump(2));
  out << "wrote " << (dir / "diagnostics.json").string() << "\n";
  return 0;
}

int cmd_check(const std::string& firing, std::optional<double> eps, std::optional<double> delta,
              long long beta_cap, const std::string& ref, const std::string& betas_s, const Tolerances& tol,
              std::ostream& out) {
  if (!firing.empty()) {
    if (!eps || !delta) throw ConfigError("check --firing needs --eps and --delta");
    AssumptionAOptions opts;
    opts.beta_cap = beta_cap;
    const AssumptionAReport r = check_assumption_a(parse_firing(firing), *eps, *delta, opts);
    if (r.pass) {
      out << "Q=" << r.q << "\n";
    } else {
      out << "no Q found: " << r.diagnostic << "\n";
    }
    return 0;
  }
  if (ref.empty()) throw ConfigError("check needs --firing or --scenario");
  const Scenario s = resolve_scenario(ref, std::nullopt);
  const std::vector<double> betas = parse_list(betas_s, "--betas");
  const AssumptionBReport r = check_assumption_b(s.source, betas, uniform_nodes(0.0, s.params.horizon, tol.grid_n));
  out << "B=" << fmt(r.bound) << " pointwise_dev=" << fmt(r.pointwise_dev) << " integral_dev=" << fmt(r.integral_dev)
      << " pass=" << (r.pass ? "true" : "false") << "\n";
  if (!r.diagnostic.empty()) out << r.diagnostic << "\n";
  out << "uniform bound " << fmt(uniform_bound(s, r.bound)) << "\n";
  return 0;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"steeplab: steep firing-rate network laboratory", "steeplab"};
  app.require_subcommand(1);
  Tolerances tol;
  std::string scenario_ref;
  std::string beta = "1000";
  std::string betas = "10,100,1000";
  std::string out_dir = ".";
  std::optional<double> t_end;
  long long seed = 0;
  bool write_csv = false;

  auto common = [&](CLI::App* cmd, bool needs_scenario) {
    auto* opt = cmd->add_option("--scenario", scenario_ref, "built-in name or config file");
    if (needs_scenario) opt->required();
    cmd->add_option("--out", out_dir, "output directory");
    cmd->add_option("--seed", seed, "recorded, unused");
  };

  auto* simulate = app.add_subcommand("simulate", "integrate one finite beta");
  common(simulate, true);
  add_tolerances(simulate, tol);
  simulate->add_option("--beta", beta, "steepness");
  simulate->add_option("--t-end", t_end, "override the horizon T")->check(CLI::PositiveNumber);

  auto* sweep_cmd = app.add_subcommand("sweep", "integrate a beta list and cluster the trajectories");
  common(sweep_cmd, true);
  add_tolerances(sweep_cmd, tol);
  sweep_cmd->add_option("--betas", betas, "comma-separated steepness values");
  sweep_cmd->add_option("--cluster-tol", tol.cluster_tol, "sup-distance clustering threshold")->check(CLI::PositiveNumber);
  sweep_cmd->add_option("--t-end", t_end, "override the horizon T")->check(CLI::PositiveNumber);
  sweep_cmd->add_flag("--csv", write_csv, "also write every trajectory as CSV");

  std::string traj_path;
  std::optional<double> u_theta;
  std::string deltas = "0.1,0.01,0.001";
  std::string analyze_beta = "inf";
  auto* analyze = app.add_subcommand("analyze", "threshold diagnostics and Volterra residual of a trajectory CSV");
  common(analyze, false);
  add_tolerances(analyze, tol);
  analyze->add_option("--trajectory", traj_path, "trajectory CSV")->required();
  analyze->add_option("--u-theta", u_theta, "threshold (default from the scenario)");
  analyze->add_option("--beta", analyze_beta, "steepness for the residual (inf for the limit problem)");
  analyze->add_option("--deltas", deltas, "decreasing comma-separated deltas for r(delta;T)");

  std::optional<double> zero_value;
  std::string mode = "convention";
  int max_crossings = 10'000;
  auto* limit = app.add_subcommand("limit-solve", "right-smooth solution of the Heaviside limit problem");
  common(limit, true);
  add_tolerances(limit, tol);
  limit->add_option("--s-infty-zero", zero_value, "value of the Heaviside function at 0");
  limit->add_option("--mode", mode, "convention or solve");
  limit->add_option("--max-crossings", max_crossings, "crossing budget")->check(CLI::NonNegativeNumber);
  limit->add_option("--t-end", t_end, "override the horizon T")->check(CLI::PositiveNumber);

  std::string firing;
  std::optional<double> eps;
  std::optional<double> delta;
  long long beta_cap = 1'000'000'000;
  auto* check = app.add_subcommand("check", "Assumption A for a firing family, or Assumption B for a scenario source");
  common(check, false);
  add_tolerances(check, tol);
  check->add_option("--firing", firing, "firing family code");
  check->add_option("--eps", eps, "tail bound");
  check->add_option("--delta", delta, "distance from threshold");
  check->add_option("--beta-cap", beta_cap, "largest beta examined");
  check->add_option("--betas", betas, "beta grid for the source check");

  auto* scenario = app.add_subcommand("scenario", "built-in scenarios");
  scenario->require_subcommand(1);
  scenario->add_subcommand("list", "list built-in names");
  std::string show_name;
  std::string show_out;
  auto* show = scenario->add_subcommand("show", "print a scenario as a config file");
  show->add_option("name", show_name, "built-in name")->required();
  show->add_option("--out", show_out, "write to this file instead of stdout");

  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n\n" << app.help();
    return 1;
  }

  try {
    if (simulate->parsed()) return cmd_simulate(scenario_ref, beta, t_end, tol, out_dir, out);
    if (sweep_cmd->parsed()) return cmd_sweep(scenario_ref, betas, t_end, tol, out_dir, write_csv, out);
    if (analyze->parsed()) {
      return cmd_analyze(traj_path, scenario_ref, u_theta, analyze_beta, deltas, tol, out_dir, out);
    }
    if (limit->parsed()) return cmd_limit_solve(scenario_ref, zero_value, mode, max_crossings, t_end, tol, out_dir, out);
    if (check->parsed()) return cmd_check(firing, eps, delta, beta_cap, scenario_ref, betas, tol, out);
    if (scenario->got_subcommand("list")) {
      for (const auto& n : builtin_names()) out << n << "\n";
      return 0;
    }
    if (show->parsed()) {
      const std::string text = scenario_to_json(builtin(show_name));
      if (show_out.empty()) {
        out << text;
      } else {
        write_text(show_out, text);
      }
      return 0;
    }
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << "\n";
    return 1;
  } catch (const std::out_of_range& e) {
    err << "config error: " << e.what() << "\n";
    return 1;
  } catch (const NumericalError& e) {
    err << "numerical failure: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    err << "numerical failure: " << e.what() << "\n";
    return 2;
  }
  err << app.help();
  return 1;
}

}  // namespace steeplab::cli
