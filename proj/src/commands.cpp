#include "gridfreq/commands.hpp"

#include <cmath>
#include <fstream>
#include <iomanip>
#include <limits>
#include <ostream>

#include "gridfreq/dispatch.hpp"
#include "gridfreq/error.hpp"

namespace gridfreq {

namespace {

std::ofstream open_output(const std::filesystem::path& dir, const char* name) {
  std::filesystem::create_directories(dir);
  std::ofstream out(dir / name);
  if (!out) throw Error(ErrorKind::Usage, "cannot write " + (dir / name).string());
  out << std::setprecision(17);
  return out;
}

double total_change(const std::vector<Perturbation>& perturbations) {
  double total = 0.0;
  for (const auto& d : perturbations) total += d.delta_p;
  return total;
}

}  // namespace

RunReport run_scenario(const Scenario& s, Trajectory* trajectory) {
  const Controller controller(s.controller, s.grid, s.comm);
  Trajectory traj = simulate(s.grid, s.perturbations, controller, s.sim);
  const auto& cost = s.controller.cost;

  RunReport r;
  r.u = traj.final_state().u;
  r.converged = traj.converged;
  r.cost = evaluate_cost(r.u, cost);
  // Optimum for the total adjustable power actually delivered, so the residual
  // imbalance left at steady detection cannot make the gap negative.
  r.optimal = optimal_convex(cost, s.controller.capacity, -r.u.sum()).total_cost;
  r.gap = r.cost - r.optimal;
  const SpectralSummary spectral = spectral_summary(s.grid);
  r.bound = theorem1_bound(total_abs_change(s.perturbations), s.grid.num_nodes(),
                           s.controller.gain, spectral.b_min, spectral.lambda2_unweighted);
  r.bound_satisfied = r.gap <= r.bound + 1e-9;
  r.marginal_spread = marginal_spread(r.u, cost);
  r.convergence_time = traj.converged ? convergence_time(traj, r.u)
                                      : std::numeric_limits<double>::quiet_NaN();
  for (const auto& comp : components(s.comm)) {
    double sum = 0.0;
    for (auto j : comp) sum += cost.marginal(j, r.u[static_cast<Eigen::Index>(j)]);
    r.component_prices.push_back(sum / static_cast<double>(comp.size()));
  }
  if (trajectory) *trajectory = std::move(traj);
  return r;
}

void write_report_csv(std::ostream& out, const RunReport& r) {
  out << std::setprecision(17) << "key,value\n"
      << "converged," << int(r.converged) << '\n'
      << "cost," << r.cost << '\n'
      << "optimal," << r.optimal << '\n'
      << "gap," << r.gap << '\n'
      << "bound," << r.bound << '\n'
      << "bound_satisfied," << int(r.bound_satisfied) << '\n'
      << "convergence_time," << r.convergence_time << '\n'
      << "marginal_spread," << r.marginal_spread << '\n';
  for (std::size_t c = 0; c < r.component_prices.size(); ++c) {
    out << "component_price_" << c + 1 << ',' << r.component_prices[c] << '\n';
  }
  for (Eigen::Index j = 0; j < r.u.size(); ++j) out << "u_" << j + 1 << ',' << r.u[j] << '\n';
}

int cmd_run(const Scenario& s, const std::filesystem::path& out_dir, std::ostream& log) {
  Trajectory traj;
  const RunReport report = run_scenario(s, &traj);
  {
    auto out = open_output(out_dir, "trajectory.csv");
    write_trajectory_csv(out, traj);
  }
  {
    auto out = open_output(out_dir, "report.csv");
    write_report_csv(out, report);
  }
  log << std::setprecision(6) << "cost " << report.cost << "  optimal " << report.optimal
      << "  gap " << report.gap << "  bound " << report.bound << '\n';
  if (!report.converged) {
    log << "no steady state within t_max = " << s.sim.t_max << " s\n";
    return kExitNoConvergence;
  }
  log << "converged, convergence time " << report.convergence_time << " s\n";
  return kExitOk;
}

int cmd_sweep(const Scenario& s, const std::vector<double>& h_list, bool use_sim,
              unsigned threads, const std::filesystem::path& out_dir, std::ostream& log) {
  SweepOptions options;
  options.controller = s.controller;
  options.comm = s.comm;
  options.use_sim = use_sim;
  options.sim = s.sim;
  options.threads = threads;
  const auto rows = gain_sweep(s.grid, s.perturbations, h_list, options);
  {
    auto out = open_output(out_dir, "sweep.csv");
    write_sweep_csv(out, rows);
  }
  {
    auto out = open_output(out_dir, "sweep.dat");
    write_sweep_plot(out, rows);
  }
  bool all_converged = true;
  for (const auto& r : rows) {
    log << std::setprecision(6) << "h " << r.h << "  cost " << r.cost << "  gap " << r.gap
        << (r.converged ? "" : "  (not converged)") << '\n';
    all_converged = all_converged && r.converged;
  }
  return all_converged ? kExitOk : kExitNoConvergence;
}

int cmd_rank(const Scenario& s, const std::filesystem::path& out_dir, std::ostream& log) {
  const Vec p0 = s.grid.initial_power();
  const Vec p = injections_at(s.grid, s.perturbations, std::numeric_limits<double>::infinity());
  const auto opt =
      optimal_convex(s.controller.cost, s.controller.capacity, total_change(s.perturbations));
  const auto scores = rank_links(s.grid, p0, p, opt.u, s.controller.gain);
  auto out = open_output(out_dir, "rank.csv");
  out << "line,from,to,susceptance,flow_change,score\n";
  for (const auto& sc : scores) {
    const auto& line = s.grid.lines()[sc.line];
    out << sc.line + 1 << ',' << line.from + 1 << ',' << line.to + 1 << ','
        << line.susceptance << ',' << sc.flow_change << ',' << sc.score << '\n';
  }
  if (!scores.empty()) {
    log << "most critical line " << scores.front().line + 1 << " (score "
        << scores.front().score << ")\n";
  }
  return kExitOk;
}

int cmd_dispatch(const Scenario& s, const std::filesystem::path& out_dir, std::ostream& log) {
  const auto& cost = s.controller.cost;
  const auto r = optimal_convex(cost, s.controller.capacity, total_change(s.perturbations));
  auto out = open_output(out_dir, "dispatch.csv");
  out << "node,u_opt,marginal_cost\n";
  for (std::size_t j = 0; j < cost.size(); ++j) {
    const double uj = r.u[static_cast<Eigen::Index>(j)];
    out << j + 1 << ',' << uj << ',' << cost.marginal(j, uj) << '\n';
  }
  out << "# price=" << r.price << " total_cost=" << r.total_cost << '\n';
  log << std::setprecision(6) << "optimal price " << r.price << "  total cost " << r.total_cost
      << '\n';
  return kExitOk;
}

}  // namespace gridfreq
