#pragma once

#include <filesystem>
#include <iosfwd>
#include <vector>

#include "gridfreq/analysis.hpp"
#include "gridfreq/scenario.hpp"

namespace gridfreq {

/// Process exit codes shared by every subcommand.
enum ExitCode : int { kExitOk = 0, kExitInvalid = 1, kExitNoConvergence = 2 };

/// Summary of one simulated scenario.
struct RunReport {
  Vec u;
  double cost = 0.0;
  double optimal = 0.0;  // cheapest dispatch of the same total sum(u)
  double gap = 0.0;
  double bound = 0.0;
  double convergence_time = 0.0;  // NaN when not converged
  double marginal_spread = 0.0;
  std::vector<double> component_prices;  // mean marginal cost per comm component
  bool converged = false;
  bool bound_satisfied = false;
};

/// Simulates the scenario and summarizes the final state.
RunReport run_scenario(const Scenario& scenario, Trajectory* trajectory = nullptr);

void write_report_csv(std::ostream& out, const RunReport& report);

/// Writes trajectory.csv and report.csv into `out_dir`.
int cmd_run(const Scenario& scenario, const std::filesystem::path& out_dir, std::ostream& log);

/// Writes sweep.csv and sweep.dat (h, cost) into `out_dir`.
int cmd_sweep(const Scenario& scenario, const std::vector<double>& h_list, bool use_sim,
              unsigned threads, const std::filesystem::path& out_dir, std::ostream& log);

/// Writes rank.csv: one row per power line, most critical first.
int cmd_rank(const Scenario& scenario, const std::filesystem::path& out_dir, std::ostream& log);

/// Writes dispatch.csv: optimal u and marginal cost per node plus a summary.
int cmd_dispatch(const Scenario& scenario, const std::filesystem::path& out_dir,
                 std::ostream& log);

}  // namespace gridfreq
