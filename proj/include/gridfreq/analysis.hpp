#pragma once

#include <iosfwd>
#include <optional>
#include <vector>

#include "gridfreq/comm.hpp"
#include "gridfreq/control.hpp"
#include "gridfreq/dynamics.hpp"
#include "gridfreq/grid.hpp"

namespace gridfreq {

struct SteadyPrediction {
  Vec u;
  Vec angle_shift;  // theta - theta0
};

/// Steady state of the decentralized integral law: solves
/// (I + C B C^T K^{-1}) u = p0 - p, with theta - theta0 = -K^{-1} u.
/// Throws Singular if the system cannot be factored.
SteadyPrediction steady_state_predict(const GridSpec& grid, const Vec& gains, const Vec& p0,
                                      const Vec& p);

/// Steady state of the convex-price law without capacity limits. Newton's
/// method on u + C B C^T g(u) / h + p - p0 = 0, where g is the marginal cost.
/// Reduces to steady_state_predict for quadratic costs.
SteadyPrediction steady_state_predict_convex(const GridSpec& grid, const CostModel& cost,
                                             double h, const Vec& p0, const Vec& p);

/// ||u(alpha B, h) - u(B, h / alpha)||_inf for the grid's quadratic costs.
double scaling_equivalence(const GridSpec& grid, const std::vector<Perturbation>& perturbations,
                           double h, double alpha);

/// Earliest sample time after which every sample stays within
/// eps_rel * max|u_final| of u_final. Throws NotConverged for an unconverged run.
double convergence_time(const Trajectory& trajectory, const Vec& u_final, double eps_rel = 0.01);

struct SweepRow {
  double h = 0.0;
  double cost = 0.0;
  double optimal = 0.0;
  double gap = 0.0;
  double bound = 0.0;
  bool converged = true;
};

struct SweepOptions {
  ControllerSpec controller;       // gain is overwritten per row
  std::optional<CommGraph> comm;   // averaging only
  bool use_sim = false;
  SimConfig sim;
  unsigned threads = 1;
};

/// One row per gain. Decentralized and convex-price controllers without
/// capacity use the steady-state predictor unless use_sim is set; all other
/// controllers are always simulated.
std::vector<SweepRow> gain_sweep(const GridSpec& grid,
                                 const std::vector<Perturbation>& perturbations,
                                 const std::vector<double>& h_list, const SweepOptions& options);

/// Sum of |delta_p| over all perturbations.
double total_abs_change(const std::vector<Perturbation>& perturbations);

/// Header h,cost,optimal,gap,bound.
void write_sweep_csv(std::ostream& out, const std::vector<SweepRow>& rows);

/// Two whitespace-separated columns (h, cost) at 6 significant digits.
void write_sweep_plot(std::ostream& out, const std::vector<SweepRow>& rows);

}  // namespace gridfreq
