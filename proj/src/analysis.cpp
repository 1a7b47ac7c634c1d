#include "gridfreq/analysis.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <iomanip>
#include <limits>
#include <mutex>
#include <ostream>
#include <thread>

#include "gridfreq/dispatch.hpp"
#include "gridfreq/error.hpp"

namespace gridfreq {

namespace {

constexpr int kNewtonMaxIter = 100;

void check_balanced(const Vec& p0) {
  if (std::abs(p0.sum()) > 1e-9 * std::max(1.0, p0.cwiseAbs().maxCoeff())) {
    throw Error(ErrorKind::Unbalanced, "unbalanced initial power");
  }
}

Vec marginals(const CostModel& cost, const Vec& u) {
  Vec g(u.size());
  for (Eigen::Index j = 0; j < u.size(); ++j) g[j] = cost.marginal(static_cast<std::size_t>(j), u[j]);
  return g;
}

SweepRow predict_row(const GridSpec& grid, const std::vector<Perturbation>& perturbations,
                     const SweepOptions& options, double h) {
  const Vec p0 = grid.initial_power();
  const Vec p = injections_at(grid, perturbations, std::numeric_limits<double>::infinity());
  const CostModel& cost = options.controller.cost;
  Vec u;
  if (cost.family() == CostFamily::Quadratic) {
    u = steady_state_predict(grid, gains(cost, h), p0, p).u;
  } else {
    u = steady_state_predict_convex(grid, cost, h, p0, p).u;
  }
  SweepRow row;
  row.h = h;
  row.cost = evaluate_cost(u, cost);
  return row;
}

SweepRow simulate_row(const GridSpec& grid, const std::vector<Perturbation>& perturbations,
                      const SweepOptions& options, double h) {
  ControllerSpec spec = options.controller;
  spec.gain = h;
  const Controller controller(spec, grid, options.comm);
  const Trajectory traj = simulate(grid, perturbations, controller, options.sim);
  SweepRow row;
  row.h = h;
  row.cost = evaluate_cost(traj.final_state().u, spec.cost);
  row.converged = traj.converged;
  return row;
}

}  // namespace

SteadyPrediction steady_state_predict(const GridSpec& grid, const Vec& gains, const Vec& p0,
                                      const Vec& p) {
  check_balanced(p0);
  if ((gains.array() <= 0.0).any()) {
    throw Error(ErrorKind::Validation, "steady_state_predict: gains must be > 0");
  }
  const auto n = static_cast<Eigen::Index>(grid.num_nodes());
  const Mat system =
      Mat::Identity(n, n) + weighted_laplacian(grid) * gains.cwiseInverse().asDiagonal();
  const Eigen::FullPivLU<Mat> lu(system);
  if (!lu.isInvertible()) throw Error(ErrorKind::Singular, "steady-state system is singular");
  SteadyPrediction out;
  out.u = lu.solve(p0 - p);
  out.angle_shift = -gains.cwiseInverse().cwiseProduct(out.u);
  return out;
}

SteadyPrediction steady_state_predict_convex(const GridSpec& grid, const CostModel& cost,
                                             double h, const Vec& p0, const Vec& p) {
  check_balanced(p0);
  if (!(h > 0.0)) throw Error(ErrorKind::Validation, "controller gain h must be > 0");
  const auto n = static_cast<Eigen::Index>(grid.num_nodes());
  const Mat laplacian = weighted_laplacian(grid);
  const Vec delta = p - p0;
  auto residual = [&](const Vec& u) -> Vec { return u + laplacian * marginals(cost, u) / h + delta; };

  // The optimal dispatch is balanced and has equal marginals, so it already
  // zeroes the network term; a good starting point.
  Vec u = optimal_convex(cost, std::nullopt, delta.sum()).u;
  Vec r = residual(u);
  const double tol = 1e-13 * std::max(1.0, delta.cwiseAbs().maxCoeff());
  for (int iter = 0; iter < kNewtonMaxIter && r.cwiseAbs().maxCoeff() > tol; ++iter) {
    Vec slope(n);
    for (Eigen::Index j = 0; j < n; ++j) slope[j] = cost.marginal_slope(static_cast<std::size_t>(j), u[j]);
    const Mat jac = Mat::Identity(n, n) + laplacian * slope.asDiagonal() / h;
    const Eigen::FullPivLU<Mat> lu(jac);
    if (!lu.isInvertible()) throw Error(ErrorKind::Singular, "Newton Jacobian is singular");
    const Vec du = lu.solve(-r);
    double t = 1.0;
    const double norm = r.norm();
    Vec trial = u + du;
    Vec trial_r = residual(trial);
    while (trial_r.norm() > (1.0 - 1e-4 * t) * norm && t > 1e-10) {
      t *= 0.5;
      trial = u + t * du;
      trial_r = residual(trial);
    }
    u = std::move(trial);
    r = std::move(trial_r);
  }
  if (r.cwiseAbs().maxCoeff() > 1e3 * tol) {
    throw Error(ErrorKind::Singular, "convex steady-state solve did not converge");
  }
  SteadyPrediction out;
  out.u = u;
  out.angle_shift = -marginals(cost, u) / h;
  return out;
}

double scaling_equivalence(const GridSpec& grid, const std::vector<Perturbation>& perturbations,
                           double h, double alpha) {
  if (!(alpha > 0.0)) throw Error(ErrorKind::Validation, "alpha must be > 0");
  const Vec p0 = grid.initial_power();
  const Vec p = injections_at(grid, perturbations, std::numeric_limits<double>::infinity());
  const CostModel cost = CostModel::quadratic(grid.cost_coefficients());
  const Vec scaled_lines = steady_state_predict(grid.scaled(alpha), gains(cost, h), p0, p).u;
  const Vec scaled_gain = steady_state_predict(grid, gains(cost, h / alpha), p0, p).u;
  return (scaled_lines - scaled_gain).cwiseAbs().maxCoeff();
}

double convergence_time(const Trajectory& trajectory, const Vec& u_final, double eps_rel) {
  if (!trajectory.converged) {
    throw Error(ErrorKind::NotConverged, "trajectory did not reach steady state");
  }
  const double band = eps_rel * u_final.cwiseAbs().maxCoeff();
  const auto& samples = trajectory.samples;
  for (std::size_t i = samples.size(); i-- > 0;) {
    if ((samples[i].u - u_final).cwiseAbs().maxCoeff() > band) {
      return i + 1 < samples.size() ? samples[i + 1].t : samples[i].t;
    }
  }
  return samples.empty() ? 0.0 : samples.front().t;
}

double total_abs_change(const std::vector<Perturbation>& perturbations) {
  double total = 0.0;
  for (const auto& d : perturbations) total += std::abs(d.delta_p);
  return total;
}

std::vector<SweepRow> gain_sweep(const GridSpec& grid,
                                 const std::vector<Perturbation>& perturbations,
                                 const std::vector<double>& h_list, const SweepOptions& options) {
  if (h_list.empty()) throw Error(ErrorKind::Usage, "gain sweep needs at least one h");
  for (double h : h_list) {
    if (!(h > 0.0)) throw Error(ErrorKind::Validation, "sweep gains must be > 0");
  }
  const auto& spec = options.controller;
  const bool has_predictor =
      (spec.kind == ControllerKind::Decentralized || spec.kind == ControllerKind::ConvexPrice) &&
      !spec.capacity;
  const bool use_sim = options.use_sim || !has_predictor;

  double delta_total = 0.0;
  for (const auto& d : perturbations) delta_total += d.delta_p;
  const double optimal = optimal_convex(spec.cost, spec.capacity, delta_total).total_cost;
  const double dp = total_abs_change(perturbations);
  const SpectralSummary spectral = spectral_summary(grid);

  std::vector<SweepRow> rows(h_list.size());
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto worker = [&] {
    for (std::size_t i = next++; i < h_list.size(); i = next++) {
      try {
        SweepRow row = use_sim ? simulate_row(grid, perturbations, options, h_list[i])
                               : predict_row(grid, perturbations, options, h_list[i]);
        row.optimal = optimal;
        row.gap = row.cost - optimal;
        row.bound = theorem1_bound(dp, grid.num_nodes(), row.h, spectral.b_min,
                                   spectral.lambda2_unweighted);
        rows[i] = row;
      } catch (...) {
        const std::lock_guard lock(failure_mutex);
        if (!failure) failure = std::current_exception();
      }
    }
  };
  const unsigned threads =
      std::max(1u, std::min<unsigned>(options.threads, static_cast<unsigned>(h_list.size())));
  if (threads == 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (unsigned t = 0; t < threads; ++t) pool.emplace_back(worker);
  }
  if (failure) std::rethrow_exception(failure);
  return rows;
}

void write_sweep_csv(std::ostream& out, const std::vector<SweepRow>& rows) {
  out << "h,cost,optimal,gap,bound\n" << std::setprecision(17);
  for (const auto& r : rows) {
    out << r.h << ',' << r.cost << ',' << r.optimal << ',' << r.gap << ',' << r.bound << '\n';
  }
}

void write_sweep_plot(std::ostream& out, const std::vector<SweepRow>& rows) {
  out << "# h cost\n" << std::setprecision(6);
  for (const auto& r : rows) out << r.h << ' ' << r.cost << '\n';
}

}  // namespace gridfreq
