#include "gridfreq/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <ostream>
#include <string>

#include "gridfreq/error.hpp"

namespace gridfreq {

namespace {

/// C B C^T theta, accumulated line by line.
Vec network_outflow(const GridSpec& grid, const Vec& theta) {
  Vec out = Vec::Zero(theta.size());
  for (const auto& l : grid.lines()) {
    const double flow = l.susceptance * (theta[l.from] - theta[l.to]);
    out[l.from] += flow;
    out[l.to] -= flow;
  }
  return out;
}

const Vec& control_state(const SystemState& s, const Controller& c) {
  return c.integrates_price() ? s.v : s.u;
}

/// s + h * k, with u refreshed from the controller state.
SystemState advance(const SystemState& s, const StateRate& k, double h, const Controller& c) {
  SystemState out;
  out.t = s.t + h;
  out.theta = s.theta + h * k.theta;
  out.omega = s.omega + h * k.omega;
  if (c.integrates_price()) {
    out.v = s.v + h * k.control;
    out.u = c.power(out.v);
  } else {
    out.u = s.u + h * k.control;
    out.v = s.v;
  }
  return out;
}

bool all_finite(const SystemState& s) {
  return s.theta.allFinite() && s.omega.allFinite() && s.u.allFinite() && s.v.allFinite();
}

}  // namespace

void SimConfig::validate() const {
  if (!(dt > 0.0)) throw Error(ErrorKind::Validation, "sim.dt must be > 0");
  if (!(t_max > dt)) throw Error(ErrorKind::Validation, "sim.t_max must exceed dt");
  if (!(steady_eps > 0.0)) throw Error(ErrorKind::Validation, "sim.steady_eps must be > 0");
  if (sample_every == 0) throw Error(ErrorKind::Validation, "sim.sample_every must be >= 1");
  if (!(steady_window >= 0.0)) {
    throw Error(ErrorKind::Validation, "sim.steady_window must be >= 0");
  }
}

Vec injections_at(const GridSpec& grid, const std::vector<Perturbation>& perturbations,
                  double t) {
  Vec p = grid.initial_power();
  for (const auto& d : perturbations) {
    if (d.at_time <= t) p[static_cast<Eigen::Index>(d.node)] += d.delta_p;
  }
  return p;
}

SystemState initial_steady_state(const GridSpec& grid) {
  const Vec p0 = grid.initial_power();
  const double scale = std::max(1.0, p0.cwiseAbs().maxCoeff());
  if (std::abs(p0.sum()) > 1e-9 * scale) {
    throw Error(ErrorKind::Unbalanced, "unbalanced initial power");
  }
  const auto n = static_cast<Eigen::Index>(grid.num_nodes());
  SystemState s;
  s.theta = laplacian_pinv(weighted_laplacian(grid)) * p0;
  s.omega = Vec::Zero(n);
  s.u = Vec::Zero(n);
  s.v = Vec::Zero(n);
  return s;
}

StateRate rhs(const SystemState& state, const Vec& p, const GridSpec& grid,
              const Controller& controller) {
  const auto n = static_cast<Eigen::Index>(grid.num_nodes());
  const Vec imbalance = p + state.u - network_outflow(grid, state.theta);

  StateRate r;
  r.frequency = state.omega;
  r.omega = Vec::Zero(n);
  for (Eigen::Index j = 0; j < n; ++j) {
    const auto& node = grid.nodes()[static_cast<std::size_t>(j)];
    if (node.kind == NodeKind::Load) {
      r.frequency[j] = imbalance[j] / node.damping;
    } else {
      r.omega[j] = (imbalance[j] - node.damping * state.omega[j]) / node.inertia;
    }
  }
  r.theta = r.frequency;
  r.control = controller.state_rate(state.t, r.frequency, control_state(state, controller));
  return r;
}

SystemState step(const SystemState& state, const Vec& p, const GridSpec& grid,
                 const Controller& controller, double dt) {
  if (!(dt > 0.0)) throw Error(ErrorKind::Validation, "step size must be > 0");
  const StateRate k1 = rhs(state, p, grid, controller);
  const StateRate k2 = rhs(advance(state, k1, 0.5 * dt, controller), p, grid, controller);
  const StateRate k3 = rhs(advance(state, k2, 0.5 * dt, controller), p, grid, controller);
  const StateRate k4 = rhs(advance(state, k3, dt, controller), p, grid, controller);

  StateRate sum;
  sum.theta = (k1.theta + 2.0 * k2.theta + 2.0 * k3.theta + k4.theta) / 6.0;
  sum.omega = (k1.omega + 2.0 * k2.omega + 2.0 * k3.omega + k4.omega) / 6.0;
  sum.control = (k1.control + 2.0 * k2.control + 2.0 * k3.control + k4.control) / 6.0;
  SystemState next = advance(state, sum, dt, controller);

  // Loads carry no frequency state; re-solve their algebraic frequency.
  next.omega = rhs(next, p, grid, controller).frequency;
  if (!all_finite(next)) {
    throw Error(ErrorKind::NonFinite,
                "state became non-finite at t=" + std::to_string(next.t) + " (reduce dt)");
  }
  return next;
}

Trajectory simulate(const GridSpec& grid, const std::vector<Perturbation>& perturbations,
                    const Controller& controller, const SimConfig& sim) {
  sim.validate();
  for (const auto& d : perturbations) {
    if (d.node >= grid.num_nodes()) {
      throw Error(ErrorKind::Validation, "perturbation node out of range");
    }
  }

  std::vector<double> events;
  for (const auto& d : perturbations) {
    if (d.at_time > 0.0) events.push_back(d.at_time);
  }
  if (controller.spec().kind == ControllerKind::Delayed && controller.spec().delay > 0.0) {
    events.push_back(controller.spec().delay);
  }
  std::sort(events.begin(), events.end());
  events.erase(std::unique(events.begin(), events.end()), events.end());
  double last_disturbance = 0.0;
  for (const auto& d : perturbations) last_disturbance = std::max(last_disturbance, d.at_time);

  SystemState state = initial_steady_state(grid);
  Vec p = injections_at(grid, perturbations, state.t);
  state.omega = rhs(state, p, grid, controller).frequency;

  Trajectory traj;
  traj.samples.push_back(state);
  auto next_event = events.begin();
  bool in_window = false;
  double window_start = 0.0;
  std::size_t steps = 0;
  const double time_tol = 1e-9 * sim.dt;

  while (state.t < sim.t_max - time_tol) {
    while (next_event != events.end() && *next_event <= state.t + time_tol) ++next_event;
    double h = std::min(sim.dt, sim.t_max - state.t);
    bool hits_event = false;
    if (next_event != events.end() && state.t + h >= *next_event - time_tol) {
      h = *next_event - state.t;
      hits_event = true;
    }

    SystemState next = step(state, p, grid, controller, h);
    if (hits_event) next.t = *next_event;
    const Vec u_rate = (next.u - state.u) / h;
    p = injections_at(grid, perturbations, next.t + time_tol);
    if (hits_event) next.omega = rhs(next, p, grid, controller).frequency;
    state = std::move(next);
    ++steps;

    const bool steady = state.t >= last_disturbance &&
                        state.omega.cwiseAbs().maxCoeff() < sim.steady_eps &&
                        u_rate.cwiseAbs().maxCoeff() < sim.steady_eps &&
                        std::abs((p + state.u).sum()) < sim.steady_eps;
    if (steady && !in_window) {
      in_window = true;
      window_start = state.t;
    } else if (!steady) {
      in_window = false;
    }

    const bool done = in_window && state.t - window_start >= sim.steady_window;
    if (steps % sim.sample_every == 0 || done) traj.samples.push_back(state);
    if (done) {
      traj.converged = true;
      traj.steady_since = window_start;
      break;
    }
  }
  if (traj.samples.back().t < state.t) traj.samples.push_back(state);
  return traj;
}

void write_trajectory_csv(std::ostream& out, const Trajectory& trajectory) {
  if (trajectory.samples.empty()) return;
  const auto n = trajectory.samples.front().theta.size();
  out << "t";
  for (const char* name : {"theta", "omega", "u"}) {
    for (Eigen::Index j = 0; j < n; ++j) out << ',' << name << '_' << (j + 1);
  }
  out << '\n';
  out << std::setprecision(17);
  for (const auto& s : trajectory.samples) {
    out << s.t;
    for (const Vec* v : {&s.theta, &s.omega, &s.u}) {
      for (Eigen::Index j = 0; j < n; ++j) out << ',' << (*v)[j];
    }
    out << '\n';
  }
}

}  // namespace gridfreq
