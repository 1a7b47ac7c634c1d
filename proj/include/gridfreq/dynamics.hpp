#pragma once

#include <cstddef>
#include <iosfwd>
#include <vector>

#include "gridfreq/control.hpp"
#include "gridfreq/grid.hpp"

namespace gridfreq {

/// Snapshot of the network. `omega` holds the generator states and the
/// algebraically determined load frequencies. `v` is only meaningful for the
/// convex-price controller and stays zero otherwise.
struct SystemState {
  double t = 0.0;
  Vec theta;
  Vec omega;
  Vec u;
  Vec v;
};

struct SimConfig {
  double dt = 1e-3;
  double t_max = 2000.0;
  double steady_eps = 1e-6;
  std::size_t sample_every = 100;
  double steady_window = 5.0;  // seconds the steady condition must hold

  void validate() const;
};

/// Step change of the fixed injection at `node` by `delta_p` from `at_time` on.
struct Perturbation {
  std::size_t node = 0;
  double delta_p = 0.0;
  double at_time = 0.0;
};

struct Trajectory {
  std::vector<SystemState> samples;  // strictly increasing t, final state last
  bool converged = false;
  double steady_since = 0.0;  // start of the steady window when converged

  const SystemState& final_state() const { return samples.back(); }
};

/// Time derivative of the differential states. `control` is the rate of the
/// controller's integrated state (u or v). `omega` at load nodes is zero;
/// `frequency` is the per-node frequency deviation (state or algebraic).
struct StateRate {
  Vec theta;
  Vec omega;
  Vec control;
  Vec frequency;
};

/// Fixed injections p(t) = p0 + every perturbation with at_time <= t.
Vec injections_at(const GridSpec& grid, const std::vector<Perturbation>& perturbations,
                  double t);

/// theta0 = (C B C^T)^+ p0 with omega = u = v = 0. Throws Unbalanced when
/// sum(p0) != 0.
SystemState initial_steady_state(const GridSpec& grid);

/// Swing dynamics at generators, algebraic frequency at loads, controller rate
/// from `controller`. `p` is the current fixed injection vector.
StateRate rhs(const SystemState& state, const Vec& p, const GridSpec& grid,
              const Controller& controller);

/// Classical RK4 advance by `dt` with `p` held constant. Throws NonFinite.
SystemState step(const SystemState& state, const Vec& p, const GridSpec& grid,
                 const Controller& controller, double dt);

/// Integrates from the pre-disturbance steady state until t_max or until
/// max|omega|, max|du/dt| and |sum(p + u)| all stay below steady_eps for
/// steady_window seconds after the last perturbation. A run that hits t_max
/// returns with converged = false.
Trajectory simulate(const GridSpec& grid, const std::vector<Perturbation>& perturbations,
                    const Controller& controller, const SimConfig& sim);

/// CSV with header t,theta_1..theta_n,omega_1..omega_n,u_1..u_n.
void write_trajectory_csv(std::ostream& out, const Trajectory& trajectory);

}  // namespace gridfreq
