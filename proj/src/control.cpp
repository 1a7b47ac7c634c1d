#include "gridfreq/control.hpp"

#include <cmath>
#include <string>
#include <utility>

#include "gridfreq/error.hpp"

namespace gridfreq {

std::string_view to_string(ControllerKind kind) {
  switch (kind) {
    case ControllerKind::Decentralized: return "decentralized";
    case ControllerKind::Averaging: return "averaging";
    case ControllerKind::ConvexPrice: return "convex_price";
    case ControllerKind::Delayed: return "delayed";
  }
  return "unknown";
}

ControllerKind controller_kind_from_string(std::string_view name) {
  if (name == "decentralized") return ControllerKind::Decentralized;
  if (name == "averaging") return ControllerKind::Averaging;
  if (name == "convex_price") return ControllerKind::ConvexPrice;
  if (name == "delayed") return ControllerKind::Delayed;
  throw Error(ErrorKind::Validation, "unknown controller kind '" + std::string(name) + "'");
}

void ControllerSpec::validate(std::size_t num_nodes) const {
  if (!(gain > 0.0) || !std::isfinite(gain)) {
    throw Error(ErrorKind::Validation, "controller gain h must be > 0");
  }
  if (!(delay >= 0.0) || !std::isfinite(delay)) {
    throw Error(ErrorKind::Validation, "controller delay T must be >= 0");
  }
  if (cost.size() != num_nodes) {
    throw Error(ErrorKind::Validation, "cost model size does not match node count");
  }
  if (kind != ControllerKind::ConvexPrice && cost.family() != CostFamily::Quadratic) {
    throw Error(ErrorKind::WrongFamily,
                std::string(to_string(kind)) + " controller requires a quadratic cost");
  }
  if (capacity) {
    if (kind != ControllerKind::ConvexPrice) {
      throw Error(ErrorKind::Validation,
                  "capacity limits are only supported by the convex_price controller");
    }
    const auto n = static_cast<Eigen::Index>(num_nodes);
    if (capacity->lower.size() != n || capacity->upper.size() != n) {
      throw Error(ErrorKind::Validation, "capacity arrays must have one entry per node");
    }
    for (Eigen::Index j = 0; j < n; ++j) {
      if (!(capacity->lower[j] <= 0.0 && 0.0 <= capacity->upper[j])) {
        throw Error(ErrorKind::Validation,
                    "capacity box of node " + std::to_string(j + 1) + " must contain 0");
      }
    }
  }
}

Vec gains(const CostModel& cost, double h) {
  if (cost.family() != CostFamily::Quadratic) {
    throw Error(ErrorKind::WrongFamily, "integral gains need a quadratic cost");
  }
  if (!(h > 0.0)) throw Error(ErrorKind::Validation, "controller gain h must be > 0");
  return h * cost.coefficients().cwiseInverse();
}

Vec integral_law(const Vec& omega, const Vec& gains) {
  return -gains.cwiseProduct(omega);
}

Vec averaging_law(const Vec& omega, const Vec& gains, const Vec& u, const CostModel& cost,
                  const std::vector<std::vector<std::size_t>>& surviving_neighbors,
                  const BridgeSets& bridges) {
  Vec rate = integral_law(omega, gains);
  const auto n = static_cast<std::size_t>(u.size());
  Vec price(u.size());
  for (std::size_t j = 0; j < n; ++j) price[j] = cost.marginal(j, u[j]);
  for (std::size_t j = 0; j < n; ++j) {
    if (bridges.in_v_star(j)) continue;
    double consensus = 0.0;
    for (auto k : surviving_neighbors[j]) consensus += price[j] - price[k];
    rate[j] -= consensus;
  }
  return rate;
}

Vec price_law(const Vec& omega, double h) { return -h * omega; }

Vec power_from_price(const Vec& v, const CostModel& cost,
                     const std::optional<Capacity>& capacity) {
  Vec u(v.size());
  for (Eigen::Index j = 0; j < v.size(); ++j) {
    const auto jj = static_cast<std::size_t>(j);
    u[j] = cost.inverse_marginal(jj, v[j]);
    if (capacity) u[j] = capacity->clamp(jj, u[j]);
  }
  return u;
}

Vec delayed_law(double t, double delay, const Vec& omega, const Vec& gains) {
  if (t <= delay) return Vec::Zero(omega.size());
  return integral_law(omega, gains);
}

Controller::Controller(ControllerSpec spec, const GridSpec& grid,
                       std::optional<CommGraph> comm)
    : spec_(std::move(spec)), comm_(std::move(comm)) {
  spec_.validate(grid.num_nodes());
  if (!integrates_price()) gains_ = gridfreq::gains(spec_.cost, spec_.gain);
  if (spec_.kind == ControllerKind::Averaging) {
    if (!comm_) comm_ = CommGraph::mirror(grid);
    bridges_ = bridging_sets(*comm_, grid);
    neighbors_ = comm_->surviving_neighbors();
  }
}

Vec Controller::state_rate(double t, const Vec& omega, const Vec& control_state) const {
  switch (spec_.kind) {
    case ControllerKind::Decentralized: return integral_law(omega, gains_);
    case ControllerKind::Averaging:
      return averaging_law(omega, gains_, control_state, spec_.cost, neighbors_, *bridges_);
    case ControllerKind::ConvexPrice: return price_law(omega, spec_.gain);
    case ControllerKind::Delayed: return delayed_law(t, spec_.delay, omega, gains_);
  }
  return Vec::Zero(omega.size());
}

Vec Controller::power(const Vec& control_state) const {
  if (integrates_price()) return power_from_price(control_state, spec_.cost, spec_.capacity);
  return control_state;
}

}  // namespace gridfreq
