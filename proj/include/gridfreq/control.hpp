#pragma once

#include <optional>
#include <string_view>

#include "gridfreq/comm.hpp"
#include "gridfreq/cost.hpp"
#include "gridfreq/grid.hpp"

namespace gridfreq {

enum class ControllerKind { Decentralized, Averaging, ConvexPrice, Delayed };

std::string_view to_string(ControllerKind kind);
ControllerKind controller_kind_from_string(std::string_view name);

struct ControllerSpec {
  ControllerKind kind = ControllerKind::Decentralized;
  double gain = 1.0;   // h
  double delay = 0.0;  // T, delayed controller only
  CostModel cost = CostModel::quadratic(Vec::Ones(2));
  std::optional<Capacity> capacity;  // convex-price controller only

  /// Throws Validation on h <= 0, T < 0, size mismatch, or a capacity box
  /// that excludes 0.
  void validate(std::size_t num_nodes) const;
};

/// K_j = h / a_j. Quadratic costs only (WrongFamily otherwise).
Vec gains(const CostModel& cost, double h);

/// du/dt = -K omega.
Vec integral_law(const Vec& omega, const Vec& gains);

/// Integral law at nodes in V*, integral law plus unit-gain marginal-cost
/// consensus over surviving links elsewhere.
Vec averaging_law(const Vec& omega, const Vec& gains, const Vec& u, const CostModel& cost,
                  const std::vector<std::vector<std::size_t>>& surviving_neighbors,
                  const BridgeSets& bridges);

/// dv/dt = -h omega.
Vec price_law(const Vec& omega, double h);

/// u_j = clamp(g_j^{-1}(v_j)).
Vec power_from_price(const Vec& v, const CostModel& cost,
                     const std::optional<Capacity>& capacity);

/// Zero rate up to and including t = T, integral law afterwards.
Vec delayed_law(double t, double delay, const Vec& omega, const Vec& gains);

/// A controller bound to a grid and (for averaging) a communication graph.
/// The integrated controller state is u for the integral families and the
/// virtual price v for the convex-price family.
class Controller {
 public:
  Controller(ControllerSpec spec, const GridSpec& grid,
             std::optional<CommGraph> comm = std::nullopt);

  const ControllerSpec& spec() const { return spec_; }
  bool integrates_price() const { return spec_.kind == ControllerKind::ConvexPrice; }
  const Vec& gains() const { return gains_; }
  const BridgeSets* bridges() const { return bridges_ ? &*bridges_ : nullptr; }

  /// Rate of the integrated controller state.
  Vec state_rate(double t, const Vec& omega, const Vec& control_state) const;

  /// Controllable power implied by the integrated controller state.
  Vec power(const Vec& control_state) const;

 private:
  ControllerSpec spec_;
  Vec gains_;
  std::optional<CommGraph> comm_;
  std::optional<BridgeSets> bridges_;
  std::vector<std::vector<std::size_t>> neighbors_;
};

}  // namespace gridfreq
