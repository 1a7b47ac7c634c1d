#pragma once

#include <optional>

#include "gridfreq/cost.hpp"

namespace gridfreq {

/// Economic dispatch optimum. `delta_total` is the signed total change of the
/// fixed injections; a load increase of P gives delta_total = -P and positive u.
struct DispatchResult {
  Vec u;
  double price = 0.0;  // common marginal cost
  double total_cost = 0.0;
};

DispatchResult optimal_quadratic(const Vec& a, double delta_total);

/// Bisection on the common price; nodes pinned at a capacity bound stop
/// tracking it. Throws Infeasible when the capacity sums exclude -delta_total.
DispatchResult optimal_convex(const CostModel& cost, const std::optional<Capacity>& capacity,
                              double delta_total);

double evaluate_cost(const Vec& u, const CostModel& cost);

/// Worst-case steady cost excess of decentralized integral control:
/// 4 dp^2 n h / (b lambda2).
double theorem1_bound(double delta_p, std::size_t n, double h, double b, double lambda2);

/// max_j g_j(u_j) - min_j g_j(u_j).
double marginal_spread(const Vec& u, const CostModel& cost);

}  // namespace gridfreq
