#include "gridfreq/dispatch.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "gridfreq/error.hpp"

namespace gridfreq {

namespace {

constexpr int kMaxBisection = 200;
constexpr int kMaxDoubling = 1100;

Vec response(const CostModel& cost, const std::optional<Capacity>& capacity, double price) {
  Vec u(static_cast<Eigen::Index>(cost.size()));
  for (std::size_t j = 0; j < cost.size(); ++j) {
    double uj = cost.inverse_marginal(j, price);
    if (capacity) uj = capacity->clamp(j, uj);
    u[static_cast<Eigen::Index>(j)] = uj;
  }
  return u;
}

}  // namespace

DispatchResult optimal_quadratic(const Vec& a, double delta_total) {
  const double inv_sum = a.cwiseInverse().sum();
  DispatchResult r;
  r.price = -delta_total / inv_sum;
  r.u = r.price * a.cwiseInverse();
  r.total_cost = 0.5 * r.price * r.price * inv_sum;
  return r;
}

DispatchResult optimal_convex(const CostModel& cost, const std::optional<Capacity>& capacity,
                              double delta_total) {
  const double target = -delta_total;
  const double tol = 1e-12 * std::max(1.0, std::abs(target));
  if (capacity) {
    if (target < capacity->lower.sum() - tol || target > capacity->upper.sum() + tol) {
      throw Error(ErrorKind::Infeasible, "capacity limits cannot balance the disturbance");
    }
  }

  double lo = -1.0, hi = 1.0;
  for (int i = 0; i < kMaxDoubling && response(cost, capacity, lo).sum() > target; ++i) lo *= 2.0;
  for (int i = 0; i < kMaxDoubling && response(cost, capacity, hi).sum() < target; ++i) hi *= 2.0;

  double price = 0.5 * (lo + hi);
  for (int i = 0; i < kMaxBisection; ++i) {
    price = 0.5 * (lo + hi);
    const double excess = response(cost, capacity, price).sum() - target;
    if (std::abs(excess) <= tol) break;
    (excess < 0.0 ? lo : hi) = price;
    if (hi - lo <= 4.0 * std::numeric_limits<double>::epsilon() * std::abs(price)) break;
  }

  DispatchResult r;
  r.price = price;
  r.u = response(cost, capacity, price);
  r.total_cost = evaluate_cost(r.u, cost);
  return r;
}

double evaluate_cost(const Vec& u, const CostModel& cost) {
  double total = 0.0;
  for (Eigen::Index j = 0; j < u.size(); ++j) {
    total += cost.value(static_cast<std::size_t>(j), u[j]);
  }
  return total;
}

double theorem1_bound(double delta_p, std::size_t n, double h, double b, double lambda2) {
  if (!(h > 0.0) || !(b > 0.0) || !(lambda2 > 0.0)) {
    throw Error(ErrorKind::Validation, "bound needs h, b, lambda2 > 0");
  }
  return 4.0 * delta_p * delta_p * static_cast<double>(n) * h / (b * lambda2);
}

double marginal_spread(const Vec& u, const CostModel& cost) {
  double lo = std::numeric_limits<double>::infinity();
  double hi = -lo;
  for (Eigen::Index j = 0; j < u.size(); ++j) {
    const double g = cost.marginal(static_cast<std::size_t>(j), u[j]);
    lo = std::min(lo, g);
    hi = std::max(hi, g);
  }
  return hi - lo;
}

}  // namespace gridfreq
