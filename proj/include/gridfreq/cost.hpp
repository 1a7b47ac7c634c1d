#pragma once

#include <functional>
#include <optional>
#include <string_view>

#include "gridfreq/grid.hpp"

namespace gridfreq {

enum class CostFamily { Quadratic, PowerLaw, Custom };

std::string_view to_string(CostFamily family);
CostFamily cost_family_from_string(std::string_view name);

/// Scalar callbacks for a user-defined per-node cost. Each receives the node
/// index first. All three must be consistent: marginal = d value / du and
/// inverse_marginal is the inverse of marginal.
struct CustomCost {
  std::function<double(std::size_t, double)> value;
  std::function<double(std::size_t, double)> marginal;
  std::function<double(std::size_t, double)> inverse_marginal;
  std::function<double(std::size_t, double)> marginal_slope;
};

/// Per-node strictly convex cost f_j with f_j(0) = 0.
///
/// PowerLaw: f_j(u) = a_j |u|^gamma / gamma; Quadratic is gamma = 2.
class CostModel {
 public:
  static CostModel quadratic(Vec a);
  static CostModel power_law(Vec a, double gamma);
  static CostModel custom(Vec a, CustomCost callbacks);

  CostFamily family() const { return family_; }
  double gamma() const { return gamma_; }
  const Vec& coefficients() const { return a_; }
  std::size_t size() const { return static_cast<std::size_t>(a_.size()); }

  double value(std::size_t j, double u) const;
  /// g_j(u) = f_j'(u).
  double marginal(std::size_t j, double u) const;
  /// g_j^{-1}(v).
  double inverse_marginal(std::size_t j, double v) const;
  /// g_j'(u); zero is allowed at u = 0 for gamma > 2.
  double marginal_slope(std::size_t j, double u) const;

 private:
  CostModel(CostFamily family, Vec a, double gamma)
      : family_(family), a_(std::move(a)), gamma_(gamma) {}

  CostFamily family_;
  Vec a_;
  double gamma_;
  std::optional<CustomCost> custom_;
};

/// Per-node admissible range [lower_j, upper_j] for u_j; must contain 0.
struct Capacity {
  Vec lower;
  Vec upper;

  double clamp(std::size_t j, double u) const;
};

}  // namespace gridfreq
