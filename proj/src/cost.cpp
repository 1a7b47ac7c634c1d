#include "gridfreq/cost.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "gridfreq/error.hpp"

namespace gridfreq {

namespace {

void check_coefficients(const Vec& a) {
  if (a.size() == 0) throw Error(ErrorKind::Validation, "empty cost coefficients");
  for (Eigen::Index j = 0; j < a.size(); ++j) {
    if (!(a[j] > 0.0) || !std::isfinite(a[j])) {
      throw Error(ErrorKind::Validation, "cost coefficients must be > 0");
    }
  }
}

double sign(double x) { return x > 0.0 ? 1.0 : (x < 0.0 ? -1.0 : 0.0); }

}  // namespace

std::string_view to_string(CostFamily family) {
  switch (family) {
    case CostFamily::Quadratic: return "quadratic";
    case CostFamily::PowerLaw: return "power_law";
    case CostFamily::Custom: return "custom";
  }
  return "unknown";
}

CostFamily cost_family_from_string(std::string_view name) {
  if (name == "quadratic") return CostFamily::Quadratic;
  if (name == "power_law") return CostFamily::PowerLaw;
  if (name == "custom") return CostFamily::Custom;
  throw Error(ErrorKind::Validation, "unknown cost family '" + std::string(name) + "'");
}

CostModel CostModel::quadratic(Vec a) {
  check_coefficients(a);
  return CostModel(CostFamily::Quadratic, std::move(a), 2.0);
}

CostModel CostModel::power_law(Vec a, double gamma) {
  check_coefficients(a);
  if (!(gamma > 1.0) || !std::isfinite(gamma)) {
    throw Error(ErrorKind::Validation, "power_law exponent must be > 1");
  }
  return CostModel(CostFamily::PowerLaw, std::move(a), gamma);
}

CostModel CostModel::custom(Vec a, CustomCost callbacks) {
  check_coefficients(a);
  if (!callbacks.value || !callbacks.marginal || !callbacks.inverse_marginal ||
      !callbacks.marginal_slope) {
    throw Error(ErrorKind::Validation, "custom cost needs all four callbacks");
  }
  CostModel model(CostFamily::Custom, std::move(a), 0.0);
  model.custom_ = std::move(callbacks);
  return model;
}

double CostModel::value(std::size_t j, double u) const {
  switch (family_) {
    case CostFamily::Quadratic: return 0.5 * a_[j] * u * u;
    case CostFamily::PowerLaw: return a_[j] * std::pow(std::abs(u), gamma_) / gamma_;
    case CostFamily::Custom: return custom_->value(j, u);
  }
  return 0.0;
}

double CostModel::marginal(std::size_t j, double u) const {
  switch (family_) {
    case CostFamily::Quadratic: return a_[j] * u;
    case CostFamily::PowerLaw:
      return a_[j] * sign(u) * std::pow(std::abs(u), gamma_ - 1.0);
    case CostFamily::Custom: return custom_->marginal(j, u);
  }
  return 0.0;
}

double CostModel::inverse_marginal(std::size_t j, double v) const {
  switch (family_) {
    case CostFamily::Quadratic: return v / a_[j];
    case CostFamily::PowerLaw:
      return sign(v) * std::pow(std::abs(v) / a_[j], 1.0 / (gamma_ - 1.0));
    case CostFamily::Custom: return custom_->inverse_marginal(j, v);
  }
  return 0.0;
}

double CostModel::marginal_slope(std::size_t j, double u) const {
  switch (family_) {
    case CostFamily::Quadratic: return a_[j];
    case CostFamily::PowerLaw:
      return a_[j] * (gamma_ - 1.0) * std::pow(std::abs(u), gamma_ - 2.0);
    case CostFamily::Custom: return custom_->marginal_slope(j, u);
  }
  return 0.0;
}

double Capacity::clamp(std::size_t j, double u) const {
  return std::max(lower[j], std::min(upper[j], u));
}

}  // namespace gridfreq
