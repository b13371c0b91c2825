#include "delenox/activation.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace delenox {

namespace {

double logistic(double x) { return 1.0 / (1.0 + std::exp(-x)); }

}  // namespace

double activate(ActivationKind kind, double x) {
  switch (kind) {
    case ActivationKind::Sigmoid:
      return logistic(x);
    case ActivationKind::Gaussian:
      return std::exp(-x * x);
    case ActivationKind::Abs:
      return std::min(1.0, std::fabs(x));
    case ActivationKind::Sine:
      // Past 2^53 every double is an even integer, so sin(pi x) is 0; pi * x
      // would overflow to inf near the top of the range.
      if (!(std::fabs(x) < 0x1p53)) return 0.5;
      return 0.5 * (std::sin(std::numbers::pi * x) + 1.0);
    case ActivationKind::Linear:
      return std::clamp(x, 0.0, 1.0);
    case ActivationKind::Step:
      return logistic(20.0 * x);
  }
  return 0.0;
}

std::string_view to_string(ActivationKind kind) {
  switch (kind) {
    case ActivationKind::Sigmoid: return "sigmoid";
    case ActivationKind::Gaussian: return "gaussian";
    case ActivationKind::Abs: return "abs";
    case ActivationKind::Sine: return "sine";
    case ActivationKind::Linear: return "linear";
    case ActivationKind::Step: return "step";
  }
  return "?";
}

std::optional<ActivationKind> parse_activation(std::string_view name) {
  for (ActivationKind kind : kAllActivations) {
    if (to_string(kind) == name) return kind;
  }
  return std::nullopt;
}

}  // namespace delenox
