#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string_view>

namespace delenox {

/// Pattern-producing activation functions. Every one maps the reals into [0,1].
enum class ActivationKind : std::uint8_t {
  Sigmoid,   // 1 / (1 + e^-x)
  Gaussian,  // e^(-x^2)
  Abs,       // min(1, |x|)
  Sine,      // (sin(pi x) + 1) / 2
  Linear,    // clamp(x, 0, 1)
  Step,      // 1 / (1 + e^(-20 x))
};

inline constexpr std::array<ActivationKind, 6> kAllActivations = {
    ActivationKind::Sigmoid, ActivationKind::Gaussian, ActivationKind::Abs,
    ActivationKind::Sine,    ActivationKind::Linear,   ActivationKind::Step,
};

double activate(ActivationKind kind, double x);

std::string_view to_string(ActivationKind kind);
std::optional<ActivationKind> parse_activation(std::string_view name);

}  // namespace delenox
