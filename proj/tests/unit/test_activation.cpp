#include "doctest.h"
#include "oracles.hpp"

#include "delenox/activation.hpp"

using namespace delenox;

TEST_CASE("activations agree with their closed forms") {
  for (ActivationKind kind : kAllActivations) {
    for (double x = -6.0; x <= 6.0; x += 0.037) {
      CHECK(activate(kind, x) == doctest::Approx(oracle::activation(kind, x)).epsilon(1e-15));
    }
  }
}

TEST_CASE("activations are bounded in [0,1] including extreme inputs") {
  for (ActivationKind kind : kAllActivations) {
    for (double x : {-1e308, -1e6, -50.0, -1.0, 0.0, 1.0, 50.0, 1e6, 1e308}) {
      const double y = activate(kind, x);
      CHECK(y >= 0.0);
      CHECK(y <= 1.0);
    }
  }
}

TEST_CASE("spot values") {
  CHECK(activate(ActivationKind::Sigmoid, 0.0) == 0.5);
  CHECK(activate(ActivationKind::Gaussian, 0.0) == 1.0);
  CHECK(activate(ActivationKind::Abs, -0.25) == 0.25);
  CHECK(activate(ActivationKind::Abs, -3.0) == 1.0);
  CHECK(activate(ActivationKind::Sine, 0.5) == doctest::Approx(1.0));
  CHECK(activate(ActivationKind::Linear, -0.5) == 0.0);
  CHECK(activate(ActivationKind::Linear, 0.3) == 0.3);
  CHECK(activate(ActivationKind::Step, 0.0) == 0.5);
  CHECK(activate(ActivationKind::Step, 0.5) > 0.9999);
}

TEST_CASE("names round-trip") {
  for (ActivationKind kind : kAllActivations) {
    auto parsed = parse_activation(to_string(kind));
    REQUIRE(parsed.has_value());
    CHECK(*parsed == kind);
  }
  CHECK_FALSE(parse_activation("relu").has_value());
}
