#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "dcidc/activation.hpp"
#include "dcidc/error.hpp"
#include "dcidc/rng.hpp"

using namespace dcidc;

namespace {
double central_difference(Activation kind, double y, double h = 1e-5) {
  return (activate(kind, y + h) - activate(kind, y - h)) / (2 * h);
}
}  // namespace

TEST_CASE("values at the origin") {
  CHECK(activate(Activation::Tanh, 0.0) == 0.0);
  CHECK(activate(Activation::Sigmoid, 0.0) == 0.5);
  CHECK(activate(Activation::Softplus, 0.0) == doctest::Approx(0.693147).epsilon(1e-6));
  CHECK(activate(Activation::Nssigmoid, 0.0) == 0.0);
  CHECK(activate_derivative(Activation::Tanh, 0.0) == 1.0);
  CHECK(activate_derivative(Activation::Sigmoid, 0.0) == 0.25);
  CHECK(activate_derivative(Activation::Nssigmoid, 0.0) == 1.0);
  CHECK(activate_derivative(Activation::Softplus, 0.0) == 0.5);
}

TEST_CASE("derivative matches finite differences") {
  for (Activation kind : kAllActivations) {
    CAPTURE(to_string(kind));
    CHECK(std::abs(activate_derivative(kind, 0.37) - central_difference(kind, 0.37)) < 1e-6);
    Rng rng(42);
    double worst = 0.0;
    for (int i = 0; i < 1000; ++i) {
      const double y = rng.uniform(-5.0, 5.0);
      worst = std::max(worst, std::abs(activate_derivative(kind, y) - central_difference(kind, y)));
    }
    CHECK(worst < 1e-6);
  }
}

TEST_CASE("ranges") {
  Rng rng(7);
  for (int i = 0; i < 1000; ++i) {
    const double y = rng.uniform(-30.0, 30.0);
    const double s = activate(Activation::Sigmoid, y);
    const double t = activate(Activation::Tanh, y * 0.1);
    CHECK((s > 0.0 && s < 1.0));
    CHECK((t > -1.0 && t < 1.0));
    CHECK(activate(Activation::Softplus, y) >= 0.0);
    CHECK(std::abs(activate(Activation::Nssigmoid, y)) < 1.0);
  }
}

TEST_CASE("softplus does not overflow") {
  CHECK(activate(Activation::Softplus, 1000.0) == doctest::Approx(1000.0));
  CHECK(activate(Activation::Softplus, -1000.0) == doctest::Approx(0.0));
  CHECK(std::isfinite(activate(Activation::Sigmoid, -1000.0)));
}

TEST_CASE("matrix forms apply elementwise") {
  const Matrix y{{0.0, 1.0}, {-2.0, 3.0}};
  for (Activation kind : kAllActivations) {
    const Matrix a = apply(kind, y);
    const Matrix d = derivative(kind, y);
    for (std::size_t i = 0; i < y.size(); ++i) {
      CHECK(a.values()[i] == activate(kind, y.values()[i]));
      CHECK(d.values()[i] == activate_derivative(kind, y.values()[i]));
    }
  }
}

TEST_CASE("names round-trip") {
  for (Activation kind : kAllActivations) CHECK(parse_activation(to_string(kind)) == kind);
  CHECK_THROWS_AS(parse_activation("relu"), ConfigError);
}
