#include "dcidc/activation.hpp"

#include <cmath>

#include "dcidc/error.hpp"

namespace dcidc {

namespace {

double sigmoid(double y) {
  if (y >= 0.0) return 1.0 / (1.0 + std::exp(-y));
  const double e = std::exp(y);
  return e / (1.0 + e);
}

double softplus(double y) {
  // log(1 + e^y) without overflow for large y
  if (y > 0.0) return y + std::log1p(std::exp(-y));
  return std::log1p(std::exp(y));
}

template <typename F>
Matrix map(const Matrix& y, F f) {
  Matrix out(y.rows(), y.cols());
  auto src = y.values();
  auto dst = out.values();
  for (std::size_t i = 0; i < src.size(); ++i) dst[i] = f(src[i]);
  return out;
}

}  // namespace

double activate(Activation kind, double y) {
  switch (kind) {
    case Activation::Tanh:
      return std::tanh(y);
    case Activation::Sigmoid:
      return sigmoid(y);
    case Activation::Nssigmoid:
      return y / (1.0 + std::abs(y));
    case Activation::Softplus:
      return softplus(y);
  }
  return 0.0;
}

double activate_derivative(Activation kind, double y) {
  switch (kind) {
    case Activation::Tanh: {
      const double t = std::tanh(y);
      return 1.0 - t * t;
    }
    case Activation::Sigmoid: {
      const double s = sigmoid(y);
      return s * (1.0 - s);
    }
    case Activation::Nssigmoid: {
      const double d = 1.0 + std::abs(y);
      return 1.0 / (d * d);
    }
    case Activation::Softplus:
      return sigmoid(y);
  }
  return 0.0;
}

Matrix apply(Activation kind, const Matrix& y) {
  return map(y, [kind](double v) { return activate(kind, v); });
}

Matrix derivative(Activation kind, const Matrix& y) {
  return map(y, [kind](double v) { return activate_derivative(kind, v); });
}

std::string to_string(Activation kind) {
  switch (kind) {
    case Activation::Tanh:
      return "tanh";
    case Activation::Sigmoid:
      return "sigmoid";
    case Activation::Nssigmoid:
      return "nssigmoid";
    case Activation::Softplus:
      return "softplus";
  }
  return "?";
}

Activation parse_activation(std::string_view name) {
  for (Activation a : kAllActivations) {
    if (name == to_string(a)) return a;
  }
  throw ConfigError("unknown activation '" + std::string(name) +
                    "' (expected tanh, sigmoid, nssigmoid or softplus)");
}

}  // namespace dcidc
