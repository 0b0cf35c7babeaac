#pragma once

#include <string>
#include <string_view>

#include "dcidc/matrix.hpp"

namespace dcidc {

// Nssigmoid is the non-saturating sigmoid y / (1 + |y|).
enum class Activation { Tanh, Sigmoid, Nssigmoid, Softplus };

inline constexpr Activation kAllActivations[] = {
    Activation::Tanh, Activation::Sigmoid, Activation::Nssigmoid,
    Activation::Softplus};

double activate(Activation kind, double y);
// Derivative with respect to the pre-activation y.
double activate_derivative(Activation kind, double y);

Matrix apply(Activation kind, const Matrix& y);
Matrix derivative(Activation kind, const Matrix& y);

std::string to_string(Activation kind);
// Accepts the lower-case names used on the command line; throws ConfigError.
Activation parse_activation(std::string_view name);

}  // namespace dcidc
