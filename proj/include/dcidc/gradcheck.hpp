#pragma once

#include <cstddef>
#include <cstdint>
#include <string>

#include "dcidc/activation.hpp"
#include "dcidc/autoencoder.hpp"
#include "dcidc/cluster.hpp"
#include "dcidc/matrix.hpp"

namespace dcidc {

struct GradCheckResult {
  double max_relative_error = 0.0;
  // Coordinates of the worst entry (1-based layer).
  std::size_t layer = 0;
  bool is_bias = false;
  std::size_t row = 0;
  std::size_t col = 0;
  double analytic = 0.0;
  double numeric = 0.0;
  std::size_t parameters = 0;

  std::string worst() const;
};

// |analytic - numeric| / max(|analytic|, |numeric|, floor)
double relative_error(double analytic, double numeric, double floor = 1e-6);

// Compares backward() against central differences of total_loss() for every
// scalar weight and bias. `flip_sign_of_first` negates the largest analytic
// entry of the first layer; it exists so the detector itself can be tested.
GradCheckResult gradient_check(const NetworkParams& params, const Matrix& data,
                               const ClusterState& state, double lambda1, double lambda2,
                               double step = 1e-6, bool flip_sign_of_first = false);

struct GradCheckInstance {
  NetworkParams params;
  Matrix data;
  ClusterState state;
};

// Self-contained random problem: uniform [0,1) data, fresh network, random
// indicator and centers computed from the resulting codes.
GradCheckInstance random_gradcheck_instance(const std::vector<std::size_t>& dims,
                                            std::size_t samples, std::size_t k,
                                            Activation enc, Activation dec,
                                            std::uint64_t seed);

}  // namespace dcidc
