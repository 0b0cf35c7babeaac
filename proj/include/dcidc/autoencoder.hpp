#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "dcidc/activation.hpp"
#include "dcidc/matrix.hpp"

namespace dcidc {

// Layer widths [D, d_1, ..., d_{M/2}, ..., d_{M-1}, D] of a symmetric
// autoencoder with M weight layers. Layers 1..M/2 form the encoder and use
// `enc_activation`; layers M/2+1..M form the decoder.
struct NetworkParams {
  std::vector<std::size_t> dims;
  std::vector<Matrix> weights;               // weights[m-1]: dims[m] x dims[m-1]
  std::vector<std::vector<double>> biases;   // biases[m-1]: dims[m]
  Activation enc_activation = Activation::Tanh;
  Activation dec_activation = Activation::Tanh;

  std::size_t depth() const { return weights.size(); }
  std::size_t code_layer() const { return weights.size() / 2; }
  std::size_t code_width() const { return dims[code_layer()]; }
  std::size_t input_width() const { return dims.front(); }
  Activation activation_of(std::size_t layer) const {  // 1-based layer index
    return layer <= code_layer() ? enc_activation : dec_activation;
  }
};

// Activations of one forward pass over a batch (rows are samples).
struct ForwardTrace {
  std::vector<Matrix> pre_activations;  // [m-1] = y^(m), m = 1..M
  std::vector<Matrix> activations;      // [m]   = z^(m), m = 0..M

  const Matrix& input() const { return activations.front(); }
  const Matrix& code() const { return activations[activations.size() / 2]; }
  const Matrix& reconstruction() const { return activations.back(); }
};

struct Gradients {
  std::vector<Matrix> d_weights;
  std::vector<std::vector<double>> d_biases;
};

// Per-layer backpropagated error signals. `delta[m-1]` carries the
// reconstruction path for layer m = 1..M. `lambda[m-1]` carries the
// intra-class path and exists only for encoder layers m = 1..M/2: the decoder
// receives no signal from the code constraint, so there is nothing to store.
struct BackwardSignals {
  std::vector<Matrix> delta;
  std::vector<Matrix> lambda;
};

// Expands an encoder half [D, d_1, ..., d_{M/2}] into the full mirrored
// shape [D, d_1, ..., d_{M/2}, ..., d_1, D].
std::vector<std::size_t> mirror_dims(const std::vector<std::size_t>& encoder);

// Throws ConfigError unless dims describe an even-depth symmetric network
// whose encoder never widens.
void validate_dims(const std::vector<std::size_t>& dims);

// Weights uniform in +-sqrt(6 / (fan_in + fan_out)), biases zero.
NetworkParams init_network(const std::vector<std::size_t>& dims, Activation enc,
                           Activation dec, std::uint64_t seed);

ForwardTrace forward(const NetworkParams& params, const Matrix& batch);

// Error signals for the loss
//   1/2 sum_i ||z_i^(0) - z_i^(M)||^2 + lambda1/2 sum_i ||z_i^(M/2) - h_i S^T||^2
// where h_i are the rows of `indicator` (N x K) and S is `centers` (d x K).
// H and S are constants here.
BackwardSignals backward_signals(const NetworkParams& params,
                                 const ForwardTrace& trace,
                                 const Matrix& indicator, const Matrix& centers);

// Gradient of the batch loss above plus lambda2/2 sum_m (||W_m||^2 + ||b_m||^2)
// with respect to every weight and bias. Per-sample terms are summed, not
// averaged, so the learning rate has to be chosen relative to the batch size.
Gradients backward(const NetworkParams& params, const ForwardTrace& trace,
                   const Matrix& indicator, const Matrix& centers, double lambda1,
                   double lambda2);

// W_m -= rate * dW_m, b_m -= rate * db_m. Throws ConfigError if rate <= 0.
void apply_update(NetworkParams& params, const Gradients& grads, double rate);

}  // namespace dcidc
