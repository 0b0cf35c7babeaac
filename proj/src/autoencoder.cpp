#include "dcidc/autoencoder.hpp"

#include <cmath>
#include <string>

#include "dcidc/error.hpp"
#include "dcidc/rng.hpp"

namespace dcidc {

namespace {

std::string dims_string(const std::vector<std::size_t>& dims) {
  std::string s = "[";
  for (std::size_t i = 0; i < dims.size(); ++i) {
    if (i) s += ",";
    s += std::to_string(dims[i]);
  }
  return s + "]";
}

void check_params(const NetworkParams& params) {
  validate_dims(params.dims);
  const std::size_t m = params.dims.size() - 1;
  if (params.weights.size() != m || params.biases.size() != m) {
    throw ShapeError("network has " + std::to_string(params.weights.size()) +
                     " weight layers for dims " + dims_string(params.dims));
  }
  for (std::size_t l = 0; l < m; ++l) {
    const Matrix& w = params.weights[l];
    if (w.rows() != params.dims[l + 1] || w.cols() != params.dims[l] ||
        params.biases[l].size() != params.dims[l + 1]) {
      throw ShapeError("layer " + std::to_string(l + 1) + " weight " + w.shape() +
                       " inconsistent with dims " + dims_string(params.dims));
    }
  }
}

}  // namespace

std::vector<std::size_t> mirror_dims(const std::vector<std::size_t>& encoder) {
  if (encoder.size() < 2) {
    throw ConfigError("encoder dims need at least an input and a code width, got " +
                      dims_string(encoder));
  }
  std::vector<std::size_t> dims = encoder;
  for (std::size_t i = encoder.size() - 1; i-- > 0;) dims.push_back(encoder[i]);
  return dims;
}

void validate_dims(const std::vector<std::size_t>& dims) {
  if (dims.size() < 3 || (dims.size() - 1) % 2 != 0) {
    throw ConfigError("network depth must be even and positive, dims " +
                      dims_string(dims));
  }
  for (std::size_t d : dims) {
    if (d == 0) throw ConfigError("zero-width layer in dims " + dims_string(dims));
  }
  if (dims.front() != dims.back()) {
    throw ConfigError("output width must equal input width, dims " + dims_string(dims));
  }
  const std::size_t half = (dims.size() - 1) / 2;
  for (std::size_t i = 0; i < half; ++i) {
    if (dims[i] != dims[dims.size() - 1 - i]) {
      throw ConfigError("decoder does not mirror the encoder, dims " + dims_string(dims));
    }
  }
  for (std::size_t i = 1; i <= half; ++i) {
    if (dims[i] > dims[i - 1]) {
      throw ConfigError("encoder widens at layer " + std::to_string(i) + ", dims " +
                        dims_string(dims));
    }
  }
  for (std::size_t i = half + 1; i < dims.size(); ++i) {
    if (dims[i] < dims[i - 1]) {
      throw ConfigError("decoder narrows at layer " + std::to_string(i) + ", dims " +
                        dims_string(dims));
    }
  }
}

NetworkParams init_network(const std::vector<std::size_t>& dims, Activation enc,
                           Activation dec, std::uint64_t seed) {
  validate_dims(dims);
  Rng rng = Rng::stream(seed, "init");
  NetworkParams p;
  p.dims = dims;
  p.enc_activation = enc;
  p.dec_activation = dec;
  for (std::size_t l = 1; l < dims.size(); ++l) {
    const double bound = std::sqrt(6.0 / static_cast<double>(dims[l] + dims[l - 1]));
    Matrix w(dims[l], dims[l - 1]);
    for (double& v : w.values()) v = rng.uniform(-bound, bound);
    p.weights.push_back(std::move(w));
    p.biases.emplace_back(dims[l], 0.0);
  }
  return p;
}

ForwardTrace forward(const NetworkParams& params, const Matrix& batch) {
  check_params(params);
  if (batch.cols() != params.input_width()) {
    throw ShapeError("forward: batch " + batch.shape() + " but network input width " +
                     std::to_string(params.input_width()));
  }
  ForwardTrace trace;
  trace.activations.push_back(batch);
  for (std::size_t m = 1; m <= params.depth(); ++m) {
    Matrix y = add_row_vector(matmul_nt(trace.activations.back(), params.weights[m - 1]),
                              params.biases[m - 1]);
    trace.activations.push_back(apply(params.activation_of(m), y));
    trace.pre_activations.push_back(std::move(y));
  }
  return trace;
}

BackwardSignals backward_signals(const NetworkParams& params,
                                 const ForwardTrace& trace,
                                 const Matrix& indicator, const Matrix& centers) {
  check_params(params);
  const std::size_t depth = params.depth();
  const std::size_t half = params.code_layer();
  if (trace.activations.size() != depth + 1 || trace.pre_activations.size() != depth) {
    throw ShapeError("backward: trace depth does not match the network");
  }
  const Matrix& code = trace.code();
  if (indicator.rows() != code.rows() || centers.rows() != code.cols() ||
      indicator.cols() != centers.cols()) {
    throw ShapeError("backward: indicator " + indicator.shape() + " and centers " +
                     centers.shape() + " do not fit codes " + code.shape());
  }

  auto gprime = [&](std::size_t m) {
    return derivative(params.activation_of(m), trace.pre_activations[m - 1]);
  };

  BackwardSignals s;
  s.delta.resize(depth);
  s.lambda.resize(half);

  // Reconstruction path, output layer down to layer 1.
  s.delta[depth - 1] =
      hadamard(sub(trace.reconstruction(), trace.input()), gprime(depth));
  for (std::size_t m = depth - 1; m >= 1; --m) {
    s.delta[m - 1] = hadamard(matmul(s.delta[m], params.weights[m]), gprime(m));
  }

  // Code constraint enters at the code layer and flows through the encoder.
  const Matrix target = matmul_nt(indicator, centers);
  s.lambda[half - 1] = hadamard(sub(code, target), gprime(half));
  for (std::size_t m = half - 1; m >= 1; --m) {
    s.lambda[m - 1] = hadamard(matmul(s.lambda[m], params.weights[m]), gprime(m));
  }
  return s;
}

Gradients backward(const NetworkParams& params, const ForwardTrace& trace,
                   const Matrix& indicator, const Matrix& centers, double lambda1,
                   double lambda2) {
  const BackwardSignals s = backward_signals(params, trace, indicator, centers);
  const std::size_t depth = params.depth();
  Gradients g;
  g.d_weights.reserve(depth);
  g.d_biases.reserve(depth);
  for (std::size_t m = 1; m <= depth; ++m) {
    Matrix signal = s.delta[m - 1];
    if (m <= s.lambda.size()) signal = add(signal, scale(s.lambda[m - 1], lambda1));

    Matrix dw = matmul_tn(signal, trace.activations[m - 1]);
    const Matrix& w = params.weights[m - 1];
    for (std::size_t i = 0; i < dw.size(); ++i) dw.values()[i] += lambda2 * w.values()[i];

    std::vector<double> db = column_sums(signal);
    const auto& b = params.biases[m - 1];
    for (std::size_t i = 0; i < db.size(); ++i) db[i] += lambda2 * b[i];

    g.d_weights.push_back(std::move(dw));
    g.d_biases.push_back(std::move(db));
  }
  return g;
}

void apply_update(NetworkParams& params, const Gradients& grads, double rate) {
  if (!(rate > 0.0)) {
    throw ConfigError("learning rate must be positive, got " + std::to_string(rate));
  }
  if (grads.d_weights.size() != params.depth() || grads.d_biases.size() != params.depth()) {
    throw ShapeError("apply_update: gradient depth does not match the network");
  }
  for (std::size_t l = 0; l < params.depth(); ++l) {
    auto w = params.weights[l].values();
    auto dw = grads.d_weights[l].values();
    auto& b = params.biases[l];
    const auto& db = grads.d_biases[l];
    if (w.size() != dw.size() || b.size() != db.size()) {
      throw ShapeError("apply_update: layer " + std::to_string(l + 1) +
                       " gradient shape mismatch");
    }
    for (std::size_t i = 0; i < w.size(); ++i) w[i] -= rate * dw[i];
    for (std::size_t i = 0; i < b.size(); ++i) b[i] -= rate * db[i];
  }
}

}  // namespace dcidc
