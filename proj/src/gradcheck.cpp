#include "dcidc/gradcheck.hpp"

#include <algorithm>
#include <cmath>

#include "dcidc/rng.hpp"
#include "dcidc/trainer.hpp"

namespace dcidc {

std::string GradCheckResult::worst() const {
  return std::string(is_bias ? "b" : "W") + std::to_string(layer) + "[" +
         std::to_string(row) + (is_bias ? "" : "," + std::to_string(col)) +
         "] analytic=" + format_real(analytic) + " numeric=" + format_real(numeric);
}

double relative_error(double analytic, double numeric, double floor) {
  const double denom = std::max({std::abs(analytic), std::abs(numeric), floor});
  return std::abs(analytic - numeric) / denom;
}

GradCheckResult gradient_check(const NetworkParams& params, const Matrix& data,
                               const ClusterState& state, double lambda1, double lambda2,
                               double step, bool flip_sign_of_first) {
  Gradients g = backward(params, forward(params, data), state.indicator, state.centers,
                         lambda1, lambda2);
  if (flip_sign_of_first) {
    auto first = g.d_weights.front().values();
    auto largest = std::max_element(first.begin(), first.end(), [](double a, double b) {
      return std::abs(a) < std::abs(b);
    });
    *largest = -*largest;
  }

  GradCheckResult result;
  NetworkParams probe = params;
  auto central = [&](double& slot) {
    const double saved = slot;
    slot = saved + step;
    const double up = total_loss(probe, data, state, lambda1, lambda2);
    slot = saved - step;
    const double down = total_loss(probe, data, state, lambda1, lambda2);
    slot = saved;
    return (up - down) / (2.0 * step);
  };
  auto record = [&](double analytic, double numeric, std::size_t layer, bool bias,
                    std::size_t r, std::size_t c) {
    ++result.parameters;
    const double err = relative_error(analytic, numeric);
    if (err > result.max_relative_error || result.parameters == 1) {
      result.max_relative_error = err;
      result.layer = layer;
      result.is_bias = bias;
      result.row = r;
      result.col = c;
      result.analytic = analytic;
      result.numeric = numeric;
    }
  };

  for (std::size_t l = 0; l < probe.depth(); ++l) {
    Matrix& w = probe.weights[l];
    for (std::size_t r = 0; r < w.rows(); ++r)
      for (std::size_t c = 0; c < w.cols(); ++c)
        record(g.d_weights[l](r, c), central(w(r, c)), l + 1, false, r, c);
    auto& b = probe.biases[l];
    for (std::size_t r = 0; r < b.size(); ++r)
      record(g.d_biases[l][r], central(b[r]), l + 1, true, r, 0);
  }
  return result;
}

GradCheckInstance random_gradcheck_instance(const std::vector<std::size_t>& dims,
                                            std::size_t samples, std::size_t k,
                                            Activation enc, Activation dec,
                                            std::uint64_t seed) {
  GradCheckInstance inst;
  inst.params = init_network(dims, enc, dec, seed);
  Rng rng = Rng::stream(seed, "gradcheck");
  // Non-zero biases so their gradients are exercised away from the origin.
  for (auto& b : inst.params.biases)
    for (double& v : b) v = rng.uniform(-0.5, 0.5);
  inst.data = Matrix(samples, dims.front());
  for (double& v : inst.data.values()) v = rng.uniform();
  inst.state.k = k;
  inst.state.indicator = init_indicator(samples, k, seed);
  inst.state.centers =
      update_centers(forward(inst.params, inst.data).code(), inst.state.indicator).centers;
  return inst;
}

}  // namespace dcidc
