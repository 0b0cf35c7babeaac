#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <filesystem>

#include "dcidc/checkpoint.hpp"
#include "dcidc/error.hpp"

using namespace dcidc;

namespace {

NetworkParams float_exact_network() {
  NetworkParams p = init_network({6, 4, 2, 4, 6}, Activation::Softplus, Activation::Sigmoid, 3);
  for (auto& w : p.weights)
    for (double& v : w.values()) v = static_cast<float>(v);
  for (std::size_t l = 0; l < p.biases.size(); ++l)
    for (std::size_t i = 0; i < p.biases[l].size(); ++i) p.biases[l][i] = 0.25 * (l + 1) - 0.5 * i;
  return p;
}

}  // namespace

TEST_CASE("checkpoint round-trip") {
  const NetworkParams p = float_exact_network();
  const auto path = std::filesystem::temp_directory_path() / "dcidc_checkpoint_test.dcck";
  save_checkpoint(path, p, 42);
  const Checkpoint cp = load_checkpoint(path);
  CHECK(cp.epoch == 42);
  CHECK(cp.params.dims == p.dims);
  CHECK(cp.params.enc_activation == Activation::Softplus);
  CHECK(cp.params.dec_activation == Activation::Sigmoid);
  CHECK(cp.params.weights == p.weights);
  CHECK(cp.params.biases == p.biases);
  CHECK(encode_checkpoint(cp.params, cp.epoch) == encode_checkpoint(p, 42));
}

TEST_CASE("checkpoint layout") {
  const NetworkParams p = float_exact_network();
  const std::string bytes = encode_checkpoint(p, 7);
  const std::size_t nl = bytes.find('\n');
  REQUIRE(nl != std::string::npos);
  CHECK(bytes.substr(0, nl).find("\"epoch\":7") != std::string::npos);
  CHECK(bytes.substr(nl + 1, 4) == "DCMX");
  std::size_t expected = nl + 1;
  for (std::size_t l = 1; l < p.dims.size(); ++l)
    expected += 13 + 4 * p.dims[l] * p.dims[l - 1] + 13 + 4 * p.dims[l];
  CHECK(bytes.size() == expected);
}

TEST_CASE("corrupt checkpoints") {
  const std::string bytes = encode_checkpoint(float_exact_network(), 1);
  CHECK_THROWS_AS(decode_checkpoint(bytes.substr(0, bytes.size() - 1)), ParseError);
  CHECK_THROWS_AS(decode_checkpoint(bytes + "x"), ParseError);
  CHECK_THROWS_AS(decode_checkpoint("{\"dims\":[2,1,2]}\n"), ParseError);
  CHECK_THROWS_AS(decode_checkpoint("no header"), ParseError);
  CHECK_THROWS_AS(load_checkpoint("/nonexistent/dir/x.dcck"), IoError);
}
