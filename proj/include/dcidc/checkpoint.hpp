#pragma once

#include <cstddef>
#include <filesystem>
#include <string>

#include "dcidc/autoencoder.hpp"

namespace dcidc {

// One line of compact JSON ({"dims":[...],"enc_activation":...,
// "dec_activation":...,"epoch":n}) terminated by '\n', followed for every layer
// by the weight matrix and then the bias (as a 1 x d matrix), each in dcmx.
// Parameters are stored as float32 like every dcmx payload.
struct Checkpoint {
  NetworkParams params;
  std::size_t epoch = 0;
};

std::string encode_checkpoint(const NetworkParams& params, std::size_t epoch);
Checkpoint decode_checkpoint(const std::string& bytes);

void save_checkpoint(const std::filesystem::path& path, const NetworkParams& params,
                     std::size_t epoch);
Checkpoint load_checkpoint(const std::filesystem::path& path);

}  // namespace dcidc
