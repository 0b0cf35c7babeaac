#include "dcidc/checkpoint.hpp"

#include <fstream>
#include <sstream>

#include <json.hpp>

#include "dcidc/dataset.hpp"
#include "dcidc/error.hpp"

namespace dcidc {

using nlohmann::json;

std::string encode_checkpoint(const NetworkParams& params, std::size_t epoch) {
  json header = {{"dims", params.dims},
                 {"enc_activation", to_string(params.enc_activation)},
                 {"dec_activation", to_string(params.dec_activation)},
                 {"epoch", epoch}};
  std::string out = header.dump() + "\n";
  for (std::size_t l = 0; l < params.depth(); ++l) {
    out += encode_dcmx(params.weights[l]);
    out += encode_dcmx(Matrix(1, params.biases[l].size(), params.biases[l]));
  }
  return out;
}

Checkpoint decode_checkpoint(const std::string& bytes) {
  const std::size_t newline = bytes.find('\n');
  if (newline == std::string::npos) throw ParseError("checkpoint: missing header line", 0);
  Checkpoint cp;
  try {
    const json header = json::parse(bytes.substr(0, newline));
    cp.params.dims = header.at("dims").get<std::vector<std::size_t>>();
    cp.params.enc_activation = parse_activation(header.at("enc_activation").get<std::string>());
    cp.params.dec_activation = parse_activation(header.at("dec_activation").get<std::string>());
    cp.epoch = header.at("epoch").get<std::size_t>();
  } catch (const json::exception& e) {
    throw ParseError(std::string("checkpoint header: ") + e.what(), 0);
  }
  validate_dims(cp.params.dims);

  std::size_t at = newline + 1;
  auto next = [&](std::size_t rows, std::size_t cols) {
    const std::size_t len = kDcmxHeaderBytes + 4 * rows * cols;
    if (at + len > bytes.size()) {
      throw ParseError("checkpoint: expected " + std::to_string(len) + " bytes at offset " +
                           std::to_string(at) + ", file has " +
                           std::to_string(bytes.size() - at),
                       at);
    }
    Matrix m;
    try {
      m = decode_dcmx(bytes.substr(at, len));
    } catch (const ParseError& e) {
      throw ParseError(std::string("checkpoint: ") + e.what(), at + e.offset());
    }
    if (m.rows() != rows || m.cols() != cols) {
      throw ParseError("checkpoint: block at offset " + std::to_string(at) + " is " +
                           m.shape() + ", expected " + std::to_string(rows) + "x" +
                           std::to_string(cols),
                       at);
    }
    at += len;
    return m;
  };
  const auto& dims = cp.params.dims;
  for (std::size_t l = 1; l < dims.size(); ++l) {
    cp.params.weights.push_back(next(dims[l], dims[l - 1]));
    const Matrix b = next(1, dims[l]);
    cp.params.biases.emplace_back(b.values().begin(), b.values().end());
  }
  if (at != bytes.size()) {
    throw ParseError("checkpoint: " + std::to_string(bytes.size() - at) +
                         " trailing bytes after the last layer",
                     at);
  }
  return cp;
}

void save_checkpoint(const std::filesystem::path& path, const NetworkParams& params,
                     std::size_t epoch) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write " + path.string());
  const std::string bytes = encode_checkpoint(params, epoch);
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
}

Checkpoint load_checkpoint(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return decode_checkpoint(ss.str());
}

}  // namespace dcidc
