#include "dcidc/dataset.hpp"

#include <algorithm>
#include <bit>
#include <charconv>
#include <cmath>
#include <cstring>
#include <fstream>
#include <map>
#include <sstream>

#include "dcidc/error.hpp"
#include "dcidc/rng.hpp"

namespace dcidc {

namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void spit(const fs::path& path, const std::string& bytes) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write " + path.string());
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw IoError("write failed for " + path.string());
}

void put_u32(std::string& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
}

std::uint32_t get_u32(const std::string& in, std::size_t at) {
  std::uint32_t v = 0;
  for (int i = 0; i < 4; ++i) {
    v |= static_cast<std::uint32_t>(static_cast<unsigned char>(in[at + i])) << (8 * i);
  }
  return v;
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) {
    s.remove_suffix(1);
  }
  return s;
}

template <typename F>
void for_each_line(const std::string& text, F f) {
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos < text.size()) {
    std::size_t end = text.find('\n', pos);
    if (end == std::string::npos) end = text.size();
    ++line_no;
    f(trim(std::string_view(text).substr(pos, end - pos)), line_no);
    pos = end + 1;
  }
}

}  // namespace

Format parse_format(const std::string& name) {
  if (name == "csv") return Format::Csv;
  if (name == "dcmx") return Format::Dcmx;
  throw ConfigError("unknown format '" + name + "' (expected csv or dcmx)");
}

Normalization parse_normalization(const std::string& name) {
  if (name == "none") return Normalization::None;
  if (name == "minmax") return Normalization::MinMaxPerBand;
  if (name == "zscore") return Normalization::ZScorePerBand;
  throw ConfigError("unknown normalization '" + name + "' (expected minmax, zscore or none)");
}

std::string to_string(Format f) { return f == Format::Csv ? "csv" : "dcmx"; }

std::string to_string(Normalization n) {
  switch (n) {
    case Normalization::None:
      return "none";
    case Normalization::MinMaxPerBand:
      return "minmax";
    case Normalization::ZScorePerBand:
      return "zscore";
  }
  return "?";
}

std::string encode_dcmx(const Matrix& m) {
  if (m.rows() > UINT32_MAX || m.cols() > UINT32_MAX) {
    throw ShapeError("dcmx: matrix " + m.shape() + " exceeds u32 dimensions");
  }
  std::string out(kDcmxMagic, 4);
  out.push_back(static_cast<char>(kDcmxVersion));
  put_u32(out, static_cast<std::uint32_t>(m.rows()));
  put_u32(out, static_cast<std::uint32_t>(m.cols()));
  out.reserve(out.size() + 4 * m.size());
  for (double v : m.values()) put_u32(out, std::bit_cast<std::uint32_t>(static_cast<float>(v)));
  return out;
}

Matrix decode_dcmx(const std::string& bytes) {
  if (bytes.size() < kDcmxHeaderBytes) {
    throw ParseError("dcmx: header needs " + std::to_string(kDcmxHeaderBytes) +
                         " bytes, file has " + std::to_string(bytes.size()),
                     bytes.size());
  }
  if (std::memcmp(bytes.data(), kDcmxMagic, 4) != 0) {
    throw ParseError("dcmx: bad magic at byte 0", 0);
  }
  if (static_cast<std::uint8_t>(bytes[4]) != kDcmxVersion) {
    throw ParseError("dcmx: unsupported version " +
                         std::to_string(static_cast<unsigned char>(bytes[4])) +
                         " at byte 4",
                     4);
  }
  const std::size_t rows = get_u32(bytes, 5);
  const std::size_t cols = get_u32(bytes, 9);
  const std::size_t expected = kDcmxHeaderBytes + 4 * rows * cols;
  if (bytes.size() != expected) {
    throw ParseError("dcmx: " + std::to_string(rows) + "x" + std::to_string(cols) +
                         " payload expects " + std::to_string(expected) +
                         " bytes, got " + std::to_string(bytes.size()),
                     std::min(bytes.size(), expected));
  }
  std::vector<double> data(rows * cols);
  for (std::size_t i = 0; i < data.size(); ++i) {
    const std::size_t at = kDcmxHeaderBytes + 4 * i;
    const float f = std::bit_cast<float>(get_u32(bytes, at));
    if (!std::isfinite(f)) {
      throw ParseError("dcmx: non-finite value at byte " + std::to_string(at), at);
    }
    data[i] = f;
  }
  return Matrix(rows, cols, std::move(data));
}

Matrix read_dcmx(const fs::path& path) {
  try {
    return decode_dcmx(slurp(path));
  } catch (const ParseError& e) {
    throw ParseError(path.string() + ": " + e.what(), e.offset());
  }
}

void write_dcmx(const fs::path& path, const Matrix& m) { spit(path, encode_dcmx(m)); }

Matrix read_csv(const fs::path& path) {
  const std::string text = slurp(path);
  std::vector<double> data;
  std::size_t rows = 0, cols = 0;
  for_each_line(text, [&](std::string_view line, std::size_t line_no) {
    if (line.empty()) return;
    std::size_t fields = 0;
    std::size_t pos = 0;
    while (true) {
      const std::size_t comma = line.find(',', pos);
      const std::string_view field =
          trim(line.substr(pos, comma == std::string_view::npos ? line.npos : comma - pos));
      double v = 0.0;
      const auto res = std::from_chars(field.data(), field.data() + field.size(), v);
      if (field.empty() || res.ec != std::errc() || res.ptr != field.data() + field.size()) {
        throw ParseError(path.string() + ":" + std::to_string(line_no) +
                             ": not a number: '" + std::string(field) + "'",
                         line_no);
      }
      if (!std::isfinite(v)) {
        throw ParseError(path.string() + ":" + std::to_string(line_no) +
                             ": non-finite value",
                         line_no);
      }
      data.push_back(v);
      ++fields;
      if (comma == std::string_view::npos) break;
      pos = comma + 1;
    }
    if (rows == 0) cols = fields;
    if (fields != cols) {
      throw ParseError(path.string() + ":" + std::to_string(line_no) + ": expected " +
                           std::to_string(cols) + " fields, got " + std::to_string(fields),
                       line_no);
    }
    ++rows;
  });
  return Matrix(rows, cols, std::move(data));
}

void write_csv(const fs::path& path, const Matrix& m) {
  std::string out;
  char buf[64];
  for (std::size_t r = 0; r < m.rows(); ++r) {
    for (std::size_t c = 0; c < m.cols(); ++c) {
      if (c) out.push_back(',');
      const auto res = std::to_chars(buf, buf + sizeof(buf), m(r, c));
      out.append(buf, res.ptr);
    }
    out.push_back('\n');
  }
  spit(path, out);
}

LabelVector read_labels(const fs::path& path) {
  const std::string text = slurp(path);
  LabelVector labels;
  for_each_line(text, [&](std::string_view line, std::size_t line_no) {
    if (line.empty()) return;
    std::size_t v = 0;
    const auto res = std::from_chars(line.data(), line.data() + line.size(), v);
    if (res.ec != std::errc() || res.ptr != line.data() + line.size()) {
      throw ParseError(path.string() + ":" + std::to_string(line_no) +
                           ": not a non-negative integer label: '" + std::string(line) + "'",
                       line_no);
    }
    labels.push_back(v);
  });
  return labels;
}

void write_labels(const fs::path& path, const LabelVector& labels) {
  std::string out;
  for (std::size_t l : labels) out += std::to_string(l) + "\n";
  spit(path, out);
}

fs::path companion_labels_path(const fs::path& data_path) {
  fs::path p = data_path;
  p.replace_extension(".labels.csv");
  return p;
}

Dataset load(const fs::path& path, Format format) {
  if (!fs::exists(path)) throw IoError("no such file: " + path.string());
  Dataset ds;
  ds.features = format == Format::Csv ? read_csv(path) : read_dcmx(path);
  ds.meta.name = path.stem().string();
  ds.meta.original_rows = ds.features.rows();
  const fs::path labels = companion_labels_path(path);
  if (fs::exists(labels)) {
    ds.labels = read_labels(labels);
    if (ds.labels->size() != ds.features.rows()) {
      throw ShapeError(labels.string() + " has " + std::to_string(ds.labels->size()) +
                       " labels for " + std::to_string(ds.features.rows()) + " rows");
    }
  }
  return ds;
}

Dataset normalize(const Dataset& dataset, Normalization mode) {
  Dataset out = dataset;
  const Matrix& x = dataset.features;
  const std::size_t n = x.rows(), d = x.cols();
  NormalizationParams p;
  p.mode = mode;
  p.offset.assign(d, 0.0);
  p.scale.assign(d, 1.0);
  if (mode == Normalization::None || n == 0) {
    out.meta.normalization = p;
    return out;
  }
  for (std::size_t c = 0; c < d; ++c) {
    if (mode == Normalization::MinMaxPerBand) {
      double lo = x(0, c), hi = x(0, c);
      for (std::size_t r = 1; r < n; ++r) {
        lo = std::min(lo, x(r, c));
        hi = std::max(hi, x(r, c));
      }
      p.offset[c] = lo;
      p.scale[c] = hi - lo;
    } else {
      double mean = 0.0;
      for (std::size_t r = 0; r < n; ++r) mean += x(r, c);
      mean /= static_cast<double>(n);
      double var = 0.0;
      for (std::size_t r = 0; r < n; ++r) var += (x(r, c) - mean) * (x(r, c) - mean);
      var /= static_cast<double>(n);
      p.offset[c] = mean;
      p.scale[c] = std::sqrt(var);
    }
  }
  for (std::size_t r = 0; r < n; ++r) {
    for (std::size_t c = 0; c < d; ++c) {
      out.features(r, c) = p.scale[c] > 0.0 ? (x(r, c) - p.offset[c]) / p.scale[c] : 0.0;
    }
  }
  out.meta.normalization = p;
  return out;
}

Matrix denormalize(const Matrix& features, const NormalizationParams& p) {
  if (p.mode == Normalization::None) return features;
  if (p.offset.size() != features.cols() || p.scale.size() != features.cols()) {
    throw ShapeError("denormalize: parameters for " + std::to_string(p.offset.size()) +
                     " columns applied to " + features.shape());
  }
  Matrix out = features;
  for (std::size_t r = 0; r < out.rows(); ++r) {
    for (std::size_t c = 0; c < out.cols(); ++c) {
      out(r, c) = p.scale[c] > 0.0 ? features(r, c) * p.scale[c] + p.offset[c] : p.offset[c];
    }
  }
  return out;
}

Dataset mask_unlabeled(const Dataset& dataset) {
  if (!dataset.labels) throw ConfigError("mask_unlabeled: dataset has no labels");
  const LabelVector& raw = *dataset.labels;
  std::map<std::size_t, std::size_t> dense;
  for (std::size_t l : raw)
    if (l != 0) dense.emplace(l, 0);
  if (dense.empty()) throw ConfigError("mask_unlabeled: every row is unlabelled (label 0)");
  std::size_t next = 0;
  for (auto& [raw_label, dense_label] : dense) dense_label = next++;

  std::vector<std::size_t> kept;
  for (std::size_t i = 0; i < raw.size(); ++i)
    if (raw[i] != 0) kept.push_back(i);

  // Indices into the original image survive repeated masking.
  const auto original_index = [&](std::size_t i) {
    return dataset.mask ? (*dataset.mask)[i] : i;
  };
  Dataset out;
  out.meta = dataset.meta;
  out.features = Matrix(kept.size(), dataset.features.cols());
  LabelVector labels(kept.size());
  std::vector<std::size_t> mask(kept.size());
  for (std::size_t j = 0; j < kept.size(); ++j) {
    auto src = dataset.features.row(kept[j]);
    std::copy(src.begin(), src.end(), out.features.row(j).begin());
    labels[j] = dense[raw[kept[j]]];
    mask[j] = original_index(kept[j]);
  }
  out.labels = std::move(labels);
  out.mask = std::move(mask);
  return out;
}

std::vector<std::int64_t> scatter_labels(const LabelVector& predicted,
                                         const std::vector<std::size_t>& mask,
                                         std::size_t original_rows) {
  if (predicted.size() != mask.size()) {
    throw ShapeError("scatter_labels: " + std::to_string(predicted.size()) +
                     " predictions for " + std::to_string(mask.size()) + " retained rows");
  }
  std::vector<std::int64_t> full(original_rows, kMaskedPixel);
  for (std::size_t i = 0; i < mask.size(); ++i) {
    if (mask[i] >= original_rows) {
      throw ShapeError("scatter_labels: mask index " + std::to_string(mask[i]) +
                       " beyond " + std::to_string(original_rows) + " rows");
    }
    full[mask[i]] = static_cast<std::int64_t>(predicted[i]);
  }
  return full;
}

void write_label_pgm(const fs::path& path, const std::vector<std::int64_t>& label_map,
                     std::size_t height, std::size_t width, std::size_t k) {
  if (height * width != label_map.size()) {
    throw ShapeError("label map has " + std::to_string(label_map.size()) +
                     " pixels, not " + std::to_string(height) + "x" + std::to_string(width));
  }
  std::string out = "P5\n" + std::to_string(width) + " " + std::to_string(height) + "\n255\n";
  const std::size_t step = 255 / std::max<std::size_t>(k, 1);
  for (std::int64_t l : label_map) {
    const std::size_t grey = l < 0 ? 0 : std::min<std::size_t>(255, (l + 1) * step);
    out.push_back(static_cast<char>(grey));
  }
  spit(path, out);
}

Matrix synth_blob_centers(std::size_t k, std::size_t dim, double separation,
                          std::uint64_t seed) {
  if (k < 2) throw ConfigError("synth_blobs: need k >= 2, got " + std::to_string(k));
  if (dim == 0) throw ConfigError("synth_blobs: need dim >= 1");
  if (!(separation > 0.0)) {
    throw ConfigError("synth_blobs: separation must be > 0, got " + std::to_string(separation));
  }
  // Box wide enough that random placement succeeds quickly even in 1-D.
  const double side =
      2.0 * separation * std::max(1.0, std::pow(static_cast<double>(k), 1.0 / dim));
  constexpr int kMaxTries = 10000;
  Rng rng = Rng::stream(seed, "synth");
  Matrix centers(k, dim);
  for (std::size_t c = 0; c < k; ++c) {
    bool placed = false;
    for (int attempt = 0; attempt < kMaxTries && !placed; ++attempt) {
      for (std::size_t d = 0; d < dim; ++d) centers(c, d) = rng.uniform(0.0, side);
      placed = true;
      for (std::size_t o = 0; o < c && placed; ++o) {
        double dist = 0.0;
        for (std::size_t d = 0; d < dim; ++d) {
          const double x = centers(c, d) - centers(o, d);
          dist += x * x;
        }
        placed = dist >= separation * separation;
      }
    }
    if (!placed) {
      throw ConfigError("synth_blobs: could not place center " + std::to_string(c) +
                        " after " + std::to_string(kMaxTries) + " attempts");
    }
  }
  return centers;
}

Dataset synth_blobs(std::size_t n_per_cluster, std::size_t k, std::size_t dim,
                    double separation, double noise_sigma, std::uint64_t seed) {
  if (noise_sigma < 0.0) throw ConfigError("synth_blobs: noise_sigma must be >= 0");
  const Matrix centers = synth_blob_centers(k, dim, separation, seed);
  // Separate stream from the center placement.
  Rng rng = Rng::stream(seed, "synth-noise");
  Dataset ds;
  ds.features = Matrix(n_per_cluster * k, dim);
  LabelVector labels(n_per_cluster * k);
  for (std::size_t c = 0; c < k; ++c) {
    for (std::size_t i = 0; i < n_per_cluster; ++i) {
      const std::size_t r = c * n_per_cluster + i;
      labels[r] = c;
      for (std::size_t d = 0; d < dim; ++d) {
        ds.features(r, d) = centers(c, d) + noise_sigma * rng.normal();
      }
    }
  }
  ds.labels = std::move(labels);
  ds.meta.name = "blobs";
  ds.meta.original_rows = ds.features.rows();
  return ds;
}

std::string file_fingerprint(const fs::path& path) {
  const std::string bytes = slurp(path);
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

}  // namespace dcidc
