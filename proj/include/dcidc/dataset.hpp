#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "dcidc/cluster.hpp"
#include "dcidc/matrix.hpp"

namespace dcidc {

enum class Format { Csv, Dcmx };
enum class Normalization { None, MinMaxPerBand, ZScorePerBand };

Format parse_format(const std::string& name);
Normalization parse_normalization(const std::string& name);
std::string to_string(Format f);
std::string to_string(Normalization n);

// Per-column affine transform x' = (x - offset) / scale recorded by normalize().
struct NormalizationParams {
  Normalization mode = Normalization::None;
  std::vector<double> offset;
  std::vector<double> scale;  // 0 marks a constant column mapped to 0
};

struct DatasetMeta {
  std::string name;
  std::optional<std::size_t> height;
  std::optional<std::size_t> width;
  std::size_t original_rows = 0;  // row count before masking
  NormalizationParams normalization;
};

struct Dataset {
  Matrix features;                         // N x D
  std::optional<LabelVector> labels;       // length N
  std::optional<std::vector<std::size_t>> mask;  // surviving original row indices
  DatasetMeta meta;
};

// dcmx: "DCMX", version 0x01, u32 LE rows, u32 LE cols, rows*cols LE float32
// row-major. Values are widened to double on load and narrowed on save.
inline constexpr char kDcmxMagic[4] = {'D', 'C', 'M', 'X'};
inline constexpr std::uint8_t kDcmxVersion = 0x01;
inline constexpr std::size_t kDcmxHeaderBytes = 13;

std::string encode_dcmx(const Matrix& m);
// Throws ParseError carrying the byte offset of the problem.
Matrix decode_dcmx(const std::string& bytes);

Matrix read_dcmx(const std::filesystem::path& path);
void write_dcmx(const std::filesystem::path& path, const Matrix& m);
// Throws ParseError carrying the 1-based line number.
Matrix read_csv(const std::filesystem::path& path);
void write_csv(const std::filesystem::path& path, const Matrix& m);

// Raw labels (one non-negative integer per line).
LabelVector read_labels(const std::filesystem::path& path);
void write_labels(const std::filesystem::path& path, const LabelVector& labels);

// `<dir>/<stem>.labels.csv` next to a data file.
std::filesystem::path companion_labels_path(const std::filesystem::path& data_path);

// Loads features and, if present, the companion label file.
Dataset load(const std::filesystem::path& path, Format format);

Dataset normalize(const Dataset& dataset, Normalization mode);
Matrix denormalize(const Matrix& features, const NormalizationParams& params);

// Drops rows labelled 0 (background) and relabels the survivors densely to
// [0, c) in increasing order of their raw label. Throws if nothing survives.
Dataset mask_unlabeled(const Dataset& dataset);

inline constexpr std::int64_t kMaskedPixel = -1;
// Expands predictions for the retained rows back to `original_rows` entries;
// removed rows get kMaskedPixel.
std::vector<std::int64_t> scatter_labels(const LabelVector& predicted,
                                         const std::vector<std::size_t>& mask,
                                         std::size_t original_rows);

// 8-bit binary PGM with cluster c drawn at an evenly spaced grey level and
// masked pixels black.
void write_label_pgm(const std::filesystem::path& path,
                     const std::vector<std::int64_t>& label_map, std::size_t height,
                     std::size_t width, std::size_t k);

// k centers in [0, L]^dim with pairwise distance >= separation.
Matrix synth_blob_centers(std::size_t k, std::size_t dim, double separation,
                          std::uint64_t seed);

// n_per_cluster isotropic Gaussian samples around each center from
// synth_blob_centers, rows grouped by cluster, labels attached.
Dataset synth_blobs(std::size_t n_per_cluster, std::size_t k, std::size_t dim,
                    double separation, double noise_sigma, std::uint64_t seed);

// FNV-1a over the raw bytes of a file, as 16 hex digits.
std::string file_fingerprint(const std::filesystem::path& path);

}  // namespace dcidc
