#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <string>

#include <json.hpp>

#include "dcidc/dataset.hpp"
#include "dcidc/trainer.hpp"

namespace dcidc {

inline constexpr const char* kEngineVersion = "0.1.0";

// Everything needed to reproduce a training run from its input file.
struct RunSpec {
  std::filesystem::path data;
  Format format = Format::Dcmx;
  // Label file; defaults to the companion `<stem>.labels.csv` when present.
  std::optional<std::filesystem::path> labels;
  Normalization normalization = Normalization::MinMaxPerBand;
  bool mask_unlabeled = false;
  std::optional<std::size_t> image_height;
  std::optional<std::size_t> image_width;
  TrainConfig config;
};

struct RunOutcome {
  TrainResult result;
  std::string fingerprint;
  nlohmann::json manifest;
};

// File names inside the output directory.
inline constexpr const char* kLabelsCsv = "labels.csv";
inline constexpr const char* kLabelsDcmx = "labels.dcmx";
inline constexpr const char* kLabelMapCsv = "label_map.csv";
inline constexpr const char* kLabelMapPgm = "label_map.pgm";
inline constexpr const char* kEpochLog = "epochs.csv";
inline constexpr const char* kCheckpoint = "checkpoint.dcck";
inline constexpr const char* kManifest = "manifest.json";

// Loads, masks and normalizes the dataset described by `spec`.
Dataset prepare_dataset(const RunSpec& spec);

// Trains and writes every artifact into `out_dir` (created if missing). The
// epoch log is written line by line as training progresses.
RunOutcome run_experiment(const RunSpec& spec, const std::filesystem::path& out_dir);

nlohmann::json manifest_json(const RunSpec& spec, const std::string& fingerprint);
// Reads back the spec from a manifest and checks the input file still has the
// recorded fingerprint (throws IoError if not).
RunSpec spec_from_manifest(const nlohmann::json& manifest);
RunSpec load_manifest(const std::filesystem::path& path);

}  // namespace dcidc
