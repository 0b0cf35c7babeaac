#include "dcidc/run.hpp"

#include <fstream>
#include <sstream>

#include "dcidc/checkpoint.hpp"
#include "dcidc/error.hpp"

namespace dcidc {

namespace fs = std::filesystem;
using nlohmann::json;

Dataset prepare_dataset(const RunSpec& spec) {
  Dataset ds = load(spec.data, spec.format);
  if (spec.labels) {
    if (!fs::exists(*spec.labels)) throw IoError("no such file: " + spec.labels->string());
    ds.labels = read_labels(*spec.labels);
    if (ds.labels->size() != ds.features.rows()) {
      throw ShapeError(spec.labels->string() + " has " + std::to_string(ds.labels->size()) +
                       " labels for " + std::to_string(ds.features.rows()) + " rows");
    }
  }
  ds.meta.height = spec.image_height;
  ds.meta.width = spec.image_width;
  if (spec.mask_unlabeled) ds = mask_unlabeled(ds);
  return normalize(ds, spec.normalization);
}

json manifest_json(const RunSpec& spec, const std::string& fingerprint) {
  const TrainConfig& c = spec.config;
  json m;
  m["engine_version"] = kEngineVersion;
  m["data"] = {{"path", spec.data.string()},
               {"format", to_string(spec.format)},
               {"fingerprint", fingerprint},
               {"normalize", to_string(spec.normalization)},
               {"mask_unlabeled", spec.mask_unlabeled}};
  m["data"]["labels"] = spec.labels ? json(spec.labels->string()) : json(nullptr);
  m["data"]["image_height"] = spec.image_height ? json(*spec.image_height) : json(nullptr);
  m["data"]["image_width"] = spec.image_width ? json(*spec.image_width) : json(nullptr);
  m["config"] = {{"dims", c.encoder_dims},
                 {"k", c.k},
                 {"lambda1", c.lambda1},
                 {"lambda2", c.lambda2},
                 {"learning_rate", c.learning_rate},
                 {"max_epochs", c.max_epochs},
                 {"tol", c.tol},
                 {"patience", c.patience},
                 {"seed", c.seed},
                 {"batch_size", c.batch_size},
                 {"enc_activation", to_string(c.enc_activation)},
                 {"dec_activation", to_string(c.dec_activation)}};
  m["artifacts"] = {{"labels_csv", kLabelsCsv},   {"labels_dcmx", kLabelsDcmx},
                    {"epoch_log", kEpochLog},     {"checkpoint", kCheckpoint},
                    {"label_map_csv", kLabelMapCsv}, {"label_map_pgm", kLabelMapPgm}};
  return m;
}

RunSpec spec_from_manifest(const json& m) {
  RunSpec spec;
  try {
    const json& d = m.at("data");
    spec.data = d.at("path").get<std::string>();
    spec.format = parse_format(d.at("format").get<std::string>());
    spec.normalization = parse_normalization(d.at("normalize").get<std::string>());
    spec.mask_unlabeled = d.at("mask_unlabeled").get<bool>();
    if (!d.at("labels").is_null()) spec.labels = d.at("labels").get<std::string>();
    if (!d.at("image_height").is_null()) spec.image_height = d.at("image_height").get<std::size_t>();
    if (!d.at("image_width").is_null()) spec.image_width = d.at("image_width").get<std::size_t>();

    const json& c = m.at("config");
    TrainConfig& t = spec.config;
    t.encoder_dims = c.at("dims").get<std::vector<std::size_t>>();
    t.k = c.at("k").get<std::size_t>();
    t.lambda1 = c.at("lambda1").get<double>();
    t.lambda2 = c.at("lambda2").get<double>();
    t.learning_rate = c.at("learning_rate").get<double>();
    t.max_epochs = c.at("max_epochs").get<std::size_t>();
    t.tol = c.at("tol").get<double>();
    t.patience = c.at("patience").get<std::size_t>();
    t.seed = c.at("seed").get<std::uint64_t>();
    t.batch_size = c.at("batch_size").get<std::size_t>();
    t.enc_activation = parse_activation(c.at("enc_activation").get<std::string>());
    t.dec_activation = parse_activation(c.at("dec_activation").get<std::string>());

    const std::string recorded = d.at("fingerprint").get<std::string>();
    if (!fs::exists(spec.data)) throw IoError("no such file: " + spec.data.string());
    const std::string actual = file_fingerprint(spec.data);
    if (actual != recorded) {
      throw IoError(spec.data.string() + " changed since the manifest was written (fingerprint " +
                    actual + ", recorded " + recorded + ")");
    }
  } catch (const json::exception& e) {
    throw ParseError(std::string("manifest: ") + e.what(), 0);
  }
  return spec;
}

RunSpec load_manifest(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path.string());
  json m;
  try {
    m = json::parse(in);
  } catch (const json::exception& e) {
    throw ParseError(path.string() + ": " + e.what(), 0);
  }
  return spec_from_manifest(m);
}

RunOutcome run_experiment(const RunSpec& spec, const fs::path& out_dir) {
  const Dataset ds = prepare_dataset(spec);
  std::error_code ec;
  fs::create_directories(out_dir, ec);
  if (ec) throw IoError("cannot create " + out_dir.string() + ": " + ec.message());

  RunOutcome outcome;
  outcome.fingerprint = file_fingerprint(spec.data);
  outcome.manifest = manifest_json(spec, outcome.fingerprint);
  {
    std::ofstream mf(out_dir / kManifest);
    if (!mf) throw IoError("cannot write " + (out_dir / kManifest).string());
    mf << outcome.manifest.dump(2) << "\n";
  }

  std::ofstream log(out_dir / kEpochLog);
  if (!log) throw IoError("cannot write " + (out_dir / kEpochLog).string());
  log << kEpochCsvHeader << "\n";
  const LabelVector* truth = ds.labels ? &*ds.labels : nullptr;
  outcome.result = train(ds.features, spec.config, truth, [&](const EpochReport& r, const ClusterState&) {
    log << epoch_csv_line(r) << "\n";
    log.flush();
  });

  const LabelVector predicted = labels_from_indicator(outcome.result.state.indicator);
  write_labels(out_dir / kLabelsCsv, predicted);
  Matrix as_matrix(predicted.size(), 1);
  for (std::size_t i = 0; i < predicted.size(); ++i) as_matrix(i, 0) = static_cast<double>(predicted[i]);
  write_dcmx(out_dir / kLabelsDcmx, as_matrix);
  save_checkpoint(out_dir / kCheckpoint, outcome.result.params,
                  outcome.result.history.back().epoch);

  if (ds.mask) {
    const auto full = scatter_labels(predicted, *ds.mask, ds.meta.original_rows);
    std::ofstream map(out_dir / kLabelMapCsv);
    for (std::int64_t l : full) map << l << "\n";
    if (ds.meta.height && ds.meta.width) {
      write_label_pgm(out_dir / kLabelMapPgm, full, *ds.meta.height, *ds.meta.width,
                      spec.config.k);
    }
  } else if (ds.meta.height && ds.meta.width) {
    std::vector<std::int64_t> full(predicted.begin(), predicted.end());
    write_label_pgm(out_dir / kLabelMapPgm, full, *ds.meta.height, *ds.meta.width,
                    spec.config.k);
  }
  return outcome;
}

}  // namespace dcidc
