// dcidc: train, check and evaluate the intra-class constrained autoencoder.
//
//   dcidc synth     --out blobs.dcmx --k 3 --dim 10 --seed 7
//   dcidc train     --data blobs.dcmx --k 3 --dims 10,6,2 --out-dir run
//   dcidc replay    --manifest run/manifest.json --out-dir run2
//   dcidc gradcheck --dims 5,3,2 --activation softplus
//   dcidc evaluate  --pred run/labels.csv --truth blobs.labels.csv
//   dcidc sweep     --data blobs.dcmx --k 3 --dims 10,6,2 --grid 0,0.1,0.3,1

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "dcidc/error.hpp"
#include "dcidc/gradcheck.hpp"
#include "dcidc/metrics.hpp"
#include "dcidc/run.hpp"

namespace fs = std::filesystem;
using namespace dcidc;

namespace {

enum Exit { kOk = 0, kCheckFailed = 1, kUsage = 2, kDiverged = 3, kDegenerate = 4 };

struct TrainFlags {
  std::string data;
  std::string format;
  std::string labels;
  std::string normalize = "minmax";
  std::vector<std::size_t> dims;
  std::size_t k = 0;
  std::string activation = "tanh";
  std::string dec_activation;
  double lambda1 = 0.3;
  double lambda2 = 3e-4;
  double lr = 1e-3;
  std::size_t epochs = 300;
  double tol = 1e-5;
  std::size_t batch = 0;
  std::uint64_t seed = 0;
  bool mask_unlabeled = false;
  std::string image_shape;
  std::string out_dir = "dcidc_out";
};

void add_train_flags(CLI::App* cmd, TrainFlags& f) {
  cmd->add_option("--data", f.data, "Input matrix (rows are samples)")->required();
  cmd->add_option("--format", f.format, "csv or dcmx (default: from extension)");
  cmd->add_option("--labels", f.labels, "Ground-truth label CSV (default: <stem>.labels.csv)");
  cmd->add_option("--normalize", f.normalize, "minmax, zscore or none")->capture_default_str();
  cmd->add_option("--dims", f.dims, "Encoder widths including the input, e.g. 10,6,2")
      ->required()
      ->delimiter(',');
  cmd->add_option("--k", f.k, "Number of clusters")->required();
  cmd->add_option("--activation", f.activation, "Encoder activation (tanh|sigmoid|nssigmoid|softplus)")
      ->capture_default_str();
  cmd->add_option("--dec-activation", f.dec_activation, "Decoder activation (default: --activation)");
  cmd->add_option("--lambda1", f.lambda1, "Intra-class distance weight")->capture_default_str();
  cmd->add_option("--lambda2", f.lambda2, "Weight decay")->capture_default_str();
  cmd->add_option("--lr", f.lr, "Learning rate (gradients are summed over samples)")
      ->capture_default_str();
  cmd->add_option("--epochs", f.epochs, "Maximum epochs")->capture_default_str();
  cmd->add_option("--tol", f.tol, "Relative loss change treated as converged")->capture_default_str();
  cmd->add_option("--batch", f.batch, "Mini-batch size, 0 = full batch")->capture_default_str();
  cmd->add_option("--seed", f.seed, "Seed for every random stream")->capture_default_str();
  cmd->add_flag("--mask-unlabeled", f.mask_unlabeled, "Drop rows labelled 0 before training");
  cmd->add_option("--image-shape", f.image_shape, "HxW of the original image for the PGM label map");
  cmd->add_option("--out-dir", f.out_dir, "Output directory")->capture_default_str();
}

std::pair<std::size_t, std::size_t> parse_shape(const std::string& s) {
  const auto x = s.find('x');
  try {
    if (x == std::string::npos) throw std::invalid_argument(s);
    return {std::stoul(s.substr(0, x)), std::stoul(s.substr(x + 1))};
  } catch (const std::exception&) {
    throw ConfigError("--image-shape expects HxW, got '" + s + "'");
  }
}

RunSpec to_spec(const TrainFlags& f) {
  RunSpec spec;
  spec.data = f.data;
  if (!f.format.empty()) {
    spec.format = parse_format(f.format);
  } else {
    spec.format = fs::path(f.data).extension() == ".csv" ? Format::Csv : Format::Dcmx;
  }
  if (!f.labels.empty()) spec.labels = f.labels;
  spec.normalization = parse_normalization(f.normalize);
  spec.mask_unlabeled = f.mask_unlabeled;
  if (!f.image_shape.empty()) {
    const auto [h, w] = parse_shape(f.image_shape);
    spec.image_height = h;
    spec.image_width = w;
  }
  TrainConfig& c = spec.config;
  c.encoder_dims = f.dims;
  c.k = f.k;
  c.lambda1 = f.lambda1;
  c.lambda2 = f.lambda2;
  c.learning_rate = f.lr;
  c.max_epochs = f.epochs;
  c.tol = f.tol;
  c.batch_size = f.batch;
  c.seed = f.seed;
  c.enc_activation = parse_activation(f.activation);
  c.dec_activation = f.dec_activation.empty() ? c.enc_activation : parse_activation(f.dec_activation);
  validate(c);
  return spec;
}

void print_summary(const RunOutcome& out, const fs::path& dir) {
  const EpochReport& last = out.result.history.back();
  std::cout << "epochs " << last.epoch << (out.result.converged ? " (converged)" : "")
            << "  j_total " << format_real(last.loss.total);
  if (last.accuracy) std::cout << "  accuracy " << format_real(*last.accuracy);
  if (last.nmi) std::cout << "  nmi " << format_real(*last.nmi);
  std::cout << "\nartifacts in " << dir.string() << "\n";
}

int cmd_train(const TrainFlags& f) {
  const RunSpec spec = to_spec(f);
  const RunOutcome out = run_experiment(spec, f.out_dir);
  print_summary(out, f.out_dir);
  return kOk;
}

int cmd_replay(const std::string& manifest, const std::string& out_dir) {
  const RunSpec spec = load_manifest(manifest);
  const RunOutcome out = run_experiment(spec, out_dir);
  print_summary(out, out_dir);
  return kOk;
}

struct GradcheckFlags {
  std::vector<std::size_t> dims{5, 3, 2};
  std::size_t samples = 5;
  std::size_t k = 2;
  double lambda1 = 0.3;
  double lambda2 = 3e-4;
  std::string activation = "tanh";
  std::string dec_activation;
  std::uint64_t seed = 1;
  double step = 1e-6;
  double tolerance = 1e-5;
  bool perturb = false;
};

int cmd_gradcheck(const GradcheckFlags& f) {
  if (f.lambda1 < 0.0 || f.lambda2 < 0.0) throw ConfigError("lambdas must be >= 0");
  const Activation enc = parse_activation(f.activation);
  const Activation dec = f.dec_activation.empty() ? enc : parse_activation(f.dec_activation);
  const auto inst =
      random_gradcheck_instance(mirror_dims(f.dims), f.samples, f.k, enc, dec, f.seed);
  const GradCheckResult r = gradient_check(inst.params, inst.data, inst.state, f.lambda1,
                                           f.lambda2, f.step, f.perturb);
  std::cout << "parameters " << r.parameters << "  max relative error "
            << format_real(r.max_relative_error) << "\n";
  if (r.max_relative_error > f.tolerance) {
    std::cout << "FAIL worst " << r.worst() << "\n";
    return kCheckFailed;
  }
  std::cout << "OK\n";
  return kOk;
}

int cmd_evaluate(const std::string& pred, const std::string& truth) {
  const LabelVector p = read_labels(pred);
  const LabelVector t = read_labels(truth);
  std::cout << "accuracy " << format_real(accuracy(p, t)) << "\n"
            << "nmi " << format_real(nmi(p, t)) << "\n";
  return kOk;
}

int cmd_sweep(const TrainFlags& f, const std::vector<double>& grid,
              const std::vector<std::uint64_t>& seeds) {
  const RunSpec spec = to_spec(f);
  const Dataset ds = prepare_dataset(spec);
  if (!ds.labels) throw ConfigError("sweep needs ground-truth labels");
  for (double l : grid)
    if (l < 0.0) throw ConfigError("lambda1 grid values must be >= 0");
  const std::vector<std::uint64_t> run_seeds = seeds.empty() ? std::vector{f.seed} : seeds;
  const auto rows = lambda1_sweep(ds.features, spec.config, *ds.labels, grid, run_seeds);

  fs::create_directories(f.out_dir);
  std::ofstream table(fs::path(f.out_dir) / "sweep.csv");
  table << "lambda1,seed,accuracy,nmi,epochs,error\n";
  for (const SweepRow& r : rows) {
    table << format_real(r.lambda1) << "," << r.seed << ","
          << (r.accuracy ? format_real(*r.accuracy) : "") << ","
          << (r.nmi ? format_real(*r.nmi) : "") << "," << r.epochs << ","
          << (r.error.empty() ? "" : "\"" + r.error + "\"") << "\n";
  }
  std::ofstream summary(fs::path(f.out_dir) / "sweep_summary.csv");
  summary << "lambda1,runs,accuracy_mean,accuracy_std,nmi_mean,nmi_std\n";
  std::cout << "lambda1  runs  accuracy        nmi\n";
  for (const SweepSummary& s : summarize(rows)) {
    summary << format_real(s.lambda1) << "," << s.runs << "," << format_real(s.accuracy_mean)
            << "," << format_real(s.accuracy_std) << "," << format_real(s.nmi_mean) << ","
            << format_real(s.nmi_std) << "\n";
    char line[128];
    std::snprintf(line, sizeof(line), "%-8g %4zu  %.4f+-%.4f  %.4f+-%.4f\n", s.lambda1, s.runs,
                  s.accuracy_mean, s.accuracy_std, s.nmi_mean, s.nmi_std);
    std::cout << line;
  }
  return kOk;
}

struct SynthFlags {
  std::string out;
  std::string format;
  std::size_t n_per_cluster = 200;
  std::size_t k = 3;
  std::size_t dim = 10;
  double separation = 6.0;
  double noise = 1.0;
  std::uint64_t seed = 0;
};

int cmd_synth(const SynthFlags& f) {
  const Dataset ds = synth_blobs(f.n_per_cluster, f.k, f.dim, f.separation, f.noise, f.seed);
  const fs::path out = f.out;
  const Format format = !f.format.empty() ? parse_format(f.format)
                        : out.extension() == ".csv" ? Format::Csv
                                                     : Format::Dcmx;
  if (format == Format::Csv) {
    write_csv(out, ds.features);
  } else {
    write_dcmx(out, ds.features);
  }
  write_labels(companion_labels_path(out), *ds.labels);
  std::cout << "wrote " << ds.features.shape() << " to " << out.string() << " and "
            << companion_labels_path(out).string() << "\n";
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Deep clustering with an intra-class distance constraint"};
  app.require_subcommand(1);

  TrainFlags train_flags;
  auto* train = app.add_subcommand("train", "Train on a dataset and write labels, log, checkpoint and manifest");
  add_train_flags(train, train_flags);

  std::string manifest, replay_out = "dcidc_replay";
  auto* replay = app.add_subcommand("replay", "Re-run a training run from its manifest");
  replay->add_option("--manifest", manifest, "manifest.json of an earlier run")->required();
  replay->add_option("--out-dir", replay_out, "Output directory")->capture_default_str();

  GradcheckFlags gc;
  auto* gradcheck = app.add_subcommand("gradcheck", "Compare analytic gradients with finite differences");
  gradcheck->add_option("--dims", gc.dims, "Encoder widths including the input")->delimiter(',')->capture_default_str();
  gradcheck->add_option("--samples", gc.samples, "Batch size of the random instance")->capture_default_str();
  gradcheck->add_option("--k", gc.k, "Clusters")->capture_default_str();
  gradcheck->add_option("--lambda1", gc.lambda1)->capture_default_str();
  gradcheck->add_option("--lambda2", gc.lambda2)->capture_default_str();
  gradcheck->add_option("--activation", gc.activation)->capture_default_str();
  gradcheck->add_option("--dec-activation", gc.dec_activation);
  gradcheck->add_option("--seed", gc.seed)->capture_default_str();
  gradcheck->add_option("--step", gc.step, "Finite-difference step")->capture_default_str();
  gradcheck->add_option("--tolerance", gc.tolerance, "Maximum relative error")->capture_default_str();
  gradcheck->add_flag("--perturb", gc.perturb, "Flip the sign of one analytic gradient (self-test)");

  std::string pred, truth;
  auto* evaluate = app.add_subcommand("evaluate", "Accuracy and NMI of a predicted label file");
  evaluate->add_option("--pred", pred, "Predicted labels")->required();
  evaluate->add_option("--truth", truth, "Ground-truth labels")->required();

  TrainFlags sweep_flags;
  std::vector<double> grid{0.0, 0.1, 0.3, 1.0};
  std::vector<std::uint64_t> seeds;
  auto* sweep = app.add_subcommand("sweep", "Accuracy and NMI over a grid of lambda1 values");
  add_train_flags(sweep, sweep_flags);
  sweep->add_option("--grid", grid, "lambda1 values")->delimiter(',')->capture_default_str();
  sweep->add_option("--seeds", seeds, "Seeds per grid point (default: --seed)")->delimiter(',');

  SynthFlags sf;
  auto* synth = app.add_subcommand("synth", "Write a Gaussian blob dataset with labels");
  synth->add_option("--out", sf.out, "Output file (.dcmx or .csv)")->required();
  synth->add_option("--format", sf.format, "csv or dcmx (default: from extension)");
  synth->add_option("--n-per-cluster", sf.n_per_cluster)->capture_default_str();
  synth->add_option("--k", sf.k)->capture_default_str();
  synth->add_option("--dim", sf.dim)->capture_default_str();
  synth->add_option("--separation", sf.separation)->capture_default_str();
  synth->add_option("--noise", sf.noise, "Standard deviation of each blob")->capture_default_str();
  synth->add_option("--seed", sf.seed)->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kUsage;
  }

  try {
    if (*train) return cmd_train(train_flags);
    if (*replay) return cmd_replay(manifest, replay_out);
    if (*gradcheck) return cmd_gradcheck(gc);
    if (*evaluate) return cmd_evaluate(pred, truth);
    if (*sweep) return cmd_sweep(sweep_flags, grid, seeds);
    if (*synth) return cmd_synth(sf);
  } catch (const DivergenceError& e) {
    std::cerr << "dcidc: diverged: " << e.what() << "\n";
    return kDiverged;
  } catch (const DegenerateError& e) {
    std::cerr << "dcidc: degenerate: " << e.what() << "\n";
    return kDegenerate;
  } catch (const IoError& e) {
    std::cerr << "dcidc: io: " << e.what() << "\n";
    return kUsage;
  } catch (const ParseError& e) {
    std::cerr << "dcidc: parse: " << e.what() << "\n";
    return kUsage;
  } catch (const ShapeError& e) {
    std::cerr << "dcidc: shape: " << e.what() << "\n";
    return kUsage;
  } catch (const ConfigError& e) {
    std::cerr << "dcidc: config: " << e.what() << "\n";
    return kUsage;
  } catch (const std::exception& e) {
    std::cerr << "dcidc: " << e.what() << "\n";
    return kUsage;
  }
  return kUsage;
}
