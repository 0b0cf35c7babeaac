#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "dcidc/activation.hpp"
#include "dcidc/autoencoder.hpp"
#include "dcidc/cluster.hpp"
#include "dcidc/matrix.hpp"

namespace dcidc {

struct TrainConfig {
  // Encoder half including the input width, e.g. {10, 6, 2}; the decoder
  // mirrors it.
  std::vector<std::size_t> encoder_dims;
  std::size_t k = 2;
  double lambda1 = 0.3;
  double lambda2 = 3e-4;
  double learning_rate = 1e-3;
  std::size_t max_epochs = 300;
  // Stop once the relative change of the total loss stays below `tol` for
  // `patience` consecutive epochs.
  double tol = 1e-5;
  std::size_t patience = 3;
  std::uint64_t seed = 0;
  // 0 = full batch.
  std::size_t batch_size = 0;
  Activation enc_activation = Activation::Tanh;
  Activation dec_activation = Activation::Tanh;
};

// Throws ConfigError on a negative lambda, non-positive rate or tol, k == 0,
// or an invalid network shape.
void validate(const TrainConfig& config);

struct LossTerms {
  double total = 0.0;
  double reconstruction = 0.0;  // J1
  double intra_class = 0.0;     // J2
  double regularizer = 0.0;     // J3
};

struct EpochReport {
  std::size_t epoch = 0;
  LossTerms loss;
  std::optional<double> accuracy;
  std::optional<double> nmi;
  std::size_t empty_cluster_events = 0;
  // Samples whose least-squares assignment is not their nearest center.
  std::size_t nearest_center_disagreements = 0;
};

struct TrainResult {
  NetworkParams params;
  ClusterState state;
  std::vector<EpochReport> history;
  bool converged = false;
};

// J1 = 1/2 ||Z0 - ZM||^2, J2 = lambda1/2 ||Z_code - H S^T||^2,
// J3 = lambda2/2 sum_m (||W_m||^2 + ||b_m||^2).
LossTerms loss(const NetworkParams& params, const ForwardTrace& trace,
               const ClusterState& state, double lambda1, double lambda2);
LossTerms loss(const NetworkParams& params, const ForwardTrace& trace,
               const ClusterState& state, const TrainConfig& config);

// Total loss of `params` on `data` with the cluster state held fixed.
double total_loss(const NetworkParams& params, const Matrix& data,
                  const ClusterState& state, double lambda1, double lambda2);

// Called after every report with the cluster state the report describes.
using EpochCallback = std::function<void(const EpochReport&, const ClusterState&)>;

// Joint optimization of the network and the cluster state.
//
// Epoch 0 evaluates the initial network against centers computed from the
// random initial indicator. Each later epoch updates the indicator from the
// current codes and centers, takes one gradient step on every weight and bias
// (one per mini-batch when batch_size > 0), re-runs the forward pass,
// recomputes the centers and reports the loss. This is the same sequence of
// operations as forward / centers / loss / indicator / step, with the report
// placed after the loss.
//
// `labels`, when given, are used only to fill accuracy and NMI in reports.
// Throws DivergenceError if the loss becomes non-finite.
TrainResult train(const Matrix& data, const TrainConfig& config,
                  const LabelVector* labels = nullptr,
                  const EpochCallback& on_epoch = {});

struct SweepRow {
  double lambda1 = 0.0;
  std::uint64_t seed = 0;
  std::optional<double> accuracy;
  std::optional<double> nmi;
  std::size_t epochs = 0;
  std::string error;  // non-empty when the run failed
};

// One training run per (lambda1, seed) pair, in grid-major order. A failed run
// is recorded in its row and the sweep continues.
std::vector<SweepRow> lambda1_sweep(const Matrix& data, const TrainConfig& config,
                                    const LabelVector& labels,
                                    const std::vector<double>& grid,
                                    const std::vector<std::uint64_t>& seeds);

struct SweepSummary {
  double lambda1 = 0.0;
  std::size_t runs = 0;
  double accuracy_mean = 0.0;
  double accuracy_std = 0.0;
  double nmi_mean = 0.0;
  double nmi_std = 0.0;
};

// Mean and sample standard deviation of the successful runs per lambda1.
std::vector<SweepSummary> summarize(const std::vector<SweepRow>& rows);

// Shortest decimal form that round-trips the double.
std::string format_real(double v);

inline constexpr const char* kEpochCsvHeader =
    "epoch,j_total,j1,j2,j3,accuracy,nmi,empty_cluster_events";
std::string epoch_csv_line(const EpochReport& report);

}  // namespace dcidc
