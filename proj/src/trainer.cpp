#include "dcidc/trainer.hpp"

#include <algorithm>
#include <charconv>
#include <limits>
#include <cmath>
#include <map>
#include <numeric>

#include "dcidc/error.hpp"
#include "dcidc/metrics.hpp"
#include "dcidc/rng.hpp"

namespace dcidc {

namespace {

Matrix gather_rows(const Matrix& m, std::span<const std::size_t> rows) {
  Matrix out(rows.size(), m.cols());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    auto src = m.row(rows[i]);
    std::copy(src.begin(), src.end(), out.row(i).begin());
  }
  return out;
}

bool finite(const LossTerms& l) {
  return std::isfinite(l.total) && std::isfinite(l.reconstruction) &&
         std::isfinite(l.intra_class) && std::isfinite(l.regularizer);
}

}  // namespace

void validate(const TrainConfig& c) {
  if (!(c.lambda1 >= 0.0)) throw ConfigError("lambda1 must be >= 0, got " + format_real(c.lambda1));
  if (!(c.lambda2 >= 0.0)) throw ConfigError("lambda2 must be >= 0, got " + format_real(c.lambda2));
  if (!(c.learning_rate > 0.0)) {
    throw ConfigError("learning rate must be > 0, got " + format_real(c.learning_rate));
  }
  if (!(c.tol > 0.0)) throw ConfigError("tol must be > 0, got " + format_real(c.tol));
  if (c.k == 0) throw ConfigError("k must be >= 1");
  validate_dims(mirror_dims(c.encoder_dims));
}

LossTerms loss(const NetworkParams& params, const ForwardTrace& trace,
               const ClusterState& state, double lambda1, double lambda2) {
  LossTerms t;
  t.reconstruction = 0.5 * frobenius_sq(sub(trace.input(), trace.reconstruction()));
  t.intra_class =
      lambda1 == 0.0
          ? 0.0
          : 0.5 * lambda1 * intra_class_error(trace.code(), state.indicator, state.centers);
  double reg = 0.0;
  for (std::size_t l = 0; l < params.depth(); ++l) {
    reg += frobenius_sq(params.weights[l]) + squared_norm(params.biases[l]);
  }
  t.regularizer = 0.5 * lambda2 * reg;
  t.total = t.reconstruction + t.intra_class + t.regularizer;
  return t;
}

LossTerms loss(const NetworkParams& params, const ForwardTrace& trace,
               const ClusterState& state, const TrainConfig& config) {
  return loss(params, trace, state, config.lambda1, config.lambda2);
}

double total_loss(const NetworkParams& params, const Matrix& data,
                  const ClusterState& state, double lambda1, double lambda2) {
  return loss(params, forward(params, data), state, lambda1, lambda2).total;
}

TrainResult train(const Matrix& data, const TrainConfig& config,
                  const LabelVector* labels, const EpochCallback& on_epoch) {
  validate(config);
  if (config.encoder_dims.front() != data.cols()) {
    throw ShapeError("data has " + std::to_string(data.cols()) +
                     " columns but the network input width is " +
                     std::to_string(config.encoder_dims.front()));
  }
  if (data.rows() < config.k) {
    throw ConfigError("data has " + std::to_string(data.rows()) +
                      " rows, fewer than k=" + std::to_string(config.k));
  }
  if (labels && labels->size() != data.rows()) {
    throw ShapeError("labels have length " + std::to_string(labels->size()) +
                     " but data has " + std::to_string(data.rows()) + " rows");
  }

  TrainResult result;
  result.params = init_network(mirror_dims(config.encoder_dims), config.enc_activation,
                               config.dec_activation, config.seed);
  ClusterState& state = result.state;
  state.k = config.k;
  state.indicator = init_indicator(data.rows(), config.k, config.seed);

  ForwardTrace trace = forward(result.params, data);
  std::size_t empty_events = 0;
  {
    CenterUpdate cu = update_centers(trace.code(), state.indicator);
    state.centers = std::move(cu.centers);
    empty_events = cu.empty_clusters;
  }

  Rng shuffle = Rng::stream(config.seed, "shuffle");
  std::vector<std::size_t> order(data.rows());
  std::iota(order.begin(), order.end(), 0);

  std::size_t calm_epochs = 0;
  for (std::size_t epoch = 0;; ++epoch) {
    if (epoch > 0) {
      state.indicator = update_indicator(trace.code(), state.centers);

      if (config.batch_size == 0 || config.batch_size >= data.rows()) {
        const Gradients g = backward(result.params, trace, state.indicator, state.centers,
                                     config.lambda1, config.lambda2);
        apply_update(result.params, g, config.learning_rate);
      } else {
        for (std::size_t i = order.size(); i > 1; --i) {
          std::swap(order[i - 1], order[shuffle.below(i)]);
        }
        for (std::size_t begin = 0; begin < order.size(); begin += config.batch_size) {
          const std::size_t end = std::min(order.size(), begin + config.batch_size);
          std::span<const std::size_t> rows(order.data() + begin, end - begin);
          const Matrix batch = gather_rows(data, rows);
          const Matrix h = gather_rows(state.indicator, rows);
          const ForwardTrace bt = forward(result.params, batch);
          const Gradients g = backward(result.params, bt, h, state.centers,
                                       config.lambda1, config.lambda2);
          apply_update(result.params, g, config.learning_rate);
        }
      }

      trace = forward(result.params, data);
      CenterUpdate cu = update_centers(trace.code(), state.indicator, &state.centers);
      state.centers = std::move(cu.centers);
      empty_events = cu.empty_clusters;
    }

    EpochReport report;
    report.epoch = epoch;
    report.loss = loss(result.params, trace, state, config);
    report.empty_cluster_events = empty_events;
    report.nearest_center_disagreements =
        nearest_center_disagreements(trace.code(), state.indicator, state.centers);
    if (!finite(report.loss)) {
      throw DivergenceError("loss became non-finite at epoch " + std::to_string(epoch),
                            epoch);
    }
    if (labels) {
      const LabelVector predicted = labels_from_indicator(state.indicator);
      report.accuracy = accuracy(predicted, *labels);
      report.nmi = nmi(predicted, *labels);
    }
    if (on_epoch) on_epoch(report, state);

    if (!result.history.empty()) {
      const double prev = result.history.back().loss.total;
      const double change = std::abs(report.loss.total - prev) /
                            std::max(std::abs(prev), std::numeric_limits<double>::min());
      calm_epochs = change < config.tol ? calm_epochs + 1 : 0;
    }
    result.history.push_back(report);

    if (calm_epochs >= config.patience) {
      result.converged = true;
      break;
    }
    if (epoch >= config.max_epochs) break;
  }
  return result;
}

std::vector<SweepRow> lambda1_sweep(const Matrix& data, const TrainConfig& config,
                                    const LabelVector& labels,
                                    const std::vector<double>& grid,
                                    const std::vector<std::uint64_t>& seeds) {
  std::vector<SweepRow> rows;
  for (double lambda1 : grid) {
    for (std::uint64_t seed : seeds) {
      SweepRow row;
      row.lambda1 = lambda1;
      row.seed = seed;
      TrainConfig c = config;
      c.lambda1 = lambda1;
      c.seed = seed;
      try {
        const TrainResult r = train(data, c, &labels);
        row.accuracy = r.history.back().accuracy;
        row.nmi = r.history.back().nmi;
        row.epochs = r.history.back().epoch;
      } catch (const Error& e) {
        row.error = e.what();
      }
      rows.push_back(std::move(row));
    }
  }
  return rows;
}

std::vector<SweepSummary> summarize(const std::vector<SweepRow>& rows) {
  std::vector<SweepSummary> out;
  std::map<double, std::vector<const SweepRow*>> groups;
  std::vector<double> order;
  for (const SweepRow& r : rows) {
    if (!groups.contains(r.lambda1)) order.push_back(r.lambda1);
    if (r.error.empty() && r.accuracy && r.nmi) groups[r.lambda1].push_back(&r);
    else groups[r.lambda1];
  }
  auto mean_std = [](const std::vector<double>& v) {
    if (v.empty()) return std::pair{0.0, 0.0};
    const double mean = std::accumulate(v.begin(), v.end(), 0.0) / v.size();
    double ss = 0.0;
    for (double x : v) ss += (x - mean) * (x - mean);
    return std::pair{mean, v.size() > 1 ? std::sqrt(ss / (v.size() - 1)) : 0.0};
  };
  for (double l : order) {
    std::vector<double> acc, nm;
    for (const SweepRow* r : groups[l]) {
      acc.push_back(*r->accuracy);
      nm.push_back(*r->nmi);
    }
    SweepSummary s;
    s.lambda1 = l;
    s.runs = acc.size();
    std::tie(s.accuracy_mean, s.accuracy_std) = mean_std(acc);
    std::tie(s.nmi_mean, s.nmi_std) = mean_std(nm);
    out.push_back(s);
  }
  return out;
}

std::string format_real(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

std::string epoch_csv_line(const EpochReport& r) {
  std::string line = std::to_string(r.epoch);
  for (double v : {r.loss.total, r.loss.reconstruction, r.loss.intra_class,
                   r.loss.regularizer}) {
    line += "," + format_real(v);
  }
  line += "," + (r.accuracy ? format_real(*r.accuracy) : std::string());
  line += "," + (r.nmi ? format_real(*r.nmi) : std::string());
  line += "," + std::to_string(r.empty_cluster_events);
  return line;
}

}  // namespace dcidc
