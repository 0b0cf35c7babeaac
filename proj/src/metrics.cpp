#include "dcidc/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>

#include "dcidc/error.hpp"

namespace dcidc {

namespace {

void require_same_length(const LabelVector& a, const LabelVector& b, const char* op) {
  if (a.size() != b.size()) {
    throw ShapeError(std::string(op) + ": label vectors of length " +
                     std::to_string(a.size()) + " and " + std::to_string(b.size()));
  }
}

std::size_t label_count(const LabelVector& v) {
  return v.empty() ? 0 : *std::max_element(v.begin(), v.end()) + 1;
}

}  // namespace

Matrix contingency(const LabelVector& predicted, const LabelVector& truth) {
  require_same_length(predicted, truth, "contingency");
  Matrix counts(label_count(predicted), label_count(truth));
  for (std::size_t i = 0; i < predicted.size(); ++i) counts(predicted[i], truth[i]) += 1.0;
  return counts;
}

// Hungarian method with potentials (shortest augmenting paths), solving the
// minimum-cost problem on -weights padded to a square matrix.
std::vector<std::size_t> max_weight_assignment(const Matrix& weights) {
  const std::size_t rows = weights.rows();
  const std::size_t n = std::max(rows, weights.cols());
  if (n == 0) return {};
  auto cost = [&](std::size_t i, std::size_t j) {
    return (i < rows && j < weights.cols()) ? -weights(i, j) : 0.0;
  };
  constexpr double kInf = std::numeric_limits<double>::infinity();
  // 1-based arrays; column 0 is the virtual source.
  std::vector<double> u(n + 1, 0.0), v(n + 1, 0.0);
  std::vector<std::size_t> match(n + 1, 0), way(n + 1, 0);
  for (std::size_t i = 1; i <= n; ++i) {
    match[0] = i;
    std::size_t j0 = 0;
    std::vector<double> minv(n + 1, kInf);
    std::vector<bool> used(n + 1, false);
    do {
      used[j0] = true;
      const std::size_t i0 = match[j0];
      double delta = kInf;
      std::size_t j1 = 0;
      for (std::size_t j = 1; j <= n; ++j) {
        if (used[j]) continue;
        const double cur = cost(i0 - 1, j - 1) - u[i0] - v[j];
        if (cur < minv[j]) {
          minv[j] = cur;
          way[j] = j0;
        }
        if (minv[j] < delta) {
          delta = minv[j];
          j1 = j;
        }
      }
      for (std::size_t j = 0; j <= n; ++j) {
        if (used[j]) {
          u[match[j]] += delta;
          v[j] -= delta;
        } else {
          minv[j] -= delta;
        }
      }
      j0 = j1;
    } while (match[j0] != 0);
    do {
      const std::size_t j1 = way[j0];
      match[j0] = match[j1];
      j0 = j1;
    } while (j0 != 0);
  }
  std::vector<std::size_t> assignment(rows, SIZE_MAX);
  for (std::size_t j = 1; j <= n; ++j) {
    const std::size_t i = match[j] - 1;
    if (i < rows && j - 1 < weights.cols()) assignment[i] = j - 1;
  }
  return assignment;
}

double accuracy(const LabelVector& predicted, const LabelVector& truth) {
  require_same_length(predicted, truth, "accuracy");
  if (predicted.empty()) return 0.0;
  const Matrix counts = contingency(predicted, truth);
  const auto assignment = max_weight_assignment(counts);
  // Counts are small integers, so the matched total is exact.
  std::size_t matched = 0;
  for (std::size_t p = 0; p < assignment.size(); ++p) {
    if (assignment[p] != SIZE_MAX) {
      matched += static_cast<std::size_t>(counts(p, assignment[p]));
    }
  }
  return static_cast<double>(matched) / static_cast<double>(predicted.size());
}

double nmi(const LabelVector& predicted, const LabelVector& truth) {
  require_same_length(predicted, truth, "nmi");
  if (predicted.empty()) return 0.0;
  const Matrix counts = contingency(predicted, truth);
  const double n = static_cast<double>(predicted.size());

  std::vector<double> row(counts.rows(), 0.0), col(counts.cols(), 0.0);
  for (std::size_t i = 0; i < counts.rows(); ++i)
    for (std::size_t j = 0; j < counts.cols(); ++j) {
      row[i] += counts(i, j);
      col[j] += counts(i, j);
    }

  auto entropy = [n](const std::vector<double>& marginal) {
    double h = 0.0;
    for (double c : marginal)
      if (c > 0.0) h -= (c / n) * std::log(c / n);
    return h;
  };
  const double hp = entropy(row);
  const double ht = entropy(col);
  if (hp == 0.0 || ht == 0.0) {
    // Non-empty rows/columns: a single occupied label on each side.
    const auto occupied = [](const std::vector<double>& m) {
      return std::count_if(m.begin(), m.end(), [](double c) { return c > 0.0; });
    };
    return (occupied(row) == 1 && occupied(col) == 1) ? 1.0 : 0.0;
  }

  double mi = 0.0;
  for (std::size_t i = 0; i < counts.rows(); ++i)
    for (std::size_t j = 0; j < counts.cols(); ++j) {
      const double c = counts(i, j);
      if (c > 0.0) mi += (c / n) * std::log(c * n / (row[i] * col[j]));
    }
  return std::clamp(mi / std::sqrt(hp * ht), 0.0, 1.0);
}

}  // namespace dcidc
