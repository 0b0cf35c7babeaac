#include "dcidc/cluster.hpp"

#include <algorithm>
#include <limits>
#include <string>

#include "dcidc/error.hpp"
#include "dcidc/parallel.hpp"
#include "dcidc/rng.hpp"

namespace dcidc {

namespace {

std::size_t argmax_row(std::span<const double> row) {
  std::size_t best = 0;
  for (std::size_t j = 1; j < row.size(); ++j) {
    if (row[j] > row[best]) best = j;
  }
  return best;
}

double distance_sq_to_column(std::span<const double> z, const Matrix& centers,
                             std::size_t col) {
  double s = 0.0;
  for (std::size_t d = 0; d < z.size(); ++d) {
    const double diff = z[d] - centers(d, col);
    s += diff * diff;
  }
  return s;
}

std::string collapsed_centers(const Matrix& centers) {
  std::string names;
  for (std::size_t i = 0; i < centers.cols(); ++i) {
    double norm = 0.0;
    for (std::size_t d = 0; d < centers.rows(); ++d) norm += centers(d, i) * centers(d, i);
    if (norm == 0.0) names += " " + std::to_string(i) + "(zero)";
    for (std::size_t j = i + 1; j < centers.cols(); ++j) {
      double diff = 0.0;
      for (std::size_t d = 0; d < centers.rows(); ++d) {
        const double x = centers(d, i) - centers(d, j);
        diff += x * x;
      }
      if (diff <= 1e-24 * (1.0 + norm)) {
        names += " " + std::to_string(i) + "=" + std::to_string(j);
      }
    }
  }
  return names.empty() ? " (no exact duplicates; ill-conditioned)" : names;
}

}  // namespace

Matrix init_indicator(std::size_t n, std::size_t k, std::uint64_t seed) {
  if (k == 0 || n < k) {
    throw ConfigError("need at least as many samples as clusters, got n=" +
                      std::to_string(n) + " k=" + std::to_string(k));
  }
  Rng rng = Rng::stream(seed, "h-init");
  Matrix h(n, k);
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t c = i < k ? i : static_cast<std::size_t>(rng.below(k));
    h(i, c) = 1.0;
  }
  return h;
}

CenterUpdate update_centers(const Matrix& codes, const Matrix& indicator,
                            const Matrix* previous) {
  if (indicator.rows() != codes.rows()) {
    throw ShapeError("update_centers: indicator " + indicator.shape() +
                     " does not match codes " + codes.shape());
  }
  const std::size_t k = indicator.cols();
  const std::size_t dim = codes.cols();
  if (previous && (previous->rows() != dim || previous->cols() != k)) {
    throw ShapeError("update_centers: previous centers " + previous->shape() +
                     " expected " + std::to_string(dim) + "x" + std::to_string(k));
  }

  const LabelVector labels = labels_from_indicator(indicator);
  Matrix sums(dim, k);
  std::vector<std::size_t> counts(k, 0);
  for (std::size_t i = 0; i < codes.rows(); ++i) {
    const std::size_t c = labels[i];
    ++counts[c];
    auto z = codes.row(i);
    for (std::size_t d = 0; d < dim; ++d) sums(d, c) += z[d];
  }

  CenterUpdate out{Matrix(dim, k), 0};
  std::vector<double> mean(dim, 0.0);
  if (!previous) {
    for (std::size_t i = 0; i < codes.rows(); ++i)
      for (std::size_t d = 0; d < dim; ++d) mean[d] += codes(i, d);
    for (double& m : mean) m /= static_cast<double>(std::max<std::size_t>(1, codes.rows()));
  }

  for (std::size_t c = 0; c < k; ++c) {
    if (counts[c] > 0) {
      const double n = static_cast<double>(counts[c]);
      for (std::size_t d = 0; d < dim; ++d) out.centers(d, c) = sums(d, c) / n;
      continue;
    }
    ++out.empty_clusters;
    if (codes.rows() == 0) continue;
    Matrix anchor(dim, 1);
    for (std::size_t d = 0; d < dim; ++d) anchor(d, 0) = previous ? (*previous)(d, c) : mean[d];
    std::size_t far = 0;
    double far_dist = -1.0;
    for (std::size_t i = 0; i < codes.rows(); ++i) {
      const double dist = distance_sq_to_column(codes.row(i), anchor, 0);
      if (dist > far_dist) {
        far_dist = dist;
        far = i;
      }
    }
    for (std::size_t d = 0; d < dim; ++d) out.centers(d, c) = codes(far, d);
  }
  return out;
}

Matrix indicator_coefficients(const Matrix& codes, const Matrix& centers) {
  if (codes.cols() != centers.rows()) {
    throw ShapeError("update_indicator: codes " + codes.shape() +
                     " do not live in the space of centers " + centers.shape());
  }
  const Matrix gram = matmul_tn(centers, centers);  // K x K
  const Matrix rhs = matmul_tn(centers, codes.transpose());  // K x N
  Matrix coeffs;
  try {
    coeffs = solve_spd(gram, rhs);
  } catch (const DegenerateError&) {
    throw DegenerateError("update_indicator: centers collapsed:" +
                          collapsed_centers(centers));
  }
  return coeffs.transpose();
}

Matrix binarize(const Matrix& coefficients) {
  Matrix h(coefficients.rows(), coefficients.cols());
  parallel_for(coefficients.rows(), [&](std::size_t begin, std::size_t end) {
    for (std::size_t i = begin; i < end; ++i) h(i, argmax_row(coefficients.row(i))) = 1.0;
  });
  return h;
}

Matrix update_indicator(const Matrix& codes, const Matrix& centers) {
  return binarize(indicator_coefficients(codes, centers));
}

double intra_class_error(const Matrix& codes, const Matrix& indicator,
                         const Matrix& centers) {
  if (indicator.rows() != codes.rows() || centers.rows() != codes.cols() ||
      indicator.cols() != centers.cols()) {
    throw ShapeError("intra_class_error: codes " + codes.shape() + ", indicator " +
                     indicator.shape() + ", centers " + centers.shape());
  }
  return frobenius_sq(sub(codes, matmul_nt(indicator, centers)));
}

LabelVector labels_from_indicator(const Matrix& indicator) {
  LabelVector labels(indicator.rows());
  for (std::size_t i = 0; i < indicator.rows(); ++i) {
    labels[i] = argmax_row(indicator.row(i));
  }
  return labels;
}

Matrix indicator_from_labels(const LabelVector& labels, std::size_t k) {
  Matrix h(labels.size(), k);
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (labels[i] >= k) {
      throw ShapeError("label " + std::to_string(labels[i]) + " at row " +
                       std::to_string(i) + " outside [0," + std::to_string(k) + ")");
    }
    h(i, labels[i]) = 1.0;
  }
  return h;
}

std::size_t nearest_center_disagreements(const Matrix& codes, const Matrix& indicator,
                                         const Matrix& centers) {
  const LabelVector assigned = labels_from_indicator(indicator);
  std::size_t count = 0;
  for (std::size_t i = 0; i < codes.rows(); ++i) {
    std::size_t best = 0;
    double best_dist = std::numeric_limits<double>::infinity();
    for (std::size_t c = 0; c < centers.cols(); ++c) {
      const double d = distance_sq_to_column(codes.row(i), centers, c);
      if (d < best_dist) {
        best_dist = d;
        best = c;
      }
    }
    if (best != assigned[i]) ++count;
  }
  return count;
}

}  // namespace dcidc
