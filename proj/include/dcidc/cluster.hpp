#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "dcidc/matrix.hpp"

namespace dcidc {

using LabelVector = std::vector<std::size_t>;

// Cluster centers in code space and the hard assignment of every sample.
struct ClusterState {
  Matrix centers;    // d x K, column i is the center of cluster i
  Matrix indicator;  // N x K, one-hot rows
  std::size_t k = 0;
};

struct CenterUpdate {
  Matrix centers;
  // Clusters that had no members and were re-seeded.
  std::size_t empty_clusters = 0;
};

// Random one-hot N x K indicator. Row i < k is assigned to cluster i so that
// no cluster starts empty; the remaining rows are drawn uniformly.
Matrix init_indicator(std::size_t n, std::size_t k, std::uint64_t seed);

// Column i of the result is the mean of the code rows assigned to cluster i.
// An empty cluster is re-seeded at the code row farthest from its previous
// center (`previous`, d x K) or from the global code mean when no previous
// centers are supplied.
CenterUpdate update_centers(const Matrix& codes, const Matrix& indicator,
                            const Matrix* previous = nullptr);

// Least-squares coefficients h^T = (S^T S)^{-1} S^T z^T of every code row
// against the centers, as an N x K matrix. Throws DegenerateError naming the
// collapsed centers if S^T S cannot be factorized.
Matrix indicator_coefficients(const Matrix& codes, const Matrix& centers);

// Sets the largest entry of every row to 1 and the rest to 0. Ties go to the
// lowest column index.
Matrix binarize(const Matrix& coefficients);

// binarize(indicator_coefficients(codes, centers))
Matrix update_indicator(const Matrix& codes, const Matrix& centers);

// ||codes - indicator * centers^T||_F^2
double intra_class_error(const Matrix& codes, const Matrix& indicator,
                         const Matrix& centers);

LabelVector labels_from_indicator(const Matrix& indicator);
Matrix indicator_from_labels(const LabelVector& labels, std::size_t k);

// Number of rows whose assigned cluster differs from the nearest center by
// Euclidean distance. The least-squares assignment agrees with the
// nearest-center rule only for orthonormal centers.
std::size_t nearest_center_disagreements(const Matrix& codes, const Matrix& indicator,
                                         const Matrix& centers);

}  // namespace dcidc
