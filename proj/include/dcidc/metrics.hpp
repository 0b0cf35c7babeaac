#pragma once

#include <cstddef>
#include <vector>

#include "dcidc/cluster.hpp"
#include "dcidc/matrix.hpp"

namespace dcidc {

// counts(p, t) = number of samples with predicted label p and true label t.
Matrix contingency(const LabelVector& predicted, const LabelVector& truth);

// Fraction of samples matched under the best one-to-one pairing of predicted
// clusters with true classes. The cluster and class counts may differ;
// unpaired clusters score nothing.
double accuracy(const LabelVector& predicted, const LabelVector& truth);

// I(P;T) / sqrt(H(P) H(T)) with natural-log entropies. Two identical
// single-cluster partitions score 1; otherwise a zero entropy scores 0.
double nmi(const LabelVector& predicted, const LabelVector& truth);

// Maximum-weight assignment on a rows x cols weight matrix. Returns, for each
// row, the assigned column or SIZE_MAX when the row is left unmatched
// (rows > cols).
std::vector<std::size_t> max_weight_assignment(const Matrix& weights);

}  // namespace dcidc
