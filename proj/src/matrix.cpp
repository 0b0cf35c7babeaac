#include "dcidc/matrix.hpp"

#include <algorithm>
#include <cmath>

#include "dcidc/error.hpp"
#include "dcidc/parallel.hpp"

namespace dcidc {

namespace {

void require_same_shape(const Matrix& a, const Matrix& b, const char* op) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) {
    throw ShapeError(std::string(op) + ": shape mismatch " + a.shape() + " vs " +
                     b.shape());
  }
}

template <typename F>
Matrix zip(const Matrix& a, const Matrix& b, const char* op, F f) {
  require_same_shape(a, b, op);
  Matrix out(a.rows(), a.cols());
  auto x = a.values();
  auto y = b.values();
  auto z = out.values();
  for (std::size_t i = 0; i < z.size(); ++i) z[i] = f(x[i], y[i]);
  return out;
}

// In-place Cholesky a = L L^T, L stored in the lower triangle. Returns false
// on a pivot that is non-positive or below `floor`.
bool cholesky(Matrix& a, double floor) {
  const std::size_t n = a.rows();
  for (std::size_t j = 0; j < n; ++j) {
    double d = a(j, j);
    for (std::size_t k = 0; k < j; ++k) d -= a(j, k) * a(j, k);
    if (!(d > floor)) return false;
    const double l = std::sqrt(d);
    a(j, j) = l;
    for (std::size_t i = j + 1; i < n; ++i) {
      double s = a(i, j);
      for (std::size_t k = 0; k < j; ++k) s -= a(i, k) * a(j, k);
      a(i, j) = s / l;
    }
  }
  return true;
}

}  // namespace

Matrix::Matrix(std::size_t rows, std::size_t cols, double fill)
    : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

Matrix::Matrix(std::size_t rows, std::size_t cols, std::vector<double> data)
    : rows_(rows), cols_(cols), data_(std::move(data)) {
  if (data_.size() != rows * cols) {
    throw ShapeError("Matrix: " + std::to_string(data_.size()) +
                     " values do not fill " + shape());
  }
}

Matrix::Matrix(std::initializer_list<std::initializer_list<double>> rows)
    : rows_(rows.size()), cols_(rows.size() ? rows.begin()->size() : 0) {
  data_.reserve(rows_ * cols_);
  for (const auto& r : rows) {
    if (r.size() != cols_) throw ShapeError("Matrix: ragged initializer");
    data_.insert(data_.end(), r.begin(), r.end());
  }
}

Matrix Matrix::identity(std::size_t n) {
  Matrix m(n, n);
  for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
  return m;
}

Matrix Matrix::transpose() const {
  Matrix t(cols_, rows_);
  for (std::size_t r = 0; r < rows_; ++r)
    for (std::size_t c = 0; c < cols_; ++c) t(c, r) = (*this)(r, c);
  return t;
}

std::string Matrix::shape() const {
  return std::to_string(rows_) + "x" + std::to_string(cols_);
}

Matrix matmul(const Matrix& a, const Matrix& b) {
  if (a.cols() != b.rows()) {
    throw ShapeError("matmul: inner dimensions differ, " + a.shape() + " * " +
                     b.shape());
  }
  Matrix out(a.rows(), b.cols());
  parallel_for(a.rows(), [&](std::size_t begin, std::size_t end) {
    for (std::size_t i = begin; i < end; ++i) {
      auto dst = out.row(i);
      for (std::size_t k = 0; k < a.cols(); ++k) {
        const double aik = a(i, k);
        auto src = b.row(k);
        for (std::size_t j = 0; j < dst.size(); ++j) dst[j] += aik * src[j];
      }
    }
  });
  return out;
}

Matrix matmul_tn(const Matrix& a, const Matrix& b) {
  if (a.rows() != b.rows()) {
    throw ShapeError("matmul_tn: row counts differ, " + a.shape() + "^T * " +
                     b.shape());
  }
  Matrix out(a.cols(), b.cols());
  for (std::size_t k = 0; k < a.rows(); ++k) {
    auto arow = a.row(k);
    auto brow = b.row(k);
    for (std::size_t i = 0; i < arow.size(); ++i) {
      const double aki = arow[i];
      auto dst = out.row(i);
      for (std::size_t j = 0; j < brow.size(); ++j) dst[j] += aki * brow[j];
    }
  }
  return out;
}

Matrix matmul_nt(const Matrix& a, const Matrix& b) {
  if (a.cols() != b.cols()) {
    throw ShapeError("matmul_nt: column counts differ, " + a.shape() + " * " +
                     b.shape() + "^T");
  }
  Matrix out(a.rows(), b.rows());
  parallel_for(a.rows(), [&](std::size_t begin, std::size_t end) {
    for (std::size_t i = begin; i < end; ++i) {
      auto arow = a.row(i);
      for (std::size_t j = 0; j < b.rows(); ++j) {
        auto brow = b.row(j);
        double s = 0.0;
        for (std::size_t k = 0; k < arow.size(); ++k) s += arow[k] * brow[k];
        out(i, j) = s;
      }
    }
  });
  return out;
}

Matrix add(const Matrix& a, const Matrix& b) {
  return zip(a, b, "add", [](double x, double y) { return x + y; });
}

Matrix sub(const Matrix& a, const Matrix& b) {
  return zip(a, b, "sub", [](double x, double y) { return x - y; });
}

Matrix hadamard(const Matrix& a, const Matrix& b) {
  return zip(a, b, "hadamard", [](double x, double y) { return x * y; });
}

Matrix scale(const Matrix& a, double s) {
  Matrix out = a;
  for (double& v : out.values()) v *= s;
  return out;
}

Matrix add_row_vector(const Matrix& a, std::span<const double> v) {
  if (v.size() != a.cols()) {
    throw ShapeError("add_row_vector: vector of length " + std::to_string(v.size()) +
                     " against " + a.shape());
  }
  Matrix out = a;
  for (std::size_t r = 0; r < out.rows(); ++r) {
    auto row = out.row(r);
    for (std::size_t c = 0; c < row.size(); ++c) row[c] += v[c];
  }
  return out;
}

std::vector<double> column_sums(const Matrix& a) {
  std::vector<double> s(a.cols(), 0.0);
  for (std::size_t r = 0; r < a.rows(); ++r) {
    auto row = a.row(r);
    for (std::size_t c = 0; c < row.size(); ++c) s[c] += row[c];
  }
  return s;
}

double squared_norm(std::span<const double> v) {
  double s = 0.0;
  for (double x : v) s += x * x;
  return s;
}

double frobenius_sq(const Matrix& a) { return squared_norm(a.values()); }

bool all_finite(const Matrix& a) {
  return std::all_of(a.values().begin(), a.values().end(),
                     [](double x) { return std::isfinite(x); });
}

Matrix solve_spd(const Matrix& a, const Matrix& b) {
  if (a.rows() != a.cols()) {
    throw ShapeError("solve_spd: matrix is not square, " + a.shape());
  }
  if (b.rows() != a.rows()) {
    throw ShapeError("solve_spd: right-hand side " + b.shape() +
                     " does not match " + a.shape());
  }
  const std::size_t n = a.rows();
  double max_diag = 0.0;
  for (std::size_t i = 0; i < n; ++i) max_diag = std::max(max_diag, std::abs(a(i, i)));
  // Pivots this small relative to the diagonal mean the matrix is singular to
  // working precision; the unregularized solve would just amplify roundoff.
  const double floor = max_diag * 1e-13;

  Matrix l = a;
  if (!cholesky(l, floor)) {
    l = a;
    for (std::size_t i = 0; i < n; ++i) l(i, i) += kSolveRidge;
    if (!cholesky(l, 0.0)) {
      throw DegenerateError("solve_spd: " + a.shape() +
                            " system is singular even after ridge " +
                            std::to_string(kSolveRidge));
    }
  }

  Matrix x = b;
  for (std::size_t c = 0; c < x.cols(); ++c) {
    // L y = b
    for (std::size_t i = 0; i < n; ++i) {
      double s = x(i, c);
      for (std::size_t k = 0; k < i; ++k) s -= l(i, k) * x(k, c);
      x(i, c) = s / l(i, i);
    }
    // L^T x = y
    for (std::size_t i = n; i-- > 0;) {
      double s = x(i, c);
      for (std::size_t k = i + 1; k < n; ++k) s -= l(k, i) * x(k, c);
      x(i, c) = s / l(i, i);
    }
  }
  return x;
}

}  // namespace dcidc
