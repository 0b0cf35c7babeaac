#pragma once

#include <cstddef>
#include <initializer_list>
#include <span>
#include <string>
#include <vector>

namespace dcidc {

// Dense row-major matrix of doubles. Rows are samples throughout the engine:
// a batch of N inputs of width D is an N x D matrix.
class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols, double fill = 0.0);
  Matrix(std::size_t rows, std::size_t cols, std::vector<double> data);
  Matrix(std::initializer_list<std::initializer_list<double>> rows);

  static Matrix identity(std::size_t n);

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  std::size_t size() const noexcept { return data_.size(); }
  bool empty() const noexcept { return data_.empty(); }

  double& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
  double operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }

  std::span<double> row(std::size_t r) { return {data_.data() + r * cols_, cols_}; }
  std::span<const double> row(std::size_t r) const {
    return {data_.data() + r * cols_, cols_};
  }

  std::span<double> values() noexcept { return data_; }
  std::span<const double> values() const noexcept { return data_; }

  Matrix transpose() const;

  // "3x4"
  std::string shape() const;

  friend bool operator==(const Matrix&, const Matrix&) = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

Matrix matmul(const Matrix& a, const Matrix& b);
// a^T * b without materialising the transpose.
Matrix matmul_tn(const Matrix& a, const Matrix& b);
// a * b^T without materialising the transpose.
Matrix matmul_nt(const Matrix& a, const Matrix& b);

Matrix add(const Matrix& a, const Matrix& b);
Matrix sub(const Matrix& a, const Matrix& b);
Matrix scale(const Matrix& a, double s);
Matrix hadamard(const Matrix& a, const Matrix& b);

// Adds `v` to every row of `a`; v.size() must equal a.cols().
Matrix add_row_vector(const Matrix& a, std::span<const double> v);
std::vector<double> column_sums(const Matrix& a);

double frobenius_sq(const Matrix& a);
double squared_norm(std::span<const double> v);

bool all_finite(const Matrix& a);

// Ridge added to the diagonal when the first factorization of a
// positive semi-definite system fails.
inline constexpr double kSolveRidge = 1e-8;

// Solves a * x = b for symmetric positive semi-definite `a` via Cholesky.
// A pivot that is non-positive (or negligible relative to the largest
// diagonal entry) triggers one retry on a + kSolveRidge * I. Throws
// DegenerateError if that retry also fails, ShapeError on bad shapes.
Matrix solve_spd(const Matrix& a, const Matrix& b);

}  // namespace dcidc
