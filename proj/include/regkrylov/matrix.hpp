#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace regkrylov {

using Vector = std::vector<double>;

/// Dense column-major matrix. Columns are contiguous, which is what the
/// Krylov bases and eigenvector sets want.
class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols, double fill = 0.0)
      : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

  static Matrix identity(std::size_t n);
  static Matrix diagonal(std::span<const double> d);
  /// Builds a matrix from row-major nested initializer data (tests, small cases).
  static Matrix from_rows(const std::vector<std::vector<double>>& rows);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  bool empty() const { return data_.empty(); }

  double& operator()(std::size_t i, std::size_t j) { return data_[j * rows_ + i]; }
  double operator()(std::size_t i, std::size_t j) const { return data_[j * rows_ + i]; }

  std::span<double> col(std::size_t j) { return {data_.data() + j * rows_, rows_}; }
  std::span<const double> col(std::size_t j) const { return {data_.data() + j * rows_, rows_}; }

  std::span<double> data() { return data_; }
  std::span<const double> data() const { return data_; }

  /// Leading block of the given size.
  Matrix block(std::size_t rows, std::size_t cols) const;
  Matrix transpose() const;

  bool operator==(const Matrix&) const = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

double dot(std::span<const double> x, std::span<const double> y);
double norm2(std::span<const double> x);
void axpy(double a, std::span<const double> x, std::span<double> y);
void scale(double a, std::span<double> x);
Vector subtract(std::span<const double> x, std::span<const double> y);

Matrix multiply(const Matrix& a, const Matrix& b);
Matrix multiply_at_b(const Matrix& a, const Matrix& b);  // aᵀ b
Vector multiply(const Matrix& a, std::span<const double> x);
Vector multiply_transpose(const Matrix& a, std::span<const double> x);  // aᵀ x
Matrix subtract(const Matrix& a, const Matrix& b);
double frobenius_norm(const Matrix& a);

/// Q_k y for the first y.size() columns of q.
Vector combine_columns(const Matrix& q, std::span<const double> y);

}  // namespace regkrylov
