#include "regkrylov/matrix.hpp"

#include <cmath>

#include "regkrylov/errors.hpp"

namespace regkrylov {

Matrix Matrix::identity(std::size_t n) {
  Matrix m(n, n);
  for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
  return m;
}

Matrix Matrix::diagonal(std::span<const double> d) {
  Matrix m(d.size(), d.size());
  for (std::size_t i = 0; i < d.size(); ++i) m(i, i) = d[i];
  return m;
}

Matrix Matrix::from_rows(const std::vector<std::vector<double>>& rows) {
  const std::size_t r = rows.size();
  const std::size_t c = r == 0 ? 0 : rows.front().size();
  Matrix m(r, c);
  for (std::size_t i = 0; i < r; ++i) {
    require(rows[i].size() == c, "Matrix::from_rows: ragged input");
    for (std::size_t j = 0; j < c; ++j) m(i, j) = rows[i][j];
  }
  return m;
}

Matrix Matrix::block(std::size_t rows, std::size_t cols) const {
  require(rows <= rows_ && cols <= cols_, "Matrix::block: out of range");
  Matrix b(rows, cols);
  for (std::size_t j = 0; j < cols; ++j)
    for (std::size_t i = 0; i < rows; ++i) b(i, j) = (*this)(i, j);
  return b;
}

Matrix Matrix::transpose() const {
  Matrix t(cols_, rows_);
  for (std::size_t j = 0; j < cols_; ++j)
    for (std::size_t i = 0; i < rows_; ++i) t(j, i) = (*this)(i, j);
  return t;
}

double dot(std::span<const double> x, std::span<const double> y) {
  require(x.size() == y.size(), "dot: size mismatch");
  double s = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) s += x[i] * y[i];
  return s;
}

double norm2(std::span<const double> x) {
  // scaled accumulation; Picard coefficients span many decades
  double scale_ = 0.0;
  double ssq = 1.0;
  for (double v : x) {
    if (v == 0.0) continue;
    const double a = std::fabs(v);
    if (scale_ < a) {
      ssq = 1.0 + ssq * (scale_ / a) * (scale_ / a);
      scale_ = a;
    } else {
      ssq += (a / scale_) * (a / scale_);
    }
  }
  return scale_ * std::sqrt(ssq);
}

void axpy(double a, std::span<const double> x, std::span<double> y) {
  require(x.size() == y.size(), "axpy: size mismatch");
  for (std::size_t i = 0; i < x.size(); ++i) y[i] += a * x[i];
}

void scale(double a, std::span<double> x) {
  for (double& v : x) v *= a;
}

Vector subtract(std::span<const double> x, std::span<const double> y) {
  require(x.size() == y.size(), "subtract: size mismatch");
  Vector r(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) r[i] = x[i] - y[i];
  return r;
}

Matrix multiply(const Matrix& a, const Matrix& b) {
  require(a.cols() == b.rows(), "multiply: inner dimension mismatch");
  Matrix c(a.rows(), b.cols());
  for (std::size_t j = 0; j < b.cols(); ++j) {
    auto cj = c.col(j);
    for (std::size_t l = 0; l < a.cols(); ++l) {
      const double blj = b(l, j);
      if (blj == 0.0) continue;
      axpy(blj, a.col(l), cj);
    }
  }
  return c;
}

Matrix multiply_at_b(const Matrix& a, const Matrix& b) {
  require(a.rows() == b.rows(), "multiply_at_b: row mismatch");
  Matrix c(a.cols(), b.cols());
  for (std::size_t j = 0; j < b.cols(); ++j)
    for (std::size_t i = 0; i < a.cols(); ++i) c(i, j) = dot(a.col(i), b.col(j));
  return c;
}

Vector multiply(const Matrix& a, std::span<const double> x) {
  require(a.cols() == x.size(), "multiply: vector size mismatch");
  Vector y(a.rows(), 0.0);
  for (std::size_t j = 0; j < a.cols(); ++j)
    if (x[j] != 0.0) axpy(x[j], a.col(j), y);
  return y;
}

Vector multiply_transpose(const Matrix& a, std::span<const double> x) {
  require(a.rows() == x.size(), "multiply_transpose: vector size mismatch");
  Vector y(a.cols());
  for (std::size_t j = 0; j < a.cols(); ++j) y[j] = dot(a.col(j), x);
  return y;
}

Matrix subtract(const Matrix& a, const Matrix& b) {
  require(a.rows() == b.rows() && a.cols() == b.cols(), "subtract: shape mismatch");
  Matrix c = a;
  auto cd = c.data();
  auto bd = b.data();
  for (std::size_t i = 0; i < cd.size(); ++i) cd[i] -= bd[i];
  return c;
}

double frobenius_norm(const Matrix& a) { return norm2(a.data()); }

Vector combine_columns(const Matrix& q, std::span<const double> y) {
  require(y.size() <= q.cols(), "combine_columns: too many coefficients");
  Vector x(q.rows(), 0.0);
  for (std::size_t j = 0; j < y.size(); ++j) axpy(y[j], q.col(j), x);
  return x;
}

}  // namespace regkrylov
