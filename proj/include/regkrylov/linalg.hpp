#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <variant>
#include <vector>

#include "regkrylov/matrix.hpp"

namespace regkrylov {

inline constexpr std::size_t kDefaultDenseLimit = 4096;
/// Largest Toeplitz factor order for which T⊗T may be materialized densely.
inline constexpr std::size_t kMaxDenseKroneckerFactor = 64;

/// Symmetric banded Toeplitz factor T of a Kronecker operator A = T⊗T.
struct KroneckerToeplitz {
  Vector first_row;   // length m, zero beyond the band
  std::size_t band = 0;

  std::size_t factor_order() const { return first_row.size(); }
  Matrix factor() const;
};

/// Symmetric operator, either dense or T⊗T with a banded symmetric Toeplitz T.
///
/// Vectors for the Kronecker form are column-stacked m×m images:
/// x[c*m + r] = X(r, c), and A vec(X) = vec(T X T).
class SymmetricMatrix {
 public:
  /// Symmetrizes exactly by averaging (a + aᵀ)/2.
  static SymmetricMatrix dense(const Matrix& a);
  static SymmetricMatrix kronecker_toeplitz(Vector first_row);

  std::size_t order() const;
  bool is_kronecker() const { return std::holds_alternative<KroneckerToeplitz>(storage_); }

  void apply(std::span<const double> x, std::span<double> y) const;
  Vector apply(std::span<const double> x) const;

  double value(std::size_t i, std::size_t j) const;

  const Matrix& dense_values() const;          // dense form only
  const KroneckerToeplitz& kronecker() const;  // Kronecker form only

  /// Full n×n matrix. Throws ResourceError for Kronecker factors above 64.
  Matrix densify() const;
  double frobenius_norm() const;

  bool operator==(const SymmetricMatrix&) const;

 private:
  std::variant<Matrix, KroneckerToeplitz> storage_;
};

/// Eigenpairs sorted by |λ| descending; equal magnitudes put the positive
/// eigenvalue first, then the smaller original index.
class SpectralDecomposition {
 public:
  SpectralDecomposition() = default;
  /// Takes eigenpairs in any order and sorts them.
  SpectralDecomposition(Vector eigenvalues, Matrix eigenvectors);
  /// Eigenpairs of T⊗T from those of T: λ = μ_i μ_j, v = w_i ⊗ w_j.
  static SpectralDecomposition kronecker(const Vector& factor_values, const Matrix& factor_vectors);

  std::size_t order() const { return lambda_.size(); }
  const Vector& eigenvalues() const { return lambda_; }
  double eigenvalue(std::size_t i) const { return lambda_[i]; }
  double singular_value(std::size_t i) const;
  int signature(std::size_t i) const { return lambda_[i] < 0.0 ? -1 : 1; }
  Vector singular_values() const;

  bool is_kronecker() const { return factor_order_ != 0; }
  /// Dense eigenvector matrix; throws for the Kronecker form.
  const Matrix& eigenvectors() const;
  Vector eigenvector(std::size_t i) const;
  Matrix leading_eigenvectors(std::size_t k) const;

  /// Coefficients Vᵀx in sorted order.
  Vector project(std::span<const double> x) const;
  /// V c.
  Vector synthesize(std::span<const double> coeffs) const;

 private:
  Vector lambda_;
  Matrix vectors_;  // dense form
  // Kronecker form
  std::size_t factor_order_ = 0;
  Matrix factor_vectors_;
  std::vector<std::size_t> outer_;  // i in w_i ⊗ w_j
  std::vector<std::size_t> inner_;  // j
};

/// (k+1)×k tridiagonal with diagonal α and sub/super-diagonal β.
/// β_k is the last subdiagonal entry (row k+1).
struct TridiagonalRect {
  Vector alpha;
  Vector beta;

  std::size_t cols() const { return alpha.size(); }
  /// Leading j columns.
  TridiagonalRect leading(std::size_t j) const;
  Matrix densify() const;
  /// Symmetric k×k leading block.
  Matrix square() const;
};

struct SvdResult {
  Matrix u;  // m×p
  Vector s;  // p, non-increasing
  Matrix v;  // n×p
};

/// Householder tridiagonalization followed by implicit-shift QL.
SpectralDecomposition symmetric_eig(const SymmetricMatrix& a,
                                    std::size_t dense_limit = kDefaultDenseLimit);
/// Same algorithm on a plain symmetric matrix.
SpectralDecomposition symmetric_eig(const Matrix& a, std::size_t dense_limit = kDefaultDenseLimit);

/// Thin SVD by Householder bidiagonalization and implicit-shift QR.
SvdResult svd(const Matrix& m);
SvdResult small_svd(const TridiagonalRect& t);

/// Largest singular value of a dense matrix.
double spectral_norm(const Matrix& m);

/// A matvec-only linear map ℝ^cols → ℝ^rows with its transpose.
struct LinearMap {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::function<Vector(std::span<const double>)> apply;
  std::function<Vector(std::span<const double>)> apply_transpose;
};

/// Largest singular value of a matvec-only map, by Golub–Kahan bidiagonalization
/// with full reorthogonalization until the leading Ritz value settles.
double spectral_norm(const LinearMap& m);

/// Sines of the canonical angles between span X and span Y, non-increasing.
Vector canonical_angles(const Matrix& x, const Matrix& y);

/// Minimum-norm minimizer of ‖rhs − M y‖ (singular values below s₁·n·1e-14 dropped).
Vector least_squares(const Matrix& m, std::span<const double> rhs);
/// Givens QR on the tridiagonal; falls back to the truncated SVD path when
/// the triangular factor is numerically rank deficient.
Vector least_squares(const TridiagonalRect& t, std::span<const double> rhs);

/// Truncation threshold used by the least-squares solvers.
double rank_tolerance(double s1, std::size_t dim);

}  // namespace regkrylov
