#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string_view>

#include "regkrylov/linalg.hpp"

namespace regkrylov {

enum class StartKind { minres, mr2 };  // q_1 = b/‖b‖ or Ab/‖Ab‖
enum class Reorthogonalization { full, none };

std::string_view to_string(StartKind kind);

struct LanczosFactorization {
  StartKind start = StartKind::minres;
  Reorthogonalization policy = Reorthogonalization::full;
  Matrix q;           // n×(k+1); only k columns after breakdown
  TridiagonalRect t;  // k columns
  bool breakdown = false;
  std::optional<std::size_t> breakdown_step;  // 1-based step with β_k ≈ 0
  std::size_t matvecs = 0;

  std::size_t steps() const { return t.cols(); }
  /// Column j of Q (0-based), or zeros if it was never formed.
  Vector basis_vector(std::size_t j) const;
  /// First j columns of Q, padded with zero columns if needed.
  Matrix leading_basis(std::size_t j) const;
};

/// Symmetric Lanczos process. Breakdown (β ≤ n·ε·‖A‖, with ‖A‖ estimated
/// from the recurrence) truncates the factorization and sets the flag.
LanczosFactorization lanczos(const SymmetricMatrix& a, StartKind start, std::span<const double> b,
                             std::size_t k_max, Reorthogonalization policy = Reorthogonalization::full);

/// A V_k = U_{k+1} B_k with lower bidiagonal B_k ((k+1)×k): diagonal alpha,
/// subdiagonal beta[1..k]; beta[0] = ‖b‖.
struct BidiagFactorization {
  Matrix u;      // n×(k+1), fewer after breakdown
  Matrix v;      // n×k
  Vector alpha;  // k
  Vector beta;   // k+1
  bool breakdown = false;
  std::optional<std::size_t> breakdown_step;
  std::size_t matvecs = 0;

  std::size_t steps() const { return alpha.size(); }
  /// Leading (j+1)×j block of B.
  Matrix lower_bidiagonal(std::size_t j) const;
};

BidiagFactorization golub_kahan(const SymmetricMatrix& a, std::span<const double> b, std::size_t k_max);

}  // namespace regkrylov
