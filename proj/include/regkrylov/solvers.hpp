#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "regkrylov/krylov.hpp"
#include "regkrylov/linalg.hpp"

namespace regkrylov {

enum class SolverId { minres, mr2, lsqr, tsvd, hybrid_minres, hybrid_mr2 };

std::string_view to_string(SolverId id);
/// Accepts minres, mr2, lsqr, tsvd, hybrid-minres, hybrid-mr2; ConfigError otherwise.
SolverId parse_solver_id(std::string_view name);

struct IterateRecord {
  std::size_t k = 0;
  Vector x;
  double residual_norm = 0.0;
  double solution_norm = 0.0;
  std::optional<double> relative_error;
  std::optional<std::size_t> inner_rank;  // hybrid only
};

struct IterateTrace {
  SolverId solver = SolverId::minres;
  std::vector<IterateRecord> records;
  std::size_t matvecs = 0;
  bool breakdown = false;
  std::optional<LanczosFactorization> lanczos;
  std::optional<BidiagFactorization> bidiag;

  std::size_t size() const { return records.size(); }
  const IterateRecord& at(std::size_t k) const;  // 1-based
  /// Products with A needed to form iterate k.
  std::size_t matvecs_at(std::size_t k) const;
};

struct HybridRule {
  enum class Kind { fixed, lcurve };
  Kind kind = Kind::lcurve;
  std::size_t p = 0;  // fixed only

  static HybridRule fixed(std::size_t p) { return {Kind::fixed, p}; }
  static HybridRule lcurve() { return {Kind::lcurve, 0}; }
};

/// An empty x_true leaves relative errors unset.
IterateTrace minres_trace(const SymmetricMatrix& a, std::span<const double> b, std::size_t k_max,
                          std::span<const double> x_true = {},
                          Reorthogonalization policy = Reorthogonalization::full);
IterateTrace mr2_trace(const SymmetricMatrix& a, std::span<const double> b, std::size_t k_max,
                       std::span<const double> x_true = {},
                       Reorthogonalization policy = Reorthogonalization::full);
IterateTrace lsqr_trace(const SymmetricMatrix& a, std::span<const double> b, std::size_t k_max,
                        std::span<const double> x_true = {});
/// Truncated spectral sums for k = 1..k_max (default all n), stopping before λ_k = 0.
IterateTrace tsvd_trace(const SpectralDecomposition& decomp, std::span<const double> b,
                        std::span<const double> x_true = {}, std::optional<std::size_t> k_max = {});
IterateTrace hybrid_trace(StartKind base, const SymmetricMatrix& a, std::span<const double> b, std::size_t k_max,
                          const HybridRule& rule, std::span<const double> x_true = {});

/// Traces over an existing factorization (no further products with A).
IterateTrace lanczos_trace(const LanczosFactorization& f, std::span<const double> b,
                           std::span<const double> x_true = {});
IterateTrace hybrid_trace(const LanczosFactorization& f, std::span<const double> b, const HybridRule& rule,
                          std::span<const double> x_true = {});

/// Q_k T_k^† Q_{k+1}ᵀ b by dense SVD of the projected matrix.
Vector pseudoinverse_iterate(const LanczosFactorization& f, std::span<const double> b, std::size_t k);

}  // namespace regkrylov
