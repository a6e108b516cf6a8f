#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "regkrylov/krylov.hpp"
#include "regkrylov/linalg.hpp"
#include "regkrylov/solvers.hpp"

namespace regkrylov {

inline constexpr std::size_t kLagrangeMax = 12;

/// Eigenvalues θ of (TᵀT) y = θ T_kk y for the (k+1)×k tridiagonal T, sorted
/// by |θ| descending. Throws NumericalError if T_kk is singular.
Vector harmonic_ritz(const TridiagonalRect& t);

/// f_i = 1 − Π_j (θ_j − λ_i)/θ_j for each λ_i.
Vector filter_factors(std::span<const double> theta, std::span<const double> lambda);

/// Harmonic Ritz values and filter factors over span Q_k with the gaps
/// θ_j − λ_i formed in extended precision: λ_i are Rayleigh quotients of the
/// eigenvectors and θ comes from A Q_k directly, both accumulated in long double.
/// The product 1 − Π(1 − λ_i/θ_j) in double loses about ε·Π_j|λ_i/θ_j| once a
/// harmonic Ritz value has converged. Dense operators only.
class FilterFactorEvaluator {
 public:
  FilterFactorEvaluator(const SymmetricMatrix& a, const SpectralDecomposition& decomp, const LanczosFactorization& f);

  std::size_t steps() const { return steps_; }
  /// Rayleigh quotients v_iᵀAv_i rounded to double; the filter factors are
  /// consistent with these, not with the eigensolver output.
  Vector eigenvalues() const { return Vector(lambda_.begin(), lambda_.end()); }
  /// Throws NumericalError when A Q_k or the projected block is singular.
  Vector harmonic_ritz(std::size_t k) const;
  Vector filter_factors(std::size_t k) const;

 private:
  std::vector<long double> harmonic_ritz_extended(std::size_t k) const;

  std::size_t steps_ = 0;
  std::vector<long double> lambda_;
  std::vector<long double> r_;      // R of A Q = W R, column-major steps×steps
  std::vector<long double> g_;      // Q_kᵀ A Q_k, column-major steps×steps
};

/// γ_k = ‖A(I − Q_kQ_kᵀ)‖ for k = 1..k_max (default: all available columns).
Vector gamma_sequence(const SymmetricMatrix& a, const LanczosFactorization& f,
                      std::optional<std::size_t> k_max = {});
/// Same quantity from the definition ‖A − Q_{k+1}T_kQ_kᵀ‖ (dense, small n).
double gamma_direct(const SymmetricMatrix& a, const LanczosFactorization& f, std::size_t k);

/// (n−k)×k matrix with entries λ_{k+j}(v_{k+j}ᵀb) L_i(λ_{k+j}) / (λ_i v_iᵀb),
/// L_i the Lagrange basis on λ_1..λ_k, evaluated in product form.
Matrix delta_matrix(const SpectralDecomposition& decomp, std::span<const double> b, std::size_t k,
                    std::size_t k_cap = kLagrangeMax);

/// Largest canonical-angle sine between span V_k and span Q_k.
double sin_theta_direct(const SpectralDecomposition& decomp, const LanczosFactorization& f, std::size_t k);
/// ‖Δ‖/√(1+‖Δ‖²).
double sin_theta_formula(const Matrix& delta);

struct PicardReport {
  Vector signal;  // |v_iᵀb̂|
  Vector noise;   // |v_iᵀe|
  Vector total;   // |v_iᵀb|
  Vector c;       // c_k for k = 1..n−1, +inf when the minimum is zero
};

PicardReport picard_and_c(const SpectralDecomposition& decomp, std::span<const double> b_hat,
                          std::span<const double> e);

struct DecayRow {
  std::size_t k = 0;
  double beta_next = 0.0;    // β_{k+1}
  double alpha_next2 = 0.0;  // |α_{k+2}|
  double gamma = 0.0;        // γ_k
  double sigma_next = 0.0;   // σ_{k+1}
  bool pre_floor = false;
  bool beta_ok = false;
  bool alpha_ok = false;
};

/// 10·n·ε·σ_1.
double round_off_floor(double sigma1, std::size_t n);

/// Rows for every k with β_{k+1} and α_{k+2} available; tolerance 1e-10·σ_1.
std::vector<DecayRow> decay_check(const LanczosFactorization& f, std::span<const double> gamma,
                                  std::span<const double> sigma);

struct LCurvePoint {
  double log_residual = 0.0;
  double log_solution_norm = 0.0;
  std::size_t k = 0;
};

/// log10 residual and solution norms of a trace (points with zero norms skipped).
std::vector<LCurvePoint> lcurve_points(const IterateTrace& trace);

/// k of the point of maximal discrete curvature, or nothing when the curve
/// has fewer than three usable points or no positive curvature.
std::optional<std::size_t> lcurve_corner(std::span<const LCurvePoint> points);

/// argmin_k relative error, ties to the smallest k.
std::size_t semiconvergence_index(const IterateTrace& trace);

struct DiagnosticsReport {
  Vector gamma;
  Vector sigma;  // σ_1..σ_{k+1}
  Vector sin_theta_direct;
  Vector sin_theta_formula;
  std::vector<Vector> harmonic_ritz;   // per k
  std::vector<Vector> filter_factors;  // per k
  std::optional<PicardReport> picard;
  std::vector<DecayRow> decay;
  std::optional<std::size_t> k0;
  std::optional<std::size_t> lcurve_corner;
  std::optional<std::size_t> semiconvergence_index;
};

}  // namespace regkrylov
