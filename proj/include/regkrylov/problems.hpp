#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <utility>

#include "regkrylov/linalg.hpp"

namespace regkrylov {

enum class ProblemName { shaw, foxgood, gravity, phillips, deriv2, blur, synthetic };

std::string_view to_string(ProblemName name);
/// Throws ConfigError for unknown names.
ProblemName parse_problem_name(std::string_view name);

enum class DecayKind { severe, moderate, mild };
enum class SignPattern { definite, alternating, random };

std::string_view to_string(DecayKind kind);
std::string_view to_string(SignPattern pattern);
DecayKind parse_decay_kind(std::string_view s);
SignPattern parse_sign_pattern(std::string_view s);

/// Model problem with prescribed spectrum and Picard coefficients:
/// σ_j = e^{−αj} (severe) or j^{−α} (moderate α > 1, mild α ≤ 1),
/// λ_j = s_j σ_j and |v_jᵀb̂| = σ_j^{1+β}.
struct SyntheticSpec {
  std::size_t n = 0;
  DecayKind decay = DecayKind::severe;
  double alpha = 1.0;
  double beta = 1.0;
  SignPattern signs = SignPattern::definite;
  std::uint64_t sign_seed = 0;
  bool random_basis = false;
  std::uint64_t basis_seed = 0;
};

struct BlurParams {
  std::size_t band = 3;
  double sigma = 0.7;
};

struct ProblemMetadata {
  std::size_t n = 0;
  std::optional<BlurParams> blur;
  std::string image_id;  // blur only
  std::optional<SyntheticSpec> synthetic;
};

struct DiscretizedProblem {
  ProblemName name = ProblemName::shaw;
  SymmetricMatrix a;
  Vector x_true;
  Vector b_hat;
  ProblemMetadata metadata;
};

struct NoiseRealization {
  Vector e;
  double level = 0.0;  // ‖e‖/‖b̂‖
  std::uint64_t seed = 0;
  Vector b;            // b̂ + e
};

/// Test problems on midpoint quadrature grids. For blur, n is the image side m
/// and the operator order is m².
DiscretizedProblem generate(ProblemName name, std::size_t n, const BlurParams& blur = {});

/// Returns the problem and its exact eigendecomposition.
std::pair<DiscretizedProblem, SpectralDecomposition> generate_synthetic(const SyntheticSpec& spec);

/// White Gaussian noise scaled to ‖e‖ = level·‖b̂‖.
NoiseRealization add_noise(const DiscretizedProblem& problem, double level, std::uint64_t seed);

/// Largest k with |v_jᵀb̂| > |v_jᵀe| for every j ≤ k (0 if none).
std::size_t transition_index(const SpectralDecomposition& decomp, std::span<const double> b_hat,
                             std::span<const double> e);
/// Same rule on precomputed coefficient magnitudes.
std::size_t transition_index_from_coefficients(std::span<const double> signal, std::span<const double> noise);

/// Built-in m×m piecewise-constant test image, column-stacked.
Vector test_image(std::size_t m);

}  // namespace regkrylov
