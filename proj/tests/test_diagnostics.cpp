#include <gtest/gtest.h>

#include <cmath>
#include <limits>

#include "oracles.hpp"
#include "regkrylov/diagnostics.hpp"
#include "regkrylov/errors.hpp"
#include "regkrylov/problems.hpp"
#include "regkrylov/rng.hpp"

using namespace regkrylov;

namespace {

IterateTrace trace_with_errors(std::initializer_list<double> errors) {
  IterateTrace t;
  std::size_t k = 0;
  for (double e : errors) {
    IterateRecord r;
    r.k = ++k;
    r.relative_error = e;
    t.records.push_back(r);
  }
  return t;
}

}  // namespace

TEST(HarmonicRitz, HandEvaluatedScalarCase) {
  const auto a = SymmetricMatrix::dense(Matrix::diagonal(Vector{2.0, 1.0}));
  const auto f = lanczos(a, StartKind::minres, Vector{1.0, 1.0}, 1);
  EXPECT_DOUBLE_EQ(f.t.alpha[0], 1.5);
  EXPECT_NEAR(f.t.beta[0], 0.5, 1e-15);
  const Vector theta = harmonic_ritz(f.t);
  ASSERT_EQ(theta.size(), 1u);
  EXPECT_NEAR(theta[0], 5.0 / 3.0, 1e-14);
}

TEST(HarmonicRitz, InvariantSubspaceGivesEigenvalues) {
  const auto a = SymmetricMatrix::dense(Matrix::diagonal(Vector{3.0, -2.0, 1.0, 0.5}));
  const auto f = lanczos(a, StartKind::minres, Vector{1.0, 1.0, 1.0, 1.0}, 4);
  ASSERT_EQ(f.steps(), 4u);
  const Vector theta = harmonic_ritz(f.t);
  const Vector expect{3.0, -2.0, 1.0, 0.5};
  for (std::size_t i = 0; i < 4; ++i) EXPECT_NEAR(theta[i], expect[i], 1e-10);
}

TEST(HarmonicRitz, SingularLeadingBlockIsNumericalError) {
  TridiagonalRect t{{0.0}, {1.0}};
  EXPECT_THROW(harmonic_ritz(t), NumericalError);
}

TEST(FilterFactors, TrivialCases) {
  const Vector f = filter_factors(Vector{2.0, -0.5}, Vector{2.0, 0.0, -0.5, 1.0});
  EXPECT_EQ(f[0], 1.0);
  EXPECT_EQ(f[1], 0.0);
  EXPECT_EQ(f[2], 1.0);
  EXPECT_NEAR(f[3], 1.0 - (1.0 / 2.0) * (-1.5 / -0.5), 1e-15);
  EXPECT_THROW(filter_factors(Vector{0.0}, Vector{1.0}), NumericalError);
}

TEST(FilterFactors, ReconstructMinresIterate) {
  const auto p = generate(ProblemName::shaw, 128);
  const auto d = symmetric_eig(p.a);
  const Vector b = add_noise(p, 1e-3, 1).b;
  const auto f = lanczos(p.a, StartKind::minres, b, 8);
  const auto t = lanczos_trace(f, b);
  const FilterFactorEvaluator eval(p.a, d, f);
  const Vector coeff = d.project(b);
  const Vector lambda = eval.eigenvalues();
  for (std::size_t k = 1; k <= 8; ++k) {
    const Vector ff = eval.filter_factors(k);
    Vector c(128);
    for (std::size_t i = 0; i < 128; ++i) c[i] = ff[i] * coeff[i] / lambda[i];
    EXPECT_LE(oracle::rel_diff(d.synthesize(c), t.at(k).x), 1e-6) << "k=" << k;
    const Vector plain = harmonic_ritz(f.t.leading(k));
    const Vector ext = eval.harmonic_ritz(k);
    for (std::size_t j = 0; j < k; ++j) EXPECT_NEAR(plain[j], ext[j], 1e-10 * std::fabs(ext[0]));
  }
}

TEST(FilterFactors, EvaluatorNeedsDenseOperator) {
  const auto p = generate(ProblemName::blur, 6, BlurParams{2, 0.7});
  const auto d = symmetric_eig(p.a);
  const auto f = lanczos(p.a, StartKind::minres, p.b_hat, 3);
  EXPECT_THROW(FilterFactorEvaluator(p.a, d, f), ContractViolation);
}

TEST(Gamma, BoundsAndDirectDefinition) {
  const auto p = generate(ProblemName::shaw, 64);
  const auto d = symmetric_eig(p.a);
  const Vector b = add_noise(p, 1e-3, 2).b;
  const auto f = lanczos(p.a, StartKind::mr2, b, 15);
  const Vector g = gamma_sequence(p.a, f);
  ASSERT_EQ(g.size(), f.q.cols());
  const double s1 = d.singular_value(0);
  for (std::size_t k = 1; k <= 15; ++k) {
    EXPECT_GE(g[k - 1], d.singular_value(k) - 1e-10 * s1) << "k=" << k;
    EXPECT_NEAR(g[k - 1], gamma_direct(p.a, f, k), 1e-10 * s1) << "k=" << k;
  }
}

TEST(Gamma, ExactCaptureOfLowRankOperator) {
  const auto a = SymmetricMatrix::dense(Matrix::diagonal(Vector{2.0, -1.0, 0.0, 0.0}));
  const auto f = lanczos(a, StartKind::mr2, Vector{1.0, 1.0, 1.0, 1.0}, 2);
  const Vector g = gamma_sequence(a, f);
  EXPECT_LE(g.back(), 1e-14);
}

TEST(Delta, SingleTrailingRow) {
  const auto d = symmetric_eig(Matrix::diagonal(Vector{4.0, 2.0, 1.0}));
  const Vector b{1.0, 2.0, 3.0};
  const Matrix delta = delta_matrix(d, b, 2);
  ASSERT_EQ(delta.rows(), 1u);
  ASSERT_EQ(delta.cols(), 2u);
  // L_1(1) = (1−2)/(4−2), L_2(1) = (1−4)/(2−4)
  EXPECT_NEAR(delta(0, 0), 1.0 * 3.0 * (-0.5) / (4.0 * 1.0), 1e-15);
  EXPECT_NEAR(delta(0, 1), 1.0 * 3.0 * 1.5 / (2.0 * 2.0), 1e-15);
}

TEST(Delta, ZeroTailGivesZero) {
  const auto d = symmetric_eig(Matrix::diagonal(Vector{4.0, 2.0, 1.0, 0.5}));
  const Vector b{1.0, 2.0, 0.0, 0.0};
  EXPECT_EQ(frobenius_norm(delta_matrix(d, b, 2)), 0.0);
  EXPECT_EQ(sin_theta_formula(delta_matrix(d, b, 2)), 0.0);
}

TEST(Delta, Errors) {
  const auto d = symmetric_eig(Matrix::diagonal(Vector{4.0, 2.0, 1.0}));
  EXPECT_THROW(delta_matrix(d, Vector{1.0, 0.0, 1.0}, 2), NumericalError);
  const auto e = symmetric_eig(Matrix::diagonal(Vector{2.0, 2.0, 1.0}));
  EXPECT_THROW(delta_matrix(e, Vector{1.0, 1.0, 1.0}, 2), NumericalError);
  EXPECT_THROW(delta_matrix(d, Vector{1.0, 1.0, 1.0}, 2, 1), ContractViolation);
}

TEST(Delta, SpansKrylovSubspace) {
  SyntheticSpec s;
  s.n = 32;
  auto [p, d] = generate_synthetic(s);
  const std::size_t k = 4;
  const Matrix delta = delta_matrix(d, p.b_hat, k);
  std::vector<Vector> cols;
  for (std::size_t i = 0; i < k; ++i) {
    Vector c(32, 0.0);
    c[i] = 1.0;
    for (std::size_t j = 0; j < 32 - k; ++j) c[k + j] = delta(j, i);
    cols.push_back(d.synthesize(c));
  }
  const Matrix x = oracle::orthonormalize(cols);
  const Matrix y = oracle::krylov_basis(p.a.densify(), p.b_hat, k, 1);
  EXPECT_LE(canonical_angles(x, y).front(), 1e-8);
}

TEST(SinTheta, FormulaIsMonotone) {
  Matrix delta(3, 2);
  delta(0, 0) = 0.3;
  delta(2, 1) = -0.1;
  double prev = 0.0;
  for (double s : {0.1, 1.0, 10.0, 1e3}) {
    Matrix m = delta;
    for (double& v : m.data()) v *= s;
    const double val = sin_theta_formula(m);
    EXPECT_GT(val, prev);
    EXPECT_LT(val, 1.0);
    prev = val;
  }
}

TEST(SinTheta, DirectMatchesFormulaOnSynthetic) {
  SyntheticSpec s;
  s.n = 32;
  auto [p, d] = generate_synthetic(s);
  const auto f = lanczos(p.a, StartKind::mr2, p.b_hat, 8);
  for (std::size_t k = 1; k <= 8; ++k)
    EXPECT_NEAR(sin_theta_direct(d, f, k), sin_theta_formula(delta_matrix(d, p.b_hat, k)), 1e-8) << "k=" << k;
}

TEST(Picard, AdjacentRatioForDecreasingCoefficients) {
  const auto d = symmetric_eig(Matrix::diagonal(Vector{4.0, 3.0, 2.0, 1.0}));
  const auto r = picard_and_c(d, Vector{8.0, 4.0, 2.0, 1.0}, Vector(4, 0.0));
  ASSERT_EQ(r.c.size(), 3u);
  for (double c : r.c) EXPECT_DOUBLE_EQ(c, 0.5);
  const auto flat = picard_and_c(d, Vector{1.0, -1.0, 1.0, 1.0}, Vector(4, 0.0));
  for (double c : flat.c) EXPECT_DOUBLE_EQ(c, 1.0);
  const auto zero = picard_and_c(d, Vector{0.0, 1.0, 1.0, 1.0}, Vector(4, 0.0));
  EXPECT_EQ(zero.c[0], std::numeric_limits<double>::infinity());
}

TEST(Picard, SyntheticModelRatio) {
  SyntheticSpec s;
  s.n = 20;
  s.decay = DecayKind::moderate;
  s.alpha = 2.0;
  auto [p, d] = generate_synthetic(s);
  const auto r = picard_and_c(d, p.b_hat, Vector(20, 0.0));
  for (std::size_t k = 1; k < 20; ++k) {
    const double q = d.singular_value(k) / d.singular_value(k - 1);
    EXPECT_NEAR(r.c[k - 1], q * q, 1e-14) << "k=" << k;
  }
}

TEST(Picard, NoiseRegionHasUnitOrderRatio) {
  // Flat noise coefficients with random signs: the idealized white-noise model.
  SyntheticSpec s;
  s.n = 64;
  s.alpha = 0.3;
  auto [p, d] = generate_synthetic(s);
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    CounterRng rng(seed);
    Vector ec(64);
    for (double& c : ec) c = (rng.next_u64() >> 63 ? -1.0 : 1.0) * 1e-3;
    const Vector e = d.synthesize(ec);
    const auto r = picard_and_c(d, p.b_hat, e);
    const std::size_t k0 = transition_index(d, p.b_hat, e);
    ASSERT_GT(k0, 0u);
    for (std::size_t k = k0 + 1; k <= k0 + 10; ++k) {
      EXPECT_GE(r.c[k - 1], 0.1) << "seed " << seed << " k=" << k;
      EXPECT_LE(r.c[k - 1], 10.0) << "seed " << seed << " k=" << k;
    }
  }
}

TEST(Decay, CoefficientBoundsHoldOnShaw) {
  const auto p = generate(ProblemName::shaw, 256);
  const auto d = symmetric_eig(p.a);
  const Vector b = add_noise(p, 1e-3, 1).b;
  const auto f = lanczos(p.a, StartKind::mr2, b, 40);
  const Vector g = gamma_sequence(p.a, f);
  const auto rows = decay_check(f, g, d.singular_values());
  ASSERT_FALSE(rows.empty());
  EXPECT_EQ(rows.size(), f.steps() - 2);
  for (const auto& r : rows) {
    EXPECT_TRUE(r.beta_ok) << "k=" << r.k;
    EXPECT_TRUE(r.alpha_ok) << "k=" << r.k;
  }
  EXPECT_TRUE(rows.front().pre_floor);
  for (std::size_t i = 1; i < rows.size(); ++i) EXPECT_LE(rows[i].pre_floor, rows[i - 1].pre_floor);
}

TEST(RoundOff, Floor) { EXPECT_DOUBLE_EQ(round_off_floor(2.0, 100), 10.0 * 100 * 2.0 * 0x1p-52); }

TEST(LCurve, RightAngleCorner) {
  const std::vector<LCurvePoint> pts{{2, 0, 1}, {1, 0, 2}, {1, 1, 3}, {1, 2, 4}};
  EXPECT_EQ(lcurve_corner(pts), 2u);
}

TEST(LCurve, CollinearHasNoCorner) {
  const std::vector<LCurvePoint> pts{{3, 0, 1}, {2, 1, 2}, {1, 2, 3}, {0, 3, 4}};
  EXPECT_FALSE(lcurve_corner(pts).has_value());
  const std::vector<LCurvePoint> two{{3, 0, 1}, {2, 1, 2}};
  EXPECT_FALSE(lcurve_corner(two).has_value());
}

TEST(LCurve, PrunesIncreasingResiduals) {
  const std::vector<LCurvePoint> pts{{2, 0, 1}, {2.5, 5, 2}, {1, 0, 3}, {1, 1, 4}, {1, 2, 5}};
  EXPECT_EQ(lcurve_corner(pts), 3u);
}

TEST(SemiConvergence, Index) {
  EXPECT_EQ(semiconvergence_index(trace_with_errors({1.0, 0.5, 0.2, 0.4})), 3u);
  EXPECT_EQ(semiconvergence_index(trace_with_errors({1.0, 0.5, 0.2, 0.1})), 4u);
  EXPECT_EQ(semiconvergence_index(trace_with_errors({1.0, 0.2, 0.2, 0.4})), 2u);
}

TEST(Gamma, SandwichWithSinTheta) {
  SyntheticSpec s;
  s.n = 48;
  s.alpha = 0.8;
  s.random_basis = true;
  s.basis_seed = 3;
  auto [p, d] = generate_synthetic(s);
  const auto nz = add_noise(p, 1e-4, 2);
  const auto f = lanczos(p.a, StartKind::mr2, nz.b, 10);
  const Vector g = gamma_sequence(p.a, f);
  const double s1 = d.singular_value(0);
  for (std::size_t k = 1; k <= 10; ++k) {
    const double st = sin_theta_direct(d, f, k);
    EXPECT_GE(g[k - 1], d.singular_value(k) - 1e-8 * s1);
    EXPECT_LE(g[k - 1], d.singular_value(k) + s1 * st + 1e-8 * s1);
  }
}
