#include <gtest/gtest.h>

#include <cmath>

#include "oracles.hpp"
#include "regkrylov/errors.hpp"
#include "regkrylov/krylov.hpp"
#include "regkrylov/problems.hpp"

using namespace regkrylov;

namespace {

double orthogonality_loss(const Matrix& q) {
  Matrix g = multiply_at_b(q, q);
  for (std::size_t i = 0; i < g.rows(); ++i) g(i, i) -= 1.0;
  return frobenius_norm(g);
}

}  // namespace

TEST(Lanczos, EigenvectorStartBreaksDownImmediately) {
  const auto a = SymmetricMatrix::dense(Matrix::diagonal(Vector{2.0, 1.0}));
  const auto f = lanczos(a, StartKind::minres, Vector{1.0, 0.0}, 1);
  ASSERT_EQ(f.steps(), 1u);
  EXPECT_DOUBLE_EQ(f.t.alpha[0], 2.0);
  EXPECT_EQ(f.t.beta[0], 0.0);
  EXPECT_TRUE(f.breakdown);
  EXPECT_EQ(f.breakdown_step, 1u);
}

TEST(Lanczos, IdentityBreaksDownAtFirstStep) {
  const auto a = SymmetricMatrix::dense(Matrix::identity(5));
  for (StartKind s : {StartKind::minres, StartKind::mr2}) {
    const auto f = lanczos(a, s, Vector{1, -2, 3, 0.5, 1}, 4);
    EXPECT_EQ(f.steps(), 1u);
    EXPECT_DOUBLE_EQ(f.t.alpha[0], 1.0);
    EXPECT_TRUE(f.breakdown);
  }
}

TEST(Lanczos, RejectsDegenerateStarts) {
  const auto a = SymmetricMatrix::dense(Matrix::diagonal(Vector{1.0, 0.0}));
  EXPECT_THROW(lanczos(a, StartKind::minres, Vector{0.0, 0.0}, 1), ContractViolation);
  EXPECT_THROW(lanczos(a, StartKind::mr2, Vector{0.0, 1.0}, 1), ContractViolation);
  EXPECT_THROW(lanczos(a, StartKind::minres, Vector{1.0, 1.0}, 3), ContractViolation);
  EXPECT_THROW(lanczos(a, StartKind::minres, Vector{1.0, 1.0}, 0), ContractViolation);
}

TEST(Lanczos, ProjectionOracleOnShaw) {
  const auto p = generate(ProblemName::shaw, 64);
  const auto f = lanczos(p.a, StartKind::mr2, p.b_hat, 20);
  ASSERT_EQ(f.steps(), 20u);
  const Matrix a = p.a.densify();
  const Matrix q21 = f.leading_basis(21), q20 = f.leading_basis(20);
  const Matrix proj = oracle::matmul(oracle::transpose(q21), oracle::matmul(a, q20));
  const Matrix t = f.t.densify();
  EXPECT_LE(frobenius_norm(subtract(proj, t)), 1e-10);
  EXPECT_LE(orthogonality_loss(f.q), 1e-12);
}

TEST(Lanczos, StartVectorsAndSpans) {
  const auto p = generate(ProblemName::gravity, 48);
  const Matrix a = p.a.densify();
  for (StartKind s : {StartKind::minres, StartKind::mr2}) {
    const auto f = lanczos(p.a, s, p.b_hat, 8);
    const Matrix oracle_q = oracle::krylov_basis(a, p.b_hat, 8, s == StartKind::mr2 ? 1 : 0);
    const Vector sines = canonical_angles(f.leading_basis(8), oracle_q);
    EXPECT_LE(sines.front(), 1e-8);
    for (double b : f.t.beta) EXPECT_GT(b, 0.0);
  }
}

TEST(Lanczos, RelationHoldsWithoutReorthogonalization) {
  const auto p = generate(ProblemName::foxgood, 64);
  const auto f = lanczos(p.a, StartKind::minres, p.b_hat, 30, Reorthogonalization::none);
  const Matrix a = p.a.densify();
  const std::size_t k = f.steps();
  const Matrix lhs = oracle::matmul(a, f.leading_basis(k));
  const Matrix rhs = oracle::matmul(f.leading_basis(k + 1), f.t.densify());
  EXPECT_LE(frobenius_norm(subtract(lhs, rhs)), 1e-10 * frobenius_norm(lhs));
  const auto g = lanczos(p.a, StartKind::minres, p.b_hat, 30);
  EXPECT_GT(orthogonality_loss(f.q), 1e3 * orthogonality_loss(g.q));
}

TEST(Lanczos, MatvecCounts) {
  const auto p = generate(ProblemName::shaw, 32);
  EXPECT_EQ(lanczos(p.a, StartKind::minres, p.b_hat, 10).matvecs, 10u);
  EXPECT_EQ(lanczos(p.a, StartKind::mr2, p.b_hat, 10).matvecs, 11u);
  EXPECT_EQ(golub_kahan(p.a, p.b_hat, 10).matvecs, 20u);
}

TEST(Lanczos, ZeroShiftIsBitwiseNeutral) {
  const auto p = generate(ProblemName::phillips, 40);
  Matrix shifted = p.a.densify();
  for (std::size_t i = 0; i < 40; ++i) shifted(i, i) += 0.0;
  const auto f = lanczos(p.a, StartKind::mr2, p.b_hat, 12);
  const auto g = lanczos(SymmetricMatrix::dense(shifted), StartKind::mr2, p.b_hat, 12);
  EXPECT_TRUE(f.q == g.q);
  EXPECT_EQ(f.t.alpha, g.t.alpha);
  EXPECT_EQ(f.t.beta, g.t.beta);
}

TEST(Lanczos, PowerOfTwoScalingScalesTridiagonalExactly) {
  const auto p = generate(ProblemName::shaw, 40);
  Matrix scaled = p.a.densify();
  for (double& v : scaled.data()) v *= 4.0;
  const auto f = lanczos(p.a, StartKind::mr2, p.b_hat, 10);
  const auto g = lanczos(SymmetricMatrix::dense(scaled), StartKind::mr2, p.b_hat, 10);
  ASSERT_EQ(f.steps(), g.steps());
  EXPECT_TRUE(f.q == g.q);
  for (std::size_t j = 0; j < f.steps(); ++j) {
    EXPECT_EQ(g.t.alpha[j], 4.0 * f.t.alpha[j]);
    EXPECT_EQ(g.t.beta[j], 4.0 * f.t.beta[j]);
  }
}

TEST(Lanczos, PositiveScalingOnLeadingSteps) {
  const auto p = generate(ProblemName::gravity, 60);
  Matrix scaled = p.a.densify();
  for (double& v : scaled.data()) v *= 3.0;
  const auto f = lanczos(p.a, StartKind::mr2, p.b_hat, 6);
  const auto g = lanczos(SymmetricMatrix::dense(scaled), StartKind::mr2, p.b_hat, 6);
  for (std::size_t j = 0; j < 6; ++j) {
    EXPECT_NEAR(g.t.alpha[j], 3.0 * f.t.alpha[j], 1e-12);
    EXPECT_NEAR(g.t.beta[j], 3.0 * f.t.beta[j], 1e-12);
  }
  EXPECT_LE(frobenius_norm(subtract(f.q, g.q)), 1e-9);
}

TEST(Lanczos, KroneckerOperatorMatchesDense) {
  const auto p = generate(ProblemName::blur, 8, BlurParams{3, 0.7});
  const auto dense = SymmetricMatrix::dense(p.a.densify());
  const auto f = lanczos(p.a, StartKind::mr2, p.b_hat, 10);
  const auto g = lanczos(dense, StartKind::mr2, p.b_hat, 10);
  for (std::size_t j = 0; j < 10; ++j) {
    EXPECT_NEAR(f.t.alpha[j], g.t.alpha[j], 1e-12);
    EXPECT_NEAR(f.t.beta[j], g.t.beta[j], 1e-12);
  }
}

TEST(GolubKahan, ScalarCase) {
  const auto a = SymmetricMatrix::dense(Matrix::diagonal(Vector{3.0}));
  const auto f = golub_kahan(a, Vector{1.0}, 1);
  ASSERT_EQ(f.steps(), 1u);
  const Matrix b = f.lower_bidiagonal(1);
  EXPECT_DOUBLE_EQ(b(0, 0), 3.0);
  EXPECT_EQ(b(1, 0), 0.0);
}

TEST(GolubKahan, ResidualOracleOnGravity) {
  const auto p = generate(ProblemName::gravity, 64);
  const auto f = golub_kahan(p.a, p.b_hat, 10);
  const Matrix a = p.a.densify();
  const double anorm = oracle::jacobi_svd(a).s[0];
  const Matrix lhs = oracle::matmul(a, f.v);
  const Matrix rhs = oracle::matmul(f.u, f.lower_bidiagonal(10));
  EXPECT_LE(frobenius_norm(subtract(lhs, rhs)), 1e-10 * anorm);
  EXPECT_LE(orthogonality_loss(f.u), 1e-12);
  EXPECT_LE(orthogonality_loss(f.v), 1e-12);
  EXPECT_LE(svd(f.lower_bidiagonal(10)).s[0], anorm + 1e-10);
}
