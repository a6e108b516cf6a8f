#include <gtest/gtest.h>

#include <cmath>

#include "oracles.hpp"
#include "regkrylov/errors.hpp"
#include "regkrylov/linalg.hpp"
#include "regkrylov/problems.hpp"
#include "regkrylov/rng.hpp"

using namespace regkrylov;

namespace {

Matrix random_symmetric(std::size_t n, std::uint64_t seed) {
  CounterRng rng(seed);
  Matrix a(n, n);
  for (std::size_t j = 0; j < n; ++j)
    for (std::size_t i = j; i < n; ++i) a(i, j) = a(j, i) = rng.normal();
  return a;
}

Matrix random_matrix(std::size_t r, std::size_t c, std::uint64_t seed) {
  CounterRng rng(seed);
  Matrix a(r, c);
  for (double& x : a.data()) x = rng.normal();
  return a;
}

TridiagonalRect random_tridiagonal(std::size_t k, std::uint64_t seed) {
  CounterRng rng(seed);
  TridiagonalRect t;
  for (std::size_t i = 0; i < k; ++i) {
    t.alpha.push_back(rng.normal());
    t.beta.push_back(std::fabs(rng.normal()) + 0.1);
  }
  return t;
}

}  // namespace

TEST(SymmetricEig, IdentityHasUnitEigenvalues) {
  const auto d = symmetric_eig(Matrix::identity(3));
  for (double l : d.eigenvalues()) EXPECT_DOUBLE_EQ(l, 1.0);
}

TEST(SymmetricEig, DiagonalOrderingAndSignature) {
  const double diag[] = {3.0, -2.0, 1.0};
  const auto d = symmetric_eig(Matrix::diagonal(diag));
  EXPECT_EQ(d.eigenvalues(), (Vector{3.0, -2.0, 1.0}));
  EXPECT_EQ(d.singular_values(), (Vector{3.0, 2.0, 1.0}));
  EXPECT_EQ(d.signature(0), 1);
  EXPECT_EQ(d.signature(1), -1);
  EXPECT_EQ(d.signature(2), 1);
}

TEST(SymmetricEig, EqualMagnitudePutsPositiveFirst) {
  const double diag[] = {-2.0, 1.0, 2.0};
  const auto d = symmetric_eig(Matrix::diagonal(diag));
  EXPECT_EQ(d.eigenvalues(), (Vector{2.0, -2.0, 1.0}));
}

TEST(SymmetricEig, ShawMatchesJacobiOracle) {
  const auto p = generate(ProblemName::shaw, 32);
  const Matrix a = p.a.densify();
  const auto d = symmetric_eig(p.a);
  const auto ref = oracle::jacobi_eig(a);
  Vector mine = d.eigenvalues();
  std::sort(mine.begin(), mine.end());
  for (std::size_t i = 0; i < 32; ++i) EXPECT_NEAR(mine[i], ref.values[i], 1e-10);
}

TEST(SymmetricEig, InvariantsOnRandomMatrices) {
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    const std::size_t n = 10 + seed * 7;
    const Matrix a = random_symmetric(n, seed);
    const auto d = symmetric_eig(a);
    const double anorm = oracle::jacobi_svd(a).s[0];
    for (std::size_t i = 0; i < n; ++i) {
      const Vector v = d.eigenvector(i);
      Vector r = multiply(a, v);
      axpy(-d.eigenvalue(i), v, r);
      EXPECT_LE(norm2(r), double(n) * 1e-12 * anorm);
      if (i > 0) EXPECT_GE(d.singular_value(i - 1), d.singular_value(i));
    }
    Matrix g = multiply_at_b(d.eigenvectors(), d.eigenvectors());
    for (std::size_t i = 0; i < n; ++i) g(i, i) -= 1.0;
    EXPECT_LE(frobenius_norm(g), double(n) * 1e-12);

    Matrix vl = d.eigenvectors();
    for (std::size_t j = 0; j < n; ++j) scale(d.eigenvalue(j), vl.col(j));
    const Matrix rec = multiply(vl, d.eigenvectors().transpose());
    EXPECT_LE(frobenius_norm(subtract(rec, a)), double(n * n) * 1e-12 * frobenius_norm(a));
  }
}

TEST(SymmetricEig, DenseLimitRaisesResourceError) {
  EXPECT_THROW(symmetric_eig(Matrix::identity(10), 8), ResourceError);
}

TEST(SymmetricEig, KroneckerMatchesDensePath) {
  const auto p = generate(ProblemName::blur, 6, BlurParams{3, 0.9});
  const auto dk = symmetric_eig(p.a);
  const auto dd = symmetric_eig(p.a.densify());
  ASSERT_EQ(dk.order(), 36u);
  for (std::size_t i = 0; i < 36; ++i) EXPECT_NEAR(dk.eigenvalue(i), dd.eigenvalue(i), 1e-12);
  const Matrix a = p.a.densify();
  for (std::size_t i = 0; i < 36; ++i) {
    const Vector v = dk.eigenvector(i);
    Vector r = multiply(a, v);
    axpy(-dk.eigenvalue(i), v, r);
    EXPECT_LE(norm2(r), 1e-12);
  }
  const Vector x = p.x_true;
  const Vector back = dk.synthesize(dk.project(x));
  EXPECT_LE(oracle::rel_diff(back, x), 1e-13);
}

TEST(SymmetricMatrix, KroneckerApplyMatchesDensified) {
  const auto p = generate(ProblemName::blur, 9, BlurParams{4, 1.3});
  const Matrix a = p.a.densify();
  CounterRng rng(3);
  Vector x(81);
  for (double& v : x) v = rng.normal();
  EXPECT_LE(oracle::rel_diff(p.a.apply(x), oracle::matvec(a, x)), 1e-12);
  for (std::size_t i = 0; i < 81; i += 7)
    for (std::size_t j = 0; j < 81; j += 5) EXPECT_DOUBLE_EQ(p.a.value(i, j), a(i, j));
}

TEST(SymmetricMatrix, LargeKroneckerRefusesDensify) {
  const auto a = SymmetricMatrix::kronecker_toeplitz(Vector(65, 0.0));
  EXPECT_THROW((void)a.densify(), ResourceError);
}

TEST(SymmetricMatrix, DenseIsExactlySymmetric) {
  const Matrix raw = random_matrix(7, 7, 11);
  const auto s = SymmetricMatrix::dense(raw);
  for (std::size_t i = 0; i < 7; ++i)
    for (std::size_t j = 0; j < 7; ++j) EXPECT_EQ(s.value(i, j), s.value(j, i));
}

TEST(SmallSvd, SingleColumnNorm) {
  const auto s = small_svd(TridiagonalRect{{2.0}, {1.0}});
  EXPECT_NEAR(s.s[0], std::sqrt(5.0), 1e-15);
}

TEST(SmallSvd, ZeroColumn) {
  const auto s = small_svd(TridiagonalRect{{0.0}, {0.0}});
  EXPECT_EQ(s.s[0], 0.0);
}

TEST(SmallSvd, MatchesJacobiOracleAndReconstructs) {
  const TridiagonalRect t = random_tridiagonal(5, 21);
  const Matrix dense = t.densify();
  const auto s = small_svd(t);
  const auto ref = oracle::jacobi_svd(dense);
  for (std::size_t i = 0; i < 5; ++i) EXPECT_NEAR(s.s[i], ref.s[i], 1e-12);
  Matrix us = s.u;
  for (std::size_t j = 0; j < 5; ++j) scale(s.s[j], us.col(j));
  const Matrix rec = multiply(us, s.v.transpose());
  EXPECT_LE(frobenius_norm(subtract(rec, dense)), 6 * 1e-12 * s.s[0]);
}

TEST(Svd, WideAndTallAgreeWithOracle) {
  for (auto [r, c] : {std::pair{9, 4}, std::pair{4, 9}}) {
    const Matrix m = random_matrix(r, c, 5);
    const auto s = svd(m);
    const auto ref = oracle::jacobi_svd(r >= c ? m : m.transpose());
    ASSERT_EQ(s.s.size(), ref.s.size());
    for (std::size_t i = 0; i < s.s.size(); ++i) EXPECT_NEAR(s.s[i], ref.s[i], 1e-12);
  }
}

TEST(SpectralNorm, TrivialCases) {
  EXPECT_EQ(spectral_norm(Matrix(3, 3)), 0.0);
  const double d[] = {1.0, -4.0};
  EXPECT_NEAR(spectral_norm(Matrix::diagonal(d)), 4.0, 1e-14);
}

TEST(SpectralNorm, ProjectedShawMatchesOracle) {
  const auto p = generate(ProblemName::shaw, 64);
  const Matrix a = p.a.densify();
  std::vector<Vector> cols;
  CounterRng rng(9);
  for (int j = 0; j < 5; ++j) {
    Vector v(64);
    for (double& x : v) x = rng.normal();
    cols.push_back(v);
  }
  const Matrix q = oracle::orthonormalize(cols);
  const Matrix proj = subtract(Matrix::identity(64), multiply(q, q.transpose()));
  const Matrix m = multiply(a, proj);
  const double ref = oracle::jacobi_svd(m).s[0];
  EXPECT_NEAR(spectral_norm(m), ref, 1e-9 * ref);

  LinearMap map{64, 64, [&](std::span<const double> x) { return multiply(m, x); },
                [&](std::span<const double> x) { return multiply_transpose(m, x); }};
  EXPECT_NEAR(spectral_norm(map), ref, 1e-9 * ref);
}

TEST(SpectralNorm, BoundsRandomProbes) {
  const Matrix m = random_matrix(8, 6, 2);
  const double s = spectral_norm(m);
  CounterRng rng(77);
  for (int i = 0; i < 100; ++i) {
    Vector w(6);
    for (double& x : w) x = rng.normal();
    scale(1.0 / norm2(w), w);
    EXPECT_LE(norm2(multiply(m, w)), s + 1e-12);
  }
}

TEST(CanonicalAngles, TrivialCases) {
  const Matrix x = Matrix::from_rows({{1.0}, {0.0}});
  const Matrix y = Matrix::from_rows({{0.0}, {1.0}});
  EXPECT_NEAR(canonical_angles(x, x)[0], 0.0, 1e-15);
  EXPECT_NEAR(canonical_angles(x, y)[0], 1.0, 1e-15);
  const Matrix r = Matrix::from_rows({{std::cos(0.3)}, {std::sin(0.3)}});
  EXPECT_NEAR(canonical_angles(x, r)[0], std::sin(0.3), 1e-15);
}

TEST(CanonicalAngles, SymmetricInArguments) {
  const Matrix x = oracle::orthonormalize({{1, 2, 0, 1, 3}, {0, 1, 1, 0, 2}});
  const Matrix y = oracle::orthonormalize({{2, 0, 1, 1, 0}, {1, 1, 0, 3, 1}});
  const Vector a = canonical_angles(x, y), b = canonical_angles(y, x);
  for (std::size_t i = 0; i < 2; ++i) EXPECT_NEAR(a[i], b[i], 1e-12);
}

TEST(CanonicalAngles, RejectsNonOrthonormalInput) {
  const Matrix x = Matrix::from_rows({{2.0}, {0.0}});
  EXPECT_THROW(canonical_angles(x, x), ContractViolation);
}

TEST(LeastSquares, TrivialCases) {
  const Matrix m = Matrix::from_rows({{1.0}, {0.0}});
  EXPECT_NEAR(least_squares(m, Vector{2.0, 3.0})[0], 2.0, 1e-15);
  const TridiagonalRect t = random_tridiagonal(4, 3);
  for (double y : least_squares(t, Vector(5, 0.0))) EXPECT_EQ(y, 0.0);
}

TEST(LeastSquares, TridiagonalMatchesPseudoinverseOracle) {
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    const TridiagonalRect t = random_tridiagonal(6, seed);
    CounterRng rng(seed + 100);
    Vector rhs(7);
    for (double& x : rhs) x = rng.normal();
    const Vector y = least_squares(t, rhs);
    const Vector ref = oracle::pinv_solve(t.densify(), rhs);
    EXPECT_LE(oracle::rel_diff(y, ref), 1e-10);
    const Vector r = subtract(rhs, multiply(t.densify(), y));
    EXPECT_LE(norm2(multiply_transpose(t.densify(), r)), 7 * 1e-10 * norm2(rhs));
  }
}

TEST(LeastSquares, RankDeficientGivesMinimumNorm) {
  // second column duplicates nothing but has zero α and β: rank 1
  const TridiagonalRect t{{1.0, 0.0}, {0.0, 0.0}};
  const Vector y = least_squares(t, Vector{1.0, 2.0, 3.0});
  EXPECT_NEAR(y[0], 1.0, 1e-15);
  EXPECT_EQ(y[1], 0.0);
}
