#include "regkrylov/krylov.hpp"

#include <cmath>
#include <limits>

#include "regkrylov/errors.hpp"

namespace regkrylov {

namespace {

constexpr double kEps = std::numeric_limits<double>::epsilon();

// classical Gram–Schmidt against the first `cols` columns of q, applied twice
void reorthogonalize(const Matrix& q, std::size_t cols, std::span<double> w) {
  for (int pass = 0; pass < 2; ++pass) {
    Vector h(cols);
    for (std::size_t i = 0; i < cols; ++i) h[i] = dot(q.col(i), w);
    for (std::size_t i = 0; i < cols; ++i) axpy(-h[i], q.col(i), w);
  }
}

// keeps the first `cols` columns
Matrix trim_columns(const Matrix& q, std::size_t cols) {
  Matrix out(q.rows(), cols);
  for (std::size_t j = 0; j < cols; ++j) {
    auto src = q.col(j);
    std::copy(src.begin(), src.end(), out.col(j).begin());
  }
  return out;
}

}  // namespace

std::string_view to_string(StartKind kind) { return kind == StartKind::minres ? "minres" : "mr2"; }

Vector LanczosFactorization::basis_vector(std::size_t j) const {
  if (j < q.cols()) return Vector(q.col(j).begin(), q.col(j).end());
  return Vector(q.rows(), 0.0);
}

Matrix LanczosFactorization::leading_basis(std::size_t j) const {
  Matrix out(q.rows(), j);
  for (std::size_t c = 0; c < std::min(j, q.cols()); ++c) {
    auto src = q.col(c);
    std::copy(src.begin(), src.end(), out.col(c).begin());
  }
  return out;
}

LanczosFactorization lanczos(const SymmetricMatrix& a, StartKind start, std::span<const double> b,
                             std::size_t k_max, Reorthogonalization policy) {
  const std::size_t n = a.order();
  require(b.size() == n, "lanczos: right-hand side length must match the operator");
  require(k_max >= 1 && k_max <= n, "lanczos: k_max must lie in [1, n]");
  require(norm2(b) > 0.0, "lanczos: zero right-hand side");

  LanczosFactorization f;
  f.start = start;
  f.policy = policy;

  Vector q1(b.begin(), b.end());
  if (start == StartKind::mr2) {
    q1 = a.apply(b);
    ++f.matvecs;
    require(norm2(q1) > 0.0, "lanczos: Ab is zero, MR-II start undefined");
  }
  scale(1.0 / norm2(q1), q1);

  Matrix q(n, k_max + 1);
  std::copy(q1.begin(), q1.end(), q.col(0).begin());

  double norm_estimate = 0.0;
  double beta_prev = 0.0;
  Vector w(n);
  for (std::size_t j = 0; j < k_max; ++j) {
    a.apply(q.col(j), w);
    ++f.matvecs;
    const double alpha = dot(q.col(j), w);
    axpy(-alpha, q.col(j), w);
    if (j > 0) axpy(-beta_prev, q.col(j - 1), w);
    if (policy == Reorthogonalization::full) reorthogonalize(q, j + 1, w);
    const double beta = norm2(w);
    norm_estimate = std::max(norm_estimate, std::sqrt(alpha * alpha + beta * beta + beta_prev * beta_prev));

    f.t.alpha.push_back(alpha);
    if (beta <= double(n) * kEps * norm_estimate) {
      f.t.beta.push_back(0.0);
      f.breakdown = true;
      f.breakdown_step = j + 1;
      f.q = trim_columns(q, j + 1);
      return f;
    }
    f.t.beta.push_back(beta);
    auto next = q.col(j + 1);
    for (std::size_t i = 0; i < n; ++i) next[i] = w[i] / beta;
    beta_prev = beta;
  }
  f.q = std::move(q);
  return f;
}

Matrix BidiagFactorization::lower_bidiagonal(std::size_t j) const {
  require(j <= alpha.size(), "lower_bidiagonal: block larger than the factorization");
  Matrix out(j + 1, j);
  for (std::size_t i = 0; i < j; ++i) {
    out(i, i) = alpha[i];
    out(i + 1, i) = beta[i + 1];
  }
  return out;
}

BidiagFactorization golub_kahan(const SymmetricMatrix& a, std::span<const double> b, std::size_t k_max) {
  const std::size_t n = a.order();
  require(b.size() == n, "golub_kahan: right-hand side length must match the operator");
  require(k_max >= 1 && k_max <= n, "golub_kahan: k_max must lie in [1, n]");
  const double bnorm = norm2(b);
  require(bnorm > 0.0, "golub_kahan: zero right-hand side");

  BidiagFactorization f;
  Matrix u(n, k_max + 1);
  Matrix v(n, k_max);
  f.beta.push_back(bnorm);
  for (std::size_t i = 0; i < n; ++i) u(i, 0) = b[i] / bnorm;

  double norm_estimate = 0.0;
  Vector w(n);
  std::size_t k = 0;
  for (; k < k_max; ++k) {
    // α_{k+1} v_{k+1} = Aᵀu_{k+1} − β_{k+1} v_k
    a.apply(u.col(k), w);
    ++f.matvecs;
    if (k > 0) axpy(-f.beta[k], v.col(k - 1), w);
    reorthogonalize(v, k, w);
    const double alpha = norm2(w);
    norm_estimate = std::max(norm_estimate, std::hypot(alpha, f.beta[k]));
    if (alpha <= double(n) * kEps * norm_estimate) {
      f.breakdown = true;
      f.breakdown_step = k + 1;
      break;
    }
    f.alpha.push_back(alpha);
    for (std::size_t i = 0; i < n; ++i) v(i, k) = w[i] / alpha;

    // β_{k+2} u_{k+2} = A v_{k+1} − α_{k+1} u_{k+1}
    a.apply(v.col(k), w);
    ++f.matvecs;
    axpy(-alpha, u.col(k), w);
    reorthogonalize(u, k + 1, w);
    const double beta = norm2(w);
    norm_estimate = std::max(norm_estimate, std::hypot(alpha, beta));
    if (beta <= double(n) * kEps * norm_estimate) {
      f.beta.push_back(0.0);
      f.breakdown = true;
      f.breakdown_step = k + 1;
      ++k;
      f.u = trim_columns(u, k);
      f.v = trim_columns(v, k);
      return f;
    }
    f.beta.push_back(beta);
    for (std::size_t i = 0; i < n; ++i) u(i, k + 1) = w[i] / beta;
  }
  f.u = trim_columns(u, k + 1);
  f.v = trim_columns(v, k);
  return f;
}

}  // namespace regkrylov
