#include "regkrylov/solvers.hpp"

#include <cmath>

#include "regkrylov/diagnostics.hpp"
#include "regkrylov/errors.hpp"

namespace regkrylov {

namespace {

IterateRecord make_record(std::size_t k, Vector x, double residual, std::span<const double> x_true) {
  IterateRecord r;
  r.k = k;
  r.residual_norm = residual;
  r.solution_norm = norm2(x);
  if (!x_true.empty()) {
    require(x_true.size() == x.size(), "trace: x_true length must match the operator");
    r.relative_error = norm2(subtract(x, x_true)) / norm2(x_true);
  }
  r.x = std::move(x);
  return r;
}

// ‖rhs − T y‖ for the (k+1)×k tridiagonal
double small_residual(const TridiagonalRect& t, std::span<const double> rhs, std::span<const double> y) {
  const std::size_t k = t.cols();
  Vector r(rhs.begin(), rhs.end());
  for (std::size_t j = 0; j < k; ++j) {
    if (j > 0) r[j - 1] -= t.beta[j - 1] * y[j];
    r[j] -= t.alpha[j] * y[j];
    r[j + 1] -= t.beta[j] * y[j];
  }
  return norm2(r);
}

// Projected right-hand side of length k+1 and the part of ‖b‖ outside span Q_{k+1}.
struct ProjectedRhs {
  Vector c;
  Vector out_of_range;  // indexed by k (1-based), entry 0 unused
};

ProjectedRhs projected_rhs(const LanczosFactorization& f, std::span<const double> b) {
  const std::size_t k = f.steps();
  ProjectedRhs p;
  p.c.assign(k + 1, 0.0);
  p.out_of_range.assign(k + 1, 0.0);
  if (f.start == StartKind::minres) {
    p.c[0] = norm2(b);
    return p;
  }
  Vector r(b.begin(), b.end());
  for (std::size_t j = 0; j <= k; ++j) {
    if (j < f.q.cols()) {
      p.c[j] = dot(f.q.col(j), b);
      axpy(-p.c[j], f.q.col(j), r);
    }
    if (j >= 1) p.out_of_range[j] = norm2(r);
  }
  return p;
}

SolverId solver_for(StartKind start, bool hybrid) {
  if (hybrid) return start == StartKind::minres ? SolverId::hybrid_minres : SolverId::hybrid_mr2;
  return start == StartKind::minres ? SolverId::minres : SolverId::mr2;
}

// Truncated SVD solution of min ‖rhs − T y‖ keeping p terms.
struct InnerSolution {
  Vector y;
  double residual = 0.0;
};

std::vector<InnerSolution> projected_tsvd_family(const SvdResult& s, std::span<const double> rhs, std::size_t rank) {
  const std::size_t k = s.v.rows();
  std::vector<InnerSolution> family;
  Vector y(k, 0.0);
  Vector r(rhs.begin(), rhs.end());
  for (std::size_t p = 0; p < rank; ++p) {
    const double coef = dot(s.u.col(p), rhs);
    axpy(coef / s.s[p], s.v.col(p), y);
    axpy(-coef, s.u.col(p), r);
    family.push_back({y, norm2(r)});
  }
  return family;
}

}  // namespace

std::string_view to_string(SolverId id) {
  switch (id) {
    case SolverId::minres: return "minres";
    case SolverId::mr2: return "mr2";
    case SolverId::lsqr: return "lsqr";
    case SolverId::tsvd: return "tsvd";
    case SolverId::hybrid_minres: return "hybrid-minres";
    case SolverId::hybrid_mr2: return "hybrid-mr2";
  }
  return "?";
}

SolverId parse_solver_id(std::string_view name) {
  for (auto id : {SolverId::minres, SolverId::mr2, SolverId::lsqr, SolverId::tsvd, SolverId::hybrid_minres,
                  SolverId::hybrid_mr2})
    if (to_string(id) == name) return id;
  throw ConfigError("unknown solver '" + std::string(name) + "'");
}

const IterateRecord& IterateTrace::at(std::size_t k) const {
  require(k >= 1 && k <= records.size(), "IterateTrace::at: iteration out of range");
  return records[k - 1];
}

std::size_t IterateTrace::matvecs_at(std::size_t k) const {
  switch (solver) {
    case SolverId::minres:
    case SolverId::hybrid_minres: return k;
    case SolverId::mr2:
    case SolverId::hybrid_mr2: return k + 1;
    case SolverId::lsqr: return 2 * k;
    case SolverId::tsvd: return 0;
  }
  return 0;
}

IterateTrace lanczos_trace(const LanczosFactorization& f, std::span<const double> b, std::span<const double> x_true) {
  IterateTrace trace;
  trace.solver = solver_for(f.start, false);
  trace.matvecs = f.matvecs;
  trace.breakdown = f.breakdown;
  const ProjectedRhs rhs = projected_rhs(f, b);
  for (std::size_t k = 1; k <= f.steps(); ++k) {
    const TridiagonalRect t = f.t.leading(k);
    const std::span<const double> c(rhs.c.data(), k + 1);
    const Vector y = least_squares(t, c);
    const double inner = small_residual(t, c, y);
    const double residual = std::hypot(inner, rhs.out_of_range[k]);
    trace.records.push_back(make_record(k, combine_columns(f.q, y), residual, x_true));
  }
  trace.lanczos = f;
  return trace;
}

IterateTrace minres_trace(const SymmetricMatrix& a, std::span<const double> b, std::size_t k_max,
                          std::span<const double> x_true, Reorthogonalization policy) {
  return lanczos_trace(lanczos(a, StartKind::minres, b, k_max, policy), b, x_true);
}

IterateTrace mr2_trace(const SymmetricMatrix& a, std::span<const double> b, std::size_t k_max,
                       std::span<const double> x_true, Reorthogonalization policy) {
  return lanczos_trace(lanczos(a, StartKind::mr2, b, k_max, policy), b, x_true);
}

IterateTrace lsqr_trace(const SymmetricMatrix& a, std::span<const double> b, std::size_t k_max,
                        std::span<const double> x_true) {
  BidiagFactorization f = golub_kahan(a, b, k_max);
  IterateTrace trace;
  trace.solver = SolverId::lsqr;
  trace.matvecs = f.matvecs;
  trace.breakdown = f.breakdown;
  for (std::size_t k = 1; k <= f.steps(); ++k) {
    const Matrix bk = f.lower_bidiagonal(k);
    Vector rhs(k + 1, 0.0);
    rhs[0] = f.beta[0];
    const Vector y = least_squares(bk, rhs);
    const double residual = norm2(subtract(rhs, multiply(bk, y)));
    trace.records.push_back(make_record(k, combine_columns(f.v, y), residual, x_true));
  }
  trace.bidiag = std::move(f);
  return trace;
}

IterateTrace tsvd_trace(const SpectralDecomposition& decomp, std::span<const double> b,
                        std::span<const double> x_true, std::optional<std::size_t> k_max) {
  const std::size_t n = decomp.order();
  require(b.size() == n, "tsvd_trace: right-hand side length must match the decomposition");
  const std::size_t kk = std::min(k_max.value_or(n), n);
  const Vector coeff = decomp.project(b);

  // suffix sums of squared coefficients give the residual norms
  Vector tail(n + 1, 0.0);
  for (std::size_t i = n; i-- > 0;) tail[i] = tail[i + 1] + coeff[i] * coeff[i];

  IterateTrace trace;
  trace.solver = SolverId::tsvd;
  Vector x(n, 0.0);
  for (std::size_t k = 1; k <= kk; ++k) {
    const double lambda = decomp.eigenvalue(k - 1);
    if (lambda == 0.0) break;
    const Vector v = decomp.eigenvector(k - 1);
    axpy(coeff[k - 1] / lambda, v, x);
    trace.records.push_back(make_record(k, x, std::sqrt(tail[k]), x_true));
  }
  return trace;
}

IterateTrace hybrid_trace(const LanczosFactorization& f, std::span<const double> b, const HybridRule& rule,
                          std::span<const double> x_true) {
  if (rule.kind == HybridRule::Kind::fixed)
    require(rule.p >= 1 && rule.p <= f.steps(), "hybrid_trace: fixed p must satisfy 1 <= p <= k");
  IterateTrace trace;
  trace.solver = solver_for(f.start, true);
  trace.matvecs = f.matvecs;
  trace.breakdown = f.breakdown;
  const ProjectedRhs rhs = projected_rhs(f, b);
  for (std::size_t k = 1; k <= f.steps(); ++k) {
    const TridiagonalRect t = f.t.leading(k);
    const std::span<const double> c(rhs.c.data(), k + 1);
    const SvdResult s = small_svd(t);
    const double tol = rank_tolerance(s.s[0], k + 1);
    std::size_t rank = 0;
    while (rank < k && s.s[rank] > tol) ++rank;

    std::size_t p = rank;
    const std::vector<InnerSolution> family = projected_tsvd_family(s, c, rank);
    if (rule.kind == HybridRule::Kind::fixed) {
      p = std::min({rule.p, k, rank});
    } else {
      std::vector<LCurvePoint> points;
      for (std::size_t i = 0; i < family.size(); ++i)
        points.push_back({std::log10(std::hypot(family[i].residual, rhs.out_of_range[k])),
                          std::log10(norm2(family[i].y)), i + 1});
      if (auto corner = lcurve_corner(points)) p = *corner;
    }

    Vector x(b.size(), 0.0);
    double residual = std::hypot(norm2(c), rhs.out_of_range[k]);
    if (p > 0) {
      x = combine_columns(f.q, family[p - 1].y);
      residual = std::hypot(family[p - 1].residual, rhs.out_of_range[k]);
    }
    IterateRecord r = make_record(k, std::move(x), residual, x_true);
    r.inner_rank = p;
    trace.records.push_back(std::move(r));
  }
  trace.lanczos = f;
  return trace;
}

IterateTrace hybrid_trace(StartKind base, const SymmetricMatrix& a, std::span<const double> b, std::size_t k_max,
                          const HybridRule& rule, std::span<const double> x_true) {
  return hybrid_trace(lanczos(a, base, b, k_max), b, rule, x_true);
}

Vector pseudoinverse_iterate(const LanczosFactorization& f, std::span<const double> b, std::size_t k) {
  require(k >= 1 && k <= f.steps(), "pseudoinverse_iterate: k out of range");
  const Matrix qk1 = f.leading_basis(k + 1);
  Vector c = multiply_transpose(qk1, b);
  const Vector y = least_squares(f.t.leading(k).densify(), c);
  return combine_columns(f.q, y);
}

}  // namespace regkrylov
