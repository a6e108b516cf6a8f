#include "regkrylov/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "regkrylov/errors.hpp"

namespace regkrylov {

namespace {
constexpr double kEps = std::numeric_limits<double>::epsilon();
}

Vector harmonic_ritz(const TridiagonalRect& t) {
  const std::size_t k = t.cols();
  require(k >= 1, "harmonic_ritz: empty factorization");

  // T = QR by Givens, then μ = 1/θ are the eigenvalues of R^{-T} T_kk R^{-1}
  Matrix r = t.densify();
  for (std::size_t j = 0; j < k; ++j) {
    const double a = r(j, j);
    const double b = r(j + 1, j);
    if (b == 0.0) continue;
    const double h = std::hypot(a, b);
    const double cs = a / h;
    const double sn = b / h;
    for (std::size_t l = j; l < k; ++l) {
      const double top = r(j, l);
      const double bot = r(j + 1, l);
      r(j, l) = cs * top + sn * bot;
      r(j + 1, l) = -sn * top + cs * bot;
    }
  }
  for (std::size_t j = 0; j < k; ++j)
    if (r(j, j) == 0.0) throw NumericalError("harmonic_ritz: projected matrix is rank deficient");

  const Matrix tkk = t.square();
  Matrix x(k, k);  // T_kk R^{-1}
  for (std::size_t j = 0; j < k; ++j)
    for (std::size_t i = 0; i < k; ++i) {
      double acc = tkk(i, j);
      for (std::size_t l = 0; l < j; ++l) acc -= x(i, l) * r(l, j);
      x(i, j) = acc / r(j, j);
    }
  Matrix m(k, k);  // R^{-T} X
  for (std::size_t i = 0; i < k; ++i)
    for (std::size_t c = 0; c < k; ++c) {
      double acc = x(i, c);
      for (std::size_t l = 0; l < i; ++l) acc -= r(l, i) * m(l, c);
      m(i, c) = acc / r(i, i);
    }
  for (std::size_t j = 0; j < k; ++j)
    for (std::size_t i = j + 1; i < k; ++i) m(i, j) = m(j, i) = 0.5 * (m(i, j) + m(j, i));

  const SpectralDecomposition d = symmetric_eig(m);
  const double mu_max = std::fabs(d.eigenvalue(0));
  Vector theta;
  for (double mu : d.eigenvalues()) {
    if (std::fabs(mu) <= double(k) * kEps * mu_max)
      throw NumericalError("harmonic_ritz: leading square block is singular");
    theta.push_back(1.0 / mu);
  }
  std::stable_sort(theta.begin(), theta.end(), [](double a, double b) { return std::fabs(a) > std::fabs(b); });
  return theta;
}

Vector filter_factors(std::span<const double> theta, std::span<const double> lambda) {
  for (double th : theta)
    if (th == 0.0) throw NumericalError("filter_factors: zero harmonic Ritz value");
  Vector f(lambda.size());
  for (std::size_t i = 0; i < lambda.size(); ++i) {
    double p = 1.0;
    for (double th : theta) p *= (th - lambda[i]) / th;
    if (std::fabs(p) < 0.5) {
      f[i] = 1.0 - p;
      continue;
    }
    // 1 − Π(1 − r_j) = Σ_j r_j Π_{l<j}(1 − r_l), no cancellation for small λ
    double sum = 0.0;
    double prefix = 1.0;
    for (double th : theta) {
      const double ratio = lambda[i] / th;
      sum += ratio * prefix;
      prefix *= 1.0 - ratio;
    }
    f[i] = sum;
  }
  return f;
}

namespace {

using Real = long double;

// Cyclic Jacobi on a small symmetric matrix (column-major); eigenvalues only.
std::vector<Real> jacobi_eigenvalues(std::vector<Real> m, std::size_t k) {
  auto at = [&m, k](std::size_t i, std::size_t j) -> Real& { return m[j * k + i]; };
  for (int sweep = 0; sweep < 100; ++sweep) {
    Real off = 0, diag = 0;
    for (std::size_t p = 0; p < k; ++p) {
      diag += at(p, p) * at(p, p);
      for (std::size_t q = p + 1; q < k; ++q) off += at(p, q) * at(p, q);
    }
    if (off <= std::numeric_limits<Real>::epsilon() * std::numeric_limits<Real>::epsilon() * diag * 1e-4L) break;
    for (std::size_t p = 0; p < k; ++p)
      for (std::size_t q = p + 1; q < k; ++q) {
        if (at(p, q) == 0) continue;
        const Real zeta = (at(q, q) - at(p, p)) / (2 * at(p, q));
        const Real t = (zeta >= 0 ? 1 : -1) / (std::fabs(zeta) + std::sqrt(zeta * zeta + 1));
        const Real c = 1 / std::sqrt(t * t + 1);
        const Real s = t * c;
        for (std::size_t l = 0; l < k; ++l) {
          const Real x = at(l, p), y = at(l, q);
          at(l, p) = c * x - s * y;
          at(l, q) = s * x + c * y;
        }
        for (std::size_t l = 0; l < k; ++l) {
          const Real x = at(p, l), y = at(q, l);
          at(p, l) = c * x - s * y;
          at(q, l) = s * x + c * y;
        }
      }
  }
  std::vector<Real> out(k);
  for (std::size_t i = 0; i < k; ++i) out[i] = at(i, i);
  return out;
}

std::vector<Real> apply_extended(const Matrix& a, std::span<const double> x) {
  std::vector<Real> y(a.rows(), 0);
  for (std::size_t j = 0; j < a.cols(); ++j) {
    const Real xj = x[j];
    const auto col = a.col(j);
    for (std::size_t i = 0; i < a.rows(); ++i) y[i] += Real(col[i]) * xj;
  }
  return y;
}

}  // namespace

FilterFactorEvaluator::FilterFactorEvaluator(const SymmetricMatrix& a, const SpectralDecomposition& decomp,
                                             const LanczosFactorization& f)
    : steps_(f.steps()) {
  require(!a.is_kronecker(), "FilterFactorEvaluator: dense operator required");
  const std::size_t n = a.order();
  require(decomp.order() == n && f.q.rows() == n, "FilterFactorEvaluator: sizes do not match");
  const Matrix& dense = a.dense_values();

  lambda_.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    const Vector v = decomp.eigenvector(i);
    const auto av = apply_extended(dense, v);
    Real num = 0, den = 0;
    for (std::size_t r = 0; r < n; ++r) {
      num += av[r] * Real(v[r]);
      den += Real(v[r]) * Real(v[r]);
    }
    lambda_[i] = num / den;
  }

  const std::size_t k = steps_;
  std::vector<std::vector<Real>> w(k);
  for (std::size_t j = 0; j < k; ++j) w[j] = apply_extended(dense, f.q.col(j));
  g_.assign(k * k, 0);
  for (std::size_t j = 0; j < k; ++j)
    for (std::size_t i = 0; i <= j; ++i) {
      Real s = 0, t = 0;
      const auto qi = f.q.col(i), qj = f.q.col(j);
      for (std::size_t r = 0; r < n; ++r) {
        s += Real(qi[r]) * w[j][r];
        t += Real(qj[r]) * w[i][r];
      }
      g_[j * k + i] = g_[i * k + j] = (s + t) / 2;
    }
  // modified Gram–Schmidt, two passes, keeping R
  r_.assign(k * k, 0);
  for (std::size_t j = 0; j < k; ++j) {
    auto& v = w[j];
    for (int pass = 0; pass < 2; ++pass)
      for (std::size_t i = 0; i < j; ++i) {
        Real h = 0;
        for (std::size_t r = 0; r < n; ++r) h += w[i][r] * v[r];
        for (std::size_t r = 0; r < n; ++r) v[r] -= h * w[i][r];
        r_[j * k + i] += h;
      }
    Real nv = 0;
    for (Real x : v) nv += x * x;
    nv = std::sqrt(nv);
    r_[j * k + j] = nv;
    if (nv > 0)
      for (Real& x : v) x /= nv;
  }
}

std::vector<long double> FilterFactorEvaluator::harmonic_ritz_extended(std::size_t k) const {
  require(k >= 1 && k <= steps_, "FilterFactorEvaluator: k out of range");
  const std::size_t s = steps_;
  auto r = [this, s](std::size_t i, std::size_t j) { return r_[j * s + i]; };
  Real rmax = 0;
  for (std::size_t j = 0; j < k; ++j) rmax = std::max(rmax, std::fabs(r(j, j)));
  for (std::size_t j = 0; j < k; ++j)
    if (std::fabs(r(j, j)) <= Real(k) * std::numeric_limits<Real>::epsilon() * rmax)
      throw NumericalError("harmonic_ritz: A Q_k is numerically rank deficient");

  // M = R^{-T} G R^{-1}; μ = 1/θ are its eigenvalues
  std::vector<Real> x(k * k);  // G R^{-1}
  for (std::size_t j = 0; j < k; ++j)
    for (std::size_t i = 0; i < k; ++i) {
      Real acc = g_[j * s + i];
      for (std::size_t l = 0; l < j; ++l) acc -= x[l * k + i] * r(l, j);
      x[j * k + i] = acc / r(j, j);
    }
  std::vector<Real> m(k * k);
  for (std::size_t c = 0; c < k; ++c)
    for (std::size_t i = 0; i < k; ++i) {
      Real acc = x[c * k + i];
      for (std::size_t l = 0; l < i; ++l) acc -= r(l, i) * m[c * k + l];
      m[c * k + i] = acc / r(i, i);
    }
  for (std::size_t j = 0; j < k; ++j)
    for (std::size_t i = j + 1; i < k; ++i) m[j * k + i] = m[i * k + j] = (m[j * k + i] + m[i * k + j]) / 2;

  const auto mu = jacobi_eigenvalues(std::move(m), k);
  Real mu_max = 0;
  for (Real v : mu) mu_max = std::max(mu_max, std::fabs(v));
  std::vector<Real> theta;
  for (Real v : mu) {
    if (std::fabs(v) <= Real(k) * std::numeric_limits<Real>::epsilon() * mu_max)
      throw NumericalError("harmonic_ritz: leading square block is singular");
    theta.push_back(1 / v);
  }
  std::sort(theta.begin(), theta.end(), [](Real a, Real b) { return std::fabs(a) > std::fabs(b); });
  return theta;
}

Vector FilterFactorEvaluator::harmonic_ritz(std::size_t k) const {
  const auto theta = harmonic_ritz_extended(k);
  return Vector(theta.begin(), theta.end());
}

Vector FilterFactorEvaluator::filter_factors(std::size_t k) const {
  const auto theta = harmonic_ritz_extended(k);
  Vector f(lambda_.size());
  for (std::size_t i = 0; i < lambda_.size(); ++i) {
    Real p = 1;
    for (Real th : theta) p *= 1 - lambda_[i] / th;
    if (std::fabs(p) < 0.5L) {
      f[i] = double(1 - p);
      continue;
    }
    Real sum = 0, prefix = 1;
    for (Real th : theta) {
      const Real ratio = lambda_[i] / th;
      sum += ratio * prefix;
      prefix *= 1 - ratio;
    }
    f[i] = double(sum);
  }
  return f;
}

Vector gamma_sequence(const SymmetricMatrix& a, const LanczosFactorization& f, std::optional<std::size_t> k_max) {
  const std::size_t n = a.order();
  const std::size_t kk = std::min(k_max.value_or(f.q.cols()), f.q.cols());
  Vector gamma;
  for (std::size_t k = 1; k <= kk; ++k) {
    auto project_out = [&f, k](std::span<const double> x) {
      Vector y(x.begin(), x.end());
      for (std::size_t j = 0; j < k; ++j) axpy(-dot(f.q.col(j), x), f.q.col(j), y);
      return y;
    };
    LinearMap map;
    map.rows = n;
    map.cols = n;
    map.apply = [&a, project_out](std::span<const double> x) { return a.apply(project_out(x)); };
    map.apply_transpose = [&a, project_out](std::span<const double> x) { return project_out(a.apply(x)); };
    gamma.push_back(spectral_norm(map));
  }
  return gamma;
}

double gamma_direct(const SymmetricMatrix& a, const LanczosFactorization& f, std::size_t k) {
  require(k >= 1 && k <= f.steps(), "gamma_direct: k out of range");
  const Matrix qk1 = f.leading_basis(k + 1);
  const Matrix qk = f.leading_basis(k);
  const Matrix approx = multiply(multiply(qk1, f.t.leading(k).densify()), qk.transpose());
  return spectral_norm(subtract(a.densify(), approx));
}

Matrix delta_matrix(const SpectralDecomposition& decomp, std::span<const double> b, std::size_t k,
                    std::size_t k_cap) {
  const std::size_t n = decomp.order();
  require(k >= 1 && k < n, "delta_matrix: k must satisfy 1 <= k < n");
  require(k <= k_cap, "delta_matrix: k exceeds the Lagrange evaluation cap");
  const Vector& lambda = decomp.eigenvalues();
  for (std::size_t i = 0; i < k; ++i)
    for (std::size_t l = i + 1; l < k; ++l)
      if (lambda[i] == lambda[l]) throw NumericalError("delta_matrix: coincident eigenvalues among the first k");
  const Vector c = decomp.project(b);
  const double floor = 1e3 * kEps * norm2(b);
  for (std::size_t i = 0; i < k; ++i)
    if (std::fabs(c[i]) < floor)
      throw NumericalError("delta_matrix: coefficient v_" + std::to_string(i + 1) + "ᵀb too small");

  Matrix delta(n - k, k);
  for (std::size_t j = 0; j < n - k; ++j) {
    const double x = lambda[k + j];
    const double d2 = x * c[k + j];
    for (std::size_t i = 0; i < k; ++i) {
      double li = 1.0;
      for (std::size_t l = 0; l < k; ++l)
        if (l != i) li *= (x - lambda[l]) / (lambda[i] - lambda[l]);
      delta(j, i) = d2 * li / (lambda[i] * c[i]);
    }
  }
  return delta;
}

double sin_theta_direct(const SpectralDecomposition& decomp, const LanczosFactorization& f, std::size_t k) {
  require(k >= 1 && k <= f.q.cols(), "sin_theta_direct: k out of range");
  return canonical_angles(decomp.leading_eigenvectors(k), f.leading_basis(k)).front();
}

double sin_theta_formula(const Matrix& delta) {
  const double s = spectral_norm(delta);
  return s / std::sqrt(1.0 + s * s);
}

PicardReport picard_and_c(const SpectralDecomposition& decomp, std::span<const double> b_hat,
                          std::span<const double> e) {
  require(b_hat.size() == e.size(), "picard_and_c: b_hat and e lengths differ");
  const std::size_t n = decomp.order();
  PicardReport p;
  p.signal = decomp.project(b_hat);
  p.noise = decomp.project(e);
  Vector b(b_hat.begin(), b_hat.end());
  axpy(1.0, e, b);
  p.total = decomp.project(b);
  for (auto* v : {&p.signal, &p.noise, &p.total})
    for (double& x : *v) x = std::fabs(x);

  Vector suffix_max(n + 1, 0.0);
  for (std::size_t i = n; i-- > 0;) suffix_max[i] = std::max(suffix_max[i + 1], p.total[i]);
  double prefix_min = std::numeric_limits<double>::infinity();
  for (std::size_t k = 1; k < n; ++k) {
    prefix_min = std::min(prefix_min, p.total[k - 1]);
    p.c.push_back(prefix_min == 0.0 ? std::numeric_limits<double>::infinity() : suffix_max[k] / prefix_min);
  }
  return p;
}

double round_off_floor(double sigma1, std::size_t n) { return 10.0 * double(n) * kEps * sigma1; }

std::vector<DecayRow> decay_check(const LanczosFactorization& f, std::span<const double> gamma,
                                  std::span<const double> sigma) {
  require(!sigma.empty(), "decay_check: need singular values");
  const std::size_t n = f.q.rows();
  const double tol = 1e-10 * sigma[0];
  const double floor = round_off_floor(sigma[0], n);
  std::vector<DecayRow> rows;
  for (std::size_t k = 1; k + 2 <= f.steps() && k <= gamma.size() && k < sigma.size(); ++k) {
    DecayRow r;
    r.k = k;
    r.beta_next = f.t.beta[k];
    r.alpha_next2 = std::fabs(f.t.alpha[k + 1]);
    r.gamma = gamma[k - 1];
    r.sigma_next = sigma[k];
    r.pre_floor = r.sigma_next > floor && r.gamma > floor;
    r.beta_ok = r.beta_next <= r.gamma + tol;
    r.alpha_ok = r.alpha_next2 <= r.gamma + tol;
    rows.push_back(r);
  }
  return rows;
}

std::vector<LCurvePoint> lcurve_points(const IterateTrace& trace) {
  std::vector<LCurvePoint> points;
  for (const IterateRecord& r : trace.records)
    if (r.residual_norm > 0.0 && r.solution_norm > 0.0)
      points.push_back({std::log10(r.residual_norm), std::log10(r.solution_norm), r.k});
  return points;
}

std::optional<std::size_t> lcurve_corner(std::span<const LCurvePoint> points) {
  std::vector<LCurvePoint> kept;
  for (const LCurvePoint& p : points) {
    if (!std::isfinite(p.log_residual) || !std::isfinite(p.log_solution_norm)) continue;
    if (!kept.empty() && p.log_residual > kept.back().log_residual) continue;
    kept.push_back(p);
  }
  if (kept.size() < 3) return std::nullopt;

  std::optional<std::size_t> best;
  double best_kappa = 0.0;
  for (std::size_t i = 1; i + 1 < kept.size(); ++i) {
    const LCurvePoint& p = kept[i - 1];
    const LCurvePoint& q = kept[i];
    const LCurvePoint& s = kept[i + 1];
    const double ax = q.log_residual - p.log_residual, ay = q.log_solution_norm - p.log_solution_norm;
    const double bx = s.log_residual - q.log_residual, by = s.log_solution_norm - q.log_solution_norm;
    const double cx = s.log_residual - p.log_residual, cy = s.log_solution_norm - p.log_solution_norm;
    const double la = std::hypot(ax, ay), lb = std::hypot(bx, by), lc = std::hypot(cx, cy);
    if (la == 0.0 || lb == 0.0 || lc == 0.0) continue;
    // clockwise turns (the L-corner) count as positive curvature
    const double kappa = -2.0 * (ax * by - ay * bx) / (la * lb * lc);
    if (kappa > best_kappa) {
      best_kappa = kappa;
      best = q.k;
    }
  }
  return best;
}

std::size_t semiconvergence_index(const IterateTrace& trace) {
  require(!trace.records.empty(), "semiconvergence_index: empty trace");
  std::size_t best = 0;
  double best_err = std::numeric_limits<double>::infinity();
  for (const IterateRecord& r : trace.records) {
    require(r.relative_error.has_value(), "semiconvergence_index: trace has no relative errors");
    if (*r.relative_error < best_err) {
      best_err = *r.relative_error;
      best = r.k;
    }
  }
  return best;
}

}  // namespace regkrylov
