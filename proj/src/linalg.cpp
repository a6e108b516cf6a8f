#include "regkrylov/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include "regkrylov/errors.hpp"
#include "regkrylov/rng.hpp"

namespace regkrylov {

namespace {

constexpr double kEps = std::numeric_limits<double>::epsilon();

// |λ| descending, then positive first, then smaller original index.
bool spectral_order(double la, std::size_t ia, double lb, std::size_t ib) {
  const double aa = std::fabs(la);
  const double ab = std::fabs(lb);
  if (aa != ab) return aa > ab;
  const bool pa = la >= 0.0;
  const bool pb = lb >= 0.0;
  if (pa != pb) return pa;
  return ia < ib;
}

std::vector<std::size_t> spectral_permutation(const Vector& lambda) {
  std::vector<std::size_t> idx(lambda.size());
  std::iota(idx.begin(), idx.end(), 0);
  std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) {
    return spectral_order(lambda[a], a, lambda[b], b);
  });
  return idx;
}

// Householder reduction to tridiagonal form (EISPACK tred2 lineage).
// On exit v holds the accumulated orthogonal transform, d the diagonal and
// e the subdiagonal in e[1..n-1].
void tridiagonalize(Matrix& v, Vector& d, Vector& e) {
  const std::size_t n = v.rows();
  for (std::size_t j = 0; j < n; ++j) d[j] = v(n - 1, j);

  for (std::size_t i = n - 1; i > 0; --i) {
    double scale_ = 0.0;
    double h = 0.0;
    for (std::size_t k = 0; k < i; ++k) scale_ += std::fabs(d[k]);
    if (scale_ == 0.0) {
      e[i] = d[i - 1];
      for (std::size_t j = 0; j < i; ++j) {
        d[j] = v(i - 1, j);
        v(i, j) = 0.0;
        v(j, i) = 0.0;
      }
    } else {
      for (std::size_t k = 0; k < i; ++k) {
        d[k] /= scale_;
        h += d[k] * d[k];
      }
      double f = d[i - 1];
      double g = std::sqrt(h);
      if (f > 0) g = -g;
      e[i] = scale_ * g;
      h -= f * g;
      d[i - 1] = f - g;
      for (std::size_t j = 0; j < i; ++j) e[j] = 0.0;

      for (std::size_t j = 0; j < i; ++j) {
        f = d[j];
        v(j, i) = f;
        g = e[j] + v(j, j) * f;
        for (std::size_t k = j + 1; k <= i - 1; ++k) {
          g += v(k, j) * d[k];
          e[k] += v(k, j) * f;
        }
        e[j] = g;
      }
      f = 0.0;
      for (std::size_t j = 0; j < i; ++j) {
        e[j] /= h;
        f += e[j] * d[j];
      }
      const double hh = f / (h + h);
      for (std::size_t j = 0; j < i; ++j) e[j] -= hh * d[j];
      for (std::size_t j = 0; j < i; ++j) {
        f = d[j];
        g = e[j];
        auto vj = v.col(j);
        for (std::size_t k = j; k <= i - 1; ++k) vj[k] -= (f * e[k] + g * d[k]);
        d[j] = v(i - 1, j);
        v(i, j) = 0.0;
      }
    }
    d[i] = h;
  }

  for (std::size_t i = 0; i + 1 < n; ++i) {
    v(n - 1, i) = v(i, i);
    v(i, i) = 1.0;
    const double h = d[i + 1];
    if (h != 0.0) {
      for (std::size_t k = 0; k <= i; ++k) d[k] = v(k, i + 1) / h;
      for (std::size_t j = 0; j <= i; ++j) {
        double g = 0.0;
        for (std::size_t k = 0; k <= i; ++k) g += v(k, i + 1) * v(k, j);
        for (std::size_t k = 0; k <= i; ++k) v(k, j) -= g * d[k];
      }
    }
    for (std::size_t k = 0; k <= i; ++k) v(k, i + 1) = 0.0;
  }
  for (std::size_t j = 0; j < n; ++j) {
    d[j] = v(n - 1, j);
    v(n - 1, j) = 0.0;
  }
  v(n - 1, n - 1) = 1.0;
  e[0] = 0.0;
}

// Implicit-shift QL on the symmetric tridiagonal (d, e), rotating v.
void tridiagonal_ql(Matrix& v, Vector& d, Vector& e) {
  const std::size_t n = v.rows();
  constexpr int kMaxSweeps = 100;
  for (std::size_t i = 1; i < n; ++i) e[i - 1] = e[i];
  e[n - 1] = 0.0;

  double f = 0.0;
  double tst1 = 0.0;
  for (std::size_t l = 0; l < n; ++l) {
    tst1 = std::max(tst1, std::fabs(d[l]) + std::fabs(e[l]));
    std::size_t m = l;
    while (m < n) {
      if (std::fabs(e[m]) <= kEps * tst1) break;
      ++m;
    }
    if (m == n) m = n - 1;  // e[n-1] == 0 always terminates the scan
    if (m > l) {
      int iter = 0;
      do {
        if (++iter > kMaxSweeps)
          throw NumericalError("symmetric_eig: QL iteration did not converge for eigenvalue index " +
                               std::to_string(l));
        double g = d[l];
        double p = (d[l + 1] - g) / (2.0 * e[l]);
        double r = std::hypot(p, 1.0);
        if (p < 0) r = -r;
        d[l] = e[l] / (p + r);
        d[l + 1] = e[l] * (p + r);
        const double dl1 = d[l + 1];
        double h = g - d[l];
        for (std::size_t i = l + 2; i < n; ++i) d[i] -= h;
        f += h;

        p = d[m];
        double c = 1.0;
        double c2 = c;
        double c3 = c;
        const double el1 = e[l + 1];
        double s = 0.0;
        double s2 = 0.0;
        for (std::size_t ii = m; ii-- > l;) {
          c3 = c2;
          c2 = c;
          s2 = s;
          g = c * e[ii];
          h = c * p;
          r = std::hypot(p, e[ii]);
          e[ii + 1] = s * r;
          s = e[ii] / r;
          c = p / r;
          p = c * d[ii] - s * g;
          d[ii + 1] = h + s * (c * g + s * d[ii]);
          auto vi = v.col(ii);
          auto vi1 = v.col(ii + 1);
          for (std::size_t k = 0; k < n; ++k) {
            h = vi1[k];
            vi1[k] = s * vi[k] + c * h;
            vi[k] = c * vi[k] - s * h;
          }
        }
        p = -s * s2 * c3 * el1 * e[l] / dl1;
        e[l] = s * p;
        d[l] = c * p;
      } while (std::fabs(e[l]) > kEps * tst1);
    }
    d[l] += f;
    e[l] = 0.0;
  }
}

// Thin SVD of an m×n matrix with m >= n (LINPACK dsvdc lineage).
SvdResult svd_tall(const Matrix& arg) {
  const std::size_t m = arg.rows();
  const std::size_t n = arg.cols();
  Matrix a = arg;
  const std::size_t nu = std::min(m, n);
  Vector s(std::min(m + 1, n), 0.0);
  Matrix u(m, nu);
  Matrix v(n, n);
  Vector e(n, 0.0);
  Vector work(m, 0.0);

  const std::size_t nct = std::min(m - 1, n);
  const std::size_t nrt = static_cast<std::size_t>(std::max<long>(0, std::min<long>(long(n) - 2, long(m))));
  for (std::size_t k = 0; k < std::max(nct, nrt); ++k) {
    if (k < nct) {
      s[k] = 0.0;
      for (std::size_t i = k; i < m; ++i) s[k] = std::hypot(s[k], a(i, k));
      if (s[k] != 0.0) {
        if (a(k, k) < 0.0) s[k] = -s[k];
        for (std::size_t i = k; i < m; ++i) a(i, k) /= s[k];
        a(k, k) += 1.0;
      }
      s[k] = -s[k];
    }
    for (std::size_t j = k + 1; j < n; ++j) {
      if (k < nct && s[k] != 0.0) {
        double t = 0.0;
        for (std::size_t i = k; i < m; ++i) t += a(i, k) * a(i, j);
        t = -t / a(k, k);
        for (std::size_t i = k; i < m; ++i) a(i, j) += t * a(i, k);
      }
      e[j] = a(k, j);
    }
    if (k < nct)
      for (std::size_t i = k; i < m; ++i) u(i, k) = a(i, k);
    if (k < nrt) {
      e[k] = 0.0;
      for (std::size_t i = k + 1; i < n; ++i) e[k] = std::hypot(e[k], e[i]);
      if (e[k] != 0.0) {
        if (e[k + 1] < 0.0) e[k] = -e[k];
        for (std::size_t i = k + 1; i < n; ++i) e[i] /= e[k];
        e[k + 1] += 1.0;
      }
      e[k] = -e[k];
      if (k + 1 < m && e[k] != 0.0) {
        for (std::size_t i = k + 1; i < m; ++i) work[i] = 0.0;
        for (std::size_t j = k + 1; j < n; ++j)
          for (std::size_t i = k + 1; i < m; ++i) work[i] += e[j] * a(i, j);
        for (std::size_t j = k + 1; j < n; ++j) {
          const double t = -e[j] / e[k + 1];
          for (std::size_t i = k + 1; i < m; ++i) a(i, j) += t * work[i];
        }
      }
      for (std::size_t i = k + 1; i < n; ++i) v(i, k) = e[i];
    }
  }

  std::size_t p = std::min(n, m + 1);
  if (nct < n) s[nct] = a(nct, nct);
  if (m < p) s[p - 1] = 0.0;
  if (nrt + 1 < p) e[nrt] = a(nrt, p - 1);
  e[p - 1] = 0.0;

  for (std::size_t j = nct; j < nu; ++j) {
    for (std::size_t i = 0; i < m; ++i) u(i, j) = 0.0;
    u(j, j) = 1.0;
  }
  for (std::size_t k = nct; k-- > 0;) {
    if (s[k] != 0.0) {
      for (std::size_t j = k + 1; j < nu; ++j) {
        double t = 0.0;
        for (std::size_t i = k; i < m; ++i) t += u(i, k) * u(i, j);
        t = -t / u(k, k);
        for (std::size_t i = k; i < m; ++i) u(i, j) += t * u(i, k);
      }
      for (std::size_t i = k; i < m; ++i) u(i, k) = -u(i, k);
      u(k, k) = 1.0 + u(k, k);
      for (std::size_t i = 0; i + 1 < k; ++i) u(i, k) = 0.0;
    } else {
      for (std::size_t i = 0; i < m; ++i) u(i, k) = 0.0;
      u(k, k) = 1.0;
    }
  }
  for (std::size_t k = n; k-- > 0;) {
    if (k < nrt && e[k] != 0.0) {
      for (std::size_t j = k + 1; j < nu; ++j) {
        double t = 0.0;
        for (std::size_t i = k + 1; i < n; ++i) t += v(i, k) * v(i, j);
        t = -t / v(k + 1, k);
        for (std::size_t i = k + 1; i < n; ++i) v(i, j) += t * v(i, k);
      }
    }
    for (std::size_t i = 0; i < n; ++i) v(i, k) = 0.0;
    v(k, k) = 1.0;
  }

  const std::size_t pp = p - 1;
  int iter = 0;
  constexpr int kMaxIter = 75;
  const double tiny = std::pow(2.0, -966.0);
  while (p > 0) {
    long k;
    int kase;
    for (k = long(p) - 2; k >= -1; --k) {
      if (k == -1) break;
      if (std::fabs(e[k]) <= tiny + kEps * (std::fabs(s[k]) + std::fabs(s[k + 1]))) {
        e[k] = 0.0;
        break;
      }
    }
    if (k == long(p) - 2) {
      kase = 4;
    } else {
      long ks;
      for (ks = long(p) - 1; ks >= k; --ks) {
        if (ks == k) break;
        const double t = (ks != long(p) ? std::fabs(e[ks]) : 0.0) +
                         (ks != k + 1 ? std::fabs(e[ks - 1]) : 0.0);
        if (std::fabs(s[ks]) <= tiny + kEps * t) {
          s[ks] = 0.0;
          break;
        }
      }
      if (ks == k) {
        kase = 3;
      } else if (ks == long(p) - 1) {
        kase = 1;
      } else {
        kase = 2;
        k = ks;
      }
    }
    ++k;

    switch (kase) {
      case 1: {  // deflate negligible s(p)
        double f = e[p - 2];
        e[p - 2] = 0.0;
        for (long j = long(p) - 2; j >= k; --j) {
          double t = std::hypot(s[j], f);
          const double cs = s[j] / t;
          const double sn = f / t;
          s[j] = t;
          if (j != k) {
            f = -sn * e[j - 1];
            e[j - 1] = cs * e[j - 1];
          }
          for (std::size_t i = 0; i < n; ++i) {
            t = cs * v(i, j) + sn * v(i, p - 1);
            v(i, p - 1) = -sn * v(i, j) + cs * v(i, p - 1);
            v(i, j) = t;
          }
        }
      } break;
      case 2: {  // split at negligible s(k)
        double f = e[k - 1];
        e[k - 1] = 0.0;
        for (std::size_t j = std::size_t(k); j < p; ++j) {
          double t = std::hypot(s[j], f);
          const double cs = s[j] / t;
          const double sn = f / t;
          s[j] = t;
          f = -sn * e[j];
          e[j] = cs * e[j];
          for (std::size_t i = 0; i < m; ++i) {
            t = cs * u(i, j) + sn * u(i, k - 1);
            u(i, k - 1) = -sn * u(i, j) + cs * u(i, k - 1);
            u(i, j) = t;
          }
        }
      } break;
      case 3: {  // one QR step
        if (++iter > kMaxIter) throw NumericalError("svd: QR iteration did not converge");
        const double scale_ = std::max({std::fabs(s[p - 1]), std::fabs(s[p - 2]), std::fabs(e[p - 2]),
                                        std::fabs(s[k]), std::fabs(e[k])});
        const double sp = s[p - 1] / scale_;
        const double spm1 = s[p - 2] / scale_;
        const double epm1 = e[p - 2] / scale_;
        const double sk = s[k] / scale_;
        const double ek = e[k] / scale_;
        const double b = ((spm1 + sp) * (spm1 - sp) + epm1 * epm1) / 2.0;
        const double c = (sp * epm1) * (sp * epm1);
        double shift = 0.0;
        if (b != 0.0 || c != 0.0) {
          shift = std::sqrt(b * b + c);
          if (b < 0.0) shift = -shift;
          shift = c / (b + shift);
        }
        double f = (sk + sp) * (sk - sp) + shift;
        double g = sk * ek;
        for (std::size_t j = std::size_t(k); j + 1 < p; ++j) {
          double t = std::hypot(f, g);
          double cs = f / t;
          double sn = g / t;
          if (j != std::size_t(k)) e[j - 1] = t;
          f = cs * s[j] + sn * e[j];
          e[j] = cs * e[j] - sn * s[j];
          g = sn * s[j + 1];
          s[j + 1] = cs * s[j + 1];
          for (std::size_t i = 0; i < n; ++i) {
            t = cs * v(i, j) + sn * v(i, j + 1);
            v(i, j + 1) = -sn * v(i, j) + cs * v(i, j + 1);
            v(i, j) = t;
          }
          t = std::hypot(f, g);
          cs = f / t;
          sn = g / t;
          s[j] = t;
          f = cs * e[j] + sn * s[j + 1];
          s[j + 1] = -sn * e[j] + cs * s[j + 1];
          g = sn * e[j + 1];
          e[j + 1] = cs * e[j + 1];
          if (j + 1 < m) {
            for (std::size_t i = 0; i < m; ++i) {
              t = cs * u(i, j) + sn * u(i, j + 1);
              u(i, j + 1) = -sn * u(i, j) + cs * u(i, j + 1);
              u(i, j) = t;
            }
          }
        }
        e[p - 2] = f;
      } break;
      case 4: {  // convergence
        if (s[k] <= 0.0) {
          s[k] = s[k] < 0.0 ? -s[k] : 0.0;
          for (std::size_t i = 0; i <= pp; ++i) v(i, k) = -v(i, k);
        }
        while (std::size_t(k) < pp) {
          if (s[k] >= s[k + 1]) break;
          std::swap(s[k], s[k + 1]);
          if (std::size_t(k) + 1 < n)
            for (std::size_t i = 0; i < n; ++i) std::swap(v(i, k), v(i, k + 1));
          if (std::size_t(k) + 1 < m)
            for (std::size_t i = 0; i < m; ++i) std::swap(u(i, k), u(i, k + 1));
          ++k;
        }
        iter = 0;
        --p;
      } break;
    }
  }
  s.resize(nu);
  return {std::move(u), std::move(s), v.block(n, nu)};
}

Vector start_vector(std::size_t n, std::uint64_t seed) {
  CounterRng rng(seed);
  Vector v(n);
  for (double& x : v) x = rng.normal();
  scale(1.0 / norm2(v), v);
  return v;
}

void orthogonalize_twice(std::span<double> w, const std::vector<Vector>& basis) {
  for (int pass = 0; pass < 2; ++pass)
    for (const auto& q : basis) axpy(-dot(q, w), q, w);
}

}  // namespace

// ---------------------------------------------------------------- operators

Matrix KroneckerToeplitz::factor() const {
  const std::size_t m = factor_order();
  Matrix t(m, m);
  for (std::size_t j = 0; j < m; ++j)
    for (std::size_t i = 0; i < m; ++i) {
      const std::size_t d = i > j ? i - j : j - i;
      t(i, j) = first_row[d];
    }
  return t;
}

SymmetricMatrix SymmetricMatrix::dense(const Matrix& a) {
  require(a.rows() == a.cols(), "SymmetricMatrix::dense: matrix must be square");
  require(a.rows() > 0, "SymmetricMatrix::dense: empty matrix");
  Matrix s(a.rows(), a.cols());
  for (std::size_t j = 0; j < a.cols(); ++j)
    for (std::size_t i = 0; i < a.rows(); ++i) s(i, j) = 0.5 * (a(i, j) + a(j, i));
  SymmetricMatrix out;
  out.storage_ = std::move(s);
  return out;
}

SymmetricMatrix SymmetricMatrix::kronecker_toeplitz(Vector first_row) {
  require(!first_row.empty(), "SymmetricMatrix::kronecker_toeplitz: empty Toeplitz row");
  KroneckerToeplitz k;
  k.band = 0;
  for (std::size_t i = 0; i < first_row.size(); ++i)
    if (first_row[i] != 0.0) k.band = i + 1;
  k.first_row = std::move(first_row);
  SymmetricMatrix out;
  out.storage_ = std::move(k);
  return out;
}

std::size_t SymmetricMatrix::order() const {
  if (const auto* d = std::get_if<Matrix>(&storage_)) return d->rows();
  const auto& k = std::get<KroneckerToeplitz>(storage_);
  return k.factor_order() * k.factor_order();
}

void SymmetricMatrix::apply(std::span<const double> x, std::span<double> y) const {
  const std::size_t n = order();
  require(x.size() == n && y.size() == n, "SymmetricMatrix::apply: size mismatch");
  if (const auto* d = std::get_if<Matrix>(&storage_)) {
    std::fill(y.begin(), y.end(), 0.0);
    for (std::size_t j = 0; j < n; ++j)
      if (x[j] != 0.0) axpy(x[j], d->col(j), y);
    return;
  }
  const auto& k = std::get<KroneckerToeplitz>(storage_);
  const std::size_t m = k.factor_order();
  const long band = long(k.band);
  const auto& t = k.first_row;
  // Z = X T, then Y = T Z; columns of X are contiguous blocks of x
  Vector z(n, 0.0);
  for (long c = 0; c < long(m); ++c) {
    std::span<double> zc(z.data() + c * m, m);
    for (long d = -(band - 1); d <= band - 1; ++d) {
      const long cc = c + d;
      if (cc < 0 || cc >= long(m)) continue;
      axpy(t[std::size_t(std::abs(d))], x.subspan(std::size_t(cc) * m, m), zc);
    }
  }
  for (std::size_t c = 0; c < m; ++c) {
    const double* zc = z.data() + c * m;
    double* yc = y.data() + c * m;
    for (long r = 0; r < long(m); ++r) {
      double acc = 0.0;
      const long lo = std::max(0L, r - band + 1);
      const long hi = std::min(long(m) - 1, r + band - 1);
      for (long l = lo; l <= hi; ++l) acc += t[std::size_t(std::abs(r - l))] * zc[l];
      yc[r] = acc;
    }
  }
}

Vector SymmetricMatrix::apply(std::span<const double> x) const {
  Vector y(order());
  apply(x, y);
  return y;
}

double SymmetricMatrix::value(std::size_t i, std::size_t j) const {
  if (const auto* d = std::get_if<Matrix>(&storage_)) return (*d)(i, j);
  const auto& k = std::get<KroneckerToeplitz>(storage_);
  const std::size_t m = k.factor_order();
  const std::size_t ci = i / m, ri = i % m, cj = j / m, rj = j % m;
  const std::size_t dc = ci > cj ? ci - cj : cj - ci;
  const std::size_t dr = ri > rj ? ri - rj : rj - ri;
  return k.first_row[dc] * k.first_row[dr];
}

const Matrix& SymmetricMatrix::dense_values() const {
  const auto* d = std::get_if<Matrix>(&storage_);
  require(d != nullptr, "SymmetricMatrix::dense_values: operator is Kronecker-structured");
  return *d;
}

const KroneckerToeplitz& SymmetricMatrix::kronecker() const {
  const auto* k = std::get_if<KroneckerToeplitz>(&storage_);
  require(k != nullptr, "SymmetricMatrix::kronecker: operator is dense");
  return *k;
}

Matrix SymmetricMatrix::densify() const {
  if (const auto* d = std::get_if<Matrix>(&storage_)) return *d;
  const auto& k = std::get<KroneckerToeplitz>(storage_);
  if (k.factor_order() > kMaxDenseKroneckerFactor)
    throw ResourceError("densify: Kronecker factor order " + std::to_string(k.factor_order()) +
                        " exceeds the dense materialization limit " +
                        std::to_string(kMaxDenseKroneckerFactor));
  const std::size_t n = order();
  Matrix a(n, n);
  for (std::size_t j = 0; j < n; ++j)
    for (std::size_t i = 0; i < n; ++i) a(i, j) = value(i, j);
  return a;
}

double SymmetricMatrix::frobenius_norm() const {
  if (const auto* d = std::get_if<Matrix>(&storage_)) return regkrylov::frobenius_norm(*d);
  const double f = regkrylov::frobenius_norm(std::get<KroneckerToeplitz>(storage_).factor());
  return f * f;
}

bool SymmetricMatrix::operator==(const SymmetricMatrix& other) const {
  if (is_kronecker() != other.is_kronecker()) return false;
  if (is_kronecker()) return kronecker().first_row == other.kronecker().first_row;
  return dense_values() == other.dense_values();
}

// ------------------------------------------------------ spectral decomposition

SpectralDecomposition::SpectralDecomposition(Vector eigenvalues, Matrix eigenvectors) {
  require(eigenvectors.rows() == eigenvalues.size() && eigenvectors.cols() == eigenvalues.size(),
          "SpectralDecomposition: eigenvector matrix must be n×n");
  const auto perm = spectral_permutation(eigenvalues);
  const std::size_t n = eigenvalues.size();
  lambda_.resize(n);
  vectors_ = Matrix(n, n);
  for (std::size_t j = 0; j < n; ++j) {
    lambda_[j] = eigenvalues[perm[j]];
    std::copy(eigenvectors.col(perm[j]).begin(), eigenvectors.col(perm[j]).end(), vectors_.col(j).begin());
  }
}

SpectralDecomposition SpectralDecomposition::kronecker(const Vector& factor_values,
                                                       const Matrix& factor_vectors) {
  const std::size_t m = factor_values.size();
  require(factor_vectors.rows() == m && factor_vectors.cols() == m,
          "SpectralDecomposition::kronecker: factor eigenvectors must be m×m");
  Vector raw(m * m);
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = 0; j < m; ++j) raw[i * m + j] = factor_values[i] * factor_values[j];
  const auto perm = spectral_permutation(raw);
  SpectralDecomposition out;
  out.factor_order_ = m;
  out.factor_vectors_ = factor_vectors;
  out.lambda_.resize(m * m);
  out.outer_.resize(m * m);
  out.inner_.resize(m * m);
  for (std::size_t p = 0; p < m * m; ++p) {
    out.lambda_[p] = raw[perm[p]];
    out.outer_[p] = perm[p] / m;
    out.inner_[p] = perm[p] % m;
  }
  return out;
}

double SpectralDecomposition::singular_value(std::size_t i) const { return std::fabs(lambda_[i]); }

Vector SpectralDecomposition::singular_values() const {
  Vector s(lambda_.size());
  for (std::size_t i = 0; i < s.size(); ++i) s[i] = std::fabs(lambda_[i]);
  return s;
}

const Matrix& SpectralDecomposition::eigenvectors() const {
  require(!is_kronecker(), "SpectralDecomposition::eigenvectors: Kronecker form has no dense V");
  return vectors_;
}

Vector SpectralDecomposition::eigenvector(std::size_t i) const {
  require(i < order(), "SpectralDecomposition::eigenvector: index out of range");
  if (!is_kronecker()) return Vector(vectors_.col(i).begin(), vectors_.col(i).end());
  const std::size_t m = factor_order_;
  Vector v(m * m);
  const auto wo = factor_vectors_.col(outer_[i]);
  const auto wi = factor_vectors_.col(inner_[i]);
  for (std::size_t c = 0; c < m; ++c)
    for (std::size_t r = 0; r < m; ++r) v[c * m + r] = wo[c] * wi[r];
  return v;
}

Matrix SpectralDecomposition::leading_eigenvectors(std::size_t k) const {
  require(k <= order(), "leading_eigenvectors: k exceeds order");
  if (!is_kronecker()) return vectors_.block(order(), k);
  Matrix out(order(), k);
  for (std::size_t j = 0; j < k; ++j) {
    const Vector v = eigenvector(j);
    std::copy(v.begin(), v.end(), out.col(j).begin());
  }
  return out;
}

Vector SpectralDecomposition::project(std::span<const double> x) const {
  require(x.size() == order(), "SpectralDecomposition::project: size mismatch");
  if (!is_kronecker()) return multiply_transpose(vectors_, x);
  const std::size_t m = factor_order_;
  Matrix xm(m, m);
  std::copy(x.begin(), x.end(), xm.data().begin());
  const Matrix c = multiply_at_b(factor_vectors_, multiply(xm, factor_vectors_));  // Wᵀ X W
  Vector out(order());
  for (std::size_t p = 0; p < order(); ++p) out[p] = c(inner_[p], outer_[p]);
  return out;
}

Vector SpectralDecomposition::synthesize(std::span<const double> coeffs) const {
  require(coeffs.size() == order(), "SpectralDecomposition::synthesize: size mismatch");
  if (!is_kronecker()) return multiply(vectors_, coeffs);
  const std::size_t m = factor_order_;
  Matrix c(m, m);
  for (std::size_t p = 0; p < order(); ++p) c(inner_[p], outer_[p]) = coeffs[p];
  const Matrix x = multiply(multiply(factor_vectors_, c), factor_vectors_.transpose());  // W C Wᵀ
  return Vector(x.data().begin(), x.data().end());
}

// ------------------------------------------------------------ tridiagonal rect

TridiagonalRect TridiagonalRect::leading(std::size_t j) const {
  require(j >= 1 && j <= cols(), "TridiagonalRect::leading: bad column count");
  return {Vector(alpha.begin(), alpha.begin() + long(j)), Vector(beta.begin(), beta.begin() + long(j))};
}

Matrix TridiagonalRect::densify() const {
  const std::size_t k = cols();
  Matrix t(k + 1, k);
  for (std::size_t i = 0; i < k; ++i) {
    t(i, i) = alpha[i];
    t(i + 1, i) = beta[i];
    if (i + 1 < k) t(i, i + 1) = beta[i];
  }
  return t;
}

Matrix TridiagonalRect::square() const { return densify().block(cols(), cols()); }

// ------------------------------------------------------------------ solvers

SpectralDecomposition symmetric_eig(const Matrix& a, std::size_t dense_limit) {
  require(a.rows() == a.cols(), "symmetric_eig: matrix must be square");
  const std::size_t n = a.rows();
  require(n > 0, "symmetric_eig: empty matrix");
  if (n > dense_limit)
    throw ResourceError("symmetric_eig: order " + std::to_string(n) + " exceeds dense limit " +
                        std::to_string(dense_limit));
  Matrix v = a;
  Vector d(n), e(n);
  if (n == 1) return SpectralDecomposition(Vector{a(0, 0)}, Matrix::identity(1));
  tridiagonalize(v, d, e);
  tridiagonal_ql(v, d, e);
  return SpectralDecomposition(std::move(d), std::move(v));
}

SpectralDecomposition symmetric_eig(const SymmetricMatrix& a, std::size_t dense_limit) {
  if (!a.is_kronecker()) return symmetric_eig(a.dense_values(), dense_limit);
  const Matrix t = a.kronecker().factor();
  const std::size_t m = t.rows();
  Matrix w = t;
  Vector d(m), e(m);
  if (m == 1) return SpectralDecomposition::kronecker(Vector{t(0, 0)}, Matrix::identity(1));
  tridiagonalize(w, d, e);
  tridiagonal_ql(w, d, e);
  return SpectralDecomposition::kronecker(d, w);
}

SvdResult svd(const Matrix& m) {
  require(m.rows() > 0 && m.cols() > 0, "svd: empty matrix");
  if (m.rows() >= m.cols()) return svd_tall(m);
  SvdResult t = svd_tall(m.transpose());
  return {std::move(t.v), std::move(t.s), std::move(t.u)};
}

SvdResult small_svd(const TridiagonalRect& t) {
  require(t.cols() >= 1, "small_svd: need at least one column");
  return svd(t.densify());
}

double spectral_norm(const Matrix& m) {
  if (m.empty()) return 0.0;
  constexpr int kMaxPower = 300;
  Vector v = start_vector(m.cols(), 0x51ec7a1ULL);
  double sigma = 0.0;
  int settled = 0;
  for (int it = 0; it < kMaxPower; ++it) {
    const Vector w = multiply(m, v);
    const double wn = norm2(w);
    if (wn == 0.0) break;
    Vector z = multiply_transpose(m, w);
    const double zn = norm2(z);
    if (zn == 0.0) break;
    const double next = std::sqrt(zn);  // ‖MᵀM v‖^{1/2} for unit v
    scale(1.0 / zn, z);
    v = std::move(z);
    if (std::fabs(next - sigma) <= 1e-15 * next) {
      if (++settled >= 3) return next;
    } else {
      settled = 0;
    }
    sigma = next;
  }
  // slow power convergence (clustered top singular values)
  if (std::max(m.rows(), m.cols()) <= kDefaultDenseLimit) return svd(m).s.front();
  return sigma;
}

double spectral_norm(const LinearMap& m) {
  require(m.apply && m.apply_transpose, "spectral_norm: linear map needs apply and apply_transpose");
  if (m.rows == 0 || m.cols == 0) return 0.0;
  const std::size_t max_steps = std::min<std::size_t>({m.rows, m.cols, 120});
  std::vector<Vector> us, vs;
  Vector alpha, beta;  // B upper bidiagonal: diag alpha, superdiag beta
  Vector v = start_vector(m.cols, 0x9a77aULL);
  vs.push_back(v);
  Vector u_prev;
  double prev = -1.0;
  int settled = 0;
  double best = 0.0;
  for (std::size_t j = 0; j < max_steps; ++j) {
    Vector u = m.apply(vs.back());
    if (!u_prev.empty()) axpy(-beta.back(), u_prev, u);
    orthogonalize_twice(u, us);
    const double a = norm2(u);
    if (a == 0.0 || (j > 0 && a <= 1e-15 * best)) break;
    scale(1.0 / a, u);
    alpha.push_back(a);
    us.push_back(u);

    // Ritz estimate from the j+1 square upper bidiagonal
    const std::size_t k = alpha.size();
    Matrix b(k, k);
    for (std::size_t i = 0; i < k; ++i) {
      b(i, i) = alpha[i];
      if (i + 1 < k) b(i, i + 1) = beta[i];
    }
    best = svd(b).s.front();
    if (std::fabs(best - prev) <= 1e-15 * best) {
      if (++settled >= 2) break;
    } else {
      settled = 0;
    }
    prev = best;

    Vector w = m.apply_transpose(u);
    axpy(-a, vs.back(), w);
    orthogonalize_twice(w, vs);
    const double bn = norm2(w);
    if (bn <= 1e-15 * best) break;
    scale(1.0 / bn, w);
    beta.push_back(bn);
    vs.push_back(std::move(w));
    u_prev = std::move(u);
  }
  return best;
}

Vector canonical_angles(const Matrix& x, const Matrix& y) {
  require(x.rows() == y.rows() && x.cols() == y.cols(), "canonical_angles: bases must have equal shape");
  require(x.cols() >= 1, "canonical_angles: empty basis");
  const std::size_t k = x.cols();
  auto check = [k](const Matrix& m, const char* name) {
    Matrix g = multiply_at_b(m, m);
    for (std::size_t i = 0; i < k; ++i) g(i, i) -= 1.0;
    if (frobenius_norm(g) > 1e-8)
      throw ContractViolation(std::string("canonical_angles: ") + name + " is not orthonormal");
  };
  check(x, "X");
  check(y, "Y");
  const Matrix w = subtract(y, multiply(x, multiply_at_b(x, y)));
  Vector s = svd(w).s;
  std::sort(s.begin(), s.end(), std::greater<>());
  for (double& v : s) v = std::min(v, 1.0);
  return s;
}

double rank_tolerance(double s1, std::size_t dim) { return s1 * double(dim) * 1e-14; }

Vector least_squares(const Matrix& m, std::span<const double> rhs) {
  require(rhs.size() == m.rows(), "least_squares: rhs length must equal row count");
  const SvdResult f = svd(m);
  Vector y(m.cols(), 0.0);
  if (f.s.empty() || f.s.front() == 0.0) return y;
  const double tol = rank_tolerance(f.s.front(), std::max(m.rows(), m.cols()));
  for (std::size_t i = 0; i < f.s.size(); ++i) {
    if (f.s[i] <= tol) break;
    const double coef = dot(f.u.col(i), rhs) / f.s[i];
    axpy(coef, f.v.col(i), y);
  }
  return y;
}

Vector least_squares(const TridiagonalRect& t, std::span<const double> rhs) {
  const std::size_t k = t.cols();
  require(k >= 1, "least_squares: need at least one column");
  require(rhs.size() == k + 1, "least_squares: rhs length must be k+1");
  Matrix r = t.densify();
  Vector c(rhs.begin(), rhs.end());
  for (std::size_t j = 0; j < k; ++j) {
    const double a = r(j, j);
    const double b = r(j + 1, j);
    if (b == 0.0) continue;
    const double h = std::hypot(a, b);
    const double cs = a / h;
    const double sn = b / h;
    for (std::size_t l = j; l < std::min(j + 3, k); ++l) {
      const double top = r(j, l);
      const double bot = r(j + 1, l);
      r(j, l) = cs * top + sn * bot;
      r(j + 1, l) = -sn * top + cs * bot;
    }
    const double top = c[j];
    c[j] = cs * top + sn * c[j + 1];
    c[j + 1] = -sn * top + cs * c[j + 1];
    r(j + 1, j) = 0.0;
  }
  double dmax = 0.0;
  double dmin = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < k; ++i) {
    dmax = std::max(dmax, std::fabs(r(i, i)));
    dmin = std::min(dmin, std::fabs(r(i, i)));
  }
  if (dmax == 0.0) return Vector(k, 0.0);
  if (dmin <= rank_tolerance(dmax, k + 1)) return least_squares(t.densify(), rhs);

  Vector y(k, 0.0);
  for (std::size_t ii = k; ii-- > 0;) {
    double acc = c[ii];
    if (ii + 1 < k) acc -= r(ii, ii + 1) * y[ii + 1];
    if (ii + 2 < k) acc -= r(ii, ii + 2) * y[ii + 2];
    y[ii] = acc / r(ii, ii);
  }
  return y;
}

}  // namespace regkrylov
