#include "regkrylov/problems.hpp"

#include <cmath>
#include <numbers>

#include "regkrylov/errors.hpp"
#include "regkrylov/rng.hpp"

namespace regkrylov {

namespace {

using std::numbers::pi;

// midpoint nodes on [lo, hi]
Vector midpoints(double lo, double hi, std::size_t n) {
  const double h = (hi - lo) / double(n);
  Vector t(n);
  for (std::size_t i = 0; i < n; ++i) t[i] = lo + (double(i) + 0.5) * h;
  return t;
}

template <class Kernel>
Matrix quadrature(const Vector& s, const Vector& t, double weight, Kernel k) {
  Matrix a(s.size(), t.size());
  for (std::size_t j = 0; j < t.size(); ++j)
    for (std::size_t i = 0; i < s.size(); ++i) a(i, j) = weight * k(s[i], t[j]);
  return a;
}

template <class F>
Vector sample(const Vector& t, F f) {
  Vector x(t.size());
  for (std::size_t i = 0; i < t.size(); ++i) x[i] = f(t[i]);
  return x;
}

DiscretizedProblem finish(ProblemName name, SymmetricMatrix a, Vector x) {
  DiscretizedProblem p;
  p.name = name;
  p.b_hat = a.apply(x);
  p.a = std::move(a);
  p.x_true = std::move(x);
  p.metadata.n = p.x_true.size();
  return p;
}

double phillips_psi(double x) { return std::fabs(x) < 3.0 ? 1.0 + std::cos(pi * x / 3.0) : 0.0; }

}  // namespace

std::string_view to_string(ProblemName name) {
  switch (name) {
    case ProblemName::shaw: return "shaw";
    case ProblemName::foxgood: return "foxgood";
    case ProblemName::gravity: return "gravity";
    case ProblemName::phillips: return "phillips";
    case ProblemName::deriv2: return "deriv2";
    case ProblemName::blur: return "blur";
    case ProblemName::synthetic: return "synthetic";
  }
  return "?";
}

ProblemName parse_problem_name(std::string_view name) {
  for (auto p : {ProblemName::shaw, ProblemName::foxgood, ProblemName::gravity, ProblemName::phillips,
                 ProblemName::deriv2, ProblemName::blur, ProblemName::synthetic})
    if (to_string(p) == name) return p;
  throw ConfigError("unknown problem name '" + std::string(name) + "'");
}

std::string_view to_string(DecayKind kind) {
  switch (kind) {
    case DecayKind::severe: return "severe";
    case DecayKind::moderate: return "moderate";
    case DecayKind::mild: return "mild";
  }
  return "?";
}

std::string_view to_string(SignPattern pattern) {
  switch (pattern) {
    case SignPattern::definite: return "definite";
    case SignPattern::alternating: return "alternating";
    case SignPattern::random: return "random";
  }
  return "?";
}

DecayKind parse_decay_kind(std::string_view s) {
  for (auto k : {DecayKind::severe, DecayKind::moderate, DecayKind::mild})
    if (to_string(k) == s) return k;
  throw ConfigError("unknown decay kind '" + std::string(s) + "'");
}

SignPattern parse_sign_pattern(std::string_view s) {
  for (auto k : {SignPattern::definite, SignPattern::alternating, SignPattern::random})
    if (to_string(k) == s) return k;
  throw ConfigError("unknown sign pattern '" + std::string(s) + "'");
}

Vector test_image(std::size_t m) {
  require(m >= 2, "test_image: side must be at least 2");
  Matrix img(m, m);
  const std::size_t q = m / 4;
  for (std::size_t c = q; c < m - q; ++c)
    for (std::size_t r = q; r < m - q; ++r) img(r, c) = 1.0;
  const std::size_t w = std::max<std::size_t>(1, m / 16);
  const std::size_t lo = m / 8;
  const std::size_t hi = m - m / 8;
  // vertical bar on the left, horizontal bar along the bottom
  for (std::size_t c = w; c < std::min(2 * w, q); ++c)
    for (std::size_t r = lo; r < hi; ++r) img(r, c) = 0.5;
  for (std::size_t r = m - 2 * w; r < m - w; ++r)
    if (r >= m - q)
      for (std::size_t c = lo; c < hi; ++c) img(r, c) = 0.5;
  return Vector(img.data().begin(), img.data().end());
}

DiscretizedProblem generate(ProblemName name, std::size_t n, const BlurParams& blur) {
  require(n >= 2, "generate: n must be at least 2");
  switch (name) {
    case ProblemName::shaw: {
      const Vector t = midpoints(-pi / 2.0, pi / 2.0, n);
      const Matrix a = quadrature(t, t, pi / double(n), [](double s, double tt) {
        const double c = std::cos(s) + std::cos(tt);
        const double u = pi * (std::sin(s) + std::sin(tt));
        const double sinc = u == 0.0 ? 1.0 : std::sin(u) / u;
        return c * c * sinc * sinc;
      });
      Vector x = sample(t, [](double tt) {
        return 2.0 * std::exp(-6.0 * (tt - 0.8) * (tt - 0.8)) + std::exp(-2.0 * (tt + 0.5) * (tt + 0.5));
      });
      return finish(name, SymmetricMatrix::dense(a), std::move(x));
    }
    case ProblemName::foxgood: {
      const Vector t = midpoints(0.0, 1.0, n);
      const Matrix a =
          quadrature(t, t, 1.0 / double(n), [](double s, double tt) { return std::sqrt(s * s + tt * tt); });
      return finish(name, SymmetricMatrix::dense(a), sample(t, [](double tt) { return tt; }));
    }
    case ProblemName::gravity: {
      constexpr double d = 0.25;
      const Vector t = midpoints(0.0, 1.0, n);
      const Matrix a = quadrature(t, t, 1.0 / double(n), [](double s, double tt) {
        return d * std::pow(d * d + (s - tt) * (s - tt), -1.5);
      });
      Vector x = sample(t, [](double tt) { return std::sin(pi * tt) + 0.5 * std::sin(2.0 * pi * tt); });
      return finish(name, SymmetricMatrix::dense(a), std::move(x));
    }
    case ProblemName::phillips: {
      const Vector t = midpoints(-6.0, 6.0, n);
      const Matrix a = quadrature(t, t, 12.0 / double(n),
                                  [](double s, double tt) { return phillips_psi(std::fabs(s - tt)); });
      return finish(name, SymmetricMatrix::dense(a), sample(t, phillips_psi));
    }
    case ProblemName::deriv2: {
      const Vector t = midpoints(0.0, 1.0, n);
      const Matrix a = quadrature(t, t, 1.0 / double(n),
                                  [](double s, double tt) { return s <= tt ? s * (tt - 1.0) : tt * (s - 1.0); });
      return finish(name, SymmetricMatrix::dense(a), sample(t, [](double tt) { return tt; }));
    }
    case ProblemName::blur: {
      require(blur.sigma > 0.0, "generate: blur sigma must be positive");
      require(blur.band >= 1 && blur.band < n, "generate: blur band must satisfy 1 <= band < m");
      Vector row(n, 0.0);
      const double c = 1.0 / (blur.sigma * std::sqrt(2.0 * pi));
      for (std::size_t l = 0; l < blur.band; ++l)
        row[l] = c * std::exp(-double(l * l) / (2.0 * blur.sigma * blur.sigma));
      DiscretizedProblem p = finish(name, SymmetricMatrix::kronecker_toeplitz(std::move(row)), test_image(n));
      p.metadata.blur = blur;
      p.metadata.image_id = "squares-and-bars";
      return p;
    }
    case ProblemName::synthetic:
      throw ContractViolation("generate: use generate_synthetic for the synthetic model problem");
  }
  throw ContractViolation("generate: unknown problem");
}

std::pair<DiscretizedProblem, SpectralDecomposition> generate_synthetic(const SyntheticSpec& spec) {
  require(spec.n >= 2, "generate_synthetic: n must be at least 2");
  require(spec.alpha > 0.0, "generate_synthetic: alpha must be positive");
  require(spec.beta > 0.0, "generate_synthetic: beta must be positive");
  if (spec.decay == DecayKind::moderate)
    require(spec.alpha > 1.0, "generate_synthetic: moderate decay needs alpha > 1");
  if (spec.decay == DecayKind::mild)
    require(spec.alpha <= 1.0, "generate_synthetic: mild decay needs alpha <= 1");

  const std::size_t n = spec.n;
  Vector sigma(n), sign(n, 1.0);
  CounterRng sign_rng(spec.sign_seed, 1);
  for (std::size_t j = 0; j < n; ++j) {
    const double jj = double(j + 1);
    sigma[j] = spec.decay == DecayKind::severe ? std::exp(-spec.alpha * jj) : std::pow(jj, -spec.alpha);
    if (spec.signs == SignPattern::alternating) sign[j] = j % 2 == 0 ? 1.0 : -1.0;
    if (spec.signs == SignPattern::random) sign[j] = (sign_rng.next_u64() >> 63) != 0 ? -1.0 : 1.0;
  }

  Matrix v = Matrix::identity(n);
  if (spec.random_basis) {
    CounterRng rng(spec.basis_seed, 2);
    for (double& x : v.data()) x = rng.normal();
    // Gram–Schmidt, two passes per column
    for (std::size_t j = 0; j < n; ++j) {
      auto vj = v.col(j);
      for (int pass = 0; pass < 2; ++pass)
        for (std::size_t i = 0; i < j; ++i) axpy(-dot(v.col(i), vj), v.col(i), vj);
      scale(1.0 / norm2(vj), vj);
    }
  }

  Vector lambda(n), coeff(n), xcoeff(n);
  for (std::size_t j = 0; j < n; ++j) {
    lambda[j] = sign[j] * sigma[j];
    coeff[j] = sign[j] * std::pow(sigma[j], 1.0 + spec.beta);
    xcoeff[j] = std::pow(sigma[j], spec.beta);
  }

  Matrix vl = v;
  for (std::size_t j = 0; j < n; ++j) scale(lambda[j], vl.col(j));
  const Matrix a = multiply(vl, v.transpose());

  DiscretizedProblem p;
  p.name = ProblemName::synthetic;
  p.a = SymmetricMatrix::dense(a);
  p.x_true = multiply(v, xcoeff);
  p.b_hat = multiply(v, coeff);
  p.metadata.n = n;
  p.metadata.synthetic = spec;
  return {std::move(p), SpectralDecomposition(std::move(lambda), std::move(v))};
}

NoiseRealization add_noise(const DiscretizedProblem& problem, double level, std::uint64_t seed) {
  require(level > 0.0 && level < 1.0, "add_noise: noise level must lie in (0, 1)");
  const std::size_t n = problem.b_hat.size();
  CounterRng rng(seed);
  Vector e(n);
  for (double& x : e) x = rng.normal();
  scale(level * norm2(problem.b_hat) / norm2(e), e);
  NoiseRealization out;
  out.b = problem.b_hat;
  axpy(1.0, e, out.b);
  out.e = std::move(e);
  out.level = level;
  out.seed = seed;
  return out;
}

std::size_t transition_index_from_coefficients(std::span<const double> signal, std::span<const double> noise) {
  require(signal.size() == noise.size(), "transition_index: coefficient lengths differ");
  std::size_t k = 0;
  while (k < signal.size() && std::fabs(signal[k]) > std::fabs(noise[k])) ++k;
  return k;
}

std::size_t transition_index(const SpectralDecomposition& decomp, std::span<const double> b_hat,
                             std::span<const double> e) {
  require(b_hat.size() == decomp.order() && e.size() == decomp.order(),
          "transition_index: vector length must match decomposition order");
  return transition_index_from_coefficients(decomp.project(b_hat), decomp.project(e));
}

}  // namespace regkrylov
