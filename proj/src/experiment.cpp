#include "regkrylov/experiment.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>

#include "regkrylov/diagnostics.hpp"
#include "regkrylov/errors.hpp"
#include "regkrylov/krylov.hpp"

namespace regkrylov {

namespace {

constexpr std::uint64_t kReproduceSeed = 7;

void check_keys(const json& obj, const char* where, std::initializer_list<const char*> allowed) {
  if (!obj.is_object()) throw ConfigError(std::string(where) + ": expected an object");
  for (const auto& item : obj.items()) {
    const bool ok = std::any_of(allowed.begin(), allowed.end(), [&](const char* a) { return item.key() == a; });
    if (!ok) throw ConfigError(std::string(where) + ": unknown key '" + item.key() + "'");
  }
}

template <class T>
T get(const json& obj, const char* where, const char* key) {
  try {
    return obj.at(key).get<T>();
  } catch (const json::exception&) {
    throw ConfigError(std::string(where) + "." + key + ": missing or wrong type");
  }
}

template <class T>
T get_or(const json& obj, const char* where, const char* key, T fallback) {
  return obj.contains(key) ? get<T>(obj, where, key) : fallback;
}

std::string eps_tag(double eps) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%g", eps);
  return buf;
}

struct Instance {
  DiscretizedProblem problem;
  std::optional<SpectralDecomposition> decomp;
};

Instance build_instance(ProblemName name, std::size_t n, const BlurParams& blur, const SyntheticSpec& synthetic,
                        bool need_decomp) {
  Instance inst;
  if (name == ProblemName::synthetic) {
    SyntheticSpec spec = synthetic;
    spec.n = n;
    auto [p, d] = generate_synthetic(spec);
    inst.problem = std::move(p);
    inst.decomp = std::move(d);
    return inst;
  }
  inst.problem = generate(name, n, blur);
  if (need_decomp) inst.decomp = symmetric_eig(inst.problem.a);
  return inst;
}

struct Rhs {
  Vector b;
  Vector e;
};

Rhs make_rhs(const DiscretizedProblem& p, double eps, std::uint64_t seed) {
  if (eps == 0.0) return {p.b_hat, Vector(p.b_hat.size(), 0.0)};
  NoiseRealization noise = add_noise(p, eps, seed);
  return {std::move(noise.b), std::move(noise.e)};
}

std::optional<double> best_error(const IterateTrace& t) {
  std::optional<double> best;
  for (const IterateRecord& r : t.records)
    if (r.relative_error && (!best || *r.relative_error < *best)) best = r.relative_error;
  return best;
}

// --------------------------------------------------------------- figure series

struct Column {
  std::string name;
  std::vector<double> values;  // index 0 is the first row
};

// CSV with a leading index column starting at `first`; short columns leave blanks.
std::string series_csv(const std::string& index_name, std::size_t first, const std::vector<Column>& cols) {
  std::size_t rows = 0;
  for (const Column& c : cols) rows = std::max(rows, c.values.size());
  std::string out = index_name;
  for (const Column& c : cols) out += ',' + c.name;
  out += '\n';
  for (std::size_t r = 0; r < rows; ++r) {
    out += std::to_string(first + r);
    for (const Column& c : cols) {
      out += ',';
      if (r < c.values.size() && std::isfinite(c.values[r])) out += format_double(c.values[r]);
    }
    out += '\n';
  }
  return out;
}

std::vector<double> errors_of(const IterateTrace& t) {
  std::vector<double> v;
  for (const IterateRecord& r : t.records) v.push_back(r.relative_error.value_or(std::nan("")));
  return v;
}

struct Panel {
  std::string file;
  std::string title;
  std::vector<std::string> columns;
  bool log_y = true;
  std::string xy;  // explicit "x:y" columns for a single curve
};

std::string gnuplot_script(const std::string& figure, const std::vector<Panel>& panels) {
  std::string s = "# gnuplot script for " + figure + "\n";
  s += "set datafile separator ','\nset key top right\nset terminal pngcairo size 640,480\n";
  for (const Panel& p : panels) {
    std::string base = p.file.substr(0, p.file.rfind('.'));
    s += "\nset output '" + base + ".png'\n";
    s += "set title '" + p.title + "'\n";
    s += p.log_y ? "set logscale y\n" : "unset logscale y\n";
    s += "plot ";
    for (std::size_t i = 0; i < p.columns.size(); ++i) {
      if (i > 0) s += ", \\\n     ";
      const std::string cols = p.xy.empty() ? "1:" + std::to_string(i + 2) : p.xy;
      s += "'" + p.file + "' using " + cols + " with linespoints title '" + p.columns[i] + "'";
    }
    s += '\n';
  }
  return s;
}

struct FigureWriter {
  std::filesystem::path dir;
  std::string figure;
  std::vector<Panel> panels;
  std::vector<std::string> files;

  void series(const std::string& file, const std::string& title, const std::string& index_name, std::size_t first,
              const std::vector<Column>& cols, bool log_y = true) {
    write_text_file(dir / file, series_csv(index_name, first, cols));
    files.push_back(file);
    Panel p{file, title, {}, log_y, {}};
    for (const Column& c : cols) p.columns.push_back(c.name);
    panels.push_back(std::move(p));
  }

  void raw(const std::string& file, const std::string& content) {
    write_text_file(dir / file, content);
    files.push_back(file);
  }

  std::vector<std::string> finish() {
    raw(figure + ".gp", gnuplot_script(figure, panels));
    return files;
  }
};

std::vector<double> gamma_of(const DiscretizedProblem& p, const Vector& b, std::size_t k) {
  const LanczosFactorization f = lanczos(p.a, StartKind::mr2, b, k);
  return gamma_sequence(p.a, f);
}

Vector projected_singular_values(const LanczosFactorization& f, std::size_t k) {
  return small_svd(f.t.leading(k)).s;
}

void error_and_spectrum_figure(FigureWriter& w, ProblemName name, std::size_t n, std::size_t k_max) {
  Instance inst = build_instance(name, n, {}, {}, true);
  const Rhs rhs = make_rhs(inst.problem, 1e-3, kReproduceSeed);
  const IterateTrace mi = minres_trace(inst.problem.a, rhs.b, k_max, inst.problem.x_true);
  const IterateTrace m2 = mr2_trace(inst.problem.a, rhs.b, k_max, inst.problem.x_true);
  const std::string tag(to_string(name));
  w.series("errors_" + tag + ".csv", tag + " relative error", "k", 1, {{"minres", errors_of(mi)}, {"mr2", errors_of(m2)}});
  const Vector sv_mi = projected_singular_values(*mi.lanczos, semiconvergence_index(mi));
  const Vector sv_m2 = projected_singular_values(*m2.lanczos, semiconvergence_index(m2));
  Vector sigma = inst.decomp->singular_values();
  sigma.resize(std::min<std::size_t>(sigma.size(), k_max));
  w.series("singular_values_" + tag + ".csv", tag + " singular values", "i", 1,
           {{"sigma_A", sigma}, {"minres_projected", sv_mi}, {"mr2_projected", sv_m2}});
}

void gamma_figure(FigureWriter& w, ProblemName name, std::size_t n, double eps, std::size_t k_max) {
  Instance inst = build_instance(name, n, {}, {}, true);
  const Rhs rhs = make_rhs(inst.problem, eps, kReproduceSeed);
  const Vector gamma = gamma_of(inst.problem, rhs.b, k_max);
  Vector lam_next;
  for (std::size_t k = 1; k <= gamma.size() && k < n; ++k) lam_next.push_back(inst.decomp->singular_value(k));
  const std::string tag = std::string(to_string(name)) + "_eps" + eps_tag(eps);
  w.series("gamma_" + tag + ".csv", tag + " gamma_k and |lambda_k+1|", "k", 1,
           {{"gamma", gamma}, {"abs_lambda_next", lam_next}});
}

void noise_sweep_figure(FigureWriter& w, ProblemName name, std::size_t n, std::size_t k_max) {
  const Instance inst = build_instance(name, n, {}, {}, false);
  std::vector<Column> cols;
  for (double eps : {1e-2, 1e-3, 1e-4}) {
    const Rhs rhs = make_rhs(inst.problem, eps, kReproduceSeed);
    cols.push_back({"eps_" + eps_tag(eps), errors_of(mr2_trace(inst.problem.a, rhs.b, k_max, inst.problem.x_true))});
  }
  const std::string tag(to_string(name));
  w.series("errors_" + tag + ".csv", tag + " MR-II relative error", "k", 1, cols);
}

void hybrid_figure(FigureWriter& w, ProblemName name, std::size_t n, std::size_t k_max, bool with_pure_minres) {
  const Instance inst = build_instance(name, n, {}, {}, false);
  const Rhs rhs = make_rhs(inst.problem, 1e-3, kReproduceSeed);
  const auto& x = inst.problem.x_true;
  const LanczosFactorization fmi = lanczos(inst.problem.a, StartKind::minres, rhs.b, k_max);
  const LanczosFactorization fm2 = lanczos(inst.problem.a, StartKind::mr2, rhs.b, k_max);
  const IterateTrace mi = lanczos_trace(fmi, rhs.b, x);
  const IterateTrace m2 = lanczos_trace(fm2, rhs.b, x);
  const IterateTrace hmi = hybrid_trace(fmi, rhs.b, HybridRule::lcurve(), x);
  const IterateTrace hm2 = hybrid_trace(fm2, rhs.b, HybridRule::lcurve(), x);
  const std::string tag(to_string(name));
  std::vector<Column> cols;
  if (with_pure_minres) cols.push_back({"minres", errors_of(mi)});
  cols.push_back({"mr2", errors_of(m2)});
  cols.push_back({"hybrid_minres", errors_of(hmi)});
  cols.push_back({"hybrid_mr2", errors_of(hm2)});
  w.series("errors_" + tag + ".csv", tag + " relative error", "k", 1, cols);
  if (!with_pure_minres) return;
  for (const IterateTrace* t : {&mi, &m2}) {
    const auto pts = lcurve_points(*t);
    const auto corner = lcurve_corner(pts);
    const std::string solver(to_string(t->solver));
    const std::string file = "lcurve_" + solver + ".csv";
    std::string csv = "k,log_residual,log_solution_norm\n";
    for (const LCurvePoint& p : pts)
      csv += std::to_string(p.k) + ',' + format_double(p.log_residual) + ',' + format_double(p.log_solution_norm) + '\n';
    w.raw(file, csv);
    w.panels.push_back({file, solver + " L-curve, corner k=" + (corner ? std::to_string(*corner) : "none"),
                        {"log_solution_norm vs log_residual"}, false, "2:3"});
  }
}

void decay_figure(FigureWriter& w, ProblemName name, std::size_t n, std::size_t k_max) {
  Instance inst = build_instance(name, n, {}, {}, true);
  const Rhs rhs = make_rhs(inst.problem, 1e-3, kReproduceSeed);
  const LanczosFactorization f = lanczos(inst.problem.a, StartKind::mr2, rhs.b, k_max);
  Vector alpha_next, beta, sigma;
  for (std::size_t k = 2; k + 1 <= f.steps(); ++k) {
    alpha_next.push_back(std::fabs(f.t.alpha[k]));
    beta.push_back(f.t.beta[k - 1]);
    sigma.push_back(inst.decomp->singular_value(k - 1));
  }
  const std::string tag(to_string(name));
  w.series("decay_" + tag + ".csv", tag + " |alpha_k+1|, beta_k, sigma_k", "k", 2,
           {{"abs_alpha_next", alpha_next}, {"beta", beta}, {"sigma", sigma}});
}

void blur_figure(FigureWriter& w, const BlurParams& blur, std::size_t m, std::size_t k_max) {
  const Instance inst = build_instance(ProblemName::blur, m, blur, {}, false);
  const Rhs rhs = make_rhs(inst.problem, 5e-3, kReproduceSeed);
  const auto& x = inst.problem.x_true;
  const LanczosFactorization fmi = lanczos(inst.problem.a, StartKind::minres, rhs.b, k_max);
  const LanczosFactorization fm2 = lanczos(inst.problem.a, StartKind::mr2, rhs.b, k_max);
  const IterateTrace mi = lanczos_trace(fmi, rhs.b, x);
  const IterateTrace hmi = hybrid_trace(fmi, rhs.b, HybridRule::lcurve(), x);
  const IterateTrace m2 = lanczos_trace(fm2, rhs.b, x);
  const IterateTrace hm2 = hybrid_trace(fm2, rhs.b, HybridRule::lcurve(), x);
  w.series("errors_blur.csv", "blur relative error", "k", 1,
           {{"minres", errors_of(mi)},
            {"hybrid_minres", errors_of(hmi)},
            {"mr2", errors_of(m2)},
            {"hybrid_mr2", errors_of(hm2)}});
  w.raw("original.pgm", to_pgm(x, m));
  w.raw("blurred_noisy.pgm", to_pgm(rhs.b, m));
  w.raw("restored.pgm", to_pgm(hm2.at(semiconvergence_index(hm2)).x, m));
}

}  // namespace

ExperimentConfig parse_config(const json& doc) {
  check_keys(doc, "config",
             {"problem", "noise_levels", "seeds", "solvers", "k_max", "diagnostics", "hybrid", "output_dir"});
  ExperimentConfig cfg;

  const json prob = get<json>(doc, "config", "problem");
  check_keys(prob, "problem", {"name", "n", "band", "sigma", "synthetic"});
  cfg.problem = parse_problem_name(get<std::string>(prob, "problem", "name"));
  cfg.n = get<std::size_t>(prob, "problem", "n");
  if (cfg.n < 2) throw ConfigError("problem.n: must be at least 2");
  cfg.blur.band = get_or<std::size_t>(prob, "problem", "band", cfg.blur.band);
  cfg.blur.sigma = get_or<double>(prob, "problem", "sigma", cfg.blur.sigma);
  if (cfg.problem == ProblemName::blur) {
    if (cfg.blur.sigma <= 0.0) throw ConfigError("problem.sigma: must be positive");
    if (cfg.blur.band < 1 || cfg.blur.band >= cfg.n) throw ConfigError("problem.band: must satisfy 1 <= band < n");
  }
  if (prob.contains("synthetic")) {
    const json s = prob["synthetic"];
    check_keys(s, "problem.synthetic", {"decay", "alpha", "beta", "signs", "sign_seed", "random_basis", "basis_seed"});
    cfg.synthetic.decay = parse_decay_kind(get_or<std::string>(s, "problem.synthetic", "decay", "severe"));
    cfg.synthetic.alpha = get_or<double>(s, "problem.synthetic", "alpha", 1.0);
    cfg.synthetic.beta = get_or<double>(s, "problem.synthetic", "beta", 1.0);
    cfg.synthetic.signs = parse_sign_pattern(get_or<std::string>(s, "problem.synthetic", "signs", "definite"));
    cfg.synthetic.sign_seed = get_or<std::uint64_t>(s, "problem.synthetic", "sign_seed", 0);
    cfg.synthetic.random_basis = get_or<bool>(s, "problem.synthetic", "random_basis", false);
    cfg.synthetic.basis_seed = get_or<std::uint64_t>(s, "problem.synthetic", "basis_seed", 0);
  }
  cfg.synthetic.n = cfg.n;
  if (cfg.problem == ProblemName::synthetic) {
    try {
      (void)generate_synthetic(SyntheticSpec{2, cfg.synthetic.decay, cfg.synthetic.alpha, cfg.synthetic.beta});
    } catch (const ContractViolation& e) {
      throw ConfigError(std::string("problem.synthetic: ") + e.what());
    }
  }

  cfg.noise_levels = get_or<std::vector<double>>(doc, "config", "noise_levels", {});
  for (double eps : cfg.noise_levels)
    if (!(eps > 0.0 && eps < 1.0)) throw ConfigError("noise_levels: every level must lie in (0, 1)");
  cfg.seeds = get_or<std::vector<std::uint64_t>>(doc, "config", "seeds", {1});
  if (cfg.seeds.empty()) throw ConfigError("seeds: need at least one seed");

  for (const auto& s : get<std::vector<std::string>>(doc, "config", "solvers")) cfg.solvers.push_back(parse_solver_id(s));
  if (cfg.solvers.empty()) throw ConfigError("solvers: need at least one solver");

  const auto order = cfg.problem == ProblemName::blur ? cfg.n * cfg.n : cfg.n;
  cfg.k_max = get_or<std::size_t>(doc, "config", "k_max", cfg.k_max);
  if (cfg.k_max < 1 || cfg.k_max > order) throw ConfigError("k_max: must satisfy 1 <= k_max <= operator order");

  if (doc.contains("diagnostics")) {
    const json d = doc["diagnostics"];
    check_keys(d, "diagnostics", {"gamma", "sintheta", "filters", "decay", "lcurve"});
    cfg.diagnostics.gamma = get_or<bool>(d, "diagnostics", "gamma", false);
    cfg.diagnostics.sintheta = get_or<bool>(d, "diagnostics", "sintheta", false);
    cfg.diagnostics.filters = get_or<bool>(d, "diagnostics", "filters", false);
    cfg.diagnostics.decay = get_or<bool>(d, "diagnostics", "decay", false);
    cfg.diagnostics.lcurve = get_or<bool>(d, "diagnostics", "lcurve", true);
  }
  if (cfg.problem == ProblemName::blur && (cfg.diagnostics.sintheta || cfg.diagnostics.filters))
    throw ConfigError("diagnostics: sintheta and filters need a dense eigendecomposition, not available for blur");

  if (doc.contains("hybrid")) {
    const json h = doc["hybrid"];
    check_keys(h, "hybrid", {"rule", "p"});
    const auto rule = get<std::string>(h, "hybrid", "rule");
    if (rule == "lcurve") {
      cfg.hybrid = HybridRule::lcurve();
    } else if (rule == "fixed") {
      cfg.hybrid = HybridRule::fixed(get<std::size_t>(h, "hybrid", "p"));
      if (cfg.hybrid.p < 1 || cfg.hybrid.p > cfg.k_max) throw ConfigError("hybrid.p: must satisfy 1 <= p <= k_max");
    } else {
      throw ConfigError("hybrid.rule: expected 'lcurve' or 'fixed'");
    }
  }
  cfg.output_dir = get_or<std::string>(doc, "config", "output_dir", "out");
  return cfg;
}

json config_to_json(const ExperimentConfig& cfg) {
  json prob = {{"name", to_string(cfg.problem)}, {"n", cfg.n}};
  if (cfg.problem == ProblemName::blur) {
    prob["band"] = cfg.blur.band;
    prob["sigma"] = cfg.blur.sigma;
  }
  if (cfg.problem == ProblemName::synthetic)
    prob["synthetic"] = {{"decay", to_string(cfg.synthetic.decay)},
                         {"alpha", cfg.synthetic.alpha},
                         {"beta", cfg.synthetic.beta},
                         {"signs", to_string(cfg.synthetic.signs)},
                         {"sign_seed", cfg.synthetic.sign_seed},
                         {"random_basis", cfg.synthetic.random_basis},
                         {"basis_seed", cfg.synthetic.basis_seed}};
  json solvers = json::array();
  for (SolverId s : cfg.solvers) solvers.push_back(to_string(s));
  json hybrid = {{"rule", cfg.hybrid.kind == HybridRule::Kind::fixed ? "fixed" : "lcurve"}};
  if (cfg.hybrid.kind == HybridRule::Kind::fixed) hybrid["p"] = cfg.hybrid.p;
  return {{"problem", prob},
          {"noise_levels", cfg.noise_levels},
          {"seeds", cfg.seeds},
          {"solvers", solvers},
          {"k_max", cfg.k_max},
          {"diagnostics",
           {{"gamma", cfg.diagnostics.gamma},
            {"sintheta", cfg.diagnostics.sintheta},
            {"filters", cfg.diagnostics.filters},
            {"decay", cfg.diagnostics.decay},
            {"lcurve", cfg.diagnostics.lcurve}}},
          {"hybrid", hybrid},
          {"output_dir", cfg.output_dir.string()}};
}

json report_to_json(const RunReport& report) {
  json cells = json::array();
  for (const CellSummary& c : report.cells) {
    cells.push_back({{"solver", to_string(c.solver)},
                     {"noise_level", c.noise_level},
                     {"seed", c.seed},
                     {"iterations", c.iterations},
                     {"best_error", c.best_error ? json(*c.best_error) : json(nullptr)},
                     {"semiconvergence_index",
                      c.semiconvergence_index ? json(*c.semiconvergence_index) : json(nullptr)},
                     {"lcurve_corner", c.lcurve_corner ? json(*c.lcurve_corner) : json(nullptr)},
                     {"matvecs", c.matvecs},
                     {"breakdown", c.breakdown},
                     {"trace", c.trace_file},
                     {"diagnostics", c.diagnostics_file}});
  }
  return {{"config", report.config}, {"cells", cells}, {"manifest", report.manifest}, {"notes", report.notes}};
}

RunReport run(const ExperimentConfig& cfg) {
  const auto wants = [&cfg](SolverId id) {
    return std::find(cfg.solvers.begin(), cfg.solvers.end(), id) != cfg.solvers.end();
  };
  const DiagnosticsToggles& dg = cfg.diagnostics;
  const bool need_decomp = wants(SolverId::tsvd) || dg.sintheta || dg.filters || dg.decay;
  const Instance inst = build_instance(cfg.problem, cfg.n, cfg.blur, cfg.synthetic, need_decomp);
  const DiscretizedProblem& p = inst.problem;
  const std::size_t order = p.a.order();
  if (cfg.k_max > order) throw ConfigError("k_max: exceeds operator order");

  RunReport report;
  report.config = config_to_json(cfg);
  std::vector<double> levels = cfg.noise_levels;
  if (levels.empty()) levels.push_back(0.0);

  for (double eps : levels) {
    for (std::uint64_t seed : cfg.seeds) {
      const Rhs rhs = make_rhs(p, eps, seed);
      const std::string cell_tag = "eps" + eps_tag(eps) + "_seed" + std::to_string(seed);

      std::optional<LanczosFactorization> fmi, fm2;
      if (wants(SolverId::minres) || wants(SolverId::hybrid_minres) || dg.filters)
        fmi = lanczos(p.a, StartKind::minres, rhs.b, cfg.k_max);
      if (wants(SolverId::mr2) || wants(SolverId::hybrid_mr2) || dg.gamma || dg.decay || dg.sintheta)
        fm2 = lanczos(p.a, StartKind::mr2, rhs.b, cfg.k_max);

      DiagnosticsReport shared;
      if (inst.decomp) {
        const Vector sv = inst.decomp->singular_values();
        shared.sigma.assign(sv.begin(), sv.begin() + long(std::min(sv.size(), cfg.k_max + 1)));
        if (eps > 0.0) {
          shared.picard = picard_and_c(*inst.decomp, p.b_hat, rhs.e);
          shared.k0 = transition_index_from_coefficients(shared.picard->signal, shared.picard->noise);
        }
      }
      if (dg.gamma || dg.decay) shared.gamma = gamma_sequence(p.a, *fm2);
      if (dg.decay) shared.decay = decay_check(*fm2, shared.gamma, shared.sigma);
      if (dg.sintheta) {
        const std::size_t kk = std::min({cfg.k_max, kLagrangeMax, order - 1, fm2->q.cols()});
        for (std::size_t k = 1; k <= kk; ++k) {
          try {
            const double formula = sin_theta_formula(delta_matrix(*inst.decomp, rhs.b, k));
            shared.sin_theta_direct.push_back(sin_theta_direct(*inst.decomp, *fm2, k));
            shared.sin_theta_formula.push_back(formula);
          } catch (const NumericalError& e) {
            report.notes.push_back(cell_tag + ": sin_theta stopped at k=" + std::to_string(k) + ": " + e.what());
            break;
          }
        }
      }
      if (dg.filters) {
        const FilterFactorEvaluator filters(inst.problem.a, *inst.decomp, *fmi);
        for (std::size_t k = 1; k <= fmi->steps(); ++k) {
          try {
            shared.harmonic_ritz.push_back(filters.harmonic_ritz(k));
            shared.filter_factors.push_back(filters.filter_factors(k));
          } catch (const NumericalError& e) {
            report.notes.push_back(cell_tag + ": filters stopped at k=" + std::to_string(k) + ": " + e.what());
            break;
          }
        }
      }

      for (SolverId id : cfg.solvers) {
        IterateTrace trace;
        switch (id) {
          case SolverId::minres: trace = lanczos_trace(*fmi, rhs.b, p.x_true); break;
          case SolverId::mr2: trace = lanczos_trace(*fm2, rhs.b, p.x_true); break;
          case SolverId::hybrid_minres: trace = hybrid_trace(*fmi, rhs.b, cfg.hybrid, p.x_true); break;
          case SolverId::hybrid_mr2: trace = hybrid_trace(*fm2, rhs.b, cfg.hybrid, p.x_true); break;
          case SolverId::lsqr: trace = lsqr_trace(p.a, rhs.b, cfg.k_max, p.x_true); break;
          case SolverId::tsvd: trace = tsvd_trace(*inst.decomp, rhs.b, p.x_true, cfg.k_max); break;
        }
        CellSummary cell;
        cell.solver = id;
        cell.noise_level = eps;
        cell.seed = seed;
        cell.iterations = trace.size();
        cell.best_error = best_error(trace);
        cell.matvecs = trace.matvecs;
        cell.breakdown = trace.breakdown;
        if (!trace.records.empty()) cell.semiconvergence_index = semiconvergence_index(trace);
        if (dg.lcurve) cell.lcurve_corner = lcurve_corner(lcurve_points(trace));

        DiagnosticsReport diag = shared;
        diag.lcurve_corner = cell.lcurve_corner;
        diag.semiconvergence_index = cell.semiconvergence_index;

        const std::string stem = std::string(to_string(id)) + "_" + cell_tag;
        cell.trace_file = stem + ".csv";
        cell.diagnostics_file = stem + "_diagnostics.json";
        write_text_file(cfg.output_dir / cell.trace_file, trace_to_csv(trace));
        write_text_file(cfg.output_dir / cell.diagnostics_file, diagnostics_to_json(diag).dump(2) + "\n");
        report.manifest.push_back(cell.trace_file);
        report.manifest.push_back(cell.diagnostics_file);
        report.cells.push_back(std::move(cell));
      }
    }
  }
  write_text_file(cfg.output_dir / "summary.json", report_to_json(report).dump(2) + "\n");
  return report;
}

const std::vector<std::string>& figure_ids() {
  static const std::vector<std::string> ids{"fig1", "fig2", "fig3", "fig4",  "fig5", "fig6",
                                            "fig7", "fig8", "figpl", "fig11", "fig12"};
  return ids;
}

std::vector<std::string> reproduce(const std::string& figure, bool full, const std::filesystem::path& out_dir) {
  const auto& ids = figure_ids();
  if (std::find(ids.begin(), ids.end(), figure) == ids.end()) throw ConfigError("unknown figure id '" + figure + "'");
  constexpr std::size_t n = 1024;
  constexpr std::size_t k_max = 40;
  constexpr std::size_t k_gamma = 30;
  FigureWriter w{out_dir, figure, {}, {}};
  using P = ProblemName;

  if (figure == "fig1" || figure == "fig2") {
    for (P name : figure == "fig1" ? std::vector{P::shaw, P::foxgood} : std::vector{P::gravity, P::phillips})
      error_and_spectrum_figure(w, name, n, k_max);
  } else if (figure == "fig3") {
    hybrid_figure(w, P::deriv2, n, k_max, true);
  } else if (figure == "fig4") {
    for (P name : {P::shaw, P::foxgood, P::gravity, P::phillips}) hybrid_figure(w, name, n, k_max, false);
  } else if (figure == "fig5") {
    gamma_figure(w, P::shaw, n, 1e-2, k_gamma);
    gamma_figure(w, P::shaw, n, 1e-3, k_gamma);
    gamma_figure(w, P::foxgood, n, 1e-3, k_gamma);
    gamma_figure(w, P::foxgood, n, 1e-4, k_gamma);
  } else if (figure == "fig7") {
    gamma_figure(w, P::gravity, n, 1e-2, k_gamma);
    gamma_figure(w, P::gravity, n, 1e-3, k_gamma);
    gamma_figure(w, P::phillips, n, 1e-3, k_gamma);
    gamma_figure(w, P::phillips, n, 1e-4, k_gamma);
  } else if (figure == "fig6" || figure == "fig8") {
    for (P name : figure == "fig6" ? std::vector{P::shaw, P::foxgood} : std::vector{P::gravity, P::phillips})
      noise_sweep_figure(w, name, n, k_max);
  } else if (figure == "figpl") {
    for (P name : {P::shaw, P::foxgood, P::gravity, P::phillips}) decay_figure(w, name, n, 60);
  } else {
    const BlurParams blur = figure == "fig11" ? BlurParams{3, 0.7} : BlurParams{7, 2.0};
    blur_figure(w, blur, full ? 256 : 64, k_max);
  }
  return w.finish();
}

}  // namespace regkrylov
