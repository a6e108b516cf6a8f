#include "regkrylov/io.hpp"

#include <algorithm>
#include <bit>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <sstream>

#include <cereal/external/base64.hpp>

#include "regkrylov/errors.hpp"

namespace regkrylov {

static_assert(std::endian::native == std::endian::little, "binary exports assume a little-endian host");

namespace {

json optional_index(const std::optional<std::size_t>& v) { return v ? json(*v) : json(nullptr); }

json vector_json(std::span<const double> v) {
  json a = json::array();
  for (double x : v) a.push_back(std::isfinite(x) ? json(x) : json(nullptr));
  return a;
}

template <class T>
T field(const json& doc, const char* key) {
  if (!doc.contains(key)) throw ConfigError(std::string("problem document: missing field '") + key + "'");
  try {
    return doc.at(key).get<T>();
  } catch (const json::exception& e) {
    throw ConfigError(std::string("problem document: bad field '") + key + "': " + e.what());
  }
}

double parse_double(const std::string& s) {
  std::size_t used = 0;
  const double v = std::stod(s, &used);
  if (used != s.size()) throw ConfigError("csv: bad number '" + s + "'");
  return v;
}

}  // namespace

std::string format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string encode_doubles(std::span<const double> values) {
  return cereal::base64::encode(reinterpret_cast<const unsigned char*>(values.data()), values.size_bytes());
}

Vector decode_doubles(const std::string& text) {
  const bool clean = std::all_of(text.begin(), text.end(), [](unsigned char c) {
    return std::isalnum(c) || c == '+' || c == '/' || c == '=';
  });
  if (!clean) throw ConfigError("base64 payload contains invalid characters");
  const std::string bytes = cereal::base64::decode(text);
  if (bytes.size() % sizeof(double) != 0) throw ConfigError("base64 payload is not a whole number of float64 values");
  Vector out(bytes.size() / sizeof(double));
  std::memcpy(out.data(), bytes.data(), bytes.size());
  return out;
}

json problem_to_json(const DiscretizedProblem& p) {
  json meta;
  meta["n"] = p.metadata.n;
  if (p.metadata.blur) meta["blur"] = {{"band", p.metadata.blur->band}, {"sigma", p.metadata.blur->sigma}};
  if (!p.metadata.image_id.empty()) meta["image_id"] = p.metadata.image_id;
  if (p.metadata.synthetic) {
    const SyntheticSpec& s = *p.metadata.synthetic;
    meta["synthetic"] = {{"n", s.n},
                         {"decay", to_string(s.decay)},
                         {"alpha", s.alpha},
                         {"beta", s.beta},
                         {"signs", to_string(s.signs)},
                         {"sign_seed", s.sign_seed},
                         {"random_basis", s.random_basis},
                         {"basis_seed", s.basis_seed}};
  }

  json op;
  if (p.a.is_kronecker()) {
    op["kind"] = "kronecker_toeplitz";
    op["factor_order"] = p.a.kronecker().factor_order();
    op["first_row"] = encode_doubles(p.a.kronecker().first_row);
  } else {
    op["kind"] = "dense";
    op["order"] = p.a.order();
    op["values"] = encode_doubles(p.a.dense_values().data());
  }

  json doc;
  doc["format"] = "regkrylov-problem";
  doc["version"] = 1;
  doc["name"] = to_string(p.name);
  doc["n"] = p.a.order();
  doc["metadata"] = meta;
  doc["operator"] = op;
  doc["x_true"] = encode_doubles(p.x_true);
  doc["b_hat"] = encode_doubles(p.b_hat);
  return doc;
}

DiscretizedProblem problem_from_json(const json& doc) {
  if (field<std::string>(doc, "format") != "regkrylov-problem")
    throw ConfigError("problem document: unexpected format tag");
  if (field<int>(doc, "version") != 1) throw ConfigError("problem document: unsupported version");

  DiscretizedProblem p;
  p.name = parse_problem_name(field<std::string>(doc, "name"));
  const auto n = field<std::size_t>(doc, "n");
  const json op = field<json>(doc, "operator");
  const auto kind = field<std::string>(op, "kind");
  if (kind == "dense") {
    const auto order = field<std::size_t>(op, "order");
    const Vector values = decode_doubles(field<std::string>(op, "values"));
    if (values.size() != order * order) throw ConfigError("problem document: dense values have wrong length");
    Matrix a(order, order);
    std::copy(values.begin(), values.end(), a.data().begin());
    p.a = SymmetricMatrix::dense(a);
  } else if (kind == "kronecker_toeplitz") {
    Vector row = decode_doubles(field<std::string>(op, "first_row"));
    if (row.size() != field<std::size_t>(op, "factor_order"))
      throw ConfigError("problem document: first_row length differs from factor_order");
    p.a = SymmetricMatrix::kronecker_toeplitz(std::move(row));
  } else {
    throw ConfigError("problem document: unknown operator kind '" + kind + "'");
  }
  if (p.a.order() != n) throw ConfigError("problem document: operator order differs from n");

  p.x_true = decode_doubles(field<std::string>(doc, "x_true"));
  p.b_hat = decode_doubles(field<std::string>(doc, "b_hat"));
  if (p.x_true.size() != n || p.b_hat.size() != n)
    throw ConfigError("problem document: vector lengths differ from n");

  const json meta = field<json>(doc, "metadata");
  p.metadata.n = field<std::size_t>(meta, "n");
  if (meta.contains("blur"))
    p.metadata.blur = BlurParams{field<std::size_t>(meta["blur"], "band"), field<double>(meta["blur"], "sigma")};
  if (meta.contains("image_id")) p.metadata.image_id = field<std::string>(meta, "image_id");
  if (meta.contains("synthetic")) {
    const json& s = meta["synthetic"];
    SyntheticSpec spec;
    spec.n = field<std::size_t>(s, "n");
    spec.decay = parse_decay_kind(field<std::string>(s, "decay"));
    spec.alpha = field<double>(s, "alpha");
    spec.beta = field<double>(s, "beta");
    spec.signs = parse_sign_pattern(field<std::string>(s, "signs"));
    spec.sign_seed = field<std::uint64_t>(s, "sign_seed");
    spec.random_basis = field<bool>(s, "random_basis");
    spec.basis_seed = field<std::uint64_t>(s, "basis_seed");
    p.metadata.synthetic = spec;
  }
  return p;
}

std::string trace_to_csv(const IterateTrace& trace) {
  std::string out = "k,residual_norm,solution_norm,relative_error\n";
  for (const IterateRecord& r : trace.records) {
    out += std::to_string(r.k) + ',' + format_double(r.residual_norm) + ',' + format_double(r.solution_norm) + ',';
    if (r.relative_error) out += format_double(*r.relative_error);
    out += '\n';
  }
  return out;
}

std::vector<CsvRow> parse_trace_csv(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line) || line != "k,residual_norm,solution_norm,relative_error")
    throw ConfigError("csv: unexpected header");
  std::vector<CsvRow> rows;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::vector<std::string> cells;
    std::string cell;
    std::istringstream ls(line);
    while (std::getline(ls, cell, ',')) cells.push_back(cell);
    if (cells.size() == 3 && line.back() == ',') cells.emplace_back();
    if (cells.size() != 4) throw ConfigError("csv: expected 4 columns in '" + line + "'");
    CsvRow r;
    r.k = std::stoul(cells[0]);
    r.residual_norm = parse_double(cells[1]);
    r.solution_norm = parse_double(cells[2]);
    if (!cells[3].empty()) r.relative_error = parse_double(cells[3]);
    rows.push_back(r);
  }
  return rows;
}

json diagnostics_to_json(const DiagnosticsReport& report) {
  json doc;
  doc["gamma"] = vector_json(report.gamma);
  doc["sigma"] = vector_json(report.sigma);
  doc["sin_theta_direct"] = vector_json(report.sin_theta_direct);
  doc["sin_theta_formula"] = vector_json(report.sin_theta_formula);
  json hr = json::array();
  for (const Vector& v : report.harmonic_ritz) hr.push_back(vector_json(v));
  doc["harmonic_ritz"] = hr;
  json ff = json::array();
  for (const Vector& v : report.filter_factors) ff.push_back(vector_json(v));
  doc["filter_factors"] = ff;
  if (report.picard) {
    doc["picard"] = {{"signal", vector_json(report.picard->signal)},
                     {"noise", vector_json(report.picard->noise)},
                     {"total", vector_json(report.picard->total)},
                     {"c", vector_json(report.picard->c)}};
  } else {
    doc["picard"] = nullptr;
  }
  json rows = json::array();
  for (const DecayRow& r : report.decay)
    rows.push_back({{"k", r.k},
                    {"beta_next", r.beta_next},
                    {"alpha_next2", r.alpha_next2},
                    {"gamma", r.gamma},
                    {"sigma_next", r.sigma_next},
                    {"pre_floor", r.pre_floor},
                    {"beta_ok", r.beta_ok},
                    {"alpha_ok", r.alpha_ok}});
  doc["decay"] = rows;
  doc["k0"] = optional_index(report.k0);
  doc["lcurve_corner"] = optional_index(report.lcurve_corner);
  doc["semiconvergence_index"] = optional_index(report.semiconvergence_index);
  return doc;
}

std::string to_pgm(std::span<const double> image, std::size_t m) {
  require(image.size() == m * m, "to_pgm: image size must be m*m");
  const auto [lo, hi] = std::minmax_element(image.begin(), image.end());
  const double range = *hi - *lo;
  std::string out = "P5\n" + std::to_string(m) + ' ' + std::to_string(m) + "\n255\n";
  for (std::size_t r = 0; r < m; ++r)
    for (std::size_t c = 0; c < m; ++c) {
      const double v = range > 0.0 ? (image[c * m + r] - *lo) / range : 0.0;
      out += static_cast<char>(static_cast<unsigned char>(std::lround(v * 255.0)));
    }
  return out;
}

std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path.string() + "' for reading");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_text_file(const std::filesystem::path& path, const std::string& content) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open '" + path.string() + "' for writing");
  out << content;
  if (!out) throw IoError("write to '" + path.string() + "' failed");
}

}  // namespace regkrylov
