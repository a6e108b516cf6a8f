#include <gtest/gtest.h>

#include <filesystem>

#include "regkrylov/errors.hpp"
#include "regkrylov/io.hpp"

using namespace regkrylov;

namespace {

void expect_same_problem(const DiscretizedProblem& a, const DiscretizedProblem& b) {
  EXPECT_EQ(a.name, b.name);
  EXPECT_TRUE(a.a == b.a);
  EXPECT_EQ(a.x_true, b.x_true);
  EXPECT_EQ(a.b_hat, b.b_hat);
  EXPECT_EQ(a.metadata.n, b.metadata.n);
}

}  // namespace

TEST(ProblemJson, DenseRoundTripIsBitwise) {
  const auto p = generate(ProblemName::phillips, 37);
  const auto text = problem_to_json(p).dump();
  expect_same_problem(p, problem_from_json(json::parse(text)));
}

TEST(ProblemJson, KroneckerRoundTrip) {
  const auto p = generate(ProblemName::blur, 12, BlurParams{4, 1.3});
  const auto q = problem_from_json(json::parse(problem_to_json(p).dump()));
  expect_same_problem(p, q);
  ASSERT_TRUE(q.a.is_kronecker());
  ASSERT_TRUE(q.metadata.blur.has_value());
  EXPECT_EQ(q.metadata.blur->band, 4u);
  EXPECT_EQ(q.metadata.blur->sigma, 1.3);
  EXPECT_EQ(q.metadata.image_id, p.metadata.image_id);
}

TEST(ProblemJson, SyntheticRoundTripKeepsSpec) {
  SyntheticSpec s;
  s.n = 16;
  s.decay = DecayKind::mild;
  s.alpha = 0.7;
  s.signs = SignPattern::random;
  s.sign_seed = 5;
  s.random_basis = true;
  s.basis_seed = 9;
  const auto p = generate_synthetic(s).first;
  const auto q = problem_from_json(json::parse(problem_to_json(p).dump()));
  expect_same_problem(p, q);
  ASSERT_TRUE(q.metadata.synthetic.has_value());
  EXPECT_EQ(q.metadata.synthetic->alpha, 0.7);
  EXPECT_EQ(q.metadata.synthetic->decay, DecayKind::mild);
  EXPECT_EQ(q.metadata.synthetic->basis_seed, 9u);
}

TEST(ProblemJson, RejectsForeignDocuments) {
  EXPECT_THROW(problem_from_json(json{{"format", "other"}}), ConfigError);
  auto doc = problem_to_json(generate(ProblemName::shaw, 4));
  doc["x_true"] = encode_doubles(Vector{1.0});
  EXPECT_THROW(problem_from_json(doc), ConfigError);
}

TEST(Base64, RoundTripAndErrors) {
  const Vector v{0.0, -0.0, 1.5, 1e-300, -3.25e200};
  const Vector w = decode_doubles(encode_doubles(v));
  ASSERT_EQ(w.size(), v.size());
  for (std::size_t i = 0; i < v.size(); ++i) EXPECT_EQ(std::signbit(v[i]), std::signbit(w[i]));
  EXPECT_EQ(w, v);
  EXPECT_THROW(decode_doubles("AAAA"), ConfigError);
  EXPECT_THROW(decode_doubles("not base64!"), ConfigError);
  EXPECT_TRUE(decode_doubles("").empty());
}

TEST(Csv, RoundTrip) {
  IterateTrace t;
  for (std::size_t k = 1; k <= 3; ++k) {
    IterateRecord r;
    r.k = k;
    r.residual_norm = 1.0 / 3.0 / double(k);
    r.solution_norm = std::sqrt(2.0) * double(k);
    if (k != 2) r.relative_error = 0.1 + 1e-17 * double(k);
    t.records.push_back(r);
  }
  const std::string text = trace_to_csv(t);
  EXPECT_EQ(text.substr(0, text.find('\n')), "k,residual_norm,solution_norm,relative_error");
  const auto rows = parse_trace_csv(text);
  ASSERT_EQ(rows.size(), 3u);
  for (std::size_t i = 0; i < 3; ++i) {
    EXPECT_EQ(rows[i].k, i + 1);
    EXPECT_EQ(rows[i].residual_norm, t.records[i].residual_norm);
    EXPECT_EQ(rows[i].solution_norm, t.records[i].solution_norm);
    EXPECT_EQ(rows[i].relative_error, t.records[i].relative_error);
  }
}

TEST(Pgm, HeaderAndScaling) {
  const Vector img{0.0, 1.0, 0.5, 0.25};
  const std::string pgm = to_pgm(img, 2);
  const std::string header = "P5\n2 2\n255\n";
  ASSERT_EQ(pgm.size(), header.size() + 4);
  EXPECT_EQ(pgm.substr(0, header.size()), header);
  // row 0 holds pixels (0,0) and (0,1) = img[0], img[2]
  EXPECT_EQ(static_cast<unsigned char>(pgm[header.size()]), 0);
  EXPECT_EQ(static_cast<unsigned char>(pgm[header.size() + 2]), 255);
}

TEST(Files, MissingFileIsIoError) {
  EXPECT_THROW(read_text_file("/nonexistent/regkrylov/file.json"), IoError);
}

TEST(Files, WriteCreatesDirectories) {
  const auto dir = std::filesystem::temp_directory_path() / "regkrylov_io_test";
  std::filesystem::remove_all(dir);
  write_text_file(dir / "a" / "b.txt", "hello\n");
  EXPECT_EQ(read_text_file(dir / "a" / "b.txt"), "hello\n");
  std::filesystem::remove_all(dir);
}

TEST(FormatDouble, ShortestRoundTrip) {
  for (double v : {0.1, 1.0 / 3.0, 1e-300, 123456789.0})
    EXPECT_EQ(std::stod(format_double(v)), v);
  EXPECT_EQ(format_double(0.5), "0.5");
}
