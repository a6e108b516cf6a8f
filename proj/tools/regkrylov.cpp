// regkrylov: generate test problems, run solver experiments, regenerate figure data.

#include <iostream>

#include <CLI11.hpp>

#include "regkrylov/errors.hpp"
#include "regkrylov/experiment.hpp"
#include "regkrylov/io.hpp"
#include "regkrylov/problems.hpp"

namespace {

constexpr int kConfigError = 2;
constexpr int kNumericalError = 3;

int cmd_run(const std::string& config_path) {
  std::string text;
  try {
    text = regkrylov::read_text_file(config_path);
  } catch (const regkrylov::IoError& e) {
    throw regkrylov::ConfigError(e.what());
  }
  regkrylov::json doc;
  try {
    doc = regkrylov::json::parse(text);
  } catch (const regkrylov::json::parse_error& e) {
    throw regkrylov::ConfigError(config_path + ": " + e.what());
  }
  const auto cfg = regkrylov::parse_config(doc);
  const auto report = regkrylov::run(cfg);
  for (const auto& cell : report.cells) {
    std::cout << regkrylov::to_string(cell.solver) << " eps=" << cell.noise_level << " seed=" << cell.seed
              << " best_error=";
    if (cell.best_error)
      std::cout << *cell.best_error;
    else
      std::cout << "n/a";
    std::cout << " k*=" << (cell.semiconvergence_index ? std::to_string(*cell.semiconvergence_index) : "n/a")
              << " corner=" << (cell.lcurve_corner ? std::to_string(*cell.lcurve_corner) : "none") << '\n';
  }
  for (const auto& note : report.notes) std::cerr << "note: " << note << '\n';
  std::cout << "wrote " << report.manifest.size() + 1 << " files to " << cfg.output_dir.string() << '\n';
  return 0;
}

int cmd_reproduce(const std::string& figure, bool full, const std::string& out) {
  const std::filesystem::path dir = out.empty() ? std::filesystem::path("figures") / figure : std::filesystem::path(out);
  const auto files = regkrylov::reproduce(figure, full, dir);
  for (const auto& f : files) std::cout << (dir / f).string() << '\n';
  return 0;
}

int cmd_generate(const std::string& name, std::size_t n, std::size_t band, double sigma, const std::string& out) {
  const auto problem = regkrylov::parse_problem_name(name);
  if (problem == regkrylov::ProblemName::synthetic) {
    regkrylov::SyntheticSpec spec;
    spec.n = n;
    regkrylov::write_text_file(out, regkrylov::problem_to_json(regkrylov::generate_synthetic(spec).first).dump() + "\n");
  } else {
    const auto p = regkrylov::generate(problem, n, regkrylov::BlurParams{band, sigma});
    regkrylov::write_text_file(out, regkrylov::problem_to_json(p).dump() + "\n");
  }
  std::cout << out << '\n';
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Krylov regularization experiments for symmetric ill-posed problems"};
  app.require_subcommand(1);

  std::string config_path;
  auto* run = app.add_subcommand("run", "Run the experiment described by a JSON config");
  run->add_option("--config", config_path, "config file")->required();

  std::string figure, out_dir;
  bool full = false;
  auto* rep = app.add_subcommand("reproduce", "Write CSV series and a gnuplot script for one figure");
  rep->add_option("figure", figure, "figure id")->required()->check(CLI::IsMember(regkrylov::figure_ids()));
  rep->add_flag("--full", full, "blur figures at m=256 instead of m=64");
  rep->add_option("--out", out_dir, "output directory (default figures/<id>)");

  std::string name, out_file;
  std::size_t n = 0, band = 3;
  double sigma = 0.7;
  auto* gen = app.add_subcommand("generate", "Export a test problem as JSON");
  gen->add_option("--problem", name, "problem name")->required();
  gen->add_option("--n", n, "size (image side for blur)")->required();
  gen->add_option("--band", band, "blur band");
  gen->add_option("--sigma", sigma, "blur width");
  gen->add_option("--out", out_file, "output file")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kConfigError;
  }

  try {
    if (*run) return cmd_run(config_path);
    if (*rep) return cmd_reproduce(figure, full, out_dir);
    return cmd_generate(name, n, band, sigma, out_file);
  } catch (const regkrylov::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kConfigError;
  } catch (const regkrylov::ContractViolation& e) {
    std::cerr << "invalid input: " << e.what() << '\n';
    return kConfigError;
  } catch (const regkrylov::NumericalError& e) {
    std::cerr << "numerical failure: " << e.what() << '\n';
    return kNumericalError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
}
