// spectree command-line front end.
//
// Exit codes: 0 success, 1 property violation (verify), 2 invalid input.

#include <iostream>

#include <CLI11.hpp>

#include "spectree/commands.hpp"
#include "spectree/verify.hpp"

namespace {

using namespace spectree;

int emit(const io::Json& report, const std::string& summary, bool as_json, const std::string& out_path) {
  const std::string text = io::dump(report);
  if (!out_path.empty()) io::write_file(out_path, text);
  std::cout << (as_json ? text : summary);
  return 0;
}

} // namespace

int main(int argc, char** argv) {
  CLI::App app{"Composition operators on weighted L^p spaces of rooted trees"};
  app.require_subcommand(1);

  std::string spec_path, out_path, csv_path, suite = "all", inject;
  bool as_json = false;
  std::uint64_t seed = 1;

  auto* analyze = app.add_subcommand("analyze", "boundedness, isometry and compactness across the depth ladder");
  analyze->add_option("spec", spec_path, "experiment document")->required();
  analyze->add_option("--out", out_path, "write the JSON report here");
  analyze->add_flag("--json", as_json, "print the JSON report instead of the summary");

  auto* spectrum = app.add_subcommand("spectrum", "singular values, Schatten sums and trace (p = 2)");
  spectrum->add_option("spec", spec_path, "experiment document")->required();
  spectrum->add_option("--csv", csv_path, "write the spectrum of the deepest ladder entry as CSV");
  spectrum->add_option("--out", out_path, "write the JSON report here");
  spectrum->add_flag("--json", as_json, "print the JSON report instead of the summary");

  auto* verify_cmd = app.add_subcommand("verify", "seeded property suites");
  verify_cmd->add_option("--suite", suite, "suite name or 'all'");
  verify_cmd->add_option("--seed", seed, "generator seed");
  verify_cmd->add_option("--inject", inject, "deliberate fault (isometry-perturb)");
  verify_cmd->add_option("--out", out_path, "write the JSON report here");
  verify_cmd->add_flag("--json", as_json, "print the JSON report instead of the summary");

  auto* adversary = app.add_subcommand("adversary", "injections that defeat unbounded or vanishing weights");
  adversary->add_option("spec", spec_path, "experiment document (tree, weight, depth ladder)")->required();
  adversary->add_option("--out", out_path, "write the JSON report here");
  adversary->add_flag("--json", as_json, "print the JSON report instead of the summary");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (analyze->parsed()) {
      const auto report = cli::cmd_analyze(cli::load_spec(spec_path));
      return emit(report, cli::analyze_summary(report), as_json, out_path);
    }
    if (spectrum->parsed()) {
      const auto result = cli::cmd_spectrum(cli::load_spec(spec_path));
      if (!csv_path.empty()) io::write_file(csv_path, result.csv);
      return emit(result.report, cli::spectrum_summary(result.report), as_json, out_path);
    }
    if (adversary->parsed()) {
      const auto report = cli::cmd_adversary(cli::load_spec(spec_path));
      return emit(report, cli::adversary_summary(report), as_json, out_path);
    }
    verify::Options opts{suite, seed, std::nullopt};
    if (!inject.empty()) opts.inject = inject;
    const auto report = verify::run(opts);
    emit(report, verify::summary(report), as_json, out_path);
    return report.at("passed").get<bool>() ? 0 : 1;
  } catch (const ValidationError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const DomainError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const io::Json::exception& e) {
    std::cerr << "error: malformed document: " << e.what() << "\n";
    return 2;
  }
}
