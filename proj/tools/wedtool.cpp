// wedtool: run scenarios, run property suites, list bundled scenarios.

#include <CLI11.hpp>
#include <iomanip>
#include <iostream>

#include "wed/runner.hpp"

namespace {

void print_checks(const std::vector<wed::CheckLine>& checks) {
  for (const auto& c : checks) {
    const char* tag = !c.gating ? "INFO" : c.passed ? "PASS" : "FAIL";
    std::cout << std::left << std::setw(5) << tag << ' ' << c.suite << " | " << c.check << " = "
              << wed::format_number(c.value);
    if (c.gating) std::cout << " (tol " << wed::format_number(c.tolerance) << ")";
    if (!c.note.empty()) std::cout << " [" << c.note << "]";
    std::cout << '\n';
  }
}

int run(const std::string& target, const std::string& out) {
  wed::Scenario sc;
  try {
    if (const auto* b = wed::find_bundled(target); b && !std::filesystem::exists(target))
      sc = wed::parse_scenario(b->text);
    else
      sc = wed::load_scenario(target);
  } catch (const wed::ScenarioError& e) {
    std::cerr << "wedtool: " << target << ": " << e.what() << '\n';
    return wed::kExitParseError;
  }
  const std::filesystem::path root = out.empty() ? wed::output_root() : std::filesystem::path(out);
  try {
    const auto res = wed::run_scenario(sc, root);
    print_checks(res.checks);
    std::cout << "artifacts: " << res.directory.string() << '\n';
    if (!res.converged) std::cerr << "wedtool: " << res.message << '\n';
    std::cout << "exit " << res.exit_code << '\n';
    return res.exit_code;
  } catch (const wed::ConfigError& e) {
    std::cerr << "wedtool: " << sc.name << ": " << e.what() << '\n';
    return wed::kExitParseError;
  } catch (const wed::PreconditionError& e) {
    std::cerr << "wedtool: " << sc.name << ": " << e.what() << '\n';
    return wed::kExitParseError;
  }
}

int verify(const std::string& suite, bool json) {
  const auto rep = wed::verify_suite(suite);
  if (json)
    std::cout << wed::to_json(rep).dump(2) << '\n';
  else
    print_checks(rep.checks);
  std::cout << (rep.passed ? "suite passed" : "suite FAILED") << '\n';
  return rep.passed ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Weighted-energy-dissipation solvers and property checks"};
  app.require_subcommand(1);

  std::string target, out;
  auto* run_cmd = app.add_subcommand("run", "solve a scenario file (or bundled scenario name) and check its properties");
  run_cmd->add_option("scenario", target, "scenario JSON file or bundled scenario name")->required();
  run_cmd->add_option("-o,--output-root", out, "output root (default: $WED_OUTPUT_ROOT or ./wed_output)");

  std::string suite;
  bool json = false;
  auto* verify_cmd = app.add_subcommand("verify", "run a property suite with fixed seeds");
  verify_cmd->add_option("suite", suite, "suite name")->required()->check(CLI::IsMember(wed::suite_names()));
  verify_cmd->add_flag("--json", json, "print the machine-readable report");

  bool print = false;
  std::string which;
  auto* list_cmd = app.add_subcommand("list-scenarios", "list the bundled scenarios");
  list_cmd->add_flag("--print", print, "print the JSON of the named scenario");
  list_cmd->add_option("name", which, "scenario to print with --print");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : wed::kExitParseError;
  }

  if (run_cmd->parsed()) return run(target, out);
  if (verify_cmd->parsed()) return verify(suite, json);
  if (print) {
    const auto* b = wed::find_bundled(which);
    if (!b) {
      std::cerr << "wedtool: no bundled scenario '" << which << "'\n";
      return wed::kExitParseError;
    }
    std::cout << b->text << '\n';
    return 0;
  }
  for (const auto& b : wed::bundled_scenarios()) std::cout << std::left << std::setw(26) << b.name << b.summary << '\n';
  return 0;
}
