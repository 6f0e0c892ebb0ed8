#pragma once

// Scenario orchestration and the named property suites behind the CLI.

#include <filesystem>
#include <string>
#include <vector>

#include "wed/scenario.hpp"

namespace wed {

/// Process exit codes of `run`.
enum ExitCode { kExitPass = 0, kExitPropertyFailed = 1, kExitParseError = 2, kExitNotConverged = 3 };

struct CheckLine {
  std::string suite;
  std::string check;
  bool passed = true;
  /// Diagnostics are reported but never decide the exit status.
  bool gating = true;
  double value = 0.0;
  double tolerance = 0.0;
  std::string note;
};

Json to_json(const CheckLine& c);

struct RunResult {
  int exit_code = kExitPass;
  std::filesystem::path directory;
  std::vector<CheckLine> checks;
  bool converged = true;
  std::string message;
};

/// WED_OUTPUT_ROOT when set, otherwise ./wed_output.
std::filesystem::path output_root();

/// Solves the scenario, runs its property checks and writes the artifacts
/// below `root / scenario.output_dir`.
RunResult run_scenario(const Scenario& scenario, const std::filesystem::path& root);

struct SuiteReport {
  std::string suite;
  bool passed = true;
  std::vector<CheckLine> checks;
};

Json to_json(const SuiteReport& r);

const std::vector<std::string>& suite_names();

/// Runs a named suite with fixed seeds; std::invalid_argument for unknown names.
SuiteReport verify_suite(const std::string& name);

}  // namespace wed
