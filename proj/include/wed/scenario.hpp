#pragma once

// Scenario files: JSON documents describing one problem family, its data,
// the maps and comparison pair to check and the solver settings. Parsing
// records every default into an effective configuration.

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "wed/io.hpp"

namespace wed {

/// Malformed scenario: `where` is "line L, column C" for syntax errors or
/// the dotted field path for schema errors.
class ScenarioError : public ConfigError {
 public:
  ScenarioError(std::string where, const std::string& what)
      : ConfigError(where + ": " + what), where_(std::move(where)) {}
  const std::string& where() const { return where_; }

 private:
  std::string where_;
};

enum class Family { doubly_nonlinear, fractional_heat, lotka_volterra, rate_independent, wide_wave, lagrangian };

std::string family_name(Family f);

struct Scenario {
  std::string name;
  std::string description;
  Family family = Family::doubly_nonlinear;
  std::uint64_t seed = 1;
  std::string output_dir;
  std::vector<double> schedule;
  FixedPointOptions fixed_point;
  /// Random samples per map for the sampled (R1)/(R2) checks (0 disables).
  int check_samples = 0;
  /// Tolerance on the invariance residual of WED/WIDE invariant solves.
  double invariance_tolerance = 1e-8;
  double ordering_tolerance = 1e-10;
  double energetic_tolerance = 1e-2;

  std::optional<WedProblem> wed;
  std::optional<RIProblem> ri;
  std::optional<WideWaveProblem> wave;
  std::optional<LagrangianProblem> lagrangian;

  std::vector<RMap> maps;
  std::vector<WideMap> wide_maps;
  /// v0 of the comparison pair (WED and rate-independent families).
  std::optional<Field> comparison;

  Json effective;
};

Scenario parse_scenario(const std::string& text);
Scenario load_scenario(const std::filesystem::path& path);

struct BundledScenario {
  std::string name;
  std::string summary;
  std::string text;
};

const std::vector<BundledScenario>& bundled_scenarios();
const BundledScenario* find_bundled(const std::string& name);

}  // namespace wed
