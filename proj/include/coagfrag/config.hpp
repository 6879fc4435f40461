#pragma once

// Scenario configuration: a single JSON document. Unknown keys are rejected,
// every violated constraint is reported at once, and the echoed form
// (to_json) reloads to an identical ScenarioConfig.

#include <cstdint>
#include <memory>
#include "json.hpp"
#include <optional>
#include <string>
#include <vector>

#include "coagfrag/audit.hpp"
#include "coagfrag/grid.hpp"
#include "coagfrag/kernels.hpp"
#include "coagfrag/operators.hpp"
#include "coagfrag/solver.hpp"

namespace coagfrag {

struct InitialCondition {
  enum class Kind { kExponential, kMonodisperse, kZero, kCsv };
  Kind kind = Kind::kExponential;
  double amplitude = 1.0;  // exponential: amplitude * exp(-x / scale)
  double scale = 1.0;
  double size = 1.0;  // monodisperse
  double number = 1.0;
  std::string csv_path;

  bool operator==(const InitialCondition&) const = default;
};

struct TimeConfig {
  double t_end = 1.0;
  std::size_t snapshots = 10;         // uniform intervals, unless times given
  std::vector<double> snapshot_times;
  ControllerConfig controller;

  bool operator==(const TimeConfig&) const = default;
};

/// Declared constants; missing ones are filled in from the closed forms.
struct DeclaredConstants {
  std::optional<double> k1, mu, m, lambda, L_gamma, nu;

  bool suggest_all() const { return !k1 && !mu && !m && !lambda && !L_gamma && !nu; }
  bool operator==(const DeclaredConstants&) const = default;
};

struct CompareConfig {
  double epsilon = 1e-3;
  double tau_disc = 0.05;
  std::size_t samples = 20;
  std::string shape = "sin-log";

  bool operator==(const CompareConfig&) const = default;
};

struct ScenarioConfig {
  std::string name;
  std::optional<CoagulationParams> kernel;
  std::optional<FragmentationParams> fragmentation;
  DeclaredConstants hypotheses;
  GridSpec grid;
  InitialCondition initial;
  TimeConfig time;
  TruncationMode truncation = TruncationMode::kConservative;
  DustPolicy dust = DustPolicy::kRemove;
  std::vector<double> moment_orders;
  std::string output = "out";
  std::uint64_t seed = 0;
  SamplePlan audit;
  CompareConfig compare;
  std::vector<std::size_t> levels;

  bool operator==(const ScenarioConfig&) const = default;
};

/// Throws ConfigError (parse errors carry line and column, validation
/// errors list every violation).
ScenarioConfig parse_config(const std::string& text, const std::string& source = "<string>");
ScenarioConfig config_from_json(const nlohmann::json& j);
/// IoError if the file cannot be read. Relative CSV paths in `initial` are
/// resolved against the config file's directory.
ScenarioConfig load_config(const std::string& path);

nlohmann::json to_json(const ScenarioConfig& cfg);

/// Configuration of a named oracle fixture (see oracles::fixtures()).
ScenarioConfig fixture_config(const std::string& name);

/// Objects built from a configuration.
struct Scenario {
  ScenarioConfig config;
  std::shared_ptr<const Grid> grid;
  std::optional<CoagulationKernel> kernel;
  std::optional<FragmentationSpec> fragmentation;
  Density initial;
  std::shared_ptr<const OperatorTables> tables;
};

Density initial_density(const InitialCondition& ic, const std::shared_ptr<const Grid>& grid);

/// n_cells overrides the grid size (refinement studies).
Scenario build_scenario(const ScenarioConfig& cfg, std::optional<std::size_t> n_cells = {});

OutputSchedule schedule_for(const TimeConfig& time);

struct ResolvedConstants {
  HypothesisConstants constants;
  std::vector<std::string> notes;    // one per field that fell back to a default
  std::vector<std::string> missing;  // fields neither declared nor derivable
};

ResolvedConstants resolve_constants(const DeclaredConstants& declared,
                                    const std::optional<CoagulationKernel>& kernel,
                                    const std::optional<FragmentationSpec>& fragmentation);

}  // namespace coagfrag
