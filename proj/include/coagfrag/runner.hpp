#pragma once

// Orchestration behind the command-line subcommands. Every command returns
// a process exit status:
//   0 ok, 1 configuration error, 2 solver error, 3 hypothesis failure,
//   4 I/O error, 5 verification check failed (compare).

#include <filesystem>
#include <functional>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "coagfrag/audit.hpp"
#include "coagfrag/config.hpp"
#include "coagfrag/observables.hpp"
#include "coagfrag/solver.hpp"
#include "coagfrag/stability.hpp"
#include "json.hpp"

namespace coagfrag::runner {

enum ExitCode : int {
  kExitOk = 0,
  kExitConfig = 1,
  kExitSolver = 2,
  kExitHypotheses = 3,
  kExitIo = 4,
  kExitCheckFailed = 5,
};

struct RunArtifacts {
  ScenarioConfig config;
  ResolvedConstants constants;
  AuditReport audit;
  RunReport report;
};

/// Audit (advisory) then evolve.
RunArtifacts execute(const ScenarioConfig& cfg);

/// moments.csv, density_t<k>.csv, report.json. Throws IoError.
void write_artifacts(const RunArtifacts& a, const std::filesystem::path& dir);

nlohmann::json audit_json(const AuditReport& audit, const ResolvedConstants& constants);
nlohmann::json report_json(const RunArtifacts& a);
std::string moments_csv(const RunReport& report);
std::string gronwall_csv(const GronwallTrace& trace);
nlohmann::json ladder_json(const LadderResult& r);

/// Moment orders written to moments.csv: 0, 1, 2, then the configured extras.
std::vector<double> output_orders(const ScenarioConfig& cfg);

/// Runs fn, mapping exceptions to exit codes and printing the message to err.
int guarded(const std::function<int()>& fn, std::ostream& err);

int run(const ScenarioConfig& cfg, const std::optional<std::string>& out_dir, bool strict,
        std::ostream& out, std::ostream& err);

int check_hypotheses(const ScenarioConfig& cfg, const std::optional<std::string>& out_path,
                     std::ostream& out, std::ostream& err);

/// Recomputes a moment table from density CSVs. With run_dir, files and
/// times come from its report.json; otherwise from `files` and `times`.
int moments(const std::optional<std::string>& run_dir, const std::vector<std::string>& files,
            const std::vector<double>& times, const std::vector<double>& extra_orders,
            const std::optional<std::string>& out_path, std::ostream& out, std::ostream& err);

int compare(const ScenarioConfig& cfg, const std::optional<std::string>& out_dir,
            const std::vector<std::size_t>& levels, std::ostream& out, std::ostream& err);

int ladder(double mu, double nu, double rho0, double delta, std::ostream& out);

/// Lists the fixtures; with emit_dir, also writes <name>.json configs there.
int oracles(const std::optional<std::string>& emit_dir, std::ostream& out);

}  // namespace coagfrag::runner
