#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>

#include "pgnc/artifacts.hpp"
#include "pgnc/fuel_optimal.hpp"
#include "pgnc/scenario.hpp"

namespace pgnc {

/// Eigenvalues, controllability rank, the single/double failure table and
/// wrench feasibility for the scenario's vehicle. Led by the provenance
/// header.
std::string analysis_report(const ScenarioDocument& doc);

/// Gains for every controller the scenario selects.
GainArtifact design_artifact(const ScenarioDocument& doc);

/// Solution CSV (t, states, costates, inputs) and summary for a solved
/// TPBVP.
std::string tpbvp_csv(const TpbvpSolution& solution, std::string_view sha256);
std::string tpbvp_summary(const TpbvpProblem& problem,
                          const TpbvpSolution& solution,
                          std::string_view sha256);

/// Duty/thrust table; a degenerate model adds a warning comment line.
std::string modulation_csv(const PwmModel& model, double step,
                           std::string_view sha256);

/// Subcommands. Each writes into `out` (a directory, or the artifact path for
/// design) and throws pgnc::Error subclasses on failure.
void cmd_analyze(const ScenarioDocument& doc,
                 const std::optional<std::filesystem::path>& out,
                 std::ostream& stdout_stream);
void cmd_design(const ScenarioDocument& doc, const std::filesystem::path& out);
void cmd_simulate(const ScenarioDocument& doc,
                  const std::optional<std::filesystem::path>& gains_path,
                  const std::filesystem::path& out_dir);
void cmd_optimize(const ScenarioDocument& doc, const std::filesystem::path& out_dir);
void cmd_modulate(const PwmModel& model, double step,
                  const std::filesystem::path& out, std::string_view sha256);

/// Full command line (argv[0] is the program name). Returns the process exit
/// code; diagnostics go to `err`.
int run_cli(int argc, const char* const* argv, std::ostream& out,
            std::ostream& err);

}  // namespace pgnc
