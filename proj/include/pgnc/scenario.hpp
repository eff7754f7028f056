#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "pgnc/fuel_optimal.hpp"
#include "pgnc/sim_harness.hpp"

namespace pgnc {

/// A parsed scenario file. Blocks other than `vehicle` are optional; the
/// subcommand that needs one reports its absence.
///
///   name: tabletop-step
///   preset: tabletop            # fills sample time, weights, lag, t_max
///   vehicle:    {mass, side_length, moment_arm, inertia_zz, config,
///                failed_thrusters, inertial_kinematics}
///   controller: {type: sdr|pi_nzsp|both, sample_time,
///                weights: {plant, actuator, integral, input}}
///   actuator:   {t_max, lag_tau (null disables), bidirectional,
///                pwm: {frequency, rise_time, fall_time}}
///   simulation: {duration, integration_step, initial_state, disturbance,
///                reference: {type: step|sinusoid, target, amplitude,
///                            period, axes}}
///   tpbvp:      {x0, xf, tf, t_max, mesh_points, constrained, smoothing,
///                tolerance}
///
/// All quantities are SI (m, s, rad, kg, N).
struct ScenarioDocument {
  Scenario scenario;
  std::vector<ControllerKind> controllers{ControllerKind::kSdr};
  bool has_controller = false;
  bool has_simulation = false;
  std::optional<TpbvpProblem> tpbvp;
  TpbvpOptions tpbvp_options;
  std::string sha256;

  /// The scenario with `controller` selected.
  Scenario for_controller(ControllerKind controller) const;
};

/// Parses scenario text. Throws ParseError naming the key path and line for
/// unknown keys, wrong types and invalid values. `source` names the input in
/// diagnostics.
ScenarioDocument parse_scenario(const std::string& text,
                                const std::string& source = "<scenario>");

/// Reads and parses a file. Throws IoError when it cannot be read.
ScenarioDocument load_scenario(const std::filesystem::path& path);

/// Lowercase hex SHA-256 of the bytes.
std::string sha256_hex(const std::string& bytes);

}  // namespace pgnc
