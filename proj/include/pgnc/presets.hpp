#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "pgnc/sim_harness.hpp"

namespace pgnc {

/// Shipped weight sets and timing for the two operating regimes.
/// "tabletop": T = 0.02 s, 10 cm/s-class air-bearing tests, t_max = 0.2 N,
///             actuator lag tau = 0.1 s.
/// "on-orbit": T = 0.1 s, t_max = 0.025 N, actuator lag tau = 0.1 s.
std::vector<std::string> preset_names();

/// Scenario skeleton for the preset: vehicle defaults, X configuration,
/// SDR controller, zero step reference. Throws std::invalid_argument for an
/// unknown name.
Scenario preset_scenario(std::string_view name);

}  // namespace pgnc
