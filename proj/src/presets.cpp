#include "pgnc/presets.hpp"

#include <stdexcept>

namespace pgnc {
namespace {

Eigen::VectorXd Vec(std::initializer_list<double> values) {
  Eigen::VectorXd v(static_cast<Eigen::Index>(values.size()));
  Eigen::Index i = 0;
  for (double x : values) v(i++) = x;
  return v;
}

}  // namespace

std::vector<std::string> preset_names() { return {"tabletop", "on-orbit"}; }

Scenario preset_scenario(std::string_view name) {
  Scenario s;
  s.name = std::string(name);
  s.actuator_lag_tau = 0.1;
  if (name == "tabletop") {
    s.sample_time = 0.02;
    s.t_max = 0.2;
    s.weights.plant_bounds = Vec({0.1, 0.1, 0.2, 0.05, 0.05, 0.2});
    s.weights.actuator_bounds = Vec({0.2, 0.2, 0.2, 0.2});
    s.weights.integral_bounds = Vec({0.1, 0.1, 0.1});
    s.weights.input_bounds = Vec({0.2, 0.2, 0.2, 0.2});
  } else if (name == "on-orbit") {
    s.sample_time = 0.1;
    s.t_max = 0.025;
    // Authority-limited: a 0.2 m step takes about 10 s at 25 mN.
    s.weights.plant_bounds = Vec({0.1, 0.1, 0.2, 0.02, 0.02, 0.2});
    s.weights.actuator_bounds = Vec({0.025, 0.025, 0.025, 0.025});
    s.weights.integral_bounds = Vec({0.2, 0.2, 0.2});
    s.weights.input_bounds = Vec({0.025, 0.025, 0.025, 0.025});
  } else {
    throw std::invalid_argument("unknown preset '" + std::string(name) +
                                "' (expected tabletop or on-orbit)");
  }
  return s;
}

}  // namespace pgnc
