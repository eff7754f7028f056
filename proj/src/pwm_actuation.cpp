#include "pgnc/pwm_actuation.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace pgnc {
namespace {

// Duty grids like 0.12 * 0.05 land a few ulps off the switching times.
constexpr double kTimeEps = 1e-12;

}  // namespace

void PwmModel::Validate() const {
  if (!(frequency > 0.0) || !std::isfinite(frequency)) {
    throw std::invalid_argument("pwm: frequency must be > 0");
  }
  if (!(t_max > 0.0) || !std::isfinite(t_max)) {
    throw std::invalid_argument("pwm: t_max must be > 0");
  }
  if (!(rise_time >= 0.0) || !(fall_time >= 0.0)) {
    throw std::invalid_argument("pwm: switching times must be >= 0");
  }
}

double effective_thrust(double duty, const PwmModel& model) {
  model.Validate();
  if (!(duty >= 0.0 && duty <= 1.0)) {
    throw std::invalid_argument("effective_thrust: duty must be in [0, 1]");
  }
  const double P = model.period();
  const double tau = duty * P;
  if (tau <= model.rise_time + kTimeEps) return 0.0;
  if (P - tau <= model.fall_time + kTimeEps) return model.t_max;
  const double mean =
      model.t_max * (tau - 0.5 * model.rise_time + 0.5 * model.fall_time) / P;
  return std::clamp(mean, 0.0, model.t_max);
}

double duty_for_thrust(double desired, const PwmModel& model, double quantum) {
  model.Validate();
  if (!(quantum > 0.0 && quantum <= 1.0)) {
    throw std::invalid_argument("duty_for_thrust: quantum must be in (0, 1]");
  }
  if (!(desired >= 0.0 && desired <= model.t_max)) {
    throw std::invalid_argument("duty_for_thrust: desired thrust must be in [0, t_max]");
  }
  if (desired == 0.0) return 0.0;
  if (desired == model.t_max) return 1.0;
  const int steps = static_cast<int>(std::ceil(1.0 / quantum - 1e-9));
  for (int k = 0; k <= steps; ++k) {
    const double duty = std::min(1.0, k * quantum);
    // Tolerate rounding between the caller's duty grid and k * quantum.
    if (effective_thrust(duty, model) >= desired - 1e-12 * model.t_max) return duty;
  }
  return 1.0;
}

std::vector<ModulationPoint> modulation_sweep(const PwmModel& model,
                                              double step) {
  model.Validate();
  if (!(step > 0.0 && step <= 0.5)) {
    throw std::invalid_argument("modulation_sweep: step must be in (0, 0.5]");
  }
  std::vector<ModulationPoint> table;
  const int n = static_cast<int>(std::floor(1.0 / step + 1e-9));
  for (int k = 0; k <= n; ++k) {
    const double duty = std::min(1.0, k * step);
    table.push_back({duty, effective_thrust(duty, model)});
  }
  if (table.back().duty < 1.0) table.push_back({1.0, model.t_max});
  return table;
}

}  // namespace pgnc
