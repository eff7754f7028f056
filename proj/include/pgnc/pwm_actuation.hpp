#pragma once

#include <vector>

namespace pgnc {

/// Solenoid-valve PWM with asymmetric opening/closing delays.
struct PwmModel {
  double frequency = 10.0;   // Hz
  double rise_time = 0.006;  // s, off -> on
  double fall_time = 0.015;  // s, on -> off
  double t_max = 0.2;        // N, steady full-open thrust

  double period() const { return 1.0 / frequency; }
  /// True when a period cannot fit both transitions.
  bool degenerate() const { return period() <= rise_time + fall_time; }
  /// Throws std::invalid_argument for non-positive frequency, t_max or
  /// negative switching times.
  void Validate() const;
};

/// Mean thrust over one period for a commanded duty in [0, 1]. With on-time
/// tau = duty * P: 0 if tau <= rise, t_max if P - tau <= fall, otherwise
/// t_max (tau - rise/2 + fall/2) / P clamped to [0, t_max].
double effective_thrust(double duty, const PwmModel& model);

/// Smallest duty on a grid of `quantum` with effective_thrust >= desired.
/// desired == t_max maps to duty 1.
double duty_for_thrust(double desired, const PwmModel& model,
                       double quantum = 0.01);

struct ModulationPoint {
  double duty = 0.0;
  double thrust = 0.0;
};

/// Duty grid 0, step, 2 step, ..., 1.
std::vector<ModulationPoint> modulation_sweep(const PwmModel& model,
                                              double step = 0.05);

}  // namespace pgnc
