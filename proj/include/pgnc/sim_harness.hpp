#pragma once

#include <array>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Core>

#include "pgnc/discretization.hpp"
#include "pgnc/linear_analysis.hpp"
#include "pgnc/pwm_actuation.hpp"
#include "pgnc/sdr_design.hpp"
#include "pgnc/vehicle_model.hpp"

namespace pgnc {

enum class ControllerKind { kSdr, kPiNzsp };

/// "sdr" or "pi_nzsp" (case-insensitive, '-' accepted for '_').
ControllerKind ParseControllerKind(std::string_view name);
std::string_view ToString(ControllerKind kind);

/// Commanded pose (x, y, psi).
struct Reference {
  enum class Kind { kStep, kSinusoid };
  Kind kind = Kind::kStep;
  /// Step target, held from t = 0.
  Eigen::Vector3d target = Eigen::Vector3d::Zero();
  /// Sinusoid: amplitude * sin(2 pi t / period) on the selected axes.
  double amplitude = 0.0;  // m (rad on psi)
  double period = 0.0;     // s
  std::array<bool, 3> axes{true, false, false};

  Eigen::Vector3d pose_at(double t) const;
};

/// Bryson bounds for every state block the design may use.
struct WeightSpec {
  Eigen::VectorXd plant_bounds;     // 6: x, y, psi, u, v, r
  Eigen::VectorXd actuator_bounds;  // 4: lagged thrusts (used with lag)
  Eigen::VectorXd integral_bounds;  // 3: integral of pose error (PI only)
  Eigen::VectorXd input_bounds;     // 4: commanded thrusts
};

struct Scenario {
  std::string name = "scenario";
  VehicleParams params = VehicleParams::Defaults();
  ThrusterConfigKind config = ThrusterConfigKind::kX;
  /// Position rates in the inertial frame instead of body velocities.
  bool inertial_kinematics = false;
  ControllerKind controller = ControllerKind::kSdr;
  double sample_time = 0.02;       // s
  double integration_step = 0.01;  // s
  double duration = 20.0;          // s
  StateVector initial_state = StateVector::Zero();
  Reference reference;
  std::optional<double> actuator_lag_tau;  // s
  std::optional<PwmModel> pwm;
  ThrusterSet failed_thrusters;
  WeightSpec weights;
  /// Saturation of each commanded thrust [N].
  double t_max = 0.2;
  /// Constant body wrench added to the thrust wrench.
  Wrench disturbance = Wrench::Zero();
  /// Idealization: pass negative commands through instead of clamping them
  /// to zero (the upper limit still applies as |T| <= t_max).
  bool bidirectional = false;

  /// Throws std::invalid_argument (naming the field) on inconsistent data,
  /// including a sample time that is not an integer multiple of the
  /// integration step.
  void Validate() const;
  int augmented_dimension() const;
};

struct DesignResult {
  GainSet gains;
  ControllerKind controller = ControllerKind::kSdr;
  /// Set for PI-NZSP.
  std::optional<QuadPartition> partition;
  double closed_loop_spectral_radius = 0.0;
  int riccati_iterations = 0;
  std::vector<std::string> state_labels;
};

/// Linearizes about the origin, zeroes the input columns of failed
/// thrusters, adds lag/integral states as configured, and runs the SDR design.
/// For PI-NZSP the quad partition is computed on the ZOH model without
/// integral states, with C selecting (x, y, psi) and D = 0.
DesignResult design_gains(const Scenario& scenario);

struct StepMetrics {
  bool defined = false;
  double rise_time = 0.0;      // s, 10-90 %
  double settling_time = 0.0;  // s, last exit from the +/-2 % band
  double overshoot = 0.0;      // percent of the step size
  double steady_state_error = 0.0;
};

/// Step metrics of `signal` sampled at `times` for a step from `initial` to
/// `final_value` applied at times.front(). Crossing times are linearly
/// interpolated. Undefined when the step is zero or the signal never reaches
/// 10 % of it.
StepMetrics step_metrics(const std::vector<double>& times,
                         const std::vector<double>& signal, double initial,
                         double final_value);

struct FuelMetrics {
  double quadratic_cost = 0.0;  // N^2 s, integral of 1/2 sum T_i^2
  double total_impulse = 0.0;   // N s
  std::array<double, 4> thruster_on_time{};  // s
};

/// thrust[k] is the delivered thrust at times[k]. Cost and impulse use the
/// trapezoidal rule (impulse on |T|); on-time sums the intervals whose left
/// sample has |T| > 1e-9 N.
FuelMetrics fuel_metrics(const std::vector<double>& times,
                         const std::vector<ThrustVector>& thrust);

struct TrackingMetrics {
  Eigen::Vector3d final_abs_error = Eigen::Vector3d::Zero();
  /// Mean |pose - reference| over the last reference period (the last 10 %
  /// of the run for step references).
  Eigen::Vector3d window_mean_abs_error = Eigen::Vector3d::Zero();
};

struct SimulationResult {
  Trajectory trajectory;  // inputs are the commanded (post-clamp) thrusts
  std::vector<ThrustVector> actual_thrust;
  std::vector<Eigen::Vector3d> reference;
  bool lag_enabled = false;
  /// (sample, thruster) pairs where the raw command left [0, t_max].
  int clamp_events = 0;
  int command_samples = 0;
  std::array<StepMetrics, 3> step;
  FuelMetrics fuel;
  TrackingMetrics tracking;
};

/// Zero-order-hold closed loop: the controller runs every sample_time, the
/// command is clamped to [0, t_max] (failed thrusters forced to zero),
/// optionally PWM-quantized (duty latched for the sample) and lagged, and
/// the plant plus lag states are integrated by RK4 at integration_step.
/// Throws std::invalid_argument when the gains do not match the scenario's
/// augmented dimension and DivergenceError when |state| exceeds 1e6.
SimulationResult run_closed_loop(const Scenario& scenario, const GainSet& gains);

/// Trajectory CSV: t, x, y, psi, u, v, r, T1..T4 and, with lag, T1a..T4a.
std::string trajectory_csv(const SimulationResult& result);

/// Human-readable metrics block.
std::string metrics_report(const Scenario& scenario,
                           const SimulationResult& result);

}  // namespace pgnc
