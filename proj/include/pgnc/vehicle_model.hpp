#pragma once

#include <functional>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Core>

namespace pgnc {

/// Planar state (x, y, psi, u, v, r) in SI units: m, m, rad, m/s, m/s, rad/s.
using StateVector = Eigen::Matrix<double, 6, 1>;
/// Four unidirectional thrust magnitudes T1..T4 [N].
using ThrustVector = Eigen::Vector4d;
/// Body wrench (Fx [N], Fy [N], Mz [N m]).
using Wrench = Eigen::Vector3d;
using AllocationMatrix = Eigen::Matrix<double, 3, 4>;

enum StateIndex : int { kX = 0, kY, kPsi, kU, kV, kR };

struct VehicleParams {
  double mass = 0.0;         // kg
  double side_length = 0.0;  // m
  double moment_arm = 0.0;   // m
  double inertia_zz = 0.0;   // kg m^2

  /// 2.268 kg cube, 10 cm side, 5 cm moment arm, Izz = m L^2 / 6.
  static VehicleParams Defaults();
  /// Solid square plate inertia: Izz = mass * side_length^2 / 6.
  static VehicleParams FromGeometry(double mass, double side_length,
                                    double moment_arm);

  /// Throws std::invalid_argument unless every field is finite and > 0.
  void Validate() const;
};

enum class ThrusterConfigKind { kX, kH, kOffsetH };

/// Accepts "X", "H", "OffsetH" (case-insensitive; "offset-h"/"offset_h" too).
ThrusterConfigKind ParseThrusterConfigKind(std::string_view name);
std::string_view ToString(ThrusterConfigKind kind);

/// Maps nonnegative thrusts to the body wrench.
///
/// X:       canted at 45 degrees, Fx = (T2+T3-T1-T4)/sqrt2,
///          Fy = (T1+T2-T3-T4)/sqrt2, Mz = d (T1+T3-T2-T4).
/// H:       thrust lines parallel to the body x axis at lateral offsets +/-d;
///          T1,T2 push +x, T3,T4 push -x. No lateral force is possible.
/// OffsetH: H with T3,T4 rotated 90 degrees to push +y at x offsets +/-d;
///          T1 pushes +x at y=+d, T2 pushes -x at y=-d (a couple pair).
AllocationMatrix allocation_matrix(ThrusterConfigKind kind,
                                   const VehicleParams& params);

struct ThrusterConfig {
  ThrusterConfigKind kind = ThrusterConfigKind::kX;
  AllocationMatrix allocation = AllocationMatrix::Zero();

  static ThrusterConfig Make(ThrusterConfigKind kind,
                             const VehicleParams& params);
};

struct WrenchFeasibility {
  bool pure_fx = false;
  bool pure_fy = false;
  bool pure_mz = false;
};

/// For each wrench axis, whether some T >= 0, T != 0 produces a wrench with
/// only that component nonzero. Decided exactly from the extreme rays of the
/// cone {T >= 0 : other two rows of the allocation times T = 0}.
WrenchFeasibility wrench_feasibility(ThrusterConfigKind kind,
                                     const VehicleParams& params);

/// Rigid-body model used by propagation, linearization and simulation.
struct Vehicle {
  VehicleParams params = VehicleParams::Defaults();
  ThrusterConfig config =
      ThrusterConfig::Make(ThrusterConfigKind::kX, VehicleParams::Defaults());
  /// Off: position rates equal body velocities (x' = u, y' = v).
  /// On: x' = u cos(psi) - v sin(psi), y' = u sin(psi) + v cos(psi).
  bool inertial_kinematics = false;

  static Vehicle Make(const VehicleParams& params,
                      ThrusterConfigKind kind = ThrusterConfigKind::kX,
                      bool inertial_kinematics = false);
};

/// X configuration with body-frame kinematics.
StateVector eom_derivative(const StateVector& state, const ThrustVector& thrust,
                           const VehicleParams& params);

/// General form; `disturbance` is an extra body wrench added to the thrust
/// wrench. Throws std::invalid_argument on non-finite input.
StateVector eom_derivative(const Vehicle& vehicle, const StateVector& state,
                           const ThrustVector& thrust,
                           const Wrench& disturbance = Wrench::Zero());

struct Trajectory {
  std::vector<double> times;
  std::vector<StateVector> states;
  /// inputs[k] is the thrust applied from times[k] on.
  std::vector<ThrustVector> inputs;

  std::size_t size() const { return times.size(); }
  /// Throws std::logic_error if times are not strictly increasing or the
  /// sequence lengths disagree.
  void Validate() const;
};

using ThrustSchedule = std::function<ThrustVector(double)>;

/// One classical RK4 step of eom_derivative with the schedule sampled at
/// t, t + h/2 and t + h.
StateVector rk4_step(const Vehicle& vehicle, const StateVector& state,
                     const ThrustSchedule& schedule, double t, double step);

/// Fixed-step RK4 propagation. The number of steps is round(duration/step),
/// so the final time is within half a step of `duration`.
/// Throws std::invalid_argument for a bad step/duration or if the schedule
/// returns a negative or non-finite thrust.
Trajectory propagate(const StateVector& initial_state,
                     const ThrustSchedule& schedule, double step,
                     double duration, const Vehicle& vehicle);
Trajectory propagate(const StateVector& initial_state,
                     const ThrustSchedule& schedule, double step,
                     double duration, const VehicleParams& params);

/// Jacobian pair of the nonlinear model about an operating point.
struct LinearModel {
  Eigen::Matrix<double, 6, 6> A = Eigen::Matrix<double, 6, 6>::Zero();
  Eigen::Matrix<double, 6, 4> B = Eigen::Matrix<double, 6, 4>::Zero();
  StateVector operating_point = StateVector::Zero();
};

/// A = df/dx, B = df/dT. The dynamics are affine in T, so the operating
/// thrust does not enter.
LinearModel linearize(const Vehicle& vehicle, const StateVector& operating_point);
LinearModel linearize(const VehicleParams& params,
                      const StateVector& operating_point);

}  // namespace pgnc
