#pragma once

#include <limits>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "pgnc/vehicle_model.hpp"

namespace pgnc {

/// Costates paired with (x, y, psi, u, v, r).
using CostateVector = Eigen::Matrix<double, 6, 1>;
/// Stacked (state, costate).
using StateCostateVector = Eigen::Matrix<double, 12, 1>;

/// How thrust is recovered from the costates.
struct InputMode {
  bool constrained = false;
  double t_max = std::numeric_limits<double>::infinity();
  /// Softplus sharpness [1/N] for a smooth clamp; 0 selects the hard clamp.
  double smoothing = 0.0;

  static InputMode Unconstrained() { return {}; }
  static InputMode Constrained(double t_max, double smoothing = 0.0) {
    return {true, t_max, smoothing};
  }
};

/// H = 1/2 |T|^2 + lambda' f(x, T) for the X configuration with body-frame
/// kinematics.
double hamiltonian(const StateVector& state, const CostateVector& costate,
                   const ThrustVector& thrust, const VehicleParams& params);
double hamiltonian(const Vehicle& vehicle, const StateVector& state,
                   const CostateVector& costate, const ThrustVector& thrust);

/// dH/dT = T + B_T' lambda, where B_T = df/dT.
ThrustVector hamiltonian_thrust_gradient(const Vehicle& vehicle,
                                         const CostateVector& costate,
                                         const ThrustVector& thrust);

/// Stationary point of H in T: T* = -B_T' lambda. For the X configuration
///   T1* = (l4 - l5)/(sqrt2 m) - (d/Izz) l6
///   T2* = (-l4 - l5)/(sqrt2 m) + (d/Izz) l6
///   T3* = (l5 - l4)/(sqrt2 m) - (d/Izz) l6
///   T4* = (l4 + l5)/(sqrt2 m) + (d/Izz) l6
/// Components may be negative.
ThrustVector unconstrained_optimal_inputs(const CostateVector& costate,
                                          const VehicleParams& params);
ThrustVector unconstrained_optimal_inputs(const Vehicle& vehicle,
                                          const CostateVector& costate);

/// Componentwise clamp to [0, t_max]. Throws std::invalid_argument for
/// t_max <= 0.
ThrustVector clamp_inputs(const ThrustVector& t_star, double t_max);

/// T*(lambda) followed by the mode's clamp.
ThrustVector optimal_inputs(const Vehicle& vehicle, const CostateVector& costate,
                            const InputMode& mode);

/// (x', lambda') with x' = f(x, T(lambda)) and lambda' = -df/dx' lambda:
///   l1' = l2' = l3' = 0, l4' = -l1 + l5 r, l5' = -l2 - l4 r,
///   l6' = -l3 - l4 v + l5 u.
StateCostateVector state_costate_derivative(const StateVector& state,
                                            const CostateVector& costate,
                                            const VehicleParams& params,
                                            const InputMode& mode);
StateCostateVector state_costate_derivative(const Vehicle& vehicle,
                                            const StateCostateVector& z,
                                            const InputMode& mode);

/// Jacobian of state_costate_derivative (generalized at clamp kinks).
Eigen::Matrix<double, 12, 12> state_costate_jacobian(
    const Vehicle& vehicle, const StateCostateVector& z, const InputMode& mode);

struct TpbvpProblem {
  StateVector x0 = StateVector::Zero();
  StateVector xf = StateVector::Zero();
  double tf = 10.0;        // s
  double t_max = 0.025;    // N
  int mesh_points = 101;
  VehicleParams params = VehicleParams::Defaults();
  bool constrained = true;

  /// Throws std::invalid_argument on tf <= 0, t_max <= 0, mesh_points < 10.
  void Validate() const;
  InputMode input_mode(double smoothing = 0.0) const;
};

struct MeshGuess {
  std::vector<double> times;
  Eigen::MatrixXd states;    // N x 6
  Eigen::MatrixXd costates;  // N x 6
};

/// Positions/orientation linear from x0 to xf, velocities constant at
/// (delta position)/tf, l1..l3 = 1e-4, l4..l6 = 1e-4 + 1e-6 t.
MeshGuess initial_guess(const TpbvpProblem& problem);

struct TpbvpOptions {
  /// Required max collocation defect and max boundary residual.
  double tolerance = 1e-8;
  int max_newton_iterations = 100;
  int max_halvings = 30;
  /// Residual of the collocation cubic at the quarter points of each
  /// interval; one mesh doubling is allowed when it exceeds this.
  double interpolation_tolerance = 1e-6;
  bool allow_mesh_doubling = true;
  /// Softplus sharpness used in a first smoothed solve (0 = off). The result
  /// is always re-solved with the hard clamp.
  double smoothing = 0.0;
};

struct TpbvpSolution {
  std::vector<double> times;
  Eigen::MatrixXd states;       // N x 6
  Eigen::MatrixXd costates;     // N x 6
  Eigen::MatrixXd inputs;       // N x 4
  Eigen::MatrixXd derivatives;  // N x 12, collocation slopes at the nodes
  double max_bc_residual = 0.0;
  double max_defect = 0.0;
  double max_interpolation_residual = 0.0;
  int newton_iterations = 0;
  int mesh_doublings = 0;
  /// "direct", "unconstrained-continuation" or "smoothing-continuation".
  std::string strategy = "direct";
  Vehicle vehicle;
  InputMode mode;

  std::size_t size() const { return times.size(); }
  StateVector state_at(double t) const;
  CostateVector costate_at(double t) const;
  /// T*(lambda(t)) from the collocation cubic, then clamped per the mode.
  ThrustVector input_at(double t) const;
  /// H(x, lambda, T) at node k.
  double hamiltonian_at(std::size_t k) const;
};

/// Fixed-end-state, fixed-final-time TPBVP by 3-point Lobatto IIIA
/// collocation and damped Newton. Uses initial_guess() when `guess` is null.
/// Throws SolverError when Newton stalls or the Jacobian is singular.
TpbvpSolution solve_tpbvp(const TpbvpProblem& problem,
                          const TpbvpOptions& options = {},
                          const MeshGuess* guess = nullptr);

struct BackpropagationReport {
  double max_deviation = 0.0;           // all six states, max-norm
  double max_position_deviation = 0.0;  // x and y only
};

/// Re-integrates the states with RK4 (about `step` seconds, aligned to the
/// mesh) using input_at(t), and compares with the collocation states at the
/// mesh nodes.
BackpropagationReport verify_backpropagation(const TpbvpSolution& solution,
                                             const TpbvpProblem& problem,
                                             double step = 1e-3);

/// Trapezoidal integral of 1/2 |T|^2 over the mesh.
double trajectory_cost(const TpbvpSolution& solution);

/// Fraction of (node, thruster) samples where T* lies outside [0, t_max].
double clamp_activation_fraction(const TpbvpSolution& solution);

/// Central-difference Hessian of H with respect to T.
Eigen::Matrix4d hamiltonian_input_hessian(const Vehicle& vehicle,
                                          const StateVector& state,
                                          const CostateVector& costate,
                                          const ThrustVector& thrust,
                                          double h = 1e-3);

/// H_TT is the identity for this cost, so the check always holds; evaluated
/// numerically at a few fixed sample points.
bool legendre_clebsch_check(const VehicleParams& params);

}  // namespace pgnc
