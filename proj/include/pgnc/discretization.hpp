#pragma once

#include <string>
#include <vector>

#include <Eigen/Core>

#include "pgnc/vehicle_model.hpp"

namespace pgnc {

/// Continuous model with optional actuator-lag and integral states stacked
/// below the plant states, in that order.
struct AugmentedContinuousModel {
  Eigen::MatrixXd A;
  Eigen::MatrixXd B;
  std::vector<std::string> labels;
  int plant_states = 0;
  int actuator_states = 0;
  int integral_states = 0;

  int dimension() const { return static_cast<int>(A.rows()); }
};

/// x(k+1) = G x(k) + H u(k) [+ E y_m(k) when integral states are present].
struct DiscreteModel {
  Eigen::MatrixXd G;
  Eigen::MatrixXd H;
  /// Exogenous input map for the commanded output y_m; zero columns when
  /// there are no integral states.
  Eigen::MatrixXd E;
  double sample_time = 0.0;
  std::vector<std::string> state_labels;

  int dimension() const { return static_cast<int>(G.rows()); }
  /// Throws std::invalid_argument on inconsistent dimensions or T <= 0.
  void Validate() const;
};

/// exp(M), scaling-and-squaring Pade (Eigen's MatrixFunctions).
Eigen::MatrixXd matrix_exponential(const Eigen::MatrixXd& M);

/// G = exp(A T), H = integral_0^T exp(A s) B ds, both read off the
/// exponential of [[A, B], [0, 0]] T.
DiscreteModel zoh_discretize(const Eigen::MatrixXd& A, const Eigen::MatrixXd& B,
                             double sample_time,
                             std::vector<std::string> labels = {});

/// Labels x, y, psi, u, v, r.
std::vector<std::string> plant_state_labels();

/// The bare 6-state plant in augmented-model form.
AugmentedContinuousModel plant_model(const LinearModel& model);

/// Adds actual thrust as four states with T' = (Tc - T) / tau; the inputs
/// become the commanded thrusts. Throws std::invalid_argument for tau <= 0.
AugmentedContinuousModel augment_actuator_lag(const LinearModel& model,
                                              double tau);

/// Continuous integral states q' = C x - y_m (y_m treated as exogenous).
/// C has one row per integrated output and model.dimension() columns.
AugmentedContinuousModel augment_integral_continuous(
    const AugmentedContinuousModel& model, const Eigen::MatrixXd& C);

/// Discrete integral states with forward-Euler accumulation
/// q(k+1) = q(k) + T (C x(k) - y_m(k)).
DiscreteModel augment_integrator(const DiscreteModel& model,
                                 const Eigen::MatrixXd& C);

/// Selector for (x, y, psi) out of a model whose first six states are the
/// planar state.
Eigen::MatrixXd pose_output_matrix(int dimension);

}  // namespace pgnc
