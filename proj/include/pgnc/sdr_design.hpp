#pragma once

#include <Eigen/Core>

#include "pgnc/discretization.hpp"

namespace pgnc {

struct WeightMatrices {
  Eigen::MatrixXd Q;
  Eigen::MatrixXd R;
};

/// Bryson's rule: Q = diag(1/dev^2), R = diag(1/input^2).
/// Throws std::invalid_argument for a non-positive bound.
WeightMatrices bryson_weights(const Eigen::VectorXd& max_state_deviation,
                              const Eigen::VectorXd& max_input);

/// Continuous quadratic cost over one hold interval, expressed in terms of
/// the sampled state and held input:
///   Q1 = int_0^T zeta' Q zeta,  M1 = int_0^T zeta' Q eta,
///   R1 = int_0^T (eta' Q eta + R),
/// with zeta(t) = exp(A t) and eta(t) = int_0^t exp(A s) B ds.
struct SdrCostMatrices {
  Eigen::MatrixXd Q1;
  Eigen::MatrixXd M1;
  Eigen::MatrixXd R1;

  /// Q1 - M1 R1^-1 M1'.
  Eigen::MatrixXd q_hat() const;
};

/// Gauss-Legendre quadrature of the hold-interval integrals.
SdrCostMatrices sdr_cost_matrices(const Eigen::MatrixXd& A,
                                  const Eigen::MatrixXd& B,
                                  const Eigen::MatrixXd& Q,
                                  const Eigen::MatrixXd& R, double sample_time,
                                  int quadrature_order = 64);

struct DlqrOptions {
  int max_iterations = 100000;
  /// Stop when max|P(k+1) - P(k)| < tolerance * max(1, max|P(k+1)|).
  double tolerance = 1e-12;
};

struct DlqrResult {
  Eigen::MatrixXd K;
  Eigen::MatrixXd P;
  int iterations = 0;
};

/// Steady-state discrete LQR from the Riccati difference equation started at
/// P = Q. K = (R + H'PH)^-1 H'PG. Throws SynthesisError when the iteration
/// does not settle within the cap.
DlqrResult dlqr(const Eigen::MatrixXd& G, const Eigen::MatrixXd& H,
                const Eigen::MatrixXd& Q, const Eigen::MatrixXd& R,
                const DlqrOptions& options = {});

/// Max-abs entry of P - G'PG + G'PH (R + H'PH)^-1 H'PG - Q.
double dare_residual(const Eigen::MatrixXd& G, const Eigen::MatrixXd& H,
                     const Eigen::MatrixXd& Q, const Eigen::MatrixXd& R,
                     const Eigen::MatrixXd& P);

double spectral_radius(const Eigen::MatrixXd& M);

struct GainSet {
  /// u(k) = feedforward * y_m - K x(k). K = [K1 K2] when integral states
  /// are present (K1 acts on the first plant_states columns).
  Eigen::MatrixXd K;
  /// pi22 + K1 pi12; zero columns for a pure regulator.
  Eigen::MatrixXd feedforward;
  double sample_time = 0.0;
  int plant_states = 0;

  Eigen::MatrixXd K1() const { return K.leftCols(plant_states); }
  Eigen::MatrixXd K2() const {
    return K.rightCols(K.cols() - plant_states);
  }
};

struct SdrDesign {
  GainSet gains;
  DiscreteModel discrete;
  SdrCostMatrices cost;
  /// Riccati solution of the transformed (G_hat, H, Q_hat, R1) problem.
  Eigen::MatrixXd P;
  double closed_loop_spectral_radius = 0.0;
  int riccati_iterations = 0;
};

/// Sampled-data regulator: ZOH model, hold-interval cost matrices, the
/// cross-term-free transformation G_hat = G - H R1^-1 M1', then DLQR.
/// The returned K already includes R1^-1 M1', so u(k) = -K x(k).
SdrDesign sdr_gain(const Eigen::MatrixXd& A, const Eigen::MatrixXd& B,
                   const Eigen::MatrixXd& Q, const Eigen::MatrixXd& R,
                   double sample_time, const DlqrOptions& options = {});

/// Steady-state maps x_ss = pi12 y_m, u_ss = pi22 y_m.
struct QuadPartition {
  Eigen::MatrixXd pi12;
  Eigen::MatrixXd pi22;
};

/// Solves [[Gc - I, Hc], [C, D]] [pi12; pi22] = [0; I]. A wide system (more
/// inputs than outputs) takes the minimum-norm solution. Throws
/// SynthesisError when the matrix lacks full row rank.
QuadPartition nzsp_quad_partition(const Eigen::MatrixXd& Gc,
                                  const Eigen::MatrixXd& Hc,
                                  const Eigen::MatrixXd& C,
                                  const Eigen::MatrixXd& D);

/// Builds the PI-NZSP gain set from an integral-augmented gain K.
GainSet make_pi_nzsp_gains(const Eigen::MatrixXd& K, int plant_states,
                           const QuadPartition& partition, double sample_time);

/// (pi22 + K1 pi12) y_m - K x_aug.
Eigen::VectorXd pi_nzsp_control(const Eigen::VectorXd& x_aug,
                                const Eigen::VectorXd& ym,
                                const GainSet& gains);

}  // namespace pgnc
