#include "pgnc/discretization.hpp"

#include <cmath>
#include <stdexcept>

#include <unsupported/Eigen/MatrixFunctions>

namespace pgnc {

void DiscreteModel::Validate() const {
  if (!(sample_time > 0.0)) {
    throw std::invalid_argument("discrete model: sample_time must be > 0");
  }
  if (G.rows() != G.cols()) {
    throw std::invalid_argument("discrete model: G must be square");
  }
  if (H.rows() != G.rows()) {
    throw std::invalid_argument("discrete model: H rows must match G");
  }
  if (E.size() != 0 && E.rows() != G.rows()) {
    throw std::invalid_argument("discrete model: E rows must match G");
  }
}

Eigen::MatrixXd matrix_exponential(const Eigen::MatrixXd& M) {
  if (M.rows() != M.cols()) {
    throw std::invalid_argument("matrix_exponential: matrix must be square");
  }
  Eigen::MatrixXd out = M.exp();
  return out;
}

DiscreteModel zoh_discretize(const Eigen::MatrixXd& A, const Eigen::MatrixXd& B,
                             double sample_time,
                             std::vector<std::string> labels) {
  if (!(sample_time > 0.0) || !std::isfinite(sample_time)) {
    throw std::invalid_argument("zoh_discretize: sample time must be > 0");
  }
  if (A.rows() != A.cols() || B.rows() != A.rows()) {
    throw std::invalid_argument("zoh_discretize: dimension mismatch");
  }
  if (!A.allFinite() || !B.allFinite()) {
    throw std::invalid_argument("zoh_discretize: non-finite entries");
  }
  const Eigen::Index n = A.rows();
  const Eigen::Index m = B.cols();

  // exp([[A, B], [0, 0]] T) = [[G, H], [0, I]]
  Eigen::MatrixXd block = Eigen::MatrixXd::Zero(n + m, n + m);
  block.topLeftCorner(n, n) = A;
  block.topRightCorner(n, m) = B;
  const Eigen::MatrixXd phi = matrix_exponential(block * sample_time);

  DiscreteModel out;
  out.G = phi.topLeftCorner(n, n);
  out.H = phi.topRightCorner(n, m);
  out.E = Eigen::MatrixXd::Zero(n, 0);
  out.sample_time = sample_time;
  out.state_labels = std::move(labels);
  if (!out.G.allFinite() || !out.H.allFinite()) {
    throw std::invalid_argument("zoh_discretize: non-finite result");
  }
  return out;
}

std::vector<std::string> plant_state_labels() {
  return {"x", "y", "psi", "u", "v", "r"};
}

AugmentedContinuousModel plant_model(const LinearModel& model) {
  AugmentedContinuousModel out;
  out.A = model.A;
  out.B = model.B;
  out.labels = plant_state_labels();
  out.plant_states = 6;
  return out;
}

AugmentedContinuousModel augment_actuator_lag(const LinearModel& model,
                                              double tau) {
  if (!(tau > 0.0) || !std::isfinite(tau)) {
    throw std::invalid_argument("augment_actuator_lag: tau must be > 0");
  }
  constexpr int n = 6;
  constexpr int m = 4;
  AugmentedContinuousModel out;
  out.A = Eigen::MatrixXd::Zero(n + m, n + m);
  out.B = Eigen::MatrixXd::Zero(n + m, m);
  out.A.topLeftCorner(n, n) = model.A;
  out.A.topRightCorner(n, m) = model.B;
  out.A.bottomRightCorner(m, m) = -Eigen::MatrixXd::Identity(m, m) / tau;
  out.B.bottomRows(m) = Eigen::MatrixXd::Identity(m, m) / tau;
  out.labels = plant_state_labels();
  for (int i = 1; i <= m; ++i) out.labels.push_back("T" + std::to_string(i) + "a");
  out.plant_states = n;
  out.actuator_states = m;
  return out;
}

AugmentedContinuousModel augment_integral_continuous(
    const AugmentedContinuousModel& model, const Eigen::MatrixXd& C) {
  const Eigen::Index n = model.A.rows();
  const Eigen::Index m = model.B.cols();
  if (C.cols() != n || C.rows() == 0) {
    throw std::invalid_argument(
        "augment_integral_continuous: C must have one column per state");
  }
  const Eigen::Index p = C.rows();
  AugmentedContinuousModel out = model;
  out.A = Eigen::MatrixXd::Zero(n + p, n + p);
  out.B = Eigen::MatrixXd::Zero(n + p, m);
  out.A.topLeftCorner(n, n) = model.A;
  out.A.bottomLeftCorner(p, n) = C;
  out.B.topRows(n) = model.B;
  for (Eigen::Index i = 0; i < p; ++i) out.labels.push_back("q" + std::to_string(i + 1));
  out.integral_states = model.integral_states + static_cast<int>(p);
  return out;
}

DiscreteModel augment_integrator(const DiscreteModel& model,
                                 const Eigen::MatrixXd& C) {
  model.Validate();
  const Eigen::Index n = model.G.rows();
  const Eigen::Index m = model.H.cols();
  if (C.cols() != n || C.rows() == 0) {
    throw std::invalid_argument(
        "augment_integrator: C must have one column per state");
  }
  const Eigen::Index p = C.rows();
  const double T = model.sample_time;

  DiscreteModel out;
  out.sample_time = T;
  out.G = Eigen::MatrixXd::Zero(n + p, n + p);
  out.G.topLeftCorner(n, n) = model.G;
  out.G.bottomLeftCorner(p, n) = T * C;
  out.G.bottomRightCorner(p, p).setIdentity();
  out.H = Eigen::MatrixXd::Zero(n + p, m);
  out.H.topRows(n) = model.H;
  const Eigen::Index prior = model.E.cols();
  out.E = Eigen::MatrixXd::Zero(n + p, prior + p);
  if (prior > 0) out.E.topLeftCorner(n, prior) = model.E;
  out.E.bottomRightCorner(p, p) = -T * Eigen::MatrixXd::Identity(p, p);
  out.state_labels = model.state_labels;
  for (Eigen::Index i = 0; i < p; ++i) {
    out.state_labels.push_back("q" + std::to_string(i + 1));
  }
  return out;
}

Eigen::MatrixXd pose_output_matrix(int dimension) {
  if (dimension < 6) {
    throw std::invalid_argument("pose_output_matrix: need at least 6 states");
  }
  Eigen::MatrixXd C = Eigen::MatrixXd::Zero(3, dimension);
  C(0, kX) = 1.0;
  C(1, kY) = 1.0;
  C(2, kPsi) = 1.0;
  return C;
}

}  // namespace pgnc
