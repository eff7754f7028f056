#include "pgnc/sdr_design.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>
#include <Eigen/LU>
#include <Eigen/QR>
#include <boost/math/special_functions/legendre.hpp>

#include "pgnc/error.hpp"

namespace pgnc {
namespace {

Eigen::MatrixXd Symmetrize(const Eigen::MatrixXd& M) {
  return 0.5 * (M + M.transpose());
}

struct GaussRule {
  std::vector<double> nodes;    // on [-1, 1]
  std::vector<double> weights;
};

GaussRule GaussLegendre(int order) {
  if (order < 1) throw std::invalid_argument("quadrature order must be >= 1");
  GaussRule rule;
  // Nonnegative zeros only; mirror them.
  const std::vector<double> zeros = boost::math::legendre_p_zeros<double>(order);
  for (double x : zeros) {
    const double dp = boost::math::legendre_p_prime(order, x);
    const double w = 2.0 / ((1.0 - x * x) * dp * dp);
    if (x == 0.0) {
      rule.nodes.push_back(0.0);
      rule.weights.push_back(w);
    } else {
      rule.nodes.push_back(x);
      rule.weights.push_back(w);
      rule.nodes.push_back(-x);
      rule.weights.push_back(w);
    }
  }
  return rule;
}

// Newton (Hewer) steps from a converged fixed point: each solves the
// closed-loop Lyapunov equation P = Acl' P Acl + Q + K' R K exactly, which
// removes the slow geometric tail left by the fixed-point stop rule. A step
// is kept only if it lowers the DARE residual.
Eigen::MatrixXd HewerRefine(const Eigen::MatrixXd& G, const Eigen::MatrixXd& H,
                            const Eigen::MatrixXd& Q, const Eigen::MatrixXd& R,
                            Eigen::MatrixXd P) {
  const Eigen::Index n = G.rows();
  double best = dare_residual(G, H, Q, R, P);
  for (int step = 0; step < 3; ++step) {
    const Eigen::MatrixXd K = (R + H.transpose() * P * H).ldlt().solve(H.transpose() * P * G);
    const Eigen::MatrixXd Acl = G - H * K;
    const Eigen::MatrixXd rhs = Q + K.transpose() * R * K;
    Eigen::MatrixXd L = Eigen::MatrixXd::Identity(n * n, n * n);
    for (Eigen::Index i = 0; i < n; ++i) {
      for (Eigen::Index j = 0; j < n; ++j) {
        L.block(i * n, j * n, n, n) -= Acl(j, i) * Acl.transpose();
      }
    }
    const Eigen::VectorXd vec = L.partialPivLu().solve(rhs.reshaped());
    const Eigen::MatrixXd candidate = Symmetrize(vec.reshaped(n, n));
    if (!candidate.allFinite()) break;
    const double residual = dare_residual(G, H, Q, R, candidate);
    if (!(residual < best)) break;
    best = residual;
    P = candidate;
  }
  return P;
}

}  // namespace

WeightMatrices bryson_weights(const Eigen::VectorXd& max_state_deviation,
                              const Eigen::VectorXd& max_input) {
  const auto check = [](const Eigen::VectorXd& v, const char* what) {
    for (Eigen::Index i = 0; i < v.size(); ++i) {
      if (!(v(i) > 0.0) || !std::isfinite(v(i))) {
        throw std::invalid_argument(std::string("bryson_weights: ") + what +
                                    " bound " + std::to_string(i) +
                                    " must be finite and > 0");
      }
    }
  };
  check(max_state_deviation, "state");
  check(max_input, "input");
  WeightMatrices w;
  w.Q = max_state_deviation.array().square().inverse().matrix().asDiagonal();
  w.R = max_input.array().square().inverse().matrix().asDiagonal();
  return w;
}

Eigen::MatrixXd SdrCostMatrices::q_hat() const {
  return Symmetrize(Q1 - M1 * R1.ldlt().solve(M1.transpose()));
}

SdrCostMatrices sdr_cost_matrices(const Eigen::MatrixXd& A,
                                  const Eigen::MatrixXd& B,
                                  const Eigen::MatrixXd& Q,
                                  const Eigen::MatrixXd& R, double sample_time,
                                  int quadrature_order) {
  if (!(sample_time > 0.0)) {
    throw std::invalid_argument("sdr_cost_matrices: sample time must be > 0");
  }
  const Eigen::Index n = A.rows();
  const Eigen::Index m = B.cols();
  if (A.cols() != n || B.rows() != n || Q.rows() != n || Q.cols() != n ||
      R.rows() != m || R.cols() != m) {
    throw std::invalid_argument("sdr_cost_matrices: dimension mismatch");
  }

  Eigen::MatrixXd block = Eigen::MatrixXd::Zero(n + m, n + m);
  block.topLeftCorner(n, n) = A;
  block.topRightCorner(n, m) = B;

  SdrCostMatrices out;
  out.Q1 = Eigen::MatrixXd::Zero(n, n);
  out.M1 = Eigen::MatrixXd::Zero(n, m);
  out.R1 = R * sample_time;

  const GaussRule rule = GaussLegendre(quadrature_order);
  const double half = 0.5 * sample_time;
  for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
    const double t = half * (rule.nodes[i] + 1.0);
    const double w = half * rule.weights[i];
    const Eigen::MatrixXd phi = matrix_exponential(block * t);
    const Eigen::MatrixXd zeta = phi.topLeftCorner(n, n);
    const Eigen::MatrixXd eta = phi.topRightCorner(n, m);
    const Eigen::MatrixXd Qzeta = Q * zeta;
    out.Q1 += w * zeta.transpose() * Qzeta;
    out.M1 += w * zeta.transpose() * Q * eta;
    out.R1 += w * eta.transpose() * Q * eta;
  }
  out.Q1 = Symmetrize(out.Q1);
  out.R1 = Symmetrize(out.R1);
  return out;
}

double dare_residual(const Eigen::MatrixXd& G, const Eigen::MatrixXd& H,
                     const Eigen::MatrixXd& Q, const Eigen::MatrixXd& R,
                     const Eigen::MatrixXd& P) {
  const Eigen::MatrixXd HtPG = H.transpose() * P * G;
  const Eigen::MatrixXd S = R + H.transpose() * P * H;
  const Eigen::MatrixXd res =
      P - G.transpose() * P * G + HtPG.transpose() * S.ldlt().solve(HtPG) - Q;
  return res.cwiseAbs().maxCoeff();
}

DlqrResult dlqr(const Eigen::MatrixXd& G, const Eigen::MatrixXd& H,
                const Eigen::MatrixXd& Q, const Eigen::MatrixXd& R,
                const DlqrOptions& options) {
  const Eigen::Index n = G.rows();
  const Eigen::Index m = H.cols();
  if (G.cols() != n || H.rows() != n || Q.rows() != n || Q.cols() != n ||
      R.rows() != m || R.cols() != m) {
    throw std::invalid_argument("dlqr: dimension mismatch");
  }

  Eigen::MatrixXd P = Symmetrize(Q);
  const Eigen::MatrixXd Gt = G.transpose();
  for (int it = 1; it <= options.max_iterations; ++it) {
    const Eigen::MatrixXd HtPG = H.transpose() * P * G;
    const Eigen::MatrixXd S = R + H.transpose() * P * H;
    const Eigen::MatrixXd next =
        Symmetrize(Q + Gt * P * G - HtPG.transpose() * S.ldlt().solve(HtPG));
    if (!next.allFinite()) {
      throw SynthesisError("dlqr: Riccati iteration diverged (non-finite P)");
    }
    const double change = (next - P).cwiseAbs().maxCoeff();
    const double scale = std::max(1.0, next.cwiseAbs().maxCoeff());
    P = next;
    if (change < options.tolerance * scale) {
      DlqrResult result;
      result.P = HewerRefine(G, H, Q, R, P);
      result.K = (R + H.transpose() * result.P * H).ldlt().solve(H.transpose() * result.P * G);
      result.iterations = it;
      return result;
    }
  }
  throw SynthesisError("dlqr: Riccati iteration did not converge within " +
                       std::to_string(options.max_iterations) +
                       " iterations (is the model stabilizable?)");
}

double spectral_radius(const Eigen::MatrixXd& M) {
  Eigen::EigenSolver<Eigen::MatrixXd> solver(M, false);
  return solver.eigenvalues().cwiseAbs().maxCoeff();
}

SdrDesign sdr_gain(const Eigen::MatrixXd& A, const Eigen::MatrixXd& B,
                   const Eigen::MatrixXd& Q, const Eigen::MatrixXd& R,
                   double sample_time, const DlqrOptions& options) {
  SdrDesign design;
  design.discrete = zoh_discretize(A, B, sample_time);
  design.cost = sdr_cost_matrices(A, B, Q, R, sample_time);

  const Eigen::MatrixXd& G = design.discrete.G;
  const Eigen::MatrixXd& H = design.discrete.H;
  const auto R1 = design.cost.R1.ldlt();
  if (R1.info() != Eigen::Success || !R1.isPositive()) {
    throw SynthesisError("sdr_gain: R1 is not positive definite");
  }
  const Eigen::MatrixXd cross = R1.solve(design.cost.M1.transpose());  // R1^-1 M1'
  const Eigen::MatrixXd G_hat = G - H * cross;
  const Eigen::MatrixXd Q_hat = design.cost.q_hat();

  const DlqrResult lqr = dlqr(G_hat, H, Q_hat, design.cost.R1, options);
  design.P = lqr.P;
  design.riccati_iterations = lqr.iterations;
  design.gains.K = lqr.K + cross;
  design.gains.feedforward = Eigen::MatrixXd::Zero(B.cols(), 0);
  design.gains.sample_time = sample_time;
  design.gains.plant_states = static_cast<int>(A.rows());
  design.closed_loop_spectral_radius = spectral_radius(G - H * design.gains.K);
  return design;
}

QuadPartition nzsp_quad_partition(const Eigen::MatrixXd& Gc,
                                  const Eigen::MatrixXd& Hc,
                                  const Eigen::MatrixXd& C,
                                  const Eigen::MatrixXd& D) {
  const Eigen::Index n = Gc.rows();
  const Eigen::Index m = Hc.cols();
  const Eigen::Index p = C.rows();
  if (Gc.cols() != n || Hc.rows() != n || C.cols() != n || D.rows() != p ||
      D.cols() != m) {
    throw std::invalid_argument("nzsp_quad_partition: dimension mismatch");
  }
  Eigen::MatrixXd M(n + p, n + m);
  M.topLeftCorner(n, n) = Gc - Eigen::MatrixXd::Identity(n, n);
  M.topRightCorner(n, m) = Hc;
  M.bottomLeftCorner(p, n) = C;
  M.bottomRightCorner(p, m) = D;
  Eigen::MatrixXd rhs = Eigen::MatrixXd::Zero(n + p, p);
  rhs.bottomRows(p).setIdentity();

  const auto infeasible = [] {
    return SynthesisError(
        "nzsp_quad_partition: quad-partition matrix [[G-I, H], [C, D]] is "
        "rank deficient; set-point tracking is infeasible for this C, D");
  };
  if (p > m) throw infeasible();

  Eigen::MatrixXd sol;
  if (n + p == n + m) {
    Eigen::FullPivLU<Eigen::MatrixXd> lu(M);
    if (!lu.isInvertible()) throw infeasible();
    sol = lu.solve(rhs);
  } else {
    Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXd> cod(M);
    if (cod.rank() < n + p) throw infeasible();
    sol = cod.solve(rhs);
  }
  const double residual = (M * sol - rhs).cwiseAbs().maxCoeff();
  if (!(residual < 1e-9)) throw infeasible();

  QuadPartition out;
  out.pi12 = sol.topRows(n);
  out.pi22 = sol.bottomRows(m);
  return out;
}

GainSet make_pi_nzsp_gains(const Eigen::MatrixXd& K, int plant_states,
                           const QuadPartition& partition, double sample_time) {
  if (plant_states <= 0 || K.cols() < plant_states ||
      partition.pi12.rows() != plant_states ||
      partition.pi22.rows() != K.rows()) {
    throw std::invalid_argument("make_pi_nzsp_gains: dimension mismatch");
  }
  GainSet gains;
  gains.K = K;
  gains.plant_states = plant_states;
  gains.sample_time = sample_time;
  gains.feedforward = partition.pi22 + gains.K1() * partition.pi12;
  return gains;
}

Eigen::VectorXd pi_nzsp_control(const Eigen::VectorXd& x_aug,
                                const Eigen::VectorXd& ym,
                                const GainSet& gains) {
  if (x_aug.size() != gains.K.cols() ||
      ym.size() != gains.feedforward.cols() ||
      gains.feedforward.rows() != gains.K.rows()) {
    throw std::invalid_argument("pi_nzsp_control: dimension mismatch");
  }
  return gains.feedforward * ym - gains.K * x_aug;
}

}  // namespace pgnc
