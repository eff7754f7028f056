#include "pgnc/sdr_design.hpp"

#include <cmath>
#include <random>

#include <Eigen/Eigenvalues>
#include <gtest/gtest.h>

#include "oracles.hpp"
#include "pgnc/error.hpp"

namespace pgnc {
namespace {

Eigen::MatrixXd Scalar(double v) { return Eigen::MatrixXd::Constant(1, 1, v); }

struct DoubleIntegrator {
  Eigen::MatrixXd A = (Eigen::MatrixXd(2, 2) << 0, 1, 0, 0).finished();
  Eigen::MatrixXd B = (Eigen::MatrixXd(2, 1) << 0, 1).finished();
};

TEST(BrysonWeights, InverseSquares) {
  const WeightMatrices w =
      bryson_weights(Eigen::Vector2d(0.1, 0.5), Eigen::VectorXd::Constant(1, 0.2));
  EXPECT_NEAR(w.Q(0, 0), 100.0, 1e-12);
  EXPECT_NEAR(w.Q(1, 1), 4.0, 1e-12);
  EXPECT_EQ(w.Q(0, 1), 0.0);
  EXPECT_NEAR(w.R(0, 0), 25.0, 1e-12);
  EXPECT_THROW(bryson_weights(Eigen::Vector2d(0.1, 0.0), Eigen::VectorXd::Ones(1)),
               std::invalid_argument);
}

TEST(SdrCostMatrices, ScalarIntegratorClosedForm) {
  const double q = 3.0, rho = 0.7, T = 0.4;
  const SdrCostMatrices c = sdr_cost_matrices(Scalar(0), Scalar(1), Scalar(q),
                                              Scalar(rho), T);
  EXPECT_NEAR(c.Q1(0, 0), q * T, 1e-14);
  EXPECT_NEAR(c.M1(0, 0), q * T * T / 2.0, 1e-14);
  EXPECT_NEAR(c.R1(0, 0), rho * T + q * T * T * T / 3.0, 1e-14);
}

TEST(SdrCostMatrices, MatchesSimpsonOracle) {
  std::mt19937 rng(8);
  const Eigen::MatrixXd A = oracle::RandomMatrix(rng, 3, 3, 1.0);
  const Eigen::MatrixXd B = oracle::RandomMatrix(rng, 3, 2, 1.0);
  const Eigen::MatrixXd Q = oracle::RandomPsd(rng, 3, 3);
  const Eigen::MatrixXd R = oracle::RandomPsd(rng, 2, 2) + Eigen::MatrixXd::Identity(2, 2);
  const double T = 0.3;
  const SdrCostMatrices c = sdr_cost_matrices(A, B, Q, R, T);

  const int panels = 400;
  const double h = T / panels;
  Eigen::MatrixXd Q1 = Eigen::MatrixXd::Zero(3, 3), M1 = Eigen::MatrixXd::Zero(3, 2),
                  R1 = R * T;
  for (int i = 0; i <= panels; ++i) {
    const double w = (i == 0 || i == panels) ? 1.0 : (i % 2 ? 4.0 : 2.0);
    const double t = i * h;
    const Eigen::MatrixXd zeta = oracle::TaylorExp(A * t);
    const Eigen::MatrixXd eta =
        t == 0.0 ? Eigen::MatrixXd::Zero(3, 2) : oracle::ZohInputQuadrature(A, B, t, 40);
    Q1 += w * h / 3.0 * zeta.transpose() * Q * zeta;
    M1 += w * h / 3.0 * zeta.transpose() * Q * eta;
    R1 += w * h / 3.0 * eta.transpose() * Q * eta;
  }
  EXPECT_LT((c.Q1 - Q1).cwiseAbs().maxCoeff(), 1e-9);
  EXPECT_LT((c.M1 - M1).cwiseAbs().maxCoeff(), 1e-9);
  EXPECT_LT((c.R1 - R1).cwiseAbs().maxCoeff(), 1e-9);
}

TEST(SdrCostMatrices, QuadratureOrderConverged) {
  const DoubleIntegrator di;
  const Eigen::Matrix2d Q = Eigen::Vector2d(100.0, 4.0).asDiagonal();
  const SdrCostMatrices a = sdr_cost_matrices(di.A, di.B, Q, Scalar(25.0), 0.1, 64);
  const SdrCostMatrices b = sdr_cost_matrices(di.A, di.B, Q, Scalar(25.0), 0.1, 8);
  EXPECT_LT((a.Q1 - b.Q1).cwiseAbs().maxCoeff(), 1e-13);
  EXPECT_LT((a.R1 - b.R1).cwiseAbs().maxCoeff(), 1e-13);
}

TEST(SdrCostMatrices, QHatIsPositiveSemidefinite) {
  std::mt19937 rng(9);
  for (int trial = 0; trial < 10; ++trial) {
    const Eigen::MatrixXd A = oracle::RandomMatrix(rng, 4, 4, 1.0);
    const Eigen::MatrixXd B = oracle::RandomMatrix(rng, 4, 2, 1.0);
    const Eigen::MatrixXd Q = oracle::RandomPsd(rng, 4, 1 + trial % 4);
    const SdrCostMatrices c =
        sdr_cost_matrices(A, B, Q, Eigen::MatrixXd::Identity(2, 2), 0.2);
    const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(c.q_hat());
    EXPECT_GT(es.eigenvalues().minCoeff(), -1e-12);
    EXPECT_LT((c.Q1 - c.Q1.transpose()).cwiseAbs().maxCoeff(), 1e-15);
  }
}

TEST(Dlqr, ScalarGoldenRatio) {
  const DlqrResult r = dlqr(Scalar(1), Scalar(1), Scalar(1), Scalar(1));
  EXPECT_NEAR(r.P(0, 0), oracle::GoldenRatio(), 1e-10);
  EXPECT_NEAR(r.K(0, 0), 1.0 / oracle::GoldenRatio(), 1e-10);
  EXPECT_GT(r.iterations, 0);
  EXPECT_LT(dare_residual(Scalar(1), Scalar(1), Scalar(1), Scalar(1), r.P), 1e-10);
}

TEST(Dlqr, UnstabilizableThrowsSynthesisError) {
  Eigen::Matrix2d G = Eigen::Matrix2d::Identity() * 1.1;
  const Eigen::Vector2d H(1.0, 0.0);
  DlqrOptions opts;
  opts.max_iterations = 2000;
  EXPECT_THROW(dlqr(G, H, Eigen::Matrix2d::Identity(), Scalar(1), opts), SynthesisError);
}

TEST(Dlqr, RandomSystemsSatisfyDare) {
  std::mt19937 rng(10);
  for (int trial = 0; trial < 10; ++trial) {
    const Eigen::MatrixXd G = oracle::RandomMatrix(rng, 4, 4, 0.6);
    const Eigen::MatrixXd H = oracle::RandomMatrix(rng, 4, 2, 1.0);
    const Eigen::MatrixXd Q = Eigen::MatrixXd::Identity(4, 4);
    const Eigen::MatrixXd R = Eigen::MatrixXd::Identity(2, 2);
    const DlqrResult r = dlqr(G, H, Q, R);
    EXPECT_LT(dare_residual(G, H, Q, R, r.P), 1e-9 * std::max(1.0, r.P.norm()));
    EXPECT_LT(spectral_radius(G - H * r.K), 1.0);
  }
}

TEST(SpectralRadius, Rotation) {
  Eigen::Matrix2d M;
  M << 0, -2, 2, 0;
  EXPECT_NEAR(spectral_radius(M), 2.0, 1e-14);
}

// Sampled-data closed loop cost integrated finely must equal x0' P x0.
TEST(SdrGain, OptimalCostMatchesContinuousIntegral) {
  const DoubleIntegrator di;
  const Eigen::Matrix2d Q = Eigen::Vector2d(1.0, 0.5).asDiagonal();
  const Eigen::MatrixXd R = Scalar(2.0);
  const double T = 0.5;
  const SdrDesign d = sdr_gain(di.A, di.B, Q, R, T);
  const Eigen::Vector2d x0(1.0, -0.3);

  Eigen::Vector2d x = x0;
  double cost = 0.0;
  const int sub = 200;
  const double h = T / sub;
  for (int k = 0; k < 400; ++k) {
    const double u = -(d.gains.K * x)(0);
    for (int i = 0; i < sub; ++i) {
      // Exact double-integrator flow under constant u, cost by Simpson.
      const auto at = [&](double s) {
        return Eigen::Vector2d(x(0) + x(1) * s + 0.5 * u * s * s, x(1) + u * s);
      };
      const auto L = [&](double s) {
        const Eigen::Vector2d z = at(s);
        return z.dot(Q * z) + R(0, 0) * u * u;
      };
      cost += h / 6.0 * (L(0) + 4.0 * L(h / 2) + L(h));
      x = at(h);
    }
  }
  EXPECT_NEAR(cost, x0.dot(d.P * x0), 1e-9 * x0.dot(d.P * x0));
  EXPECT_LT(d.closed_loop_spectral_radius, 1.0);
}

TEST(SdrGain, ApproachesContinuousLqrForSmallSamplePeriod) {
  const DoubleIntegrator di;
  const double q1 = 4.0, q2 = 1.0, r = 0.5;
  const Eigen::Matrix2d Q = Eigen::Vector2d(q1, q2).asDiagonal();
  const SdrDesign d = sdr_gain(di.A, di.B, Q, Scalar(r), 1e-3);
  const double k1 = std::sqrt(q1 / r);
  const double k2 = std::sqrt(q2 / r + 2.0 * std::sqrt(q1 / r));
  EXPECT_NEAR(d.gains.K(0, 0), k1, 1e-2 * k1);
  EXPECT_NEAR(d.gains.K(0, 1), k2, 1e-2 * k2);
}

TEST(SdrGain, VehiclePlantIsStabilized) {
  const LinearModel lin = linearize(VehicleParams::Defaults(), StateVector::Zero());
  const WeightMatrices w = bryson_weights(
      (Eigen::VectorXd(6) << 0.1, 0.1, 0.2, 0.05, 0.05, 0.2).finished(),
      Eigen::VectorXd::Constant(4, 0.2));
  const SdrDesign d = sdr_gain(lin.A, lin.B, w.Q, w.R, 0.02);
  EXPECT_EQ(d.gains.K.rows(), 4);
  EXPECT_EQ(d.gains.K.cols(), 6);
  EXPECT_LT(d.closed_loop_spectral_radius, 1.0);
  EXPECT_GT(d.closed_loop_spectral_radius, 0.9);
  EXPECT_LT(d.riccati_iterations, 100000);
}

TEST(NzspQuadPartition, ScalarIntegrator) {
  const QuadPartition p = nzsp_quad_partition(Scalar(1), Scalar(0.1), Scalar(1), Scalar(0));
  EXPECT_NEAR(p.pi12(0, 0), 1.0, 1e-14);
  EXPECT_NEAR(p.pi22(0, 0), 0.0, 1e-14);
}

TEST(NzspQuadPartition, WideVehicleSolvesBlockSystem) {
  const LinearModel lin = linearize(VehicleParams::Defaults(), StateVector::Zero());
  const DiscreteModel d = zoh_discretize(lin.A, lin.B, 0.02);
  const Eigen::MatrixXd C = pose_output_matrix(6);
  const Eigen::MatrixXd D = Eigen::MatrixXd::Zero(3, 4);
  const QuadPartition p = nzsp_quad_partition(d.G, d.H, C, D);
  EXPECT_LT(((d.G - Eigen::MatrixXd::Identity(6, 6)) * p.pi12 + d.H * p.pi22)
                .cwiseAbs().maxCoeff(), 1e-12);
  EXPECT_LT((C * p.pi12 - Eigen::MatrixXd::Identity(3, 3)).cwiseAbs().maxCoeff(), 1e-12);
  // A pose set point needs no steady thrust or velocity.
  EXPECT_LT(p.pi22.cwiseAbs().maxCoeff(), 1e-12);
  EXPECT_LT(p.pi12.bottomRows(3).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(NzspQuadPartition, RankDeficientThrows) {
  const Eigen::MatrixXd C = (Eigen::MatrixXd(2, 1) << 1, 1).finished();
  EXPECT_THROW(nzsp_quad_partition(Scalar(1), Scalar(1), C, Eigen::MatrixXd::Zero(2, 1)),
               SynthesisError);
  EXPECT_THROW(nzsp_quad_partition(Scalar(1), Scalar(0), Scalar(0), Scalar(0)),
               SynthesisError);
}

TEST(PiNzspControl, FeedforwardMinusFeedback) {
  const QuadPartition p{Scalar(2.0), Scalar(0.5)};
  const Eigen::MatrixXd K = (Eigen::MatrixXd(1, 2) << 3.0, -1.0).finished();
  const GainSet g = make_pi_nzsp_gains(K, 1, p, 0.1);
  EXPECT_NEAR(g.feedforward(0, 0), 0.5 + 3.0 * 2.0, 1e-15);
  EXPECT_EQ(g.K1(), Scalar(3.0));
  EXPECT_EQ(g.K2(), Scalar(-1.0));
  const Eigen::VectorXd u =
      pi_nzsp_control(Eigen::Vector2d(0.2, 0.4), Eigen::VectorXd::Constant(1, 1.0), g);
  EXPECT_NEAR(u(0), 6.5 - (3.0 * 0.2 - 1.0 * 0.4), 1e-15);
  EXPECT_THROW(pi_nzsp_control(Eigen::Vector3d::Zero(), Eigen::VectorXd::Ones(1), g),
               std::invalid_argument);
}

}  // namespace
}  // namespace pgnc
