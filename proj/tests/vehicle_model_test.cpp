#include "pgnc/vehicle_model.hpp"

#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "oracles.hpp"

namespace pgnc {
namespace {

const VehicleParams kParams = VehicleParams::Defaults();

StateVector RandomState(std::mt19937& rng) {
  return oracle::RandomMatrix(rng, 6, 1, 0.5);
}

ThrustVector RandomThrust(std::mt19937& rng) {
  std::uniform_real_distribution<double> u(0.0, 0.025);
  return ThrustVector(u(rng), u(rng), u(rng), u(rng));
}

TEST(VehicleParams, DefaultsUseCubeInertia) {
  EXPECT_DOUBLE_EQ(kParams.mass, 2.268);
  EXPECT_DOUBLE_EQ(kParams.side_length, 0.1);
  EXPECT_DOUBLE_EQ(kParams.moment_arm, 0.05);
  EXPECT_DOUBLE_EQ(kParams.inertia_zz, 2.268 * 0.1 * 0.1 / 6.0);
  EXPECT_NEAR(kParams.inertia_zz, 0.00378, 1e-15);
}

TEST(VehicleParams, ValidateRejectsNonPositive) {
  VehicleParams p = kParams;
  p.mass = 0.0;
  EXPECT_THROW(p.Validate(), std::invalid_argument);
  p = kParams;
  p.inertia_zz = -1.0;
  EXPECT_THROW(p.Validate(), std::invalid_argument);
  p = kParams;
  p.moment_arm = std::nan("");
  EXPECT_THROW(p.Validate(), std::invalid_argument);
}

TEST(ThrusterConfig, ParsesNames) {
  EXPECT_EQ(ParseThrusterConfigKind("x"), ThrusterConfigKind::kX);
  EXPECT_EQ(ParseThrusterConfigKind("H"), ThrusterConfigKind::kH);
  EXPECT_EQ(ParseThrusterConfigKind("offset-h"), ThrusterConfigKind::kOffsetH);
  EXPECT_EQ(ParseThrusterConfigKind("OffsetH"), ThrusterConfigKind::kOffsetH);
  EXPECT_THROW(ParseThrusterConfigKind("Y"), std::invalid_argument);
}

TEST(AllocationMatrix, XMomentRowIsAlternatingArm) {
  const AllocationMatrix M = allocation_matrix(ThrusterConfigKind::kX, kParams);
  const Eigen::RowVector4d expected(0.05, -0.05, 0.05, -0.05);
  EXPECT_TRUE(M.row(2).isApprox(expected, 1e-15));
  const double s = 1.0 / std::sqrt(2.0);
  EXPECT_TRUE(M.row(0).isApprox(Eigen::RowVector4d(-s, s, s, -s), 1e-15));
  EXPECT_TRUE(M.row(1).isApprox(Eigen::RowVector4d(s, s, -s, -s), 1e-15));
}

TEST(AllocationMatrix, XEqualThrustsCancel) {
  const AllocationMatrix M = allocation_matrix(ThrusterConfigKind::kX, kParams);
  for (double c : {0.0, 0.01, 0.025, 3.0}) {
    EXPECT_LT((M * ThrustVector::Constant(c)).cwiseAbs().maxCoeff(), 1e-15);
  }
}

TEST(AllocationMatrix, HNeverProducesLateralForce) {
  const AllocationMatrix M = allocation_matrix(ThrusterConfigKind::kH, kParams);
  EXPECT_EQ(M.row(1).cwiseAbs().maxCoeff(), 0.0);
  std::mt19937 rng(7);
  for (int i = 0; i < 100; ++i) {
    EXPECT_EQ((M * RandomThrust(rng))(1), 0.0);
  }
}

TEST(WrenchFeasibility, MatchesConfigurationProse) {
  const WrenchFeasibility x = wrench_feasibility(ThrusterConfigKind::kX, kParams);
  EXPECT_TRUE(x.pure_fx);
  EXPECT_TRUE(x.pure_fy);
  EXPECT_TRUE(x.pure_mz);

  const WrenchFeasibility h = wrench_feasibility(ThrusterConfigKind::kH, kParams);
  EXPECT_FALSE(h.pure_fy);
  EXPECT_TRUE(h.pure_fx);
  EXPECT_TRUE(h.pure_mz);

  // The main pair's thrust line is the body x axis.
  const WrenchFeasibility o = wrench_feasibility(ThrusterConfigKind::kOffsetH, kParams);
  EXPECT_FALSE(o.pure_fx);
  EXPECT_TRUE(o.pure_fy);
  EXPECT_TRUE(o.pure_mz);
}

TEST(EomDerivative, RestIsEquilibrium) {
  EXPECT_EQ(eom_derivative(StateVector::Zero(), ThrustVector::Zero(), kParams),
            StateVector::Zero());
}

TEST(EomDerivative, SurgePairAccelerates) {
  const StateVector d =
      eom_derivative(StateVector::Zero(), ThrustVector(0, 0.025, 0.025, 0), kParams);
  EXPECT_NEAR(d(kU), 0.015589, 5e-7);
  EXPECT_NEAR(d(kV), 0.0, 1e-15);
  EXPECT_NEAR(d(kR), 0.0, 1e-15);
}

TEST(EomDerivative, DiagonalPairSpins) {
  const StateVector d =
      eom_derivative(StateVector::Zero(), ThrustVector(0.025, 0, 0.025, 0), kParams);
  EXPECT_NEAR(d(kR), 0.661376, 1e-6);
  EXPECT_NEAR(d(kU), 0.0, 1e-15);
  EXPECT_NEAR(d(kV), 0.0, 1e-15);
}

TEST(EomDerivative, CoriolisTerms) {
  StateVector x = StateVector::Zero();
  x(kV) = 1.0;
  x(kR) = 0.5;
  const StateVector d = eom_derivative(x, ThrustVector::Zero(), kParams);
  EXPECT_DOUBLE_EQ(d(kU), 0.5);
  EXPECT_DOUBLE_EQ(d(kV), 0.0);
  EXPECT_DOUBLE_EQ(d(kX), 0.0);
  EXPECT_DOUBLE_EQ(d(kY), 1.0);
  EXPECT_DOUBLE_EQ(d(kPsi), 0.5);
}

TEST(EomDerivative, RejectsNonFinite) {
  StateVector x = StateVector::Zero();
  x(kU) = std::nan("");
  EXPECT_THROW(eom_derivative(x, ThrustVector::Zero(), kParams), std::invalid_argument);
  EXPECT_THROW(eom_derivative(StateVector::Zero(),
                              ThrustVector(0, INFINITY, 0, 0), kParams),
               std::invalid_argument);
}

TEST(EomDerivative, CoriolisDoesNoWork) {
  std::mt19937 rng(11);
  const AllocationMatrix M = allocation_matrix(ThrusterConfigKind::kX, kParams);
  for (int i = 0; i < 50; ++i) {
    const StateVector x = RandomState(rng);
    const ThrustVector T = RandomThrust(rng);
    const StateVector d = eom_derivative(x, T, kParams);
    const Wrench w = M * T;
    const double m = kParams.mass;
    const double u = x(kU), v = x(kV), r = x(kR);
    const double lhs = m * (u * d(kU) - u * r * v) + m * (v * d(kV) + v * r * u) +
                       kParams.inertia_zz * r * d(kR);
    const double rhs = w(0) * u + w(1) * v + w(2) * r;
    EXPECT_NEAR(lhs, rhs, 1e-12);
  }
}

TEST(EomDerivative, LinearInThrust) {
  std::mt19937 rng(12);
  for (int i = 0; i < 50; ++i) {
    const StateVector x = RandomState(rng);
    const ThrustVector T1 = RandomThrust(rng), T2 = RandomThrust(rng);
    const double a = 0.3, b = 1.7;
    const StateVector f0 = eom_derivative(x, ThrustVector::Zero(), kParams);
    const StateVector lhs = eom_derivative(x, a * T1 + b * T2, kParams) - f0;
    const StateVector rhs = a * (eom_derivative(x, T1, kParams) - f0) +
                            b * (eom_derivative(x, T2, kParams) - f0);
    EXPECT_LT((lhs - rhs).cwiseAbs().maxCoeff(), 1e-14);
  }
}

TEST(EomDerivative, InertialKinematicsRotatesVelocity) {
  const Vehicle v = Vehicle::Make(kParams, ThrusterConfigKind::kX, true);
  StateVector x = StateVector::Zero();
  x(kPsi) = M_PI / 2.0;
  x(kU) = 1.0;
  const StateVector d = eom_derivative(v, x, ThrustVector::Zero());
  EXPECT_NEAR(d(kX), 0.0, 1e-15);
  EXPECT_NEAR(d(kY), 1.0, 1e-15);
}

TEST(EomDerivative, DisturbanceAddsToWrench) {
  const Vehicle v = Vehicle::Make(kParams);
  const StateVector d =
      eom_derivative(v, StateVector::Zero(), ThrustVector::Zero(), Wrench(0.1, 0, 0));
  EXPECT_NEAR(d(kU), 0.1 / kParams.mass, 1e-15);
}

TEST(Propagate, ZeroInputStaysAtRest) {
  const Trajectory traj = propagate(
      StateVector::Zero(), [](double) { return ThrustVector::Zero(); }, 0.01, 3.0, kParams);
  EXPECT_NO_THROW(traj.Validate());
  EXPECT_NEAR(traj.times.back(), 3.0, 1e-12);
  for (const StateVector& x : traj.states) EXPECT_EQ(x, StateVector::Zero());
}

TEST(Propagate, ConstantThrustMatchesClosedForm) {
  const auto schedule = [](double) { return ThrustVector(0, 0.025, 0.025, 0); };
  const Trajectory traj = propagate(StateVector::Zero(), schedule, 0.01, 1.0, kParams);
  const double a = 0.05 / (2.268 * std::sqrt(2.0));
  EXPECT_NEAR(traj.states.back()(kU), a, 1e-12);
  EXPECT_NEAR(traj.states.back()(kX), 0.5 * a, 1e-12);
  EXPECT_NEAR(traj.states.back()(kU), 0.015589, 1e-6);
  EXPECT_NEAR(traj.states.back()(kX), 0.007794, 1e-6);
}

TEST(Propagate, StepHalvingConverges) {
  const auto schedule = [](double) { return ThrustVector(0, 0.025, 0.025, 0); };
  const Trajectory coarse = propagate(StateVector::Zero(), schedule, 0.01, 1.0, kParams);
  const Trajectory fine = propagate(StateVector::Zero(), schedule, 0.005, 1.0, kParams);
  EXPECT_LT((coarse.states.back() - fine.states.back()).cwiseAbs().maxCoeff(), 1e-9);
}

TEST(Propagate, RejectsNegativeThrust) {
  const auto schedule = [](double t) {
    return t > 0.5 ? ThrustVector(-0.01, 0, 0, 0) : ThrustVector::Zero();
  };
  EXPECT_THROW(propagate(StateVector::Zero(), schedule, 0.01, 1.0, kParams),
               std::invalid_argument);
}

TEST(Propagate, RejectsBadStep) {
  const auto schedule = [](double) { return ThrustVector::Zero(); };
  EXPECT_THROW(propagate(StateVector::Zero(), schedule, 0.0, 1.0, kParams),
               std::invalid_argument);
  EXPECT_THROW(propagate(StateVector::Zero(), schedule, 0.1, 0.01, kParams),
               std::invalid_argument);
}

TEST(Trajectory, ValidateCatchesNonMonotoneTimes) {
  Trajectory traj;
  traj.times = {0.0, 0.1, 0.1};
  traj.states.assign(3, StateVector::Zero());
  traj.inputs.assign(3, ThrustVector::Zero());
  EXPECT_THROW(traj.Validate(), std::logic_error);
}

TEST(Linearize, RestHasKinematicIdentityOnly) {
  const LinearModel lin = linearize(kParams, StateVector::Zero());
  Eigen::Matrix<double, 6, 6> expected = Eigen::Matrix<double, 6, 6>::Zero();
  expected(0, 3) = expected(1, 4) = expected(2, 5) = 1.0;
  EXPECT_EQ(lin.A, expected);
  const double k = kParams.moment_arm / kParams.inertia_zz;
  EXPECT_TRUE(lin.B.row(5).isApprox(Eigen::RowVector4d(k, -k, k, -k), 1e-15));
  EXPECT_EQ(lin.B.topRows(3).cwiseAbs().maxCoeff(), 0.0);
}

class LinearizeFiniteDifference : public ::testing::TestWithParam<bool> {};

TEST_P(LinearizeFiniteDifference, MatchesAtRandomPoints) {
  const Vehicle vehicle = Vehicle::Make(kParams, ThrusterConfigKind::kX, GetParam());
  std::mt19937 rng(21);
  for (int i = 0; i < 10; ++i) {
    const StateVector x0 = RandomState(rng);
    const ThrustVector T0 = RandomThrust(rng);
    const LinearModel lin = linearize(vehicle, x0);
    const Eigen::MatrixXd A_fd = oracle::FiniteDifferenceJacobian(
        [&](const Eigen::VectorXd& x) -> Eigen::VectorXd {
          return eom_derivative(vehicle, StateVector(x), T0);
        },
        x0);
    const Eigen::MatrixXd B_fd = oracle::FiniteDifferenceJacobian(
        [&](const Eigen::VectorXd& T) -> Eigen::VectorXd {
          return eom_derivative(vehicle, x0, ThrustVector(T));
        },
        T0);
    const double scale_a = std::max(1.0, A_fd.cwiseAbs().maxCoeff());
    const double scale_b = std::max(1.0, B_fd.cwiseAbs().maxCoeff());
    EXPECT_LT((Eigen::MatrixXd(lin.A) - A_fd).cwiseAbs().maxCoeff() / scale_a, 1e-6);
    EXPECT_LT((Eigen::MatrixXd(lin.B) - B_fd).cwiseAbs().maxCoeff() / scale_b, 1e-6);
  }
}

INSTANTIATE_TEST_SUITE_P(Kinematics, LinearizeFiniteDifference,
                         ::testing::Values(false, true));

}  // namespace
}  // namespace pgnc
