#include "pgnc/vehicle_model.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <stdexcept>

#include <Eigen/SVD>

namespace pgnc {
namespace {

bool AllFinite(const auto& m) { return m.allFinite(); }

std::string Lower(std::string_view s) {
  std::string out;
  for (char c : s) {
    if (c == '-' || c == '_' || c == ' ') continue;
    out.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
  }
  return out;
}

}  // namespace

VehicleParams VehicleParams::Defaults() {
  return FromGeometry(2.268, 0.10, 0.05);
}

VehicleParams VehicleParams::FromGeometry(double mass, double side_length,
                                          double moment_arm) {
  VehicleParams p;
  p.mass = mass;
  p.side_length = side_length;
  p.moment_arm = moment_arm;
  p.inertia_zz = mass * side_length * side_length / 6.0;
  return p;
}

void VehicleParams::Validate() const {
  const auto check = [](double v, const char* name) {
    if (!std::isfinite(v) || v <= 0.0) {
      throw std::invalid_argument(std::string("vehicle parameter '") + name +
                                  "' must be finite and > 0");
    }
  };
  check(mass, "mass");
  check(side_length, "side_length");
  check(moment_arm, "moment_arm");
  check(inertia_zz, "inertia_zz");
}

ThrusterConfigKind ParseThrusterConfigKind(std::string_view name) {
  const std::string key = Lower(name);
  if (key == "x") return ThrusterConfigKind::kX;
  if (key == "h") return ThrusterConfigKind::kH;
  if (key == "offseth") return ThrusterConfigKind::kOffsetH;
  throw std::invalid_argument("unknown thruster configuration '" +
                              std::string(name) + "' (expected X, H, OffsetH)");
}

std::string_view ToString(ThrusterConfigKind kind) {
  switch (kind) {
    case ThrusterConfigKind::kX:
      return "X";
    case ThrusterConfigKind::kH:
      return "H";
    case ThrusterConfigKind::kOffsetH:
      return "OffsetH";
  }
  return "?";
}

AllocationMatrix allocation_matrix(ThrusterConfigKind kind,
                                   const VehicleParams& params) {
  params.Validate();
  const double d = params.moment_arm;
  const double s = 1.0 / std::sqrt(2.0);
  AllocationMatrix m;
  switch (kind) {
    case ThrusterConfigKind::kX:
      // clang-format off
      m << -s,  s,  s, -s,
            s,  s, -s, -s,
            d, -d,  d, -d;
      // clang-format on
      return m;
    case ThrusterConfigKind::kH:
      // clang-format off
      m <<  1,  1, -1, -1,
            0,  0,  0,  0,
           -d,  d,  d, -d;
      // clang-format on
      return m;
    case ThrusterConfigKind::kOffsetH:
      // clang-format off
      m <<  1, -1,  0,  0,
            0,  0,  1,  1,
           -d, -d,  d, -d;
      // clang-format on
      return m;
  }
  throw std::invalid_argument("unknown thruster configuration kind");
}

ThrusterConfig ThrusterConfig::Make(ThrusterConfigKind kind,
                                    const VehicleParams& params) {
  return ThrusterConfig{kind, allocation_matrix(kind, params)};
}

WrenchFeasibility wrench_feasibility(ThrusterConfigKind kind,
                                     const VehicleParams& params) {
  const AllocationMatrix alloc = allocation_matrix(kind, params);
  const double scale = alloc.cwiseAbs().maxCoeff();
  const double tol = 1e-12 * std::max(scale, 1.0);

  const auto feasible = [&](int axis) {
    Eigen::Matrix<double, 2, 4> others;
    int row = 0;
    for (int i = 0; i < 3; ++i) {
      if (i != axis) others.row(row++) = alloc.row(i);
    }
    // Extreme rays of {T >= 0 : others T = 0} have a support S on which the
    // restricted null space is one-dimensional with a single-signed generator.
    for (unsigned mask = 1; mask < 16u; ++mask) {
      std::vector<int> support;
      for (int j = 0; j < 4; ++j) {
        if (mask & (1u << j)) support.push_back(j);
      }
      const int k = static_cast<int>(support.size());
      Eigen::MatrixXd sub(2, k);
      for (int c = 0; c < k; ++c) sub.col(c) = others.col(support[c]);
      Eigen::JacobiSVD<Eigen::MatrixXd> svd(sub, Eigen::ComputeFullV);
      const auto& sv = svd.singularValues();
      int rank = 0;
      for (int i = 0; i < sv.size(); ++i) {
        if (sv(i) > tol) ++rank;
      }
      if (k - rank != 1) continue;
      Eigen::VectorXd z = svd.matrixV().col(k - 1);
      if (z.minCoeff() < -tol) z = -z;
      if (z.minCoeff() <= tol) continue;
      Eigen::Vector4d ray = Eigen::Vector4d::Zero();
      for (int c = 0; c < k; ++c) ray(support[c]) = z(c);
      if (std::abs(alloc.row(axis).dot(ray)) > tol) return true;
    }
    return false;
  };

  return WrenchFeasibility{feasible(0), feasible(1), feasible(2)};
}

Vehicle Vehicle::Make(const VehicleParams& params, ThrusterConfigKind kind,
                      bool inertial_kinematics) {
  params.Validate();
  return Vehicle{params, ThrusterConfig::Make(kind, params),
                 inertial_kinematics};
}

StateVector eom_derivative(const StateVector& state, const ThrustVector& thrust,
                           const VehicleParams& params) {
  return eom_derivative(Vehicle::Make(params), state, thrust);
}

StateVector eom_derivative(const Vehicle& vehicle, const StateVector& state,
                           const ThrustVector& thrust,
                           const Wrench& disturbance) {
  if (!AllFinite(state) || !AllFinite(thrust) || !AllFinite(disturbance)) {
    throw std::invalid_argument("eom_derivative: non-finite input");
  }
  const VehicleParams& p = vehicle.params;
  const Wrench w = vehicle.config.allocation * thrust + disturbance;
  const double psi = state(kPsi);
  const double u = state(kU);
  const double v = state(kV);
  const double r = state(kR);

  StateVector dx;
  if (vehicle.inertial_kinematics) {
    dx(kX) = u * std::cos(psi) - v * std::sin(psi);
    dx(kY) = u * std::sin(psi) + v * std::cos(psi);
  } else {
    dx(kX) = u;
    dx(kY) = v;
  }
  dx(kPsi) = r;
  dx(kU) = w(0) / p.mass + r * v;
  dx(kV) = w(1) / p.mass - r * u;
  dx(kR) = w(2) / p.inertia_zz;
  return dx;
}

void Trajectory::Validate() const {
  if (states.size() != times.size() || inputs.size() != times.size()) {
    throw std::logic_error("trajectory: states/inputs/times length mismatch");
  }
  for (std::size_t k = 1; k < times.size(); ++k) {
    if (!(times[k] > times[k - 1])) {
      throw std::logic_error("trajectory: times not strictly increasing");
    }
  }
}

StateVector rk4_step(const Vehicle& vehicle, const StateVector& state,
                     const ThrustSchedule& schedule, double t, double step) {
  const ThrustVector u0 = schedule(t);
  const ThrustVector um = schedule(t + 0.5 * step);
  const ThrustVector u1 = schedule(t + step);
  const StateVector k1 = eom_derivative(vehicle, state, u0);
  const StateVector k2 = eom_derivative(vehicle, state + 0.5 * step * k1, um);
  const StateVector k3 = eom_derivative(vehicle, state + 0.5 * step * k2, um);
  const StateVector k4 = eom_derivative(vehicle, state + step * k3, u1);
  return state + step / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
}

Trajectory propagate(const StateVector& initial_state,
                     const ThrustSchedule& schedule, double step,
                     double duration, const Vehicle& vehicle) {
  if (!(step > 0.0) || !std::isfinite(step)) {
    throw std::invalid_argument("propagate: step must be > 0");
  }
  if (!(duration >= step) || !std::isfinite(duration)) {
    throw std::invalid_argument("propagate: duration must be >= step");
  }
  const ThrustSchedule checked = [&schedule](double t) {
    const ThrustVector thrust = schedule(t);
    if (!thrust.allFinite() || thrust.minCoeff() < 0.0) {
      throw std::invalid_argument(
          "propagate: thrust schedule returned a negative or non-finite "
          "thrust at t = " +
          std::to_string(t));
    }
    return thrust;
  };

  const auto n = static_cast<std::size_t>(std::llround(duration / step));
  Trajectory traj;
  traj.times.reserve(n + 1);
  traj.states.reserve(n + 1);
  traj.inputs.reserve(n + 1);

  StateVector x = initial_state;
  for (std::size_t k = 0; k <= n; ++k) {
    const double t = static_cast<double>(k) * step;
    traj.times.push_back(t);
    traj.states.push_back(x);
    traj.inputs.push_back(checked(t));
    if (k < n) x = rk4_step(vehicle, x, checked, t, step);
  }
  return traj;
}

Trajectory propagate(const StateVector& initial_state,
                     const ThrustSchedule& schedule, double step,
                     double duration, const VehicleParams& params) {
  return propagate(initial_state, schedule, step, duration,
                   Vehicle::Make(params));
}

LinearModel linearize(const Vehicle& vehicle,
                      const StateVector& operating_point) {
  const VehicleParams& p = vehicle.params;
  const double psi = operating_point(kPsi);
  const double u = operating_point(kU);
  const double v = operating_point(kV);
  const double r = operating_point(kR);

  LinearModel lin;
  lin.operating_point = operating_point;
  auto& A = lin.A;
  if (vehicle.inertial_kinematics) {
    const double c = std::cos(psi);
    const double s = std::sin(psi);
    A(kX, kPsi) = -u * s - v * c;
    A(kX, kU) = c;
    A(kX, kV) = -s;
    A(kY, kPsi) = u * c - v * s;
    A(kY, kU) = s;
    A(kY, kV) = c;
  } else {
    A(kX, kU) = 1.0;
    A(kY, kV) = 1.0;
  }
  A(kPsi, kR) = 1.0;
  A(kU, kV) = r;
  A(kU, kR) = v;
  A(kV, kU) = -r;
  A(kV, kR) = -u;

  const AllocationMatrix& alloc = vehicle.config.allocation;
  lin.B.row(kU) = alloc.row(0) / p.mass;
  lin.B.row(kV) = alloc.row(1) / p.mass;
  lin.B.row(kR) = alloc.row(2) / p.inertia_zz;
  return lin;
}

LinearModel linearize(const VehicleParams& params,
                      const StateVector& operating_point) {
  return linearize(Vehicle::Make(params), operating_point);
}

}  // namespace pgnc
