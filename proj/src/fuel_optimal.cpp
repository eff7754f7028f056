#include "pgnc/fuel_optimal.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include <Eigen/Eigenvalues>
#include <Eigen/SparseCore>
#include <Eigen/SparseLU>

#include "pgnc/error.hpp"

namespace pgnc {
namespace {

using Mat12 = Eigen::Matrix<double, 12, 12>;
using Mat64 = Eigen::Matrix<double, 6, 4>;

/// df/dT: thrust enters only the acceleration rows.
Mat64 ThrustInputMatrix(const Vehicle& vehicle) {
  Mat64 B = Mat64::Zero();
  const AllocationMatrix& alloc = vehicle.config.allocation;
  B.row(kU) = alloc.row(0) / vehicle.params.mass;
  B.row(kV) = alloc.row(1) / vehicle.params.mass;
  B.row(kR) = alloc.row(2) / vehicle.params.inertia_zz;
  return B;
}

struct ClampValue {
  double value;
  double slope;
};

double Softplus(double a) { return std::max(a, 0.0) + std::log1p(std::exp(-std::abs(a))); }
double Sigmoid(double a) { return 1.0 / (1.0 + std::exp(-a)); }

ClampValue ClampOne(double z, const InputMode& mode) {
  if (!mode.constrained) return {z, 1.0};
  if (mode.smoothing > 0.0) {
    const double k = mode.smoothing;
    const double upper = std::isfinite(mode.t_max) ? k * (z - mode.t_max)
                                                   : -std::numeric_limits<double>::infinity();
    const double lower_sp = Softplus(k * z);
    const double upper_sp = std::isfinite(upper) ? Softplus(upper) : 0.0;
    const double upper_sig = std::isfinite(upper) ? Sigmoid(upper) : 0.0;
    return {(lower_sp - upper_sp) / k, Sigmoid(k * z) - upper_sig};
  }
  if (z < 0.0) return {0.0, 0.0};
  if (z > mode.t_max) return {mode.t_max, 0.0};
  return {z, 1.0};
}

void CheckBodyKinematics(const Vehicle& vehicle) {
  if (vehicle.inertial_kinematics) {
    throw std::invalid_argument(
        "fuel-optimal formulation requires body-frame kinematics");
  }
}

/// Hermite cubic through (y0, f0) and (y1, f1) on an interval of length h.
template <typename V>
void Hermite(double s, double h, const V& y0, const V& f0, const V& y1,
             const V& f1, V* value, V* slope) {
  const double s2 = s * s;
  const double s3 = s2 * s;
  if (value) {
    *value = (2 * s3 - 3 * s2 + 1) * y0 + (s3 - 2 * s2 + s) * h * f0 +
             (-2 * s3 + 3 * s2) * y1 + (s3 - s2) * h * f1;
  }
  if (slope) {
    *slope = (6 * s2 - 6 * s) / h * y0 + (3 * s2 - 4 * s + 1) * f0 +
             (-6 * s2 + 6 * s) / h * y1 + (3 * s2 - 2 * s) * f1;
  }
}

/// Lobatto IIIA (three-point) collocation residual and Jacobian.
class Collocation {
 public:
  Collocation(const Vehicle& vehicle, const InputMode& mode,
              const StateVector& x0, const StateVector& xf,
              std::vector<double> times)
      : vehicle_(vehicle), mode_(mode), x0_(x0), xf_(xf), times_(std::move(times)) {}

  int nodes() const { return static_cast<int>(times_.size()); }
  int unknowns() const { return 12 * nodes(); }

  StateCostateVector Node(const Eigen::VectorXd& Y, int i) const {
    return Y.segment<12>(12 * i);
  }

  StateCostateVector Rhs(const StateCostateVector& z) const {
    return state_costate_derivative(vehicle_, z, mode_);
  }

  struct Stats {
    double max_bc = 0.0;
    double max_defect = 0.0;
  };

  Eigen::VectorXd Residual(const Eigen::VectorXd& Y, Stats* stats) const {
    const int n = nodes();
    Eigen::VectorXd F(unknowns());
    F.head<6>() = Node(Y, 0).head<6>() - x0_;
    F.tail<6>() = Node(Y, n - 1).head<6>() - xf_;
    double max_defect = 0.0;
    StateCostateVector f_left = Rhs(Node(Y, 0));
    for (int i = 0; i + 1 < n; ++i) {
      const double h = times_[i + 1] - times_[i];
      const StateCostateVector y0 = Node(Y, i);
      const StateCostateVector y1 = Node(Y, i + 1);
      const StateCostateVector f1 = Rhs(y1);
      const StateCostateVector ym = 0.5 * (y0 + y1) + h / 8.0 * (f_left - f1);
      const StateCostateVector fm = Rhs(ym);
      const StateCostateVector r = y1 - y0 - h / 6.0 * (f_left + 4.0 * fm + f1);
      F.segment<12>(6 + 12 * i) = r;
      max_defect = std::max(max_defect, r.cwiseAbs().maxCoeff());
      f_left = f1;
    }
    if (stats) {
      stats->max_defect = max_defect;
      stats->max_bc = std::max(F.head<6>().cwiseAbs().maxCoeff(),
                               F.tail<6>().cwiseAbs().maxCoeff());
    }
    return F;
  }

  Eigen::SparseMatrix<double> Jacobian(const Eigen::VectorXd& Y) const {
    const int n = nodes();
    std::vector<Eigen::Triplet<double>> triplets;
    triplets.reserve(12 + 2 * 144 * (n - 1));
    for (int j = 0; j < 6; ++j) {
      triplets.emplace_back(j, j, 1.0);
      triplets.emplace_back(6 + 12 * (n - 1) + j, 12 * (n - 1) + j, 1.0);
    }
    const Mat12 I = Mat12::Identity();
    for (int i = 0; i + 1 < n; ++i) {
      const double h = times_[i + 1] - times_[i];
      const StateCostateVector y0 = Node(Y, i);
      const StateCostateVector y1 = Node(Y, i + 1);
      const StateCostateVector f0 = Rhs(y0);
      const StateCostateVector f1 = Rhs(y1);
      const StateCostateVector ym = 0.5 * (y0 + y1) + h / 8.0 * (f0 - f1);
      const Mat12 J0 = state_costate_jacobian(vehicle_, y0, mode_);
      const Mat12 J1 = state_costate_jacobian(vehicle_, y1, mode_);
      const Mat12 Jm = state_costate_jacobian(vehicle_, ym, mode_);
      const Mat12 d0 = -I - h / 6.0 * (J0 + 4.0 * Jm * (0.5 * I + h / 8.0 * J0));
      const Mat12 d1 = I - h / 6.0 * (J1 + 4.0 * Jm * (0.5 * I - h / 8.0 * J1));
      const int row = 6 + 12 * i;
      for (int r = 0; r < 12; ++r) {
        for (int c = 0; c < 12; ++c) {
          if (d0(r, c) != 0.0) triplets.emplace_back(row + r, 12 * i + c, d0(r, c));
          if (d1(r, c) != 0.0) triplets.emplace_back(row + r, 12 * (i + 1) + c, d1(r, c));
        }
      }
    }
    Eigen::SparseMatrix<double> J(unknowns(), unknowns());
    J.setFromTriplets(triplets.begin(), triplets.end());
    J.makeCompressed();
    return J;
  }

  const std::vector<double>& times() const { return times_; }

 private:
  Vehicle vehicle_;
  InputMode mode_;
  StateVector x0_;
  StateVector xf_;
  std::vector<double> times_;
};

struct NewtonResult {
  Eigen::VectorXd Y;
  Collocation::Stats stats;
  int iterations = 0;
};

NewtonResult DampedNewton(const Collocation& colloc, Eigen::VectorXd Y,
                          const TpbvpOptions& options) {
  const auto singular = [] {
    return SolverError(
        "solve_tpbvp: singular collocation Jacobian; try a different initial "
        "guess or final time");
  };
  Eigen::SparseLU<Eigen::SparseMatrix<double>, Eigen::COLAMDOrdering<int>> lu;
  bool analyzed = false;
  Collocation::Stats stats;
  Eigen::VectorXd F = colloc.Residual(Y, &stats);
  for (int it = 0; it <= options.max_newton_iterations; ++it) {
    if (!F.allFinite()) {
      throw SolverError("solve_tpbvp: non-finite residual; try a different "
                        "initial guess or final time");
    }
    if (stats.max_defect < options.tolerance && stats.max_bc < options.tolerance) {
      return {Y, stats, it};
    }
    if (it == options.max_newton_iterations) break;

    const Eigen::SparseMatrix<double> J = colloc.Jacobian(Y);
    if (!analyzed) {
      lu.analyzePattern(J);
      analyzed = true;
    }
    lu.factorize(J);
    if (lu.info() != Eigen::Success) throw singular();
    const Eigen::VectorXd step = lu.solve(-F);
    if (lu.info() != Eigen::Success || !step.allFinite()) throw singular();

    const double norm0 = F.norm();
    double alpha = 1.0;
    bool accepted = false;
    for (int k = 0; k <= options.max_halvings; ++k) {
      const Eigen::VectorXd trial = Y + alpha * step;
      Collocation::Stats trial_stats;
      const Eigen::VectorXd F_trial = colloc.Residual(trial, &trial_stats);
      if (F_trial.allFinite() && F_trial.norm() < norm0) {
        Y = trial;
        F = F_trial;
        stats = trial_stats;
        accepted = true;
        break;
      }
      alpha *= 0.5;
    }
    if (!accepted) {
      throw SolverError(
          "solve_tpbvp: Newton iteration stagnated (no residual decrease "
          "after " + std::to_string(options.max_halvings) +
          " step halvings); try a different initial guess or final time");
    }
  }
  throw SolverError("solve_tpbvp: Newton iteration did not converge within " +
                    std::to_string(options.max_newton_iterations) +
                    " iterations; try a different initial guess or final time");
}

std::vector<double> UniformMesh(double tf, int points) {
  std::vector<double> t(points);
  for (int i = 0; i < points; ++i) {
    t[i] = tf * static_cast<double>(i) / static_cast<double>(points - 1);
  }
  return t;
}

Eigen::VectorXd Pack(const MeshGuess& guess) {
  const int n = static_cast<int>(guess.times.size());
  Eigen::VectorXd Y(12 * n);
  for (int i = 0; i < n; ++i) {
    Y.segment<6>(12 * i) = guess.states.row(i).transpose();
    Y.segment<6>(12 * i + 6) = guess.costates.row(i).transpose();
  }
  return Y;
}

std::size_t IntervalIndex(const std::vector<double>& times, double t) {
  if (t <= times.front()) return 0;
  if (t >= times.back()) return times.size() - 2;
  const auto it = std::upper_bound(times.begin(), times.end(), t);
  return static_cast<std::size_t>(it - times.begin()) - 1;
}

TpbvpSolution Assemble(const Collocation& colloc, const NewtonResult& result,
                       const Vehicle& vehicle, const InputMode& mode) {
  const int n = colloc.nodes();
  TpbvpSolution sol;
  sol.times = colloc.times();
  sol.states.resize(n, 6);
  sol.costates.resize(n, 6);
  sol.inputs.resize(n, 4);
  sol.derivatives.resize(n, 12);
  sol.vehicle = vehicle;
  sol.mode = mode;
  for (int i = 0; i < n; ++i) {
    const StateCostateVector z = colloc.Node(result.Y, i);
    sol.states.row(i) = z.head<6>().transpose();
    sol.costates.row(i) = z.tail<6>().transpose();
    sol.derivatives.row(i) = colloc.Rhs(z).transpose();
    sol.inputs.row(i) =
        optimal_inputs(vehicle, z.tail<6>(), mode).transpose();
  }
  sol.max_bc_residual = result.stats.max_bc;
  sol.max_defect = result.stats.max_defect;
  sol.newton_iterations = result.iterations;

  double worst = 0.0;
  for (int i = 0; i + 1 < n; ++i) {
    const double h = sol.times[i + 1] - sol.times[i];
    const StateCostateVector y0 = colloc.Node(result.Y, i);
    const StateCostateVector y1 = colloc.Node(result.Y, i + 1);
    const StateCostateVector f0 = sol.derivatives.row(i).transpose();
    const StateCostateVector f1 = sol.derivatives.row(i + 1).transpose();
    for (double s : {0.25, 0.75}) {
      StateCostateVector value;
      StateCostateVector slope;
      Hermite(s, h, y0, f0, y1, f1, &value, &slope);
      worst = std::max(worst, (slope - colloc.Rhs(value)).cwiseAbs().maxCoeff());
    }
  }
  sol.max_interpolation_residual = worst;
  return sol;
}

MeshGuess ResampleGuess(const TpbvpSolution& sol, const std::vector<double>& times) {
  MeshGuess guess;
  guess.times = times;
  guess.states.resize(static_cast<Eigen::Index>(times.size()), 6);
  guess.costates.resize(static_cast<Eigen::Index>(times.size()), 6);
  for (std::size_t i = 0; i < times.size(); ++i) {
    guess.states.row(static_cast<Eigen::Index>(i)) = sol.state_at(times[i]).transpose();
    guess.costates.row(static_cast<Eigen::Index>(i)) = sol.costate_at(times[i]).transpose();
  }
  return guess;
}

TpbvpSolution SolveOnMesh(const TpbvpProblem& problem, const Vehicle& vehicle,
                          const InputMode& mode, const MeshGuess& guess,
                          const TpbvpOptions& options) {
  Collocation colloc(vehicle, mode, problem.x0, problem.xf, guess.times);
  const NewtonResult result = DampedNewton(colloc, Pack(guess), options);
  TpbvpSolution sol = Assemble(colloc, result, vehicle, mode);
  if (options.allow_mesh_doubling &&
      sol.max_interpolation_residual > options.interpolation_tolerance) {
    const int finer = 2 * static_cast<int>(guess.times.size()) - 1;
    const MeshGuess refined = ResampleGuess(sol, UniformMesh(problem.tf, finer));
    Collocation fine(vehicle, mode, problem.x0, problem.xf, refined.times);
    const NewtonResult fine_result = DampedNewton(fine, Pack(refined), options);
    const int iterations = sol.newton_iterations;
    sol = Assemble(fine, fine_result, vehicle, mode);
    sol.newton_iterations += iterations;
    sol.mesh_doublings = 1;
  }
  return sol;
}

}  // namespace

double hamiltonian(const Vehicle& vehicle, const StateVector& state,
                   const CostateVector& costate, const ThrustVector& thrust) {
  return 0.5 * thrust.squaredNorm() +
         costate.dot(eom_derivative(vehicle, state, thrust));
}

double hamiltonian(const StateVector& state, const CostateVector& costate,
                   const ThrustVector& thrust, const VehicleParams& params) {
  return hamiltonian(Vehicle::Make(params), state, costate, thrust);
}

ThrustVector hamiltonian_thrust_gradient(const Vehicle& vehicle,
                                         const CostateVector& costate,
                                         const ThrustVector& thrust) {
  return thrust + ThrustInputMatrix(vehicle).transpose() * costate;
}

ThrustVector unconstrained_optimal_inputs(const Vehicle& vehicle,
                                          const CostateVector& costate) {
  return -ThrustInputMatrix(vehicle).transpose() * costate;
}

ThrustVector unconstrained_optimal_inputs(const CostateVector& costate,
                                          const VehicleParams& params) {
  return unconstrained_optimal_inputs(Vehicle::Make(params), costate);
}

ThrustVector clamp_inputs(const ThrustVector& t_star, double t_max) {
  if (!(t_max > 0.0)) {
    throw std::invalid_argument("clamp_inputs: t_max must be > 0");
  }
  return t_star.cwiseMax(0.0).cwiseMin(t_max);
}

ThrustVector optimal_inputs(const Vehicle& vehicle, const CostateVector& costate,
                            const InputMode& mode) {
  ThrustVector t = unconstrained_optimal_inputs(vehicle, costate);
  for (int i = 0; i < 4; ++i) t(i) = ClampOne(t(i), mode).value;
  return t;
}

StateCostateVector state_costate_derivative(const Vehicle& vehicle,
                                            const StateCostateVector& z,
                                            const InputMode& mode) {
  CheckBodyKinematics(vehicle);
  const StateVector x = z.head<6>();
  const CostateVector lambda = z.tail<6>();
  const ThrustVector thrust = optimal_inputs(vehicle, lambda, mode);
  const double u = x(kU), v = x(kV), r = x(kR);

  StateCostateVector dz;
  dz.head<6>() = eom_derivative(vehicle, x, thrust);
  dz(6) = 0.0;
  dz(7) = 0.0;
  dz(8) = 0.0;
  dz(9) = -lambda(0) + lambda(4) * r;
  dz(10) = -lambda(1) - lambda(3) * r;
  dz(11) = -lambda(2) - lambda(3) * v + lambda(4) * u;
  return dz;
}

StateCostateVector state_costate_derivative(const StateVector& state,
                                            const CostateVector& costate,
                                            const VehicleParams& params,
                                            const InputMode& mode) {
  StateCostateVector z;
  z << state, costate;
  return state_costate_derivative(Vehicle::Make(params), z, mode);
}

Mat12 state_costate_jacobian(const Vehicle& vehicle,
                             const StateCostateVector& z,
                             const InputMode& mode) {
  CheckBodyKinematics(vehicle);
  const double u = z(kU), v = z(kV), r = z(kR);
  const CostateVector lambda = z.tail<6>();
  const Mat64 BT = ThrustInputMatrix(vehicle);
  const ThrustVector t_star = -BT.transpose() * lambda;
  Eigen::Vector4d slope;
  for (int i = 0; i < 4; ++i) slope(i) = ClampOne(t_star(i), mode).slope;

  Mat12 J = Mat12::Zero();
  // State rows: df/dx (the linearization) and df/dT dT/dlambda.
  J(kX, kU) = 1.0;
  J(kY, kV) = 1.0;
  J(kPsi, kR) = 1.0;
  J(kU, kV) = r;
  J(kU, kR) = v;
  J(kV, kU) = -r;
  J(kV, kR) = -u;
  J.block<6, 6>(0, 6) = -BT * slope.asDiagonal() * BT.transpose();

  // Costate rows: lambda' = -A(x)' lambda.
  const Eigen::Matrix<double, 6, 6> A = J.block<6, 6>(0, 0);
  J.block<6, 6>(6, 6) = -A.transpose();
  J(9, kR) = lambda(4);
  J(10, kR) = -lambda(3);
  J(11, kV) = -lambda(3);
  J(11, kU) = lambda(4);
  return J;
}

void TpbvpProblem::Validate() const {
  params.Validate();
  if (!(tf > 0.0) || !std::isfinite(tf)) {
    throw std::invalid_argument("tpbvp: tf must be > 0");
  }
  if (!(t_max > 0.0)) throw std::invalid_argument("tpbvp: t_max must be > 0");
  if (mesh_points < 10) {
    throw std::invalid_argument("tpbvp: mesh_points must be >= 10");
  }
  if (!x0.allFinite() || !xf.allFinite()) {
    throw std::invalid_argument("tpbvp: boundary states must be finite");
  }
}

InputMode TpbvpProblem::input_mode(double smoothing) const {
  return constrained ? InputMode::Constrained(t_max, smoothing)
                     : InputMode::Unconstrained();
}

MeshGuess initial_guess(const TpbvpProblem& problem) {
  problem.Validate();
  const int n = problem.mesh_points;
  MeshGuess guess;
  guess.times = UniformMesh(problem.tf, n);
  guess.states.resize(n, 6);
  guess.costates.resize(n, 6);
  const Eigen::Vector3d delta = (problem.xf - problem.x0).head<3>();
  for (int i = 0; i < n; ++i) {
    const double t = guess.times[i];
    const double s = t / problem.tf;
    guess.states.row(i).head<3>() =
        (problem.x0.head<3>() + s * delta).transpose();
    guess.states.row(i).tail<3>() = (delta / problem.tf).transpose();
    guess.costates.row(i).head<3>().setConstant(1e-4);
    guess.costates.row(i).tail<3>().setConstant(1e-4 + 1e-6 * t);
  }
  // Boundary positions are exact by construction; pin them against rounding.
  guess.states.row(0).head<3>() = problem.x0.head<3>().transpose();
  guess.states.row(n - 1).head<3>() = problem.xf.head<3>().transpose();
  return guess;
}

TpbvpSolution solve_tpbvp(const TpbvpProblem& problem,
                          const TpbvpOptions& options, const MeshGuess* guess) {
  problem.Validate();
  const Vehicle vehicle = Vehicle::Make(problem.params);
  const MeshGuess start = guess ? *guess : initial_guess(problem);
  if (start.times.size() < 2 ||
      start.states.rows() != static_cast<Eigen::Index>(start.times.size()) ||
      start.costates.rows() != static_cast<Eigen::Index>(start.times.size())) {
    throw std::invalid_argument("solve_tpbvp: malformed mesh guess");
  }
  const InputMode hard = problem.input_mode();

  if (problem.constrained && options.smoothing > 0.0) {
    const TpbvpSolution smooth = SolveOnMesh(
        problem, vehicle, problem.input_mode(options.smoothing), start, options);
    TpbvpSolution sol = SolveOnMesh(
        problem, vehicle, hard, ResampleGuess(smooth, smooth.times), options);
    sol.strategy = "smoothing-continuation";
    return sol;
  }

  try {
    return SolveOnMesh(problem, vehicle, hard, start, options);
  } catch (const SolverError&) {
    if (!problem.constrained) throw;
  }

  // Constrained fallbacks: start from the unconstrained extremal, then
  // tighten a smoothed clamp before switching to the hard one.
  TpbvpProblem relaxed = problem;
  relaxed.constrained = false;
  const TpbvpSolution free_sol =
      SolveOnMesh(relaxed, vehicle, relaxed.input_mode(), start, options);
  try {
    TpbvpSolution sol = SolveOnMesh(problem, vehicle, hard,
                                    ResampleGuess(free_sol, free_sol.times), options);
    sol.strategy = "unconstrained-continuation";
    return sol;
  } catch (const SolverError&) {
  }
  MeshGuess current = ResampleGuess(free_sol, free_sol.times);
  for (double k : {1e2, 1e3, 1e4, 1e5, 1e6}) {
    const TpbvpSolution step =
        SolveOnMesh(problem, vehicle, problem.input_mode(k), current, options);
    current = ResampleGuess(step, step.times);
  }
  TpbvpSolution sol = SolveOnMesh(problem, vehicle, hard, current, options);
  sol.strategy = "smoothing-continuation";
  return sol;
}

StateVector TpbvpSolution::state_at(double t) const {
  const std::size_t i = IntervalIndex(times, t);
  const double h = times[i + 1] - times[i];
  const double s = (t - times[i]) / h;
  StateVector value;
  const StateVector y0 = states.row(i).transpose();
  const StateVector y1 = states.row(i + 1).transpose();
  const StateVector f0 = derivatives.row(i).head<6>().transpose();
  const StateVector f1 = derivatives.row(i + 1).head<6>().transpose();
  Hermite(s, h, y0, f0, y1, f1, &value, static_cast<StateVector*>(nullptr));
  return value;
}

CostateVector TpbvpSolution::costate_at(double t) const {
  const std::size_t i = IntervalIndex(times, t);
  const double h = times[i + 1] - times[i];
  const double s = (t - times[i]) / h;
  CostateVector value;
  const CostateVector y0 = costates.row(i).transpose();
  const CostateVector y1 = costates.row(i + 1).transpose();
  const CostateVector f0 = derivatives.row(i).tail<6>().transpose();
  const CostateVector f1 = derivatives.row(i + 1).tail<6>().transpose();
  Hermite(s, h, y0, f0, y1, f1, &value, static_cast<CostateVector*>(nullptr));
  return value;
}

ThrustVector TpbvpSolution::input_at(double t) const {
  InputMode hard = mode;
  hard.smoothing = 0.0;
  return optimal_inputs(vehicle, costate_at(t), hard);
}

double TpbvpSolution::hamiltonian_at(std::size_t k) const {
  const auto i = static_cast<Eigen::Index>(k);
  return hamiltonian(vehicle, states.row(i).transpose(),
                     costates.row(i).transpose(), inputs.row(i).transpose());
}

BackpropagationReport verify_backpropagation(const TpbvpSolution& solution,
                                             const TpbvpProblem& problem,
                                             double step) {
  if (!(step > 0.0)) {
    throw std::invalid_argument("verify_backpropagation: step must be > 0");
  }
  BackpropagationReport report;
  const ThrustSchedule schedule = [&solution](double t) {
    return solution.input_at(t);
  };
  StateVector x = problem.x0;
  for (std::size_t i = 0; i + 1 < solution.size(); ++i) {
    const double t0 = solution.times[i];
    const double h = solution.times[i + 1] - t0;
    const int substeps = std::max(1, static_cast<int>(std::ceil(h / step - 1e-9)));
    const double dt = h / substeps;
    for (int k = 0; k < substeps; ++k) {
      x = rk4_step(solution.vehicle, x, schedule, t0 + k * dt, dt);
    }
    const StateVector diff =
        x - solution.states.row(static_cast<Eigen::Index>(i + 1)).transpose();
    report.max_deviation = std::max(report.max_deviation, diff.cwiseAbs().maxCoeff());
    report.max_position_deviation =
        std::max(report.max_position_deviation,
                 std::max(std::abs(diff(kX)), std::abs(diff(kY))));
  }
  const StateVector diff0 = problem.x0 - solution.states.row(0).transpose();
  report.max_deviation = std::max(report.max_deviation, diff0.cwiseAbs().maxCoeff());
  return report;
}

double trajectory_cost(const TpbvpSolution& solution) {
  double cost = 0.0;
  for (std::size_t i = 0; i + 1 < solution.size(); ++i) {
    const auto a = static_cast<Eigen::Index>(i);
    const double h = solution.times[i + 1] - solution.times[i];
    cost += 0.5 * h *
            (0.5 * solution.inputs.row(a).squaredNorm() +
             0.5 * solution.inputs.row(a + 1).squaredNorm());
  }
  return cost;
}

double clamp_activation_fraction(const TpbvpSolution& solution) {
  if (solution.size() == 0) return 0.0;
  int active = 0;
  for (std::size_t i = 0; i < solution.size(); ++i) {
    const ThrustVector t_star = unconstrained_optimal_inputs(
        solution.vehicle,
        solution.costates.row(static_cast<Eigen::Index>(i)).transpose());
    for (int j = 0; j < 4; ++j) {
      if (solution.mode.constrained &&
          (t_star(j) < 0.0 || t_star(j) > solution.mode.t_max)) {
        ++active;
      }
    }
  }
  return static_cast<double>(active) / (4.0 * static_cast<double>(solution.size()));
}

Eigen::Matrix4d hamiltonian_input_hessian(const Vehicle& vehicle,
                                          const StateVector& state,
                                          const CostateVector& costate,
                                          const ThrustVector& thrust, double h) {
  const auto H = [&](const ThrustVector& t) {
    return hamiltonian(vehicle, state, costate, t);
  };
  Eigen::Matrix4d hess;
  for (int i = 0; i < 4; ++i) {
    for (int j = 0; j < 4; ++j) {
      ThrustVector pp = thrust, pm = thrust, mp = thrust, mm = thrust;
      pp(i) += h;
      pp(j) += h;
      pm(i) += h;
      pm(j) -= h;
      mp(i) -= h;
      mp(j) += h;
      mm(i) -= h;
      mm(j) -= h;
      hess(i, j) = (H(pp) - H(pm) - H(mp) + H(mm)) / (4.0 * h * h);
    }
  }
  return hess;
}

bool legendre_clebsch_check(const VehicleParams& params) {
  const Vehicle vehicle = Vehicle::Make(params);
  const StateVector samples_x[] = {
      StateVector::Zero(),
      (StateVector() << 0.1, -0.2, 0.3, 0.05, -0.02, 0.4).finished()};
  const CostateVector samples_l[] = {
      CostateVector::Zero(),
      (CostateVector() << 1e-3, -2e-3, 5e-4, 0.04, -0.03, 0.002).finished()};
  for (const auto& x : samples_x) {
    for (const auto& l : samples_l) {
      const Eigen::Matrix4d hess =
          hamiltonian_input_hessian(vehicle, x, l, ThrustVector::Constant(0.01));
      const Eigen::Matrix4d sym = 0.5 * (hess + hess.transpose());
      Eigen::SelfAdjointEigenSolver<Eigen::Matrix4d> eig(sym);
      if (eig.eigenvalues().minCoeff() <= 0.0) return false;
    }
  }
  return true;
}

}  // namespace pgnc
