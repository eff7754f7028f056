#include "pgnc/sim_harness.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

#include <fmt/format.h>

#include "pgnc/error.hpp"

namespace pgnc {
namespace {

constexpr double kDivergenceBound = 1e6;
constexpr double kOnThreshold = 1e-9;

std::string Normalize(std::string_view name) {
  std::string out;
  for (char c : name) {
    if (c == '-') c = '_';
    out.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
  }
  return out;
}

bool IsIntegerMultiple(double value, double base) {
  const double ratio = value / base;
  return std::abs(ratio - std::round(ratio)) < 1e-9 * std::max(1.0, ratio);
}

// Linear interpolation of the time at which `signal` first reaches `level`
// (in the direction of `sign`), or NaN.
double FirstCrossing(const std::vector<double>& t, const std::vector<double>& y,
                     double level, double sign) {
  if (sign * (y[0] - level) >= 0.0) return t[0];
  for (std::size_t k = 1; k < y.size(); ++k) {
    if (sign * (y[k] - level) >= 0.0) {
      const double a = y[k - 1] - level;
      const double b = y[k] - level;
      return t[k - 1] + (t[k] - t[k - 1]) * a / (a - b);
    }
  }
  return std::nan("");
}

struct PlantLagState {
  StateVector x;
  ThrustVector lag;
};

}  // namespace

ControllerKind ParseControllerKind(std::string_view name) {
  const std::string n = Normalize(name);
  if (n == "sdr") return ControllerKind::kSdr;
  if (n == "pi_nzsp" || n == "pinzsp") return ControllerKind::kPiNzsp;
  throw std::invalid_argument("unknown controller '" + std::string(name) +
                              "' (expected sdr or pi_nzsp)");
}

std::string_view ToString(ControllerKind kind) {
  return kind == ControllerKind::kSdr ? "sdr" : "pi_nzsp";
}

Eigen::Vector3d Reference::pose_at(double t) const {
  if (kind == Kind::kStep) return target;
  Eigen::Vector3d pose = Eigen::Vector3d::Zero();
  const double s = amplitude * std::sin(2.0 * std::numbers::pi * t / period);
  for (int i = 0; i < 3; ++i) {
    if (axes[i]) pose(i) = s;
  }
  return pose;
}

void Scenario::Validate() const {
  const auto fail = [this](const std::string& msg) {
    throw std::invalid_argument("scenario '" + name + "': " + msg);
  };
  params.Validate();
  if (!(integration_step > 0.0)) fail("integration_step must be > 0");
  if (!(sample_time > 0.0)) fail("sample_time must be > 0");
  if (sample_time < integration_step - 1e-15 ||
      !IsIntegerMultiple(sample_time, integration_step)) {
    fail("sample_time must be an integer multiple of integration_step");
  }
  if (!(duration > 0.0) || !std::isfinite(duration)) fail("duration must be > 0");
  if (!(t_max > 0.0)) fail("t_max must be > 0");
  if (actuator_lag_tau && !(*actuator_lag_tau > 0.0)) {
    fail("actuator lag tau must be > 0");
  }
  if (pwm) {
    pwm->Validate();
    if (std::abs(pwm->t_max - t_max) > 1e-15) {
      fail("pwm t_max must equal the thrust limit");
    }
  }
  if (reference.kind == Reference::Kind::kSinusoid && !(reference.period > 0.0)) {
    fail("sinusoid period must be > 0");
  }
  if (!initial_state.allFinite() || !reference.target.allFinite() ||
      !disturbance.allFinite()) {
    fail("non-finite state, reference or disturbance");
  }
  const auto check = [&](const Eigen::VectorXd& v, Eigen::Index n,
                         const char* what) {
    if (v.size() != n) {
      fail(fmt::format("weights.{} needs {} entries, got {}", what, n, v.size()));
    }
    for (Eigen::Index i = 0; i < n; ++i) {
      if (!(v(i) > 0.0) || !std::isfinite(v(i))) {
        fail(fmt::format("weights.{}[{}] must be finite and > 0", what, i));
      }
    }
  };
  check(weights.plant_bounds, 6, "plant");
  check(weights.input_bounds, 4, "input");
  if (actuator_lag_tau) check(weights.actuator_bounds, 4, "actuator");
  if (controller == ControllerKind::kPiNzsp) check(weights.integral_bounds, 3, "integral");
}

int Scenario::augmented_dimension() const {
  return 6 + (actuator_lag_tau ? 4 : 0) +
         (controller == ControllerKind::kPiNzsp ? 3 : 0);
}

DesignResult design_gains(const Scenario& scenario) {
  scenario.Validate();
  const Vehicle vehicle = Vehicle::Make(scenario.params, scenario.config,
                                        scenario.inertial_kinematics);
  LinearModel lin = linearize(vehicle, StateVector::Zero());
  for (int j = 0; j < 4; ++j) {
    if (scenario.failed_thrusters.contains(j)) lin.B.col(j).setZero();
  }

  AugmentedContinuousModel model =
      scenario.actuator_lag_tau ? augment_actuator_lag(lin, *scenario.actuator_lag_tau)
                                : plant_model(lin);
  const WeightSpec& w = scenario.weights;
  Eigen::VectorXd state_bounds(model.dimension());
  state_bounds.head(6) = w.plant_bounds;
  if (scenario.actuator_lag_tau) state_bounds.tail(4) = w.actuator_bounds;

  DesignResult out;
  out.controller = scenario.controller;
  if (scenario.controller == ControllerKind::kSdr) {
    const WeightMatrices weights = bryson_weights(state_bounds, w.input_bounds);
    const SdrDesign design =
        sdr_gain(model.A, model.B, weights.Q, weights.R, scenario.sample_time);
    out.gains = design.gains;
    out.closed_loop_spectral_radius = design.closed_loop_spectral_radius;
    out.riccati_iterations = design.riccati_iterations;
    out.state_labels = model.labels;
    return out;
  }

  const int n = model.dimension();
  const Eigen::MatrixXd C = pose_output_matrix(n);
  const AugmentedContinuousModel aug = augment_integral_continuous(model, C);
  Eigen::VectorXd aug_bounds(aug.dimension());
  aug_bounds << state_bounds, w.integral_bounds;
  const WeightMatrices weights = bryson_weights(aug_bounds, w.input_bounds);
  const SdrDesign design =
      sdr_gain(aug.A, aug.B, weights.Q, weights.R, scenario.sample_time);

  const DiscreteModel plant = zoh_discretize(model.A, model.B, scenario.sample_time);
  const Eigen::MatrixXd D = Eigen::MatrixXd::Zero(C.rows(), model.B.cols());
  const QuadPartition partition = nzsp_quad_partition(plant.G, plant.H, C, D);
  out.gains = make_pi_nzsp_gains(design.gains.K, n, partition, scenario.sample_time);
  out.partition = partition;
  out.closed_loop_spectral_radius = design.closed_loop_spectral_radius;
  out.riccati_iterations = design.riccati_iterations;
  out.state_labels = aug.labels;
  return out;
}

StepMetrics step_metrics(const std::vector<double>& times,
                         const std::vector<double>& signal, double initial,
                         double final_value) {
  if (times.size() != signal.size() || times.empty()) {
    throw std::invalid_argument("step_metrics: times and signal must match");
  }
  StepMetrics m;
  const double step = final_value - initial;
  if (step == 0.0) return m;
  const double sign = step > 0.0 ? 1.0 : -1.0;
  const double t10 = FirstCrossing(times, signal, initial + 0.1 * step, sign);
  if (std::isnan(t10)) return m;
  m.defined = true;

  const double t90 = FirstCrossing(times, signal, initial + 0.9 * step, sign);
  m.rise_time = std::isnan(t90) ? std::numeric_limits<double>::infinity() : t90 - t10;

  const double band = 0.02 * std::abs(step);
  std::size_t last_out = signal.size();
  for (std::size_t k = signal.size(); k-- > 0;) {
    if (std::abs(signal[k] - final_value) > band) {
      last_out = k;
      break;
    }
  }
  if (last_out == signal.size()) {
    m.settling_time = 0.0;
  } else if (last_out + 1 == signal.size()) {
    m.settling_time = std::numeric_limits<double>::infinity();
  } else {
    // Interpolate the re-entry into the band between last_out and last_out+1.
    const double a = std::abs(signal[last_out] - final_value) - band;
    const double b = std::abs(signal[last_out + 1] - final_value) - band;
    const double frac = a / (a - b);
    m.settling_time = times[last_out] +
                      frac * (times[last_out + 1] - times[last_out]) - times.front();
  }

  double peak = 0.0;
  for (double y : signal) peak = std::max(peak, sign * (y - final_value));
  m.overshoot = 100.0 * peak / std::abs(step);
  m.steady_state_error = std::abs(final_value - signal.back());
  return m;
}

FuelMetrics fuel_metrics(const std::vector<double>& times,
                         const std::vector<ThrustVector>& thrust) {
  if (times.size() != thrust.size()) {
    throw std::invalid_argument("fuel_metrics: times and thrust must match");
  }
  FuelMetrics f;
  for (std::size_t k = 0; k + 1 < times.size(); ++k) {
    const double h = times[k + 1] - times[k];
    f.quadratic_cost +=
        0.5 * h * (0.5 * thrust[k].squaredNorm() + 0.5 * thrust[k + 1].squaredNorm());
    f.total_impulse +=
        0.5 * h * (thrust[k].cwiseAbs().sum() + thrust[k + 1].cwiseAbs().sum());
    for (int i = 0; i < 4; ++i) {
      if (std::abs(thrust[k](i)) > kOnThreshold) f.thruster_on_time[i] += h;
    }
  }
  return f;
}

SimulationResult run_closed_loop(const Scenario& scenario, const GainSet& gains) {
  scenario.Validate();
  const int dim = scenario.augmented_dimension();
  const bool pi = scenario.controller == ControllerKind::kPiNzsp;
  if (gains.K.rows() != 4 || gains.K.cols() != dim ||
      (pi && (gains.feedforward.rows() != 4 || gains.feedforward.cols() != 3 ||
              gains.plant_states != dim - 3))) {
    throw std::invalid_argument(fmt::format(
        "gain dimension mismatch: scenario '{}' ({}, lag {}) needs a 4x{} gain, "
        "got {}x{}",
        scenario.name, ToString(scenario.controller),
        scenario.actuator_lag_tau ? "on" : "off", dim, gains.K.rows(),
        gains.K.cols()));
  }
  const Vehicle vehicle = Vehicle::Make(scenario.params, scenario.config,
                                        scenario.inertial_kinematics);
  const double h = scenario.integration_step;
  const long steps_per_sample = std::lround(scenario.sample_time / h);
  const long total_steps = std::lround(scenario.duration / h);
  const bool lag = scenario.actuator_lag_tau.has_value();
  const double tau = lag ? *scenario.actuator_lag_tau : 1.0;

  const auto rhs = [&](const PlantLagState& s, const ThrustVector& command) {
    PlantLagState d;
    const ThrustVector applied = lag ? s.lag : command;
    d.x = eom_derivative(vehicle, s.x, applied, scenario.disturbance);
    d.lag = lag ? ThrustVector((command - s.lag) / tau) : ThrustVector::Zero();
    return d;
  };
  const auto axpy = [](const PlantLagState& s, double a, const PlantLagState& d) {
    return PlantLagState{s.x + a * d.x, s.lag + a * d.lag};
  };

  SimulationResult out;
  out.lag_enabled = lag;
  PlantLagState s{scenario.initial_state, ThrustVector::Zero()};
  Eigen::Vector3d q = Eigen::Vector3d::Zero();
  ThrustVector command = ThrustVector::Zero();
  const Eigen::MatrixXd C = pose_output_matrix(6);

  const auto record = [&](double t) {
    out.trajectory.times.push_back(t);
    out.trajectory.states.push_back(s.x);
    out.trajectory.inputs.push_back(command);
    out.actual_thrust.push_back(lag ? s.lag : command);
    out.reference.push_back(scenario.reference.pose_at(t));
  };

  for (long k = 0; k <= total_steps; ++k) {
    const double t = static_cast<double>(k) * h;
    if (k < total_steps && k % steps_per_sample == 0) {
      const Eigen::Vector3d ym = scenario.reference.pose_at(t);
      Eigen::VectorXd x_aug(dim);
      x_aug.head<6>() = s.x;
      if (lag) x_aug.segment<4>(6) = s.lag;
      Eigen::VectorXd raw;
      if (pi) {
        x_aug.tail<3>() = q;
        raw = pi_nzsp_control(x_aug, ym, gains);
        q += scenario.sample_time * (C * s.x - ym);
      } else {
        Eigen::VectorXd x_ref = Eigen::VectorXd::Zero(dim);
        x_ref.head<3>() = ym;
        raw = -gains.K * (x_aug - x_ref);
      }
      ++out.command_samples;
      for (int i = 0; i < 4; ++i) {
        double u = raw(i);
        const double lower = scenario.bidirectional ? -scenario.t_max : 0.0;
        if (u < lower || u > scenario.t_max) ++out.clamp_events;
        u = std::clamp(u, lower, scenario.t_max);
        if (scenario.failed_thrusters.contains(i)) u = 0.0;
        if (scenario.pwm) {
          const double level =
              effective_thrust(duty_for_thrust(std::abs(u), *scenario.pwm), *scenario.pwm);
          u = std::copysign(level, u);
        }
        command(i) = u;
      }
    }
    record(t);
    if (k == total_steps) break;

    const PlantLagState k1 = rhs(s, command);
    const PlantLagState k2 = rhs(axpy(s, 0.5 * h, k1), command);
    const PlantLagState k3 = rhs(axpy(s, 0.5 * h, k2), command);
    const PlantLagState k4 = rhs(axpy(s, h, k3), command);
    s.x += h / 6.0 * (k1.x + 2.0 * k2.x + 2.0 * k3.x + k4.x);
    s.lag += h / 6.0 * (k1.lag + 2.0 * k2.lag + 2.0 * k3.lag + k4.lag);
    const double size = s.x.cwiseAbs().maxCoeff();
    if (!(size <= kDivergenceBound)) {
      throw DivergenceError(fmt::format(
          "simulation '{}' diverged at t = {:.3f} s (max |state| = {:.3g})",
          scenario.name, t + h, size));
    }
  }

  const auto& times = out.trajectory.times;
  const Eigen::Vector3d x0 = scenario.initial_state.head<3>();
  for (int axis = 0; axis < 3; ++axis) {
    if (scenario.reference.kind != Reference::Kind::kStep) continue;
    std::vector<double> signal;
    signal.reserve(times.size());
    for (const auto& x : out.trajectory.states) signal.push_back(x(axis));
    out.step[axis] = step_metrics(times, signal, x0(axis),
                                  scenario.reference.target(axis));
  }
  out.fuel = fuel_metrics(times, out.actual_thrust);

  const double window = scenario.reference.kind == Reference::Kind::kSinusoid
                            ? scenario.reference.period
                            : 0.1 * scenario.duration;
  const double start = times.back() - window;
  int count = 0;
  for (std::size_t k = 0; k < times.size(); ++k) {
    if (times[k] < start - 1e-9) continue;
    out.tracking.window_mean_abs_error +=
        (out.trajectory.states[k].head<3>() - out.reference[k]).cwiseAbs();
    ++count;
  }
  if (count > 0) out.tracking.window_mean_abs_error /= count;
  out.tracking.final_abs_error =
      (out.trajectory.states.back().head<3>() - out.reference.back()).cwiseAbs();
  return out;
}

std::string trajectory_csv(const SimulationResult& result) {
  std::string csv = "t,x,y,psi,u,v,r,T1,T2,T3,T4";
  if (result.lag_enabled) csv += ",T1a,T2a,T3a,T4a";
  csv += '\n';
  const Trajectory& traj = result.trajectory;
  for (std::size_t k = 0; k < traj.size(); ++k) {
    csv += fmt::format("{:.6f}", traj.times[k]);
    for (int i = 0; i < 6; ++i) csv += fmt::format(",{:.10g}", traj.states[k](i));
    for (int i = 0; i < 4; ++i) csv += fmt::format(",{:.10g}", traj.inputs[k](i));
    if (result.lag_enabled) {
      for (int i = 0; i < 4; ++i) {
        csv += fmt::format(",{:.10g}", result.actual_thrust[k](i));
      }
    }
    csv += '\n';
  }
  return csv;
}

std::string metrics_report(const Scenario& scenario,
                           const SimulationResult& result) {
  static constexpr const char* kAxes[] = {"x", "y", "psi"};
  std::string r;
  r += fmt::format("scenario: {}\ncontroller: {}\n", scenario.name,
                   ToString(scenario.controller));
  r += fmt::format("sample_time_s: {}\nintegration_step_s: {}\nduration_s: {}\n",
                   scenario.sample_time, scenario.integration_step,
                   scenario.duration);
  r += fmt::format("clamp_events: {} of {} commands x 4 thrusters\n",
                   result.clamp_events, result.command_samples);
  if (scenario.reference.kind == Reference::Kind::kStep) {
    r += "step_metrics:\n";
    for (int axis = 0; axis < 3; ++axis) {
      const StepMetrics& m = result.step[axis];
      if (!m.defined) {
        r += fmt::format("  {}: undefined\n", kAxes[axis]);
        continue;
      }
      r += fmt::format(
          "  {}: rise_s={:.4f} settling_s={:.4f} overshoot_pct={:.4f} "
          "steady_state_error={:.6g}\n",
          kAxes[axis], m.rise_time, m.settling_time, m.overshoot,
          m.steady_state_error);
    }
  }
  r += "tracking:\n";
  for (int axis = 0; axis < 3; ++axis) {
    r += fmt::format("  {}: final_abs_error={:.6g} window_mean_abs_error={:.6g}\n",
                     kAxes[axis], result.tracking.final_abs_error(axis),
                     result.tracking.window_mean_abs_error(axis));
  }
  const FuelMetrics& f = result.fuel;
  r += fmt::format(
      "fuel:\n  quadratic_cost_N2s: {:.6g}\n  total_impulse_Ns: {:.6g}\n"
      "  on_time_s: [{:.4f}, {:.4f}, {:.4f}, {:.4f}]\n",
      f.quadratic_cost, f.total_impulse, f.thruster_on_time[0],
      f.thruster_on_time[1], f.thruster_on_time[2], f.thruster_on_time[3]);
  return r;
}

}  // namespace pgnc
