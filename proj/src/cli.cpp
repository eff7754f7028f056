#include "pgnc/cli.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <mutex>
#include <ostream>
#include <thread>
#include <vector>

#include <CLI11.hpp>
#include <fmt/format.h>

#include "pgnc/error.hpp"
#include "pgnc/linear_analysis.hpp"

namespace pgnc {
namespace fs = std::filesystem;
namespace {

// Avoid "-0" in reports so that sign noise does not change output bytes.
double Clean(double v) { return v == 0.0 ? 0.0 : v; }

std::string Bool(bool b) { return b ? "true" : "false"; }

std::vector<ThrusterSet> SingleAndDoubleFailures() {
  std::vector<ThrusterSet> sets{ThrusterSet{}};
  for (int i = 1; i <= 4; ++i) sets.push_back(ThrusterSet{i});
  for (int i = 1; i <= 4; ++i) {
    for (int j = i + 1; j <= 4; ++j) sets.push_back(ThrusterSet{i, j});
  }
  return sets;
}

std::vector<fs::path> ScenarioFiles(const fs::path& dir) {
  std::vector<fs::path> files;
  for (const auto& entry : fs::directory_iterator(dir)) {
    const auto ext = entry.path().extension();
    if (entry.is_regular_file() && (ext == ".yaml" || ext == ".yml")) {
      files.push_back(entry.path());
    }
  }
  std::sort(files.begin(), files.end());
  return files;
}

struct JobOutcome {
  int code = 0;
  std::string message;
};

// Runs `job` for every scenario in a directory on up to `jobs` threads.
// Scenarios share nothing, so each job owns its output subdirectory.
int RunBatch(const fs::path& dir, int jobs, std::ostream& err,
             const std::function<void(const fs::path&)>& job) {
  const std::vector<fs::path> files = ScenarioFiles(dir);
  if (files.empty()) throw IoError("no scenario files (*.yaml) in '" + dir.string() + "'");
  std::vector<JobOutcome> outcomes(files.size());
  std::atomic<std::size_t> next{0};
  const auto worker = [&] {
    for (std::size_t i = next++; i < files.size(); i = next++) {
      try {
        job(files[i]);
      } catch (const Error& e) {
        outcomes[i] = {static_cast<int>(e.code()), e.what()};
      } catch (const std::exception& e) {
        outcomes[i] = {static_cast<int>(ExitCode::kFailure), e.what()};
      }
    }
  };
  const int threads = std::clamp(jobs, 1, static_cast<int>(files.size()));
  std::vector<std::thread> pool;
  for (int t = 1; t < threads; ++t) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();

  int code = 0;
  for (std::size_t i = 0; i < files.size(); ++i) {
    if (outcomes[i].code != 0) {
      err << files[i].string() << ": error: " << outcomes[i].message << '\n';
      if (code == 0) code = outcomes[i].code;
    }
  }
  return code;
}

}  // namespace

std::string analysis_report(const ScenarioDocument& doc) {
  const Scenario& s = doc.scenario;
  const Vehicle vehicle = Vehicle::Make(s.params, s.config, s.inertial_kinematics);
  const LinearModel lin = linearize(vehicle, StateVector::Zero());

  std::string r = provenance_header(doc.sha256) + "\n";
  r += fmt::format("scenario: {}\nconfig: {}\n", s.name, ToString(s.config));
  r += fmt::format("vehicle: mass_kg={} side_length_m={} moment_arm_m={} inertia_zz_kgm2={}\n",
                   s.params.mass, s.params.side_length, s.params.moment_arm,
                   s.params.inertia_zz);
  const Eigen::VectorXcd eig = eigenvalues(lin.A);
  double max_abs = 0.0;
  r += "eigenvalues:\n";
  for (Eigen::Index i = 0; i < eig.size(); ++i) {
    r += fmt::format("  - {:.6g} {:+.6g}i\n", Clean(eig(i).real()), Clean(eig(i).imag()));
    max_abs = std::max(max_abs, std::abs(eig(i)));
  }
  r += fmt::format("max_abs_eigenvalue: {:.3g}\n", max_abs);
  r += fmt::format("controllability_rank: {}\n",
                   numerical_rank(controllability_matrix(lin.A, lin.B)));
  r += "failure_analysis:\n";
  for (const ThrusterSet& set : SingleAndDoubleFailures()) {
    const FailureReport f = failure_analysis(lin, set);
    r += fmt::format("  - failed: \"{}\"  rank: {}  reachable: {}\n",
                     set.ToString(), f.controllability_rank, Bool(f.reachable));
  }
  const WrenchFeasibility w = wrench_feasibility(s.config, s.params);
  r += fmt::format("wrench_feasibility:\n  pure_fx: {}\n  pure_fy: {}\n  pure_mz: {}\n",
                   Bool(w.pure_fx), Bool(w.pure_fy), Bool(w.pure_mz));
  return r;
}

GainArtifact design_artifact(const ScenarioDocument& doc) {
  GainArtifact artifact;
  artifact.scenario_name = doc.scenario.name;
  artifact.scenario_sha256 = doc.sha256;
  for (ControllerKind c : doc.controllers) {
    artifact.designs.push_back(design_gains(doc.for_controller(c)));
  }
  return artifact;
}

std::string tpbvp_csv(const TpbvpSolution& solution, std::string_view sha256) {
  std::string csv = provenance_header(sha256) + "\n";
  csv += "t,x,y,psi,u,v,r,l1,l2,l3,l4,l5,l6,T1,T2,T3,T4\n";
  for (std::size_t k = 0; k < solution.size(); ++k) {
    const auto i = static_cast<Eigen::Index>(k);
    csv += fmt::format("{:.6f}", solution.times[k]);
    for (int j = 0; j < 6; ++j) csv += fmt::format(",{:.12g}", Clean(solution.states(i, j)));
    for (int j = 0; j < 6; ++j) csv += fmt::format(",{:.12g}", Clean(solution.costates(i, j)));
    for (int j = 0; j < 4; ++j) csv += fmt::format(",{:.12g}", Clean(solution.inputs(i, j)));
    csv += '\n';
  }
  return csv;
}

std::string tpbvp_summary(const TpbvpProblem& problem,
                          const TpbvpSolution& solution, std::string_view sha256) {
  const BackpropagationReport bp = verify_backpropagation(solution, problem);
  double h_min = solution.hamiltonian_at(0), h_max = h_min;
  double grad = 0.0;
  int negative_nodes = 0;
  for (std::size_t k = 0; k < solution.size(); ++k) {
    const auto i = static_cast<Eigen::Index>(k);
    const double h = solution.hamiltonian_at(k);
    h_min = std::min(h_min, h);
    h_max = std::max(h_max, h);
    if (solution.inputs.row(i).minCoeff() < 0.0) ++negative_nodes;
    if (!problem.constrained) {
      grad = std::max(grad, hamiltonian_thrust_gradient(
                                solution.vehicle, solution.costates.row(i).transpose(),
                                solution.inputs.row(i).transpose())
                                .cwiseAbs()
                                .maxCoeff());
    }
  }
  std::string r = provenance_header(sha256) + "\n";
  r += fmt::format("mode: {}\n", problem.constrained ? "constrained" : "unconstrained");
  if (problem.constrained) r += fmt::format("t_max_N: {}\n", problem.t_max);
  r += fmt::format("tf_s: {}\nmesh_points: {}\n", problem.tf, solution.size());
  r += fmt::format("strategy: {}\nnewton_iterations: {}\nmesh_doublings: {}\n",
                   solution.strategy, solution.newton_iterations, solution.mesh_doublings);
  r += fmt::format("cost_N2s: {:.9g}\n", trajectory_cost(solution));
  r += fmt::format("max_boundary_residual: {:.3e}\n", solution.max_bc_residual);
  r += fmt::format("max_collocation_defect: {:.3e}\n", solution.max_defect);
  r += fmt::format("max_interpolation_residual: {:.3e}\n",
                   solution.max_interpolation_residual);
  r += fmt::format("hamiltonian_range: [{:.9e}, {:.9e}]\n", h_min, h_max);
  if (!problem.constrained) r += fmt::format("max_abs_dH_dT: {:.3e}\n", grad);
  r += fmt::format("input_range_N: [{:.6g}, {:.6g}]\n", Clean(solution.inputs.minCoeff()),
                   Clean(solution.inputs.maxCoeff()));
  r += fmt::format("clamp_activation_fraction: {:.4f}\n", clamp_activation_fraction(solution));
  r += fmt::format("negative_thrust: {} ({} of {} nodes)\n", Bool(negative_nodes > 0),
                   negative_nodes, solution.size());
  r += fmt::format("backpropagation_max_deviation: {:.3e}\n", bp.max_deviation);
  r += fmt::format("backpropagation_max_position_deviation_m: {:.3e}\n",
                   bp.max_position_deviation);
  return r;
}

std::string modulation_csv(const PwmModel& model, double step, std::string_view sha256) {
  std::string csv = provenance_header(sha256) + "\n";
  csv += fmt::format("# frequency_Hz={} rise_time_s={} fall_time_s={} t_max_N={}\n",
                     model.frequency, model.rise_time, model.fall_time, model.t_max);
  if (model.degenerate()) {
    csv += "# warning: degenerate PWM model (period <= rise_time + fall_time)\n";
  }
  csv += "duty,thrust_N\n";
  for (const ModulationPoint& p : modulation_sweep(model, step)) {
    csv += fmt::format("{:.4f},{:.10g}\n", p.duty, p.thrust);
  }
  return csv;
}

void cmd_analyze(const ScenarioDocument& doc, const std::optional<fs::path>& out,
                 std::ostream& stdout_stream) {
  const std::string report = analysis_report(doc);
  if (out) {
    write_text_file(*out / "analysis.txt", report);
  } else {
    stdout_stream << report;
  }
}

void cmd_design(const ScenarioDocument& doc, const fs::path& out) {
  write_text_file(out, serialize_gains(design_artifact(doc)));
}

void cmd_simulate(const ScenarioDocument& doc,
                  const std::optional<fs::path>& gains_path, const fs::path& out_dir) {
  if (!doc.has_simulation) {
    throw ParseError("scenario '" + doc.scenario.name + "' has no 'simulation' block");
  }
  const GainArtifact artifact = gains_path ? load_gains(*gains_path) : design_artifact(doc);
  for (ControllerKind c : doc.controllers) {
    const DesignResult* design = artifact.find(c);
    if (!design) {
      throw ParseError(fmt::format("gain artifact has no '{}' design", ToString(c)));
    }
    const Scenario scenario = doc.for_controller(c);
    SimulationResult result;
    try {
      result = run_closed_loop(scenario, design->gains);
    } catch (const std::invalid_argument& e) {
      throw Error(e.what());
    }
    const std::string header = provenance_header(doc.sha256) + "\n";
    write_text_file(out_dir / fmt::format("trajectory_{}.csv", ToString(c)),
                    header + trajectory_csv(result));
    write_text_file(out_dir / fmt::format("metrics_{}.txt", ToString(c)),
                    header + metrics_report(scenario, result));
  }
}

void cmd_optimize(const ScenarioDocument& doc, const fs::path& out_dir) {
  if (!doc.tpbvp) {
    throw ParseError("scenario '" + doc.scenario.name + "' has no 'tpbvp' block");
  }
  TpbvpSolution solution;
  try {
    solution = solve_tpbvp(*doc.tpbvp, doc.tpbvp_options);
  } catch (const SolverError& e) {
    throw SolverError(std::string(e.what()) +
                      " (adjust tpbvp.tf, tpbvp.mesh_points or tpbvp.smoothing)");
  }
  write_text_file(out_dir / "solution.csv", tpbvp_csv(solution, doc.sha256));
  write_text_file(out_dir / "summary.txt", tpbvp_summary(*doc.tpbvp, solution, doc.sha256));
}

void cmd_modulate(const PwmModel& model, double step, const fs::path& out,
                  std::string_view sha256) {
  write_text_file(out, modulation_csv(model, step, sha256));
}

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Planar thruster-vehicle guidance and control workbench", "pgnc"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(PGNC_VERSION));

  std::string scenario_path;
  std::string out_path;
  std::string gains_path;
  int jobs = 1;
  double freq = 0.0;
  double step = 0.05;
  double t_max = 0.2;

  const auto scenario_opt = [&](CLI::App* sub) {
    sub->add_option("--scenario", scenario_path, "Scenario file or directory")->required();
    sub->add_option("--jobs", jobs, "Parallel scenarios in batch mode")
        ->check(CLI::PositiveNumber);
  };
  CLI::App* analyze = app.add_subcommand("analyze", "Open-loop analysis report");
  scenario_opt(analyze);
  analyze->add_option("--out", out_path, "Output directory (default: stdout)");

  CLI::App* design = app.add_subcommand("design", "Synthesize the gain artifact");
  scenario_opt(design);
  design->add_option("--out", out_path, "Artifact path (directory in batch mode)")
      ->required();

  CLI::App* simulate = app.add_subcommand("simulate", "Closed-loop simulation");
  scenario_opt(simulate);
  simulate->add_option("--gains", gains_path, "Gain artifact (default: design now)");
  simulate->add_option("--out", out_path, "Output directory")->required();

  CLI::App* optimize = app.add_subcommand("optimize", "Fuel-optimal TPBVP");
  scenario_opt(optimize);
  optimize->add_option("--out", out_path, "Output directory")->required();

  CLI::App* modulate = app.add_subcommand("modulate", "PWM duty/thrust sweep");
  modulate->add_option("--freq", freq, "PWM frequency [Hz]")->required();
  modulate->add_option("--step", step, "Duty step (fraction)");
  modulate->add_option("--t-max", t_max, "Full-open thrust [N]");
  modulate->add_option("--scenario", scenario_path, "Scenario supplying valve timing");
  modulate->add_option("--out", out_path, "Output CSV path")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? 0 : static_cast<int>(ExitCode::kUsage);
  }

  try {
    if (modulate->parsed()) {
      if (!(freq > 0.0)) {
        err << "error: --freq must be > 0\n";
        return static_cast<int>(ExitCode::kUsage);
      }
      PwmModel model;
      std::string sha;
      if (!scenario_path.empty()) {
        const ScenarioDocument doc = load_scenario(scenario_path);
        sha = doc.sha256;
        if (doc.scenario.pwm) model = *doc.scenario.pwm;
        model.t_max = doc.scenario.t_max;
      }
      model.frequency = freq;
      if (modulate->count("--t-max")) model.t_max = t_max;
      try {
        cmd_modulate(model, step, out_path, sha);
      } catch (const std::invalid_argument& e) {
        err << "error: " << e.what() << '\n';
        return static_cast<int>(ExitCode::kUsage);
      }
      return 0;
    }

    const fs::path scenario(scenario_path);
    const std::optional<fs::path> out_opt =
        out_path.empty() ? std::nullopt : std::optional<fs::path>(out_path);
    const std::optional<fs::path> gains_opt =
        gains_path.empty() ? std::nullopt : std::optional<fs::path>(gains_path);

    const auto run_one = [&](const fs::path& file, bool batch) {
      const ScenarioDocument doc = load_scenario(file);
      const fs::path base = batch ? fs::path(out_path) / file.stem() : fs::path(out_path);
      if (analyze->parsed()) {
        cmd_analyze(doc, batch ? std::optional<fs::path>(base) : out_opt, out);
      } else if (design->parsed()) {
        cmd_design(doc, batch ? base / "gains.yaml" : base);
      } else if (simulate->parsed()) {
        std::optional<fs::path> gains = gains_opt;
        if (batch && gains) gains = *gains / file.stem() / "gains.yaml";
        cmd_simulate(doc, gains, base);
      } else if (optimize->parsed()) {
        cmd_optimize(doc, base);
      }
    };

    if (fs::is_directory(scenario)) {
      if (analyze->parsed() && !out_opt) {
        err << "error: --out is required when --scenario is a directory\n";
        return static_cast<int>(ExitCode::kUsage);
      }
      return RunBatch(scenario, jobs, err,
                      [&](const fs::path& file) { run_one(file, true); });
    }
    run_one(scenario, false);
    return 0;
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return static_cast<int>(e.code());
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return static_cast<int>(ExitCode::kFailure);
  }
}

}  // namespace pgnc
