#include "pgnc/scenario.hpp"

#include <fstream>
#include <initializer_list>
#include <sstream>
#include <string_view>

#include <fmt/format.h>
#include <openssl/evp.h>
#include <yaml-cpp/yaml.h>

#include "pgnc/error.hpp"
#include "pgnc/presets.hpp"

namespace pgnc {
namespace {

class Reader {
 public:
  explicit Reader(std::string source) : source_(std::move(source)) {}

  [[noreturn]] void Fail(const YAML::Node& node, const std::string& path,
                         const std::string& message) const {
    const YAML::Mark mark = node.Mark();
    if (mark.line >= 0) {
      throw ParseError(fmt::format("{}:{}: '{}': {}", source_, mark.line + 1,
                                   path, message));
    }
    throw ParseError(fmt::format("{}: '{}': {}", source_, path, message));
  }

  void CheckKeys(const YAML::Node& map, const std::string& path,
                 std::initializer_list<std::string_view> allowed) const {
    if (!map.IsMap()) Fail(map, path, "expected a mapping");
    for (const auto& entry : map) {
      const std::string key = entry.first.as<std::string>();
      bool known = false;
      for (std::string_view a : allowed) known = known || key == a;
      if (!known) {
        const std::string full = path.empty() ? key : path + "." + key;
        const YAML::Mark mark = entry.first.Mark();
        throw ParseError(fmt::format("{}:{}: unknown key '{}'", source_,
                                     mark.line + 1, full));
      }
    }
  }

  double Number(const YAML::Node& node, const std::string& path) const {
    if (!node.IsScalar()) Fail(node, path, "expected a number");
    try {
      return node.as<double>();
    } catch (const YAML::Exception&) {
      Fail(node, path, "expected a number, got '" + node.Scalar() + "'");
    }
  }

  int Integer(const YAML::Node& node, const std::string& path) const {
    if (!node.IsScalar()) Fail(node, path, "expected an integer");
    try {
      return node.as<int>();
    } catch (const YAML::Exception&) {
      Fail(node, path, "expected an integer, got '" + node.Scalar() + "'");
    }
  }

  bool Bool(const YAML::Node& node, const std::string& path) const {
    if (!node.IsScalar()) Fail(node, path, "expected true or false");
    try {
      return node.as<bool>();
    } catch (const YAML::Exception&) {
      Fail(node, path, "expected true or false, got '" + node.Scalar() + "'");
    }
  }

  std::string String(const YAML::Node& node, const std::string& path) const {
    if (!node.IsScalar()) Fail(node, path, "expected a string");
    return node.Scalar();
  }

  Eigen::VectorXd Vector(const YAML::Node& node, const std::string& path,
                         Eigen::Index size) const {
    if (!node.IsSequence() || static_cast<Eigen::Index>(node.size()) != size) {
      Fail(node, path, fmt::format("expected a list of {} numbers", size));
    }
    Eigen::VectorXd v(size);
    for (Eigen::Index i = 0; i < size; ++i) {
      v(i) = Number(node[static_cast<std::size_t>(i)],
                    fmt::format("{}[{}]", path, i));
    }
    return v;
  }

  std::vector<std::string> Strings(const YAML::Node& node,
                                   const std::string& path) const {
    if (!node.IsSequence()) Fail(node, path, "expected a list");
    std::vector<std::string> out;
    for (std::size_t i = 0; i < node.size(); ++i) {
      out.push_back(String(node[i], fmt::format("{}[{}]", path, i)));
    }
    return out;
  }

  // Runs `fn`, turning std::invalid_argument into a located ParseError.
  template <typename Fn>
  auto Checked(const YAML::Node& node, const std::string& path, Fn fn) const {
    try {
      return fn();
    } catch (const std::invalid_argument& e) {
      Fail(node, path, e.what());
    }
  }

 private:
  std::string source_;
};

void ParseVehicle(const Reader& rd, const YAML::Node& node, ScenarioDocument& doc) {
  rd.CheckKeys(node, "vehicle",
               {"mass", "side_length", "moment_arm", "inertia_zz", "config",
                "failed_thrusters", "inertial_kinematics"});
  Scenario& s = doc.scenario;
  const VehicleParams defaults = VehicleParams::Defaults();
  const double mass = node["mass"] ? rd.Number(node["mass"], "vehicle.mass") : defaults.mass;
  const double side = node["side_length"]
                          ? rd.Number(node["side_length"], "vehicle.side_length")
                          : defaults.side_length;
  const double arm = node["moment_arm"]
                         ? rd.Number(node["moment_arm"], "vehicle.moment_arm")
                         : defaults.moment_arm;
  s.params = VehicleParams::FromGeometry(mass, side, arm);
  if (node["inertia_zz"]) s.params.inertia_zz = rd.Number(node["inertia_zz"], "vehicle.inertia_zz");
  rd.Checked(node, "vehicle", [&] {
    s.params.Validate();
    return 0;
  });
  if (node["config"]) {
    const std::string name = rd.String(node["config"], "vehicle.config");
    s.config = rd.Checked(node["config"], "vehicle.config",
                          [&] { return ParseThrusterConfigKind(name); });
  }
  if (node["failed_thrusters"]) {
    const auto names = rd.Strings(node["failed_thrusters"], "vehicle.failed_thrusters");
    s.failed_thrusters = rd.Checked(node["failed_thrusters"], "vehicle.failed_thrusters",
                                    [&] { return ThrusterSet::FromNames(names); });
  }
  if (node["inertial_kinematics"]) {
    s.inertial_kinematics =
        rd.Bool(node["inertial_kinematics"], "vehicle.inertial_kinematics");
  }
}

void ParseController(const Reader& rd, const YAML::Node& node,
                     ScenarioDocument& doc) {
  rd.CheckKeys(node, "controller", {"type", "sample_time", "weights"});
  doc.has_controller = true;
  Scenario& s = doc.scenario;
  if (node["type"]) {
    const std::string type = rd.String(node["type"], "controller.type");
    if (type == "both") {
      doc.controllers = {ControllerKind::kSdr, ControllerKind::kPiNzsp};
    } else {
      doc.controllers = {rd.Checked(node["type"], "controller.type",
                                    [&] { return ParseControllerKind(type); })};
    }
  }
  if (node["sample_time"]) {
    s.sample_time = rd.Number(node["sample_time"], "controller.sample_time");
  }
  if (const YAML::Node w = node["weights"]) {
    rd.CheckKeys(w, "controller.weights", {"plant", "actuator", "integral", "input"});
    if (w["plant"]) s.weights.plant_bounds = rd.Vector(w["plant"], "controller.weights.plant", 6);
    if (w["actuator"]) {
      s.weights.actuator_bounds = rd.Vector(w["actuator"], "controller.weights.actuator", 4);
    }
    if (w["integral"]) {
      s.weights.integral_bounds = rd.Vector(w["integral"], "controller.weights.integral", 3);
    }
    if (w["input"]) s.weights.input_bounds = rd.Vector(w["input"], "controller.weights.input", 4);
  }
}

void ParseActuator(const Reader& rd, const YAML::Node& node, Scenario& s) {
  rd.CheckKeys(node, "actuator", {"t_max", "lag_tau", "pwm", "bidirectional"});
  if (node["t_max"]) s.t_max = rd.Number(node["t_max"], "actuator.t_max");
  if (const YAML::Node lag = node["lag_tau"]) {
    if (lag.IsNull()) {
      s.actuator_lag_tau.reset();
    } else {
      s.actuator_lag_tau = rd.Number(lag, "actuator.lag_tau");
    }
  }
  if (node["bidirectional"]) {
    s.bidirectional = rd.Bool(node["bidirectional"], "actuator.bidirectional");
  }
  if (const YAML::Node pwm = node["pwm"]) {
    if (pwm.IsNull()) {
      s.pwm.reset();
    } else {
      rd.CheckKeys(pwm, "actuator.pwm", {"frequency", "rise_time", "fall_time"});
      PwmModel model;
      if (pwm["frequency"]) model.frequency = rd.Number(pwm["frequency"], "actuator.pwm.frequency");
      if (pwm["rise_time"]) model.rise_time = rd.Number(pwm["rise_time"], "actuator.pwm.rise_time");
      if (pwm["fall_time"]) model.fall_time = rd.Number(pwm["fall_time"], "actuator.pwm.fall_time");
      s.pwm = model;
    }
  }
  if (s.pwm) s.pwm->t_max = s.t_max;
}

void ParseSimulation(const Reader& rd, const YAML::Node& node,
                     ScenarioDocument& doc) {
  rd.CheckKeys(node, "simulation",
               {"duration", "integration_step", "initial_state", "disturbance",
                "reference"});
  doc.has_simulation = true;
  Scenario& s = doc.scenario;
  if (node["duration"]) s.duration = rd.Number(node["duration"], "simulation.duration");
  if (node["integration_step"]) {
    s.integration_step = rd.Number(node["integration_step"], "simulation.integration_step");
  }
  if (node["initial_state"]) {
    s.initial_state = rd.Vector(node["initial_state"], "simulation.initial_state", 6);
  }
  if (node["disturbance"]) {
    s.disturbance = rd.Vector(node["disturbance"], "simulation.disturbance", 3);
  }
  if (const YAML::Node ref = node["reference"]) {
    rd.CheckKeys(ref, "simulation.reference",
                 {"type", "target", "amplitude", "period", "axes"});
    const std::string type =
        ref["type"] ? rd.String(ref["type"], "simulation.reference.type") : "step";
    if (type == "step") {
      s.reference.kind = Reference::Kind::kStep;
    } else if (type == "sinusoid") {
      s.reference.kind = Reference::Kind::kSinusoid;
    } else {
      rd.Fail(ref["type"], "simulation.reference.type",
              "expected step or sinusoid, got '" + type + "'");
    }
    if (ref["target"]) s.reference.target = rd.Vector(ref["target"], "simulation.reference.target", 3);
    if (ref["amplitude"]) {
      s.reference.amplitude = rd.Number(ref["amplitude"], "simulation.reference.amplitude");
    }
    if (ref["period"]) s.reference.period = rd.Number(ref["period"], "simulation.reference.period");
    if (ref["axes"]) {
      s.reference.axes = {false, false, false};
      for (const std::string& axis : rd.Strings(ref["axes"], "simulation.reference.axes")) {
        if (axis == "x") {
          s.reference.axes[0] = true;
        } else if (axis == "y") {
          s.reference.axes[1] = true;
        } else if (axis == "psi") {
          s.reference.axes[2] = true;
        } else {
          rd.Fail(ref["axes"], "simulation.reference.axes",
                  "unknown axis '" + axis + "' (expected x, y or psi)");
        }
      }
    }
  }
}

void ParseTpbvp(const Reader& rd, const YAML::Node& node, ScenarioDocument& doc) {
  rd.CheckKeys(node, "tpbvp",
               {"x0", "xf", "tf", "t_max", "mesh_points", "constrained",
                "smoothing", "tolerance"});
  TpbvpProblem p;
  p.params = doc.scenario.params;
  if (node["x0"]) p.x0 = rd.Vector(node["x0"], "tpbvp.x0", 6);
  if (node["xf"]) p.xf = rd.Vector(node["xf"], "tpbvp.xf", 6);
  if (node["tf"]) p.tf = rd.Number(node["tf"], "tpbvp.tf");
  if (node["t_max"]) p.t_max = rd.Number(node["t_max"], "tpbvp.t_max");
  if (node["mesh_points"]) p.mesh_points = rd.Integer(node["mesh_points"], "tpbvp.mesh_points");
  if (node["constrained"]) p.constrained = rd.Bool(node["constrained"], "tpbvp.constrained");
  if (node["smoothing"]) {
    doc.tpbvp_options.smoothing = rd.Number(node["smoothing"], "tpbvp.smoothing");
  }
  if (node["tolerance"]) {
    doc.tpbvp_options.tolerance = rd.Number(node["tolerance"], "tpbvp.tolerance");
  }
  rd.Checked(node, "tpbvp", [&] {
    p.Validate();
    return 0;
  });
  doc.tpbvp = p;
}

}  // namespace

Scenario ScenarioDocument::for_controller(ControllerKind controller) const {
  Scenario s = scenario;
  s.controller = controller;
  s.name = scenario.name + "_" + std::string(ToString(controller));
  return s;
}

std::string sha256_hex(const std::string& bytes) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int length = 0;
  if (EVP_Digest(bytes.data(), bytes.size(), digest, &length, EVP_sha256(),
                 nullptr) != 1) {
    throw Error("sha256: digest failed");
  }
  std::string hex;
  for (unsigned int i = 0; i < length; ++i) hex += fmt::format("{:02x}", digest[i]);
  return hex;
}

ScenarioDocument parse_scenario(const std::string& text, const std::string& source) {
  const Reader rd(source);
  YAML::Node root;
  try {
    root = YAML::Load(text);
  } catch (const YAML::ParserException& e) {
    throw ParseError(fmt::format("{}:{}: {}", source, e.mark.line + 1, e.msg));
  }
  if (!root.IsMap()) throw ParseError(source + ": expected a mapping at top level");
  rd.CheckKeys(root, "",
               {"name", "preset", "vehicle", "controller", "actuator",
                "simulation", "tpbvp"});

  ScenarioDocument doc;
  const std::string preset =
      root["preset"] ? rd.String(root["preset"], "preset") : "tabletop";
  doc.scenario = rd.Checked(root["preset"] ? root["preset"] : root, "preset",
                            [&] { return preset_scenario(preset); });
  doc.scenario.name = root["name"] ? rd.String(root["name"], "name") : "scenario";

  if (root["vehicle"]) ParseVehicle(rd, root["vehicle"], doc);
  if (root["controller"]) ParseController(rd, root["controller"], doc);
  if (root["actuator"]) ParseActuator(rd, root["actuator"], doc.scenario);
  if (root["simulation"]) ParseSimulation(rd, root["simulation"], doc);
  if (root["tpbvp"]) ParseTpbvp(rd, root["tpbvp"], doc);

  doc.scenario.controller = doc.controllers.front();
  for (ControllerKind c : doc.controllers) {
    rd.Checked(root, "scenario", [&] {
      doc.for_controller(c).Validate();
      return 0;
    });
  }
  doc.sha256 = sha256_hex(text);
  return doc;
}

ScenarioDocument load_scenario(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot read scenario file '" + path.string() + "'");
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return parse_scenario(buffer.str(), path.string());
}

}  // namespace pgnc
