#include "pgnc/artifacts.hpp"

#include <fstream>
#include <sstream>

#include <fmt/format.h>
#include <yaml-cpp/yaml.h>

#include "pgnc/error.hpp"

namespace pgnc {
namespace {

std::string MatrixYaml(const Eigen::MatrixXd& M, std::string_view indent) {
  std::string out;
  if (M.rows() == 0) return " []\n";
  out += '\n';
  for (Eigen::Index i = 0; i < M.rows(); ++i) {
    out += fmt::format("{}- [", indent);
    for (Eigen::Index j = 0; j < M.cols(); ++j) {
      out += fmt::format("{}{}", j ? ", " : "", M(i, j));
    }
    out += "]\n";
  }
  return out;
}

[[noreturn]] void Fail(const std::string& source, const YAML::Node& node,
                       const std::string& message) {
  const YAML::Mark mark = node.Mark();
  if (mark.line >= 0) {
    throw ParseError(fmt::format("{}:{}: {}", source, mark.line + 1, message));
  }
  throw ParseError(fmt::format("{}: {}", source, message));
}

YAML::Node Require(const std::string& source, const YAML::Node& parent,
                   const char* key) {
  const YAML::Node node = parent[key];
  if (!node) Fail(source, parent, fmt::format("missing key '{}'", key));
  return node;
}

Eigen::MatrixXd ReadMatrix(const std::string& source, const YAML::Node& node,
                           Eigen::Index rows, Eigen::Index cols,
                           const char* name) {
  if (!node.IsSequence() || static_cast<Eigen::Index>(node.size()) != rows) {
    Fail(source, node, fmt::format("'{}' must have {} rows", name, rows));
  }
  Eigen::MatrixXd M(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i) {
    const YAML::Node row = node[static_cast<std::size_t>(i)];
    if (!row.IsSequence() || static_cast<Eigen::Index>(row.size()) != cols) {
      Fail(source, row, fmt::format("'{}' row {} must have {} entries", name, i, cols));
    }
    for (Eigen::Index j = 0; j < cols; ++j) {
      try {
        M(i, j) = row[static_cast<std::size_t>(j)].as<double>();
      } catch (const YAML::Exception&) {
        Fail(source, row, fmt::format("'{}'({}, {}) is not a number", name, i, j));
      }
    }
  }
  return M;
}

}  // namespace

std::string provenance_header(std::string_view scenario_sha256) {
  return fmt::format("# planar-gnc {} scenario-sha256={}", PGNC_VERSION,
                     scenario_sha256.empty() ? "none" : scenario_sha256);
}

const DesignResult* GainArtifact::find(ControllerKind controller) const {
  for (const DesignResult& d : designs) {
    if (d.controller == controller) return &d;
  }
  return nullptr;
}

std::string serialize_gains(const GainArtifact& artifact) {
  std::string out = provenance_header(artifact.scenario_sha256) + "\n";
  out += "format: planar-gnc-gains/1\n";
  out += fmt::format("scenario: \"{}\"\n", artifact.scenario_name);
  out += "designs:\n";
  for (const DesignResult& d : artifact.designs) {
    const GainSet& g = d.gains;
    out += fmt::format("  - controller: {}\n", ToString(d.controller));
    out += fmt::format("    sample_time: {}\n", g.sample_time);
    out += fmt::format("    plant_states: {}\n", g.plant_states);
    out += fmt::format("    state_labels: [{}]\n", fmt::join(d.state_labels, ", "));
    out += fmt::format("    closed_loop_spectral_radius: {}\n",
                       d.closed_loop_spectral_radius);
    out += fmt::format("    riccati_iterations: {}\n", d.riccati_iterations);
    out += fmt::format("    K:{}", MatrixYaml(g.K, "      "));
    if (d.partition) {
      out += fmt::format("    feedforward:{}", MatrixYaml(g.feedforward, "      "));
      out += fmt::format("    pi12:{}", MatrixYaml(d.partition->pi12, "      "));
      out += fmt::format("    pi22:{}", MatrixYaml(d.partition->pi22, "      "));
    }
  }
  return out;
}

GainArtifact parse_gains(const std::string& text, const std::string& source) {
  YAML::Node root;
  try {
    root = YAML::Load(text);
  } catch (const YAML::ParserException& e) {
    throw ParseError(fmt::format("{}:{}: {}", source, e.mark.line + 1, e.msg));
  }
  if (!root.IsMap()) throw ParseError(source + ": expected a gain artifact mapping");
  if (Require(source, root, "format").as<std::string>() != "planar-gnc-gains/1") {
    Fail(source, root["format"], "unsupported artifact format");
  }
  GainArtifact artifact;
  artifact.scenario_name = Require(source, root, "scenario").as<std::string>();
  const std::string first_line = text.substr(0, text.find('\n'));
  const auto pos = first_line.find("scenario-sha256=");
  if (pos != std::string::npos) artifact.scenario_sha256 = first_line.substr(pos + 16);

  const YAML::Node designs = Require(source, root, "designs");
  if (!designs.IsSequence()) Fail(source, designs, "'designs' must be a list");
  for (const YAML::Node& node : designs) {
    DesignResult d;
    try {
      d.controller = ParseControllerKind(Require(source, node, "controller").as<std::string>());
      d.gains.sample_time = Require(source, node, "sample_time").as<double>();
      d.gains.plant_states = Require(source, node, "plant_states").as<int>();
      d.closed_loop_spectral_radius =
          Require(source, node, "closed_loop_spectral_radius").as<double>();
      d.riccati_iterations = Require(source, node, "riccati_iterations").as<int>();
      d.state_labels = Require(source, node, "state_labels").as<std::vector<std::string>>();
    } catch (const YAML::Exception& e) {
      Fail(source, node, e.msg);
    } catch (const std::invalid_argument& e) {
      Fail(source, node, e.what());
    }
    const YAML::Node K = Require(source, node, "K");
    const Eigen::Index cols =
        K.IsSequence() && K.size() > 0 ? static_cast<Eigen::Index>(K[0].size()) : 0;
    d.gains.K = ReadMatrix(source, K, 4, cols, "K");
    if (d.controller == ControllerKind::kPiNzsp) {
      const Eigen::Index n = d.gains.plant_states;
      d.gains.feedforward =
          ReadMatrix(source, Require(source, node, "feedforward"), 4, 3, "feedforward");
      QuadPartition partition;
      partition.pi12 = ReadMatrix(source, Require(source, node, "pi12"), n, 3, "pi12");
      partition.pi22 = ReadMatrix(source, Require(source, node, "pi22"), 4, 3, "pi22");
      d.partition = partition;
    } else {
      d.gains.feedforward = Eigen::MatrixXd::Zero(4, 0);
    }
    artifact.designs.push_back(std::move(d));
  }
  return artifact;
}

GainArtifact load_gains(const std::filesystem::path& path) {
  return parse_gains(read_text_file(path), path.string());
}

std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot read '" + path.string() + "'");
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

void write_text_file(const std::filesystem::path& path, const std::string& text) {
  if (path.has_parent_path()) {
    std::error_code ec;
    std::filesystem::create_directories(path.parent_path(), ec);
    if (ec) {
      throw IoError("cannot create directory '" + path.parent_path().string() +
                    "': " + ec.message());
    }
  }
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write '" + path.string() + "'");
  out << text;
  if (!out) throw IoError("write failed for '" + path.string() + "'");
}

}  // namespace pgnc
