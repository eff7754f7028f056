#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "pgnc/sim_harness.hpp"

namespace pgnc {

/// "# planar-gnc <version> scenario-sha256=<hex>", no trailing newline.
std::string provenance_header(std::string_view scenario_sha256);

/// Synthesized gains for every controller a scenario selects.
struct GainArtifact {
  std::string scenario_name;
  std::string scenario_sha256;
  std::vector<DesignResult> designs;

  /// nullptr when the controller is absent.
  const DesignResult* find(ControllerKind controller) const;
};

/// YAML text led by the provenance header. Doubles are written in shortest
/// round-trip form, so parse_gains(serialize_gains(a)) reproduces every
/// matrix bit for bit.
std::string serialize_gains(const GainArtifact& artifact);

/// Throws ParseError with the source name and line on malformed input.
GainArtifact parse_gains(const std::string& text,
                         const std::string& source = "<gains>");
GainArtifact load_gains(const std::filesystem::path& path);

/// Whole-file helpers; throw IoError.
std::string read_text_file(const std::filesystem::path& path);
void write_text_file(const std::filesystem::path& path, const std::string& text);

}  // namespace pgnc
