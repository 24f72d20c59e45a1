#pragma once

// Scenario files: YAML with explicit unit suffixes on every length
// ("10 m", "1 mm", "75 um"). Parsing checks the schema and re-runs the
// library validators, reporting failures with file:line positions.

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "qgi/numeric_propagator.hpp"
#include "qgi/resolution_lab.hpp"
#include "qgi/speckle_ensemble.hpp"

namespace qgi::cli {

/// Malformed or inconsistent configuration. Maps to exit code 2.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class Engine { Analytic, Numeric, Both };

const char* to_string(Engine e);
Engine parse_engine(const std::string& s);

struct LineGrid {
  Vec2 center{};
  double half_width = 0.0;  ///< 0 selects 3 Airy radii around the image centre
  std::size_t samples = 201;
};

struct SweepBlock {
  SweepParameter parameter = SweepParameter::NDegenerate;
  std::vector<double> values;
  bool measure = false;
  double tolerance = kDefaultScanTolerance;
};

struct EnsembleBlock {
  std::size_t realizations = 2000;
  int detector_samples = 32;
  McPath path = McPath::Auto;
  bool analytic = true;
  LineGrid grid;
};

struct ScenarioConfig {
  Scenario scenario;
  ObjectModel object = TwoPointObject{};
  Engine engine = Engine::Analytic;
  LineGrid image;
  QuadratureSpec quadrature;
  std::optional<SweepBlock> sweep;
  std::optional<EnsembleBlock> ensemble;
  std::uint64_t seed = 0;
  std::string output_dir;
};

/// Parses YAML text. `origin` names the source in diagnostics; relative
/// object files resolve against `base_dir`.
ScenarioConfig parse_config(const std::string& text, const std::string& origin = "<config>",
                            const std::string& base_dir = ".");

ScenarioConfig load_config(const std::string& path);

/// Fully expanded YAML: fixed key order, lengths in metres with 17 significant
/// digits, solved thin-lens distances, inline object values. The output
/// directory is not part of the scenario and is left out.
std::string canonical_yaml(const ScenarioConfig& cfg);

/// SHA-256 (hex) of the canonical form.
std::string config_hash(const ScenarioConfig& cfg);

std::string sha256_hex(const std::string& bytes);

/// Parses "<number> <unit>" with unit in {m, cm, mm, um, nm}. Throws
/// ConfigError naming `field`.
double parse_length(const std::string& text, const std::string& field);

}  // namespace qgi::cli
