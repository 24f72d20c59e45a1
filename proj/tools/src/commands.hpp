#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "config.hpp"

namespace qgi::cli {

enum ExitCode : int { kExitOk = 0, kExitRuntime = 1, kExitConfig = 2 };

struct RunOptions {
  std::string config_path;
  std::string out_dir;  ///< overrides the config's output entry
  std::optional<std::uint64_t> seed;
  unsigned jobs = 1;
  std::optional<Engine> engine;
  std::string inject_fault;  ///< validate only: "somb" perturbs the disk-integral reference
};

void cmd_psf(const ScenarioConfig& cfg, const RunOptions& opt, std::ostream& log);
void cmd_image(const ScenarioConfig& cfg, const RunOptions& opt, std::ostream& log);
void cmd_resolve(const ScenarioConfig& cfg, const RunOptions& opt, std::ostream& log);
void cmd_sweep(const ScenarioConfig& cfg, const RunOptions& opt, std::ostream& log);
void cmd_speckle(const ScenarioConfig& cfg, const RunOptions& opt, std::ostream& log);

struct CheckResult {
  std::string name;
  std::string scenario;
  bool passed = false;
  std::string detail;
};

/// Invariant suite; the scenario-specific checks run only when `cfg` is given.
std::vector<CheckResult> validation_suite(const ScenarioConfig* cfg, const std::string& fault);

/// Loads the config, applies overrides, runs `command` and maps failures to
/// exit codes. Diagnostics go to `err`, progress to `log`.
int run_command(const std::string& command, const RunOptions& opt, std::ostream& log,
                std::ostream& err);

}  // namespace qgi::cli
