#pragma once

#include <filesystem>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "tweezersense/cli/run_config.hpp"

namespace tweezersense::cli {

enum ExitCode : int {
  kSuccess = 0,
  kValidationFailure = 1,
  kConfigError = 2,
  kIoError = 3,
};

struct CommandOptions {
  std::optional<std::filesystem::path> out_dir;  ///< overrides outputs.directory
  unsigned threads = 0;                          ///< 0 means hardware concurrency
  bool full_quadratic = false;
  bool normalize = false;  ///< scale pattern matrices to max |value| = 1
};

std::filesystem::path output_directory(const RunConfig& cfg, const CommandOptions& opts);

/// Trap-subtracted image-plane intensity, one file per (displacement,
/// polarization) in cfg.pattern. Returns the written paths.
std::vector<std::filesystem::path> cmd_pattern(const RunConfig& cfg, const CommandOptions& opts);

/// snr_sweep.csv over the displacement sweep (default -2..2 um, 41 points).
std::filesystem::path cmd_snr_sweep(const RunConfig& cfg, const CommandOptions& opts);

/// sensitivity_sweep.csv over the NA sweep (default 0.2..0.99 in steps of 0.01).
std::filesystem::path cmd_sensitivity_sweep(const RunConfig& cfg, const CommandOptions& opts);

struct CheckResult {
  std::string name;
  bool passed = false;
  std::string detail;  ///< measured value and threshold
};

std::vector<CheckResult> run_validation(const RunConfig& cfg, const CommandOptions& opts);

/// Prints one line per check; returns kSuccess iff every check passes.
int cmd_validate(const RunConfig& cfg, const CommandOptions& opts, std::ostream& out);

/// Full command-line entry point; returns the process exit code.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace tweezersense::cli
