#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "tweezersense/tweezer_optics.hpp"

namespace tweezersense::cli {

enum class SweepQuantity { Displacement, NumericalAperture };

struct SweepSpec {
  SweepQuantity quantity = SweepQuantity::Displacement;
  double start = -2e-6;
  double stop = 2e-6;
  int count = 41;

  /// Evenly spaced values; symmetric ranges come out exactly antisymmetric.
  std::vector<double> values() const;

  bool operator==(const SweepSpec&) const = default;
};

SweepSpec default_displacement_sweep();
SweepSpec default_na_sweep();

struct PatternSpec {
  std::vector<double> displacements{1e-6, 0.5e-6, 0.0};
  std::vector<Polarization> polarizations{Polarization::X, Polarization::Y};

  bool operator==(const PatternSpec&) const = default;
};

struct OutputSpec {
  std::string directory = "out";
  bool csv = true;
  bool binary = false;  ///< little-endian float64 matrices with a JSON sidecar

  bool operator==(const OutputSpec&) const = default;
};

/// Everything a CLI run needs. All lengths in metres, power in watts.
struct RunConfig {
  TweezerConfig physics;
  GridSpec grid;
  std::optional<SweepSpec> sweep;
  double lo_p0 = 0.0;
  double derivative_step = 0.0;  ///< 0 selects trap_waist / 1000
  PatternSpec pattern;
  OutputSpec outputs;

  bool operator==(const RunConfig&) const = default;
};

/// Parses and validates a configuration document. Missing keys take their
/// defaults; unknown keys, wrong types and invariant violations throw
/// ConfigError.
RunConfig parse_run_config(const nlohmann::json& doc);
RunConfig parse_run_config_text(const std::string& text);
RunConfig load_run_config(const std::filesystem::path& path);

void validate(const RunConfig& cfg);

nlohmann::json to_json(const RunConfig& cfg);

}  // namespace tweezersense::cli
