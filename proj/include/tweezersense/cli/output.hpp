#pragma once

#include <filesystem>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include "json.hpp"
#include "tweezersense/tweezer_optics.hpp"

namespace tweezersense::cli {

/// Shortest decimal that round-trips to the same double; "inf"/"-inf"/"nan"
/// for non-finite values.
std::string format_double(double v);

/// Creates `dir` (and parents). Throws IoError on failure.
void ensure_directory(const std::filesystem::path& dir);

/// Writes `text` to `path`, throwing IoError if the file cannot be written.
void write_text_file(const std::filesystem::path& path, const std::string& text);

/// '#'-prefixed metadata lines followed by the comma-separated matrix, one
/// grid row (fixed y) per line.
std::string matrix_csv(const IntensityMap& map, std::span<const std::string> metadata);

/// Raw little-endian float64 payload (row-major) plus a JSON sidecar holding
/// the shape, axes and `metadata`.
void write_binary_matrix(const std::filesystem::path& stem, const IntensityMap& map,
                         const nlohmann::json& metadata);

/// Finds the "# config: {...}" metadata line in an output file and returns the
/// embedded JSON document.
nlohmann::json read_embedded_config(const std::filesystem::path& path);

}  // namespace tweezersense::cli
