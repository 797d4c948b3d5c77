#include "tweezersense/cli/output.hpp"

#include <array>
#include <bit>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <sstream>

#include "tweezersense/errors.hpp"

namespace tweezersense::cli {

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  if (v == 0.0) return "0";  // folds -0 so mirrored runs print identically
  std::array<char, 32> buf{};
  const auto res = std::to_chars(buf.data(), buf.data() + buf.size(), v);
  return std::string(buf.data(), res.ptr);
}

void ensure_directory(const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec || !std::filesystem::is_directory(dir)) {
    throw IoError("cannot create output directory " + dir.string() +
                  (ec ? ": " + ec.message() : std::string()));
  }
}

void write_text_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  out << text;
  out.flush();
  if (!out) throw IoError("failed writing " + path.string());
}

std::string matrix_csv(const IntensityMap& map, std::span<const std::string> metadata) {
  std::string text;
  for (const auto& line : metadata) text += "# " + line + "\n";
  const Grid2D& g = map.grid;
  for (int j = 0; j < g.samples_y(); ++j) {
    for (int i = 0; i < g.samples_x(); ++i) {
      if (i > 0) text += ',';
      text += format_double(map.at(i, j));
    }
    text += '\n';
  }
  return text;
}

void write_binary_matrix(const std::filesystem::path& stem, const IntensityMap& map,
                         const nlohmann::json& metadata) {
  std::string payload;
  payload.reserve(map.values.size() * 8);
  for (double v : map.values) {
    auto bits = std::bit_cast<std::uint64_t>(v);
    for (int b = 0; b < 8; ++b) payload.push_back(static_cast<char>((bits >> (8 * b)) & 0xffu));
  }
  auto data_path = stem;
  data_path += ".f64";
  write_text_file(data_path, payload);

  const Grid2D& g = map.grid;
  nlohmann::json sidecar = metadata;
  sidecar["data_file"] = data_path.filename().string();
  sidecar["dtype"] = "float64-le";
  sidecar["order"] = "row-major, rows = y";
  sidecar["rows"] = g.samples_y();
  sidecar["cols"] = g.samples_x();
  sidecar["x0_m"] = g.x(0);
  sidecar["dx_m"] = g.dx();
  sidecar["y0_m"] = g.y(0);
  sidecar["dy_m"] = g.dy();
  auto json_path = stem;
  json_path += ".json";
  write_text_file(json_path, sidecar.dump(2) + "\n");
}

nlohmann::json read_embedded_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot read " + path.string());
  static constexpr std::string_view kPrefix = "# config: ";
  for (std::string line; std::getline(in, line);) {
    if (!line.starts_with('#')) break;
    if (line.starts_with(kPrefix)) return nlohmann::json::parse(line.substr(kPrefix.size()));
  }
  throw IoError("no embedded config in " + path.string());
}

}  // namespace tweezersense::cli
