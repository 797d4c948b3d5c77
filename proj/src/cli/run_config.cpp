#include "tweezersense/cli/run_config.hpp"

#include <cmath>
#include <fstream>
#include <initializer_list>
#include <set>
#include <sstream>

#include "tweezersense/errors.hpp"

namespace tweezersense::cli {

using nlohmann::json;

namespace {

void reject_unknown_keys(const json& obj, std::initializer_list<const char*> allowed,
                         const std::string& where) {
  if (!obj.is_object()) throw ConfigError(where + " must be a JSON object");
  const std::set<std::string> known(allowed.begin(), allowed.end());
  for (const auto& [key, value] : obj.items()) {
    if (!known.contains(key)) throw ConfigError("unknown key '" + key + "' in " + where);
  }
}

template <class T>
void read(const json& obj, const char* key, T& out, const std::string& where) {
  if (!obj.contains(key)) return;
  try {
    out = obj.at(key).get<T>();
  } catch (const json::exception&) {
    throw ConfigError("key '" + std::string(key) + "' in " + where + " has the wrong type");
  }
}

Polarization parse_polarization(const std::string& s) {
  if (s == "x") return Polarization::X;
  if (s == "y") return Polarization::Y;
  throw ConfigError("polarization must be \"x\" or \"y\", got \"" + s + "\"");
}

std::string quantity_name(SweepQuantity q) {
  return q == SweepQuantity::Displacement ? "displacement" : "na";
}

}  // namespace

std::vector<double> SweepSpec::values() const {
  if (count == 1) return {start};
  // Weighted endpoints: exact at both ends and exactly antisymmetric when start == -stop.
  const double n1 = count - 1;
  std::vector<double> out(count);
  for (int i = 0; i < count; ++i) {
    out[i] = (start * (n1 - i) + stop * i) / n1;
  }
  out.front() = start;
  out.back() = stop;
  return out;
}

SweepSpec default_displacement_sweep() { return {SweepQuantity::Displacement, -2e-6, 2e-6, 41}; }

SweepSpec default_na_sweep() { return {SweepQuantity::NumericalAperture, 0.2, 0.99, 80}; }

void validate(const RunConfig& cfg) {
  cfg.physics.validate();
  if (cfg.grid.samples < Grid2D::kMinSamples || cfg.grid.samples % 2 != 0) {
    throw ConfigError("grid.samples must be even and >= 16");
  }
  if (!(cfg.grid.padding_factor >= 1.0) || !std::isfinite(cfg.grid.padding_factor)) {
    throw ConfigError("grid.padding_factor must be >= 1");
  }
  const double bound = 3.0 * cfg.physics.trap_waist;
  auto check_p = [&](double p, const char* what) {
    if (!std::isfinite(p) || std::abs(p) > bound) {
      throw ConfigError(std::string(what) + " must lie within +-3 trap waists");
    }
  };
  check_p(cfg.lo_p0, "lo_p0");
  for (double p : cfg.pattern.displacements) check_p(p, "pattern.displacements");
  if (cfg.pattern.polarizations.empty()) throw ConfigError("pattern.polarizations must not be empty");
  if (!(cfg.derivative_step >= 0.0) || cfg.derivative_step >= cfg.physics.trap_waist) {
    throw ConfigError("derivative_step must be >= 0 and much smaller than trap_waist");
  }
  if (cfg.sweep) {
    const SweepSpec& s = *cfg.sweep;
    if (s.count < 1) throw ConfigError("sweep.count must be >= 1");
    if (!std::isfinite(s.start) || !std::isfinite(s.stop) || s.stop < s.start) {
      throw ConfigError("sweep range must be finite with start <= stop");
    }
    if (s.quantity == SweepQuantity::Displacement) {
      check_p(s.start, "sweep.start");
      check_p(s.stop, "sweep.stop");
    } else if (!(s.start > 0.0) || !(s.stop < cfg.physics.medium_index)) {
      throw ConfigError("NA sweep must stay within (0, medium_index)");
    }
  }
  if (cfg.outputs.directory.empty()) throw ConfigError("outputs.directory must not be empty");
  if (!cfg.outputs.csv && !cfg.outputs.binary) throw ConfigError("outputs.formats must not be empty");
}

RunConfig parse_run_config(const json& doc) {
  reject_unknown_keys(doc,
                      {"wavelength", "trap_power", "trap_waist", "objective_focal",
                       "numerical_aperture", "medium_index", "particle_radius", "eps_medium",
                       "eps_particle", "polarization", "grid", "sweep", "lo_p0", "derivative_step",
                       "pattern", "outputs"},
                      "config");
  RunConfig cfg;
  TweezerConfig& ph = cfg.physics;
  read(doc, "wavelength", ph.wavelength, "config");
  read(doc, "trap_power", ph.trap_power, "config");
  read(doc, "trap_waist", ph.trap_waist, "config");
  read(doc, "objective_focal", ph.objective_focal, "config");
  read(doc, "numerical_aperture", ph.numerical_aperture, "config");
  read(doc, "medium_index", ph.medium_index, "config");
  read(doc, "particle_radius", ph.particle_radius, "config");
  read(doc, "eps_medium", ph.eps_medium, "config");
  read(doc, "eps_particle", ph.eps_particle, "config");
  std::string pol = "x";
  read(doc, "polarization", pol, "config");
  ph.polarization = parse_polarization(pol);
  read(doc, "lo_p0", cfg.lo_p0, "config");
  read(doc, "derivative_step", cfg.derivative_step, "config");

  if (doc.contains("grid")) {
    const json& g = doc.at("grid");
    reject_unknown_keys(g, {"samples", "padding_factor"}, "grid");
    read(g, "samples", cfg.grid.samples, "grid");
    read(g, "padding_factor", cfg.grid.padding_factor, "grid");
  }

  if (doc.contains("sweep")) {
    const json& s = doc.at("sweep");
    reject_unknown_keys(s, {"quantity", "start", "stop", "count"}, "sweep");
    std::string quantity = "displacement";
    read(s, "quantity", quantity, "sweep");
    SweepSpec spec;
    if (quantity == "displacement") {
      spec = default_displacement_sweep();
    } else if (quantity == "na") {
      spec = default_na_sweep();
    } else {
      throw ConfigError("sweep.quantity must be \"displacement\" or \"na\"");
    }
    read(s, "start", spec.start, "sweep");
    read(s, "stop", spec.stop, "sweep");
    read(s, "count", spec.count, "sweep");
    cfg.sweep = spec;
  }

  if (doc.contains("pattern")) {
    const json& p = doc.at("pattern");
    reject_unknown_keys(p, {"displacements", "polarizations"}, "pattern");
    read(p, "displacements", cfg.pattern.displacements, "pattern");
    if (p.contains("polarizations")) {
      std::vector<std::string> names;
      read(p, "polarizations", names, "pattern");
      cfg.pattern.polarizations.clear();
      for (const auto& n : names) cfg.pattern.polarizations.push_back(parse_polarization(n));
    }
  }

  if (doc.contains("outputs")) {
    const json& o = doc.at("outputs");
    reject_unknown_keys(o, {"directory", "formats"}, "outputs");
    read(o, "directory", cfg.outputs.directory, "outputs");
    if (o.contains("formats")) {
      std::vector<std::string> formats;
      read(o, "formats", formats, "outputs");
      cfg.outputs.csv = cfg.outputs.binary = false;
      for (const auto& f : formats) {
        if (f == "csv") {
          cfg.outputs.csv = true;
        } else if (f == "binary") {
          cfg.outputs.binary = true;
        } else {
          throw ConfigError("unknown output format \"" + f + "\" (expected csv or binary)");
        }
      }
    }
  }

  validate(cfg);
  return cfg;
}

RunConfig parse_run_config_text(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("config is not valid JSON: ") + e.what());
  }
  return parse_run_config(doc);
}

RunConfig load_run_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config file " + path.string());
  std::ostringstream text;
  text << in.rdbuf();
  return parse_run_config_text(text.str());
}

json to_json(const RunConfig& cfg) {
  const TweezerConfig& ph = cfg.physics;
  json doc = {
      {"wavelength", ph.wavelength},
      {"trap_power", ph.trap_power},
      {"trap_waist", ph.trap_waist},
      {"objective_focal", ph.objective_focal},
      {"numerical_aperture", ph.numerical_aperture},
      {"medium_index", ph.medium_index},
      {"particle_radius", ph.particle_radius},
      {"eps_medium", ph.eps_medium},
      {"eps_particle", ph.eps_particle},
      {"polarization", std::string(to_string(ph.polarization))},
      {"grid", {{"samples", cfg.grid.samples}, {"padding_factor", cfg.grid.padding_factor}}},
      {"lo_p0", cfg.lo_p0},
      {"derivative_step", cfg.derivative_step},
  };
  if (cfg.sweep) {
    doc["sweep"] = {{"quantity", quantity_name(cfg.sweep->quantity)},
                    {"start", cfg.sweep->start},
                    {"stop", cfg.sweep->stop},
                    {"count", cfg.sweep->count}};
  }
  json pols = json::array();
  for (auto p : cfg.pattern.polarizations) pols.push_back(std::string(to_string(p)));
  doc["pattern"] = {{"displacements", cfg.pattern.displacements}, {"polarizations", pols}};
  json formats = json::array();
  if (cfg.outputs.csv) formats.push_back("csv");
  if (cfg.outputs.binary) formats.push_back("binary");
  doc["outputs"] = {{"directory", cfg.outputs.directory}, {"formats", formats}};
  return doc;
}

}  // namespace tweezersense::cli
