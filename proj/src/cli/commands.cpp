#include "tweezersense/cli/commands.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <random>
#include <sstream>

#include "CLI11.hpp"
#include "tweezersense/cli/output.hpp"
#include "tweezersense/detection.hpp"
#include "tweezersense/errors.hpp"
#include "tweezersense/oracle.hpp"
#include "tweezersense/parallel.hpp"

namespace tweezersense::cli {

namespace {

std::string config_line(const RunConfig& cfg) { return "config: " + to_json(cfg).dump(); }

DetectionOptions detection_options(const RunConfig& cfg, const CommandOptions& opts) {
  return DetectionOptions{cfg.derivative_step, opts.full_quadratic};
}

SweepSpec sweep_for(const RunConfig& cfg, SweepQuantity wanted, const char* command) {
  if (!cfg.sweep) {
    return wanted == SweepQuantity::Displacement ? default_displacement_sweep() : default_na_sweep();
  }
  if (cfg.sweep->quantity != wanted) {
    throw ConfigError(std::string(command) + " requires sweep.quantity = \"" +
                      (wanted == SweepQuantity::Displacement ? "displacement" : "na") + "\"");
  }
  return *cfg.sweep;
}

std::string pattern_stem(double p, Polarization pol) {
  // Picometre rounding keeps names stable against representation noise in p.
  char buf[64];
  std::snprintf(buf, sizeof buf, "pattern_%s_p%+.3fnm", std::string(to_string(pol)).c_str(),
                static_cast<double>(std::llround(p * 1e12)) / 1000.0);
  return buf;
}

std::string fmt(double v) { return format_double(v); }

CheckResult check(std::string name, bool passed, std::string detail) {
  return {std::move(name), passed, std::move(detail)};
}

}  // namespace

std::filesystem::path output_directory(const RunConfig& cfg, const CommandOptions& opts) {
  return opts.out_dir ? *opts.out_dir : std::filesystem::path(cfg.outputs.directory);
}

std::vector<std::filesystem::path> cmd_pattern(const RunConfig& cfg, const CommandOptions& opts) {
  const auto dir = output_directory(cfg, opts);
  ensure_directory(dir);

  struct Job {
    double p;
    Polarization pol;
  };
  std::vector<Job> jobs;
  for (auto pol : cfg.pattern.polarizations) {
    for (double p : cfg.pattern.displacements) jobs.push_back({p, pol});
  }
  std::vector<std::filesystem::path> written(jobs.size());

  parallel_for(jobs.size(), opts.threads, [&](std::size_t k) {
    TweezerConfig physics = cfg.physics;
    physics.polarization = jobs[k].pol;
    const Grid2D grid = objective_grid(physics, cfg.grid);
    IntensityMap map = interference_pattern(physics, Displacement{jobs[k].p}, grid);

    std::string quantity = "trap-subtracted image-plane intensity |E_total|^2 - |E_trap|^2";
    if (opts.normalize) {
      double peak = 0.0;
      for (double v : map.values) peak = std::max(peak, std::abs(v));
      if (peak > 0.0) {
        for (double& v : map.values) v /= peak;
      }
      quantity += ", normalized to max |value| = 1 (peak " + fmt(peak) + " photons/(s m^2))";
    } else {
      quantity += " [photons/(s m^2)]";
    }
    const Grid2D& g = map.grid;
    const std::vector<std::string> meta = {
        "tweezersense pattern",
        "quantity: " + quantity,
        "displacement_m: " + fmt(jobs[k].p),
        "polarization: " + std::string(to_string(jobs[k].pol)),
        "layout: rows = image-plane y (index j), columns = image-plane x (index i)",
        "axes_m: x0=" + fmt(g.x(0)) + " dx=" + fmt(g.dx()) + " y0=" + fmt(g.y(0)) +
            " dy=" + fmt(g.dy()) + " samples=" + std::to_string(g.samples_x()) + "x" +
            std::to_string(g.samples_y()),
        config_line(cfg),
    };
    const auto stem = dir / pattern_stem(jobs[k].p, jobs[k].pol);
    if (cfg.outputs.csv) {
      auto path = stem;
      path += ".csv";
      write_text_file(path, matrix_csv(map, meta));
      written[k] = path;
    }
    if (cfg.outputs.binary) {
      nlohmann::json side = {{"quantity", quantity},
                             {"displacement_m", jobs[k].p},
                             {"polarization", std::string(to_string(jobs[k].pol))},
                             {"config", to_json(cfg)}};
      write_binary_matrix(stem, map, side);
      if (!cfg.outputs.csv) {
        written[k] = stem;
        written[k] += ".f64";
      }
    }
  });
  return written;
}

std::filesystem::path cmd_snr_sweep(const RunConfig& cfg, const CommandOptions& opts) {
  const SweepSpec spec = sweep_for(cfg, SweepQuantity::Displacement, "snr-sweep");
  const auto dir = output_directory(cfg, opts);
  ensure_directory(dir);

  const auto ps = spec.values();
  const Grid2D grid = objective_grid(cfg.physics, cfg.grid);
  const SweepResult result =
      snr_sweep(cfg.physics, ps, cfg.lo_p0, grid, SweepOptions{detection_options(cfg, opts), opts.threads});
  const auto nsd = result.normalized_sd();
  const auto nsh = result.normalized_sh();

  std::string text;
  text += "# tweezersense snr-sweep\n";
  text += "# units: SNR per sqrt(Hz) detection bandwidth, coherent-state (shot-noise) limit\n";
  text += "# split_detection: ";
  text += opts.full_quadratic ? "full-quadratic photocurrent\n" : "cross-term\n";
  text += "# lo_p0_m: " + fmt(cfg.lo_p0) + "\n";
  text += "# normalization: *_normalized columns divided by their own max |SNR| (sd " +
          fmt(result.max_abs_sd()) + ", sh " + fmt(result.max_abs_sh()) + ")\n";
  text += "# " + config_line(cfg) + "\n";
  text += "p_m,snr_sd,snr_sh,snr_sh_normalized,snr_sd_normalized\n";
  for (std::size_t i = 0; i < result.records.size(); ++i) {
    const auto& r = result.records[i];
    text += fmt(r.p) + "," + fmt(r.snr_sd) + "," + fmt(r.snr_sh) + "," + fmt(nsh[i]) + "," +
            fmt(nsd[i]) + "\n";
  }
  const auto path = dir / "snr_sweep.csv";
  write_text_file(path, text);
  return path;
}

std::filesystem::path cmd_sensitivity_sweep(const RunConfig& cfg, const CommandOptions& opts) {
  const SweepSpec spec = sweep_for(cfg, SweepQuantity::NumericalAperture, "sensitivity-sweep");
  const auto dir = output_directory(cfg, opts);
  ensure_directory(dir);

  const auto nas = spec.values();
  const auto results = sensitivity_sweep(cfg.physics, nas, cfg.grid,
                                         SweepOptions{detection_options(cfg, opts), opts.threads});

  std::string text;
  text += "# tweezersense sensitivity-sweep\n";
  text += "# units: minimum detectable displacement in metres per sqrt(Hz) (SNR = 1, coherent state)\n";
  text += "# " + config_line(cfg) + "\n";
  text += "na,s_sd_m,s_sh_m,ratio\n";
  for (const auto& r : results) {
    text += fmt(r.na) + "," + fmt(r.s_sd) + "," + fmt(r.s_sh) + "," + fmt(r.ratio()) + "\n";
  }
  const auto path = dir / "sensitivity_sweep.csv";
  write_text_file(path, text);
  return path;
}

std::vector<CheckResult> run_validation(const RunConfig& cfg, const CommandOptions& opts) {
  std::vector<CheckResult> out;
  const TweezerConfig& physics = cfg.physics;
  const Grid2D grid = objective_grid(physics, cfg.grid);

  {
    const double waist = std::min(grid.extent_x(), grid.extent_y()) / 16.0;
    std::vector<TransverseField> modes;
    for (auto pol : {Polarization::X, Polarization::Y}) {
      for (int order = 0; order <= 4; ++order) {
        for (int m = 0; m <= order; ++m) modes.push_back(hermite_gauss_mode(grid, m, order - m, waist, pol));
      }
    }
    double worst = 0.0;
    for (std::size_t a = 0; a < modes.size(); ++a) {
      for (std::size_t b = a; b < modes.size(); ++b) {
        const Complex ip = inner_product(modes[a], modes[b]);
        worst = std::max(worst, std::abs(ip - (a == b ? 1.0 : 0.0)));
      }
    }
    out.push_back(check("mode orthonormality (m+n<=4)", worst < 1e-6,
                        "max |<u,u'> - delta| = " + fmt(worst) + " (< 1e-6)"));
  }

  {
    std::mt19937_64 rng(0x7e5eed);
    std::normal_distribution<double> gauss;
    auto random_field = [&] {
      std::vector<Complex> ex(grid.size()), ey(grid.size());
      for (auto& v : ex) v = {gauss(rng), gauss(rng)};
      for (auto& v : ey) v = {gauss(rng), gauss(rng)};
      return TransverseField(grid, Plane::Objective, std::move(ex), std::move(ey));
    };
    double worst = 0.0;
    for (int k = 0; k < 20; ++k) {
      const TransverseField a = random_field();
      const TransverseField b = 0.5 * a + random_field();
      const Complex direct = inner_product(a, b);
      const Complex imaged = inner_product(fourier_image(a), fourier_image(b));
      worst = std::max(worst, std::abs(imaged - direct) / std::abs(direct));
    }
    out.push_back(check("Parseval through fourier_image", worst < 1e-10,
                        "max relative drift = " + fmt(worst) + " (< 1e-10)"));
  }

  {
    const std::vector<double> ps = {-1e-6, -0.4e-6, -0.1e-6, 0.0, 0.1e-6, 0.4e-6, 1e-6};
    const SweepResult r = snr_sweep(physics, ps, 0.0, grid,
                                    SweepOptions{detection_options(cfg, opts), opts.threads});
    double worst_sd = 0.0, worst_sh = 0.0;
    for (std::size_t i = 0; i < ps.size(); ++i) {
      const auto& a = r.records[i];
      const auto& b = r.records[ps.size() - 1 - i];
      worst_sd = std::max(worst_sd, std::abs(a.snr_sd + b.snr_sd));
      worst_sh = std::max(worst_sh, std::abs(a.snr_sh + b.snr_sh));
    }
    const double rel_sd = worst_sd / r.max_abs_sd(), rel_sh = worst_sh / r.max_abs_sh();
    out.push_back(check("SNR oddness", rel_sd < 1e-6 && rel_sh < 1e-6,
                        "|SNR(p)+SNR(-p)|/max: split " + fmt(rel_sd) + ", homodyne " + fmt(rel_sh) +
                            " (< 1e-6)"));
  }

  {
    const double waist = std::min(grid.extent_x(), grid.extent_y()) / 16.0;
    const auto u0 = hermite_gauss_mode(grid, 0, 0, waist, Polarization::X);
    const auto ud = hermite_gauss_mode(grid, 0, 0, waist, Polarization::X, Plane::Objective, waist);
    const Complex lib = inner_product(u0, ud);
    const Complex quad = oracle::quadrature_overlap(u0, ud, 2);
    const double exact = oracle::analytic_displaced_gaussian_overlap(waist, waist);
    const double rel = std::abs(quad - lib) / std::abs(lib);
    const double rel_exact = std::abs(lib.real() - exact) / exact;

    const double d = 0.01 * waist;
    const auto shifted = hermite_gauss_mode(grid, 0, 0, waist, Polarization::X, Plane::Objective, d);
    const double slope = inner_product(flipped_mode(u0), shifted).real() / d;
    const double slope_rel = std::abs(slope / oracle::analytic_flipped_overlap_slope(waist) - 1.0);
    out.push_back(check("oracle agreement (smooth reference fields)",
                        rel < 1e-3 && rel_exact < 1e-5 && slope_rel < 5e-3,
                        "quadrature " + fmt(rel) + " (< 1e-3), analytic " + fmt(rel_exact) +
                            " (< 1e-5), flipped slope " + fmt(slope_rel) + " (< 5e-3)"));
  }

  {
    const double loss = aperture_loss(physics, grid);
    out.push_back(check("trap clipping at aperture", loss <= 30e-6,
                        "loss = " + fmt(loss * 1e6) + " ppm (<= 30 ppm)"));
  }

  {
    const auto scat = scattered_field_at_objective(physics, Displacement{0.0}, grid);
    const double ratio = inner_product(scat, scat).real() /
                         (physics.trap_amplitude() * physics.trap_amplitude());
    out.push_back(check("scattered / trap power", ratio <= 1e-3,
                        "ratio = " + fmt(ratio) + " (<= 1e-3)"));
  }
  return out;
}

int cmd_validate(const RunConfig& cfg, const CommandOptions& opts, std::ostream& out) {
  for (const auto& w : cfg.physics.warnings()) out << "[WARN] " << w << "\n";
  bool all = true;
  for (const auto& c : run_validation(cfg, opts)) {
    out << (c.passed ? "[PASS] " : "[FAIL] ") << c.name << ": " << c.detail << "\n";
    all = all && c.passed;
  }
  return all ? kSuccess : kValidationFailure;
}

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Shot-noise-limited particle sensing in optical tweezers: split vs spatial homodyne detection"};
  app.require_subcommand(1);

  std::string config_path;
  std::string out_dir;
  CommandOptions opts;
  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", config_path, "JSON run configuration (SI units)");
    sub->add_option("--out", out_dir, "Output directory (overrides outputs.directory)");
    sub->add_option("--threads", opts.threads, "Worker threads (default: available parallelism)");
    sub->add_flag("--full-quadratic", opts.full_quadratic,
                  "Split detection from the full photocurrent, including scattered x scattered");
    sub->add_flag("--normalize", opts.normalize, "Normalize pattern matrices to max |value| = 1");
  };
  auto* pattern = app.add_subcommand("pattern", "Trap-subtracted image-plane interference patterns");
  auto* snr = app.add_subcommand("snr-sweep", "SNR of both schemes versus displacement");
  auto* sens = app.add_subcommand("sensitivity-sweep", "Minimum detectable displacement versus NA");
  auto* val = app.add_subcommand("validate", "Run the invariant suite; exit 0 iff all pass");
  for (auto* sub : {pattern, snr, sens, val}) add_common(sub);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return kSuccess;
  } catch (const CLI::CallForAllHelp& e) {
    out << app.help("", CLI::AppFormatMode::All);
    return kSuccess;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n";
    return kConfigError;
  }
  if (!out_dir.empty()) opts.out_dir = out_dir;

  RunConfig cfg;
  try {
    cfg = config_path.empty() ? parse_run_config(nlohmann::json::object()) : load_run_config(config_path);
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << "\n";
    return kConfigError;
  }
  for (const auto& w : cfg.physics.warnings()) err << "warning: " << w << "\n";

  try {
    if (*pattern) {
      for (const auto& p : cmd_pattern(cfg, opts)) out << p.string() << "\n";
    } else if (*snr) {
      out << cmd_snr_sweep(cfg, opts).string() << "\n";
    } else if (*sens) {
      out << cmd_sensitivity_sweep(cfg, opts).string() << "\n";
    } else {
      return cmd_validate(cfg, opts, out);
    }
  } catch (const IoError& e) {
    err << "I/O error: " << e.what() << "\n";
    return kIoError;
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << "\n";
    return kConfigError;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kValidationFailure;
  }
  return kSuccess;
}

}  // namespace tweezersense::cli
