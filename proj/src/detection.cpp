#include "tweezersense/detection.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>

#include "tweezersense/errors.hpp"
#include "tweezersense/parallel.hpp"

namespace tweezersense {

namespace {

constexpr double kDegenerateSlope = 1e-12;

double max_abs(const std::vector<DetectionResult>& records, double DetectionResult::*column) {
  double m = 0.0;
  for (const auto& r : records) m = std::max(m, std::abs(r.*column));
  return m;
}

std::vector<double> normalized(const std::vector<DetectionResult>& records,
                               double DetectionResult::*column) {
  const double scale = max_abs(records, column);
  std::vector<double> out;
  out.reserve(records.size());
  for (const auto& r : records) out.push_back(scale > 0.0 ? r.*column / scale : 0.0);
  return out;
}

}  // namespace

TransverseField flipped_mode(const TransverseField& v0) {
  TransverseField out = v0;
  const Grid2D& g = v0.grid();
  auto ex = out.ex();
  auto ey = out.ey();
  for (int j = 0; j < g.samples_y(); ++j) {
    for (int i = 0; i < g.samples_x() / 2; ++i) {  // x < 0 half
      ex[g.index(i, j)] = -ex[g.index(i, j)];
      ey[g.index(i, j)] = -ey[g.index(i, j)];
    }
  }
  return out;
}

void require_unit_norm(const TransverseField& f, const char* what) {
  const double n2 = inner_product(f, f).real();
  if (!(std::abs(n2 - 1.0) <= 1e-10)) {
    throw DomainError(std::string(what) + " must have unit norm");
  }
}

SensingModel::SensingModel(TweezerConfig cfg, Grid2D grid, DetectionOptions opts)
    : cfg_(cfg),
      grid_(grid),
      opts_(opts),
      trap_image_(trap_image_field(cfg_, grid_)),
      flipped_(flipped_mode(normalize(trap_image_ + scattered_image(0.0)))) {}

TransverseField SensingModel::scattered_image(double p) const {
  return scattered_image_field(cfg_, Displacement{p}, grid_);
}

TransverseField SensingModel::scattered_derivative(double p0, double h) const {
  if (!(h > 0.0)) throw DomainError("derivative step must be > 0");
  TransverseField d = scattered_image(p0 + h) - scattered_image(p0 - h);
  d *= 1.0 / (2.0 * h);
  return d;
}

LOMode SensingModel::optimal_lo(double p0) const {
  const TransverseField d = scattered_derivative(p0);
  const double scale = norm(scattered_image(p0)) / cfg_.trap_waist;
  const double n = norm(d);
  if (!(n > kDegenerateSlope * scale)) {
    throw DegenerateInputError("scattered field has no first-order dependence on p; no signal mode");
  }
  return LOMode{d * Complex{1.0 / n, 0.0}, p0, 0.0};
}

double SensingModel::split_snr(double p, Complex* alpha_f) const {
  const TransverseField scat = scattered_image(p);
  const Complex overlap = inner_product(flipped_, scat);
  if (alpha_f != nullptr) *alpha_f = overlap;
  if (!opts_.full_quadratic) return 2.0 * overlap.real();

  // Difference photocurrent over shot noise of the total flux.
  const TransverseField total = trap_image_ + scat;
  const Grid2D& g = total.grid();
  double diff = 0.0;
  for (int j = 0; j < g.samples_y(); ++j) {
    for (int i = 0; i < g.samples_x(); ++i) {
      const double intensity = std::norm(total.ex(i, j)) + std::norm(total.ey(i, j));
      diff += g.x(i) < 0.0 ? -intensity : intensity;
    }
  }
  return diff * g.cell_area() / norm(total);
}

double SensingModel::homodyne_snr(double p, const LOMode& lo, Complex* alpha_w) const {
  require_unit_norm(lo.field, "LO mode");
  const Complex overlap =
      inner_product(lo.field, scattered_image(p)) + inner_product(lo.field, trap_image_);
  if (alpha_w != nullptr) *alpha_w = overlap;
  return 2.0 * (std::polar(1.0, -lo.phase) * overlap).real();
}

DetectionResult SensingModel::detect(double p, const LOMode& lo) const {
  DetectionResult r;
  r.p = p;
  r.snr_sd = split_snr(p, &r.alpha_f);
  r.snr_sh = homodyne_snr(p, lo, &r.alpha_w);
  return r;
}

SensitivityResult SensingModel::sensitivity() const {
  const TransverseField d = scattered_derivative(0.0);
  const double derivative_scale = norm(scattered_image(0.0)) / cfg_.trap_waist;

  SensitivityResult out;
  out.na = cfg_.numerical_aperture;

  const double slope_sh = norm(d);
  if (slope_sh > kDegenerateSlope * derivative_scale) {
    out.s_sh = 0.5 / slope_sh;
  } else {
    out.s_sh = std::numeric_limits<double>::infinity();
    out.sh_linear = false;
  }

  const double slope_sd = std::abs(inner_product(flipped_, d).real());
  if (out.sh_linear && slope_sd > kDegenerateSlope * slope_sh) {
    out.s_sd = 0.5 / slope_sd;
  } else {
    out.s_sd = std::numeric_limits<double>::infinity();
    out.sd_linear = false;
  }
  return out;
}

double SensingModel::sensitivity_for_mode(const TransverseField& mode) const {
  require_unit_norm(mode, "mode");
  const double slope = std::abs(inner_product(mode, scattered_derivative(0.0)).real());
  return slope > 0.0 ? 0.5 / slope : std::numeric_limits<double>::infinity();
}

DetectionResult split_detection_snr(const TweezerConfig& cfg, Displacement p, const Grid2D& grid,
                                    const DetectionOptions& opts) {
  check_displacement(cfg, p);
  const SensingModel model(cfg, grid, opts);
  DetectionResult r;
  r.p = p.value;
  r.snr_sd = model.split_snr(p.value, &r.alpha_f);
  return r;
}

LOMode optimal_lo_mode(const TweezerConfig& cfg, Displacement p0, const Grid2D& grid, double step) {
  check_displacement(cfg, p0);
  const SensingModel model(cfg, grid, DetectionOptions{step});
  return model.optimal_lo(p0.value);
}

DetectionResult homodyne_snr(const TweezerConfig& cfg, Displacement p, const LOMode& lo,
                             const Grid2D& grid) {
  check_displacement(cfg, p);
  require_unit_norm(lo.field, "LO mode");
  const TransverseField trap = trap_image_field(cfg, grid);
  const Complex overlap = inner_product(lo.field, scattered_image_field(cfg, p, grid)) +
                          inner_product(lo.field, trap);
  DetectionResult r;
  r.p = p.value;
  r.alpha_w = overlap;
  r.snr_sh = 2.0 * (std::polar(1.0, -lo.phase) * overlap).real();
  return r;
}

SensitivityResult sensitivity(const TweezerConfig& cfg, const Grid2D& grid,
                              const DetectionOptions& opts) {
  return SensingModel(cfg, grid, opts).sensitivity();
}

double sensitivity(const TweezerConfig& cfg, Scheme scheme, const Grid2D& grid,
                   const DetectionOptions& opts) {
  const SensitivityResult r = sensitivity(cfg, grid, opts);
  return scheme == Scheme::Split ? r.s_sd : r.s_sh;
}

double SweepResult::max_abs_sd() const { return max_abs(records, &DetectionResult::snr_sd); }
double SweepResult::max_abs_sh() const { return max_abs(records, &DetectionResult::snr_sh); }
std::vector<double> SweepResult::normalized_sd() const {
  return normalized(records, &DetectionResult::snr_sd);
}
std::vector<double> SweepResult::normalized_sh() const {
  return normalized(records, &DetectionResult::snr_sh);
}

SweepResult snr_sweep(const TweezerConfig& cfg, std::span<const double> p_list, double lo_p0,
                      const Grid2D& grid, const SweepOptions& opts) {
  cfg.validate();
  check_displacement(cfg, Displacement{lo_p0});
  for (double p : p_list) check_displacement(cfg, Displacement{p});

  const SensingModel model(cfg, grid, opts.detection);
  const LOMode lo = model.optimal_lo(lo_p0);

  SweepResult out{cfg, grid, lo_p0, std::vector<DetectionResult>(p_list.size())};
  parallel_for(p_list.size(), opts.threads,
               [&](std::size_t i) { out.records[i] = model.detect(p_list[i], lo); });
  return out;
}

std::vector<SensitivityResult> sensitivity_sweep(const TweezerConfig& cfg,
                                                 std::span<const double> na_list,
                                                 const GridSpec& spec, const SweepOptions& opts) {
  std::vector<TweezerConfig> configs;
  configs.reserve(na_list.size());
  for (double na : na_list) {
    TweezerConfig c = cfg;
    c.numerical_aperture = na;
    c.validate();
    configs.push_back(c);
  }
  std::vector<SensitivityResult> out(configs.size());
  parallel_for(configs.size(), opts.threads, [&](std::size_t i) {
    out[i] = SensingModel(configs[i], objective_grid(configs[i], spec), opts.detection).sensitivity();
  });
  return out;
}

}  // namespace tweezersense
