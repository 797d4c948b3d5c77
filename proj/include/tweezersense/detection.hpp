#pragma once

#include <span>
#include <vector>

#include "tweezersense/fieldgrid.hpp"
#include "tweezersense/tweezer_optics.hpp"

namespace tweezersense {

// All SNRs are for a coherent-state (shot-noise) field, quoted per unit
// sqrt(Hz) of detection bandwidth. Sensitivities are in metres for the same
// bandwidth.

/// Homodyne local oscillator: a unit-norm image-plane mode and its phase.
struct LOMode {
  TransverseField field;
  double optimized_at = 0.0;  ///< displacement p0 the mode was built for (m)
  double phase = 0.0;         ///< LO phase relative to the signal (rad)
};

struct DetectionResult {
  double p = 0.0;
  double snr_sd = 0.0;
  double snr_sh = 0.0;
  Complex alpha_f{};  ///< <v_f, E_scat(p)>
  Complex alpha_w{};  ///< <w, E(p)>
};

enum class Scheme { Split, Homodyne };

/// Minimum detectable displacement for both schemes. A scheme with no linear
/// response at p = 0 reports +inf and clears its `*_linear` flag.
struct SensitivityResult {
  double na = 0.0;
  double s_sd = 0.0;
  double s_sh = 0.0;
  bool sd_linear = true;
  bool sh_linear = true;

  double ratio() const { return s_sd / s_sh; }
};

struct DetectionOptions {
  double derivative_step = 0.0;  ///< central-difference step h; 0 means trap_waist / 1000
  bool full_quadratic = false;   ///< split detection from the full photocurrent, not the cross term

  double step_for(const TweezerConfig& cfg) const {
    return derivative_step > 0.0 ? derivative_step : cfg.trap_waist / 1000.0;
  }
};

/// sign(X) * v0: the mode a split detector actually measures.
TransverseField flipped_mode(const TransverseField& v0);

/// Precomputed per-(config, grid) state shared by every detection call: the
/// trap image and the split-detection flipped mode.
class SensingModel {
 public:
  SensingModel(TweezerConfig cfg, Grid2D grid, DetectionOptions opts = {});

  const TweezerConfig& config() const { return cfg_; }
  const Grid2D& grid() const { return grid_; }
  const DetectionOptions& options() const { return opts_; }
  const TransverseField& trap_image() const { return trap_image_; }
  /// Flipped version of the normalized total image field at p = 0.
  const TransverseField& flipped() const { return flipped_; }

  TransverseField scattered_image(double p) const;
  /// Central difference of the scattered image field about p0 with step h.
  TransverseField scattered_derivative(double p0, double h) const;
  TransverseField scattered_derivative(double p0) const {
    return scattered_derivative(p0, opts_.step_for(cfg_));
  }

  /// Unit-norm derivative mode at p0; DegenerateInputError if it vanishes.
  LOMode optimal_lo(double p0) const;

  double split_snr(double p, Complex* alpha_f = nullptr) const;
  /// 2 Re(e^{-i phi} <w, E_scat(p) + E_trap>). The trap term vanishes for an
  /// LO built at p0 = 0 and is a constant offset otherwise.
  double homodyne_snr(double p, const LOMode& lo, Complex* alpha_w = nullptr) const;

  DetectionResult detect(double p, const LOMode& lo) const;
  SensitivityResult sensitivity() const;
  /// 1 / (2 |d Re<mode, E_scat>/dp|) at p = 0 for an arbitrary unit mode.
  double sensitivity_for_mode(const TransverseField& mode) const;

 private:
  TweezerConfig cfg_;
  Grid2D grid_;
  DetectionOptions opts_;
  TransverseField trap_image_;
  TransverseField flipped_;
};

// Single-shot wrappers; each builds a SensingModel.
DetectionResult split_detection_snr(const TweezerConfig& cfg, Displacement p, const Grid2D& grid,
                                    const DetectionOptions& opts = {});
LOMode optimal_lo_mode(const TweezerConfig& cfg, Displacement p0, const Grid2D& grid,
                       double step = 0.0);
DetectionResult homodyne_snr(const TweezerConfig& cfg, Displacement p, const LOMode& lo,
                             const Grid2D& grid);
SensitivityResult sensitivity(const TweezerConfig& cfg, const Grid2D& grid,
                              const DetectionOptions& opts = {});
/// Minimum detectable displacement of one scheme.
double sensitivity(const TweezerConfig& cfg, Scheme scheme, const Grid2D& grid,
                   const DetectionOptions& opts = {});

/// Throws DomainError unless | <f, f> - 1 | <= 1e-10.
void require_unit_norm(const TransverseField& f, const char* what);

struct SweepOptions {
  DetectionOptions detection{};
  unsigned threads = 0;  ///< 0 means hardware concurrency
};

struct SweepResult {
  TweezerConfig config;
  Grid2D grid;
  double lo_p0 = 0.0;
  std::vector<DetectionResult> records;

  double max_abs_sd() const;
  double max_abs_sh() const;
  /// Each curve divided by its own max |SNR|.
  std::vector<double> normalized_sd() const;
  std::vector<double> normalized_sh() const;
};

/// SNR of both schemes at every p, homodyne LO optimized at lo_p0. Records are
/// index-ordered, so the result does not depend on the thread count.
SweepResult snr_sweep(const TweezerConfig& cfg, std::span<const double> p_list, double lo_p0,
                      const Grid2D& grid, const SweepOptions& opts = {});

/// Sensitivities over NA, each on its own objective_grid(cfg at NA, spec).
std::vector<SensitivityResult> sensitivity_sweep(const TweezerConfig& cfg,
                                                 std::span<const double> na_list,
                                                 const GridSpec& spec,
                                                 const SweepOptions& opts = {});

}  // namespace tweezersense
