#pragma once

#include <optional>
#include <string>
#include <vector>

#include "tweezersense/fieldgrid.hpp"

namespace tweezersense {

inline constexpr double kPlanck = 1.054571817e-34;  // reduced, J s
inline constexpr double kSpeedOfLight = 299792458.0;

/// Physical parameters of the trap and collection optics, SI units.
/// Defaults reproduce the reference configuration: 200 mW at 1064 nm, 4 um
/// waist, 0.1 um silica-like sphere in vacuum-like medium, NA 0.99.
struct TweezerConfig {
  double wavelength = 1064e-9;
  double trap_power = 0.2;
  double trap_waist = 4e-6;
  double objective_focal = 3e-3;
  double numerical_aperture = 0.99;
  double medium_index = 1.0;
  double particle_radius = 0.1e-6;
  double eps_medium = 1.0;
  double eps_particle = 3.8;
  Polarization polarization = Polarization::X;

  /// Throws ConfigError when a hard invariant fails (non-positive lengths or
  /// power, NA outside (0, n), non-finite permittivities).
  void validate() const;

  /// Soft violations that still allow a run, e.g. a particle too large for
  /// the dipole approximation.
  std::vector<std::string> warnings() const;

  double wavenumber() const;
  double angular_frequency() const;
  /// sqrt(P / hbar omega), in (photons/s)^(1/2).
  double trap_amplitude() const;
  /// Gaussian spot radius at the objective, f lambda / (pi w_T).
  double objective_spot_radius() const;
  /// f NA / sqrt(n^2 - NA^2).
  double aperture_radius() const;
  /// Clausius-Mossotti-type factor (eps1 - eps2) / (eps1 + 2 eps2).
  double polarizability_factor() const;
  /// alpha_trap k^2 a^3 (eps1 - eps2) / (eps1 + 2 eps2).
  double scattering_constant() const;
  /// Image-plane coordinates are object-space metres at unit magnification.
  double image_coordinate_scale() const { return wavelength * objective_focal; }

  bool operator==(const TweezerConfig&) const = default;
};

/// Particle displacement along x, metres.
struct Displacement {
  double value = 0.0;
};

/// Objective-plane lattice: `samples` per side, extent 2 * padding_factor * R.
struct GridSpec {
  int samples = 512;
  double padding_factor = 2.0;

  bool operator==(const GridSpec&) const = default;
};

Grid2D objective_grid(const TweezerConfig& cfg, const GridSpec& spec = {});

/// Throws DomainError unless p is finite and |p| <= 3 w_T.
void check_displacement(const TweezerConfig& cfg, Displacement p);

/// Trap beam at the objective: Gaussian of radius w_O, not apertured, scaled
/// so that its flux on this grid is exactly alpha_trap^2. The common
/// propagation phase exp(-i k f) is dropped.
TransverseField trap_field_at_objective(const TweezerConfig& cfg, const Grid2D& grid);

/// Fraction of trap flux falling outside the hard aperture of radius R.
double aperture_loss(const TweezerConfig& cfg, const Grid2D& grid);

/// Dipole field of the displaced particle collected by the objective.
///
/// Driven by the trap field at the particle, radiated along -r' x r' x p_trap,
/// re-expressed by the lens as (E.l) l + (E.m) n, compressed by sqrt(f / r'),
/// phase exp(-i k (r' - r)) relative to the trap, and clipped at rho = R.
TransverseField scattered_field_at_objective(const TweezerConfig& cfg, Displacement p,
                                             const Grid2D& grid);

TransverseField trap_image_field(const TweezerConfig& cfg, const Grid2D& grid);
TransverseField scattered_image_field(const TweezerConfig& cfg, Displacement p, const Grid2D& grid);
TransverseField total_image_field(const TweezerConfig& cfg, Displacement p, const Grid2D& grid);

/// Real image-plane map, row-major like Grid2D.
struct IntensityMap {
  Grid2D grid;
  std::vector<double> values;

  double at(int i, int j) const { return values[grid.index(i, j)]; }
};

/// |E_total|^2 - |E_trap|^2 in the image plane (cross term plus the
/// scattered-only term), photons/(s m^2).
IntensityMap interference_pattern(const TweezerConfig& cfg, Displacement p, const Grid2D& grid);

}  // namespace tweezersense
