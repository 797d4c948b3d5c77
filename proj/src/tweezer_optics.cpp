#include "tweezersense/tweezer_optics.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

#include "tweezersense/errors.hpp"

namespace tweezersense {

namespace {

bool positive(double v) { return std::isfinite(v) && v > 0.0; }

double gaussian_peak_amplitude(double waist) { return std::sqrt(2.0 / std::numbers::pi) / waist; }

}  // namespace

void TweezerConfig::validate() const {
  auto require = [](bool ok, const char* what) {
    if (!ok) throw ConfigError(what);
  };
  require(positive(wavelength), "wavelength must be > 0");
  require(positive(trap_power), "trap_power must be > 0");
  require(positive(trap_waist), "trap_waist must be > 0");
  require(positive(objective_focal), "objective_focal must be > 0");
  require(positive(medium_index), "medium_index must be > 0");
  require(positive(particle_radius), "particle_radius must be > 0");
  require(std::isfinite(eps_medium) && std::isfinite(eps_particle), "permittivities must be finite");
  require(eps_medium + 2.0 * eps_particle != 0.0, "eps_medium + 2 eps_particle must be non-zero");
  if (!(numerical_aperture > 0.0 && numerical_aperture < medium_index)) {
    std::ostringstream msg;
    msg << "numerical_aperture must satisfy 0 < NA < n (NA = " << numerical_aperture
        << ", n = " << medium_index << ")";
    throw ConfigError(msg.str());
  }
}

std::vector<std::string> TweezerConfig::warnings() const {
  std::vector<std::string> out;
  if (particle_radius >= wavelength) {
    out.emplace_back("particle_radius >= wavelength: the Rayleigh (dipole) assumption is violated");
  }
  return out;
}

double TweezerConfig::wavenumber() const { return 2.0 * std::numbers::pi / wavelength; }

double TweezerConfig::angular_frequency() const {
  return 2.0 * std::numbers::pi * kSpeedOfLight / wavelength;
}

double TweezerConfig::trap_amplitude() const {
  return std::sqrt(trap_power / (kPlanck * angular_frequency()));
}

double TweezerConfig::objective_spot_radius() const {
  return objective_focal * wavelength / (std::numbers::pi * trap_waist);
}

double TweezerConfig::aperture_radius() const {
  return objective_focal * numerical_aperture /
         std::sqrt(medium_index * medium_index - numerical_aperture * numerical_aperture);
}

double TweezerConfig::polarizability_factor() const {
  return (eps_medium - eps_particle) / (eps_medium + 2.0 * eps_particle);
}

double TweezerConfig::scattering_constant() const {
  const double k = wavenumber();
  const double a = particle_radius;
  return trap_amplitude() * k * k * a * a * a * polarizability_factor();
}

Grid2D objective_grid(const TweezerConfig& cfg, const GridSpec& spec) {
  if (!(spec.padding_factor >= 1.0)) throw DomainError("padding_factor must be >= 1");
  return Grid2D::square(spec.samples, 2.0 * spec.padding_factor * cfg.aperture_radius());
}

void check_displacement(const TweezerConfig& cfg, Displacement p) {
  if (!std::isfinite(p.value) || std::abs(p.value) > 3.0 * cfg.trap_waist) {
    throw DomainError("displacement must be finite with |p| <= 3 trap waists");
  }
}

TransverseField trap_field_at_objective(const TweezerConfig& cfg, const Grid2D& grid) {
  const double w = cfg.objective_spot_radius();
  if (grid.extent_x() < 4.0 * w || grid.extent_y() < 4.0 * w) {
    throw DomainError("grid extent must be at least 4 objective spot radii");
  }
  const double peak = cfg.trap_amplitude() * gaussian_peak_amplitude(w);
  std::vector<Complex> main(grid.size()), zeros(grid.size());
  for (int j = 0; j < grid.samples_y(); ++j) {
    for (int i = 0; i < grid.samples_x(); ++i) {
      const double r2 = grid.x(i) * grid.x(i) + grid.y(j) * grid.y(j);
      main[grid.index(i, j)] = peak * std::exp(-r2 / (w * w));
    }
  }
  TransverseField f = cfg.polarization == Polarization::X
                          ? TransverseField(grid, Plane::Objective, std::move(main), std::move(zeros))
                          : TransverseField(grid, Plane::Objective, std::move(zeros), std::move(main));
  // Coarse sampling of a narrow spot misses the flux by up to ~1e-5.
  f *= cfg.trap_amplitude() / norm(f);
  return f;
}

double aperture_loss(const TweezerConfig& cfg, const Grid2D& grid) {
  const TransverseField trap = trap_field_at_objective(cfg, grid);
  const double r2max = cfg.aperture_radius() * cfg.aperture_radius();
  double outside = 0.0, total = 0.0;
  for (int j = 0; j < grid.samples_y(); ++j) {
    for (int i = 0; i < grid.samples_x(); ++i) {
      const double v = std::norm(trap.ex(i, j)) + std::norm(trap.ey(i, j));
      total += v;
      if (grid.x(i) * grid.x(i) + grid.y(j) * grid.y(j) >= r2max) outside += v;
    }
  }
  return outside / total;
}

TransverseField scattered_field_at_objective(const TweezerConfig& cfg, Displacement p,
                                             const Grid2D& grid) {
  check_displacement(cfg, p);
  const double f = cfg.objective_focal;
  const double k = cfg.wavenumber();
  const double r2max = cfg.aperture_radius() * cfg.aperture_radius();
  const double px = p.value;
  const double wt = cfg.trap_waist;
  // Trap amplitude at the particle drives the dipole.
  const double drive = cfg.scattering_constant() * gaussian_peak_amplitude(wt) *
                       std::exp(-px * px / (wt * wt));
  const double pol_x = cfg.polarization == Polarization::X ? 1.0 : 0.0;
  const double pol_y = 1.0 - pol_x;

  std::vector<Complex> ex(grid.size()), ey(grid.size());
  for (int j = 0; j < grid.samples_y(); ++j) {
    const double y = grid.y(j);
    for (int i = 0; i < grid.samples_x(); ++i) {
      const double x = grid.x(i);
      if (x * x + y * y >= r2max) continue;

      const double rx = x - px, ry = y, rz = f;
      const double rho_p = std::hypot(rx, ry);  // > 0: no sample has y = 0
      const double r_p = std::sqrt(rho_p * rho_p + rz * rz);
      const double r = std::sqrt(x * x + y * y + f * f);

      // Dipole direction -r' x (r' x p) = p - r'(r'.p).
      const double along = (rx * pol_x + ry * pol_y) / r_p;
      const double dx = pol_x - along * rx / r_p;
      const double dy = pol_y - along * ry / r_p;
      const double dz = -along * rz / r_p;

      // Lens maps the azimuthal l and meridional m directions onto l and n.
      const double lx = ry / rho_p, ly = -rx / rho_p;
      const double mx = -f * rx / (rho_p * r_p), my = -f * ry / (rho_p * r_p), mz = rho_p / r_p;
      const double nx = -rx / rho_p, ny = -ry / rho_p;
      const double el = dx * lx + dy * ly;
      const double em = dx * mx + dy * my + dz * mz;

      // r' - r computed without cancellation.
      const double path = (px * px - 2.0 * x * px) / (r_p + r);
      const Complex amp = std::polar(drive / r_p * std::sqrt(f / r_p), -k * path);
      const std::size_t idx = grid.index(i, j);
      ex[idx] = amp * (el * lx + em * nx);
      ey[idx] = amp * (el * ly + em * ny);
    }
  }
  return TransverseField(grid, Plane::Objective, std::move(ex), std::move(ey));
}

TransverseField trap_image_field(const TweezerConfig& cfg, const Grid2D& grid) {
  return fourier_image(trap_field_at_objective(cfg, grid), cfg.image_coordinate_scale());
}

TransverseField scattered_image_field(const TweezerConfig& cfg, Displacement p, const Grid2D& grid) {
  return fourier_image(scattered_field_at_objective(cfg, p, grid), cfg.image_coordinate_scale());
}

TransverseField total_image_field(const TweezerConfig& cfg, Displacement p, const Grid2D& grid) {
  return fourier_image(scattered_field_at_objective(cfg, p, grid) + trap_field_at_objective(cfg, grid),
                       cfg.image_coordinate_scale());
}

IntensityMap interference_pattern(const TweezerConfig& cfg, Displacement p, const Grid2D& grid) {
  const TransverseField trap = trap_image_field(cfg, grid);
  const TransverseField scat = scattered_image_field(cfg, p, grid);
  IntensityMap out{trap.grid(), std::vector<double>(grid.size())};
  const auto tx = trap.ex(), ty = trap.ey(), sx = scat.ex(), sy = scat.ey();
  // |T + S|^2 - |T|^2 expanded to avoid cancelling the dominant trap term.
  for (std::size_t k = 0; k < out.values.size(); ++k) {
    out.values[k] = 2.0 * (std::conj(tx[k]) * sx[k] + std::conj(ty[k]) * sy[k]).real() +
                    std::norm(sx[k]) + std::norm(sy[k]);
  }
  return out;
}

}  // namespace tweezersense
