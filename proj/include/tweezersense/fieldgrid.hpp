#pragma once

#include <complex>
#include <cstddef>
#include <span>
#include <string_view>
#include <vector>

namespace tweezersense {

using Complex = std::complex<double>;

/// Uniform transverse sampling lattice.
///
/// Samples are cell-centred: sample i sits at x_i = (i - N/2 + 1/2) * dx, so the
/// lattice is symmetric about the origin and no sample lies on x = 0 or y = 0.
/// Storage is row-major with y as the row index: index(i, j) = j * samples_x + i.
class Grid2D {
 public:
  static constexpr int kMinSamples = 16;

  /// Throws DomainError unless both sample counts are even and >= 16 and both
  /// extents are positive and finite.
  Grid2D(int samples_x, int samples_y, double extent_x, double extent_y);

  static Grid2D square(int samples, double extent) { return {samples, samples, extent, extent}; }

  int samples_x() const { return samples_x_; }
  int samples_y() const { return samples_y_; }
  double extent_x() const { return extent_x_; }
  double extent_y() const { return extent_y_; }
  double dx() const { return extent_x_ / samples_x_; }
  double dy() const { return extent_y_ / samples_y_; }
  double cell_area() const { return dx() * dy(); }
  std::size_t size() const { return static_cast<std::size_t>(samples_x_) * samples_y_; }

  double x(int i) const { return (i - samples_x_ / 2 + 0.5) * dx(); }
  double y(int j) const { return (j - samples_y_ / 2 + 0.5) * dy(); }
  std::size_t index(int i, int j) const { return static_cast<std::size_t>(j) * samples_x_ + i; }

  bool operator==(const Grid2D&) const = default;

 private:
  int samples_x_;
  int samples_y_;
  double extent_x_;
  double extent_y_;
};

enum class Plane { Objective, Image };
enum class Polarization { X, Y };

std::string_view to_string(Plane plane);
std::string_view to_string(Polarization pol);

/// Two-component (x, y polarization) complex field sampled on a Grid2D.
///
/// Amplitudes are stored in photon-flux units: <E, E> is the photon flux
/// (photons/s) through the plane, so |E|^2 has units photons/(s m^2).
class TransverseField {
 public:
  TransverseField(Grid2D grid, Plane plane);
  TransverseField(Grid2D grid, Plane plane, std::vector<Complex> ex, std::vector<Complex> ey);

  const Grid2D& grid() const { return grid_; }
  Plane plane() const { return plane_; }

  std::span<const Complex> ex() const { return ex_; }
  std::span<const Complex> ey() const { return ey_; }
  std::span<Complex> ex() { return ex_; }
  std::span<Complex> ey() { return ey_; }

  Complex ex(int i, int j) const { return ex_[grid_.index(i, j)]; }
  Complex ey(int i, int j) const { return ey_[grid_.index(i, j)]; }

  bool all_finite() const;

  TransverseField& operator+=(const TransverseField& other);
  TransverseField& operator-=(const TransverseField& other);
  TransverseField& operator*=(Complex scale);

  friend TransverseField operator+(TransverseField a, const TransverseField& b) { return a += b; }
  friend TransverseField operator-(TransverseField a, const TransverseField& b) { return a -= b; }
  friend TransverseField operator*(TransverseField a, Complex s) { return a *= s; }
  friend TransverseField operator*(Complex s, TransverseField a) { return a *= s; }

 private:
  void check_compatible(const TransverseField& other) const;

  Grid2D grid_;
  Plane plane_;
  std::vector<Complex> ex_;
  std::vector<Complex> ey_;
};

/// Discretized <a, b> = sum (ex_a^* ex_b + ey_a^* ey_b) dx dy, conjugate-linear in a.
/// Throws DimensionError on grid mismatch and DomainError on plane mismatch.
Complex inner_product(const TransverseField& a, const TransverseField& b);

double norm(const TransverseField& f);

/// f / ||f||. Throws DegenerateInputError for a zero field.
TransverseField normalize(const TransverseField& f);

/// Centred, unitary 2-D DFT of both polarization components, mapping an
/// objective-plane field to the image plane.
///
/// The transform is taken over the cell-centred lattice on both sides, so
/// parity about the origin is preserved exactly. Image-plane sample spacing is
/// dX = coordinate_scale / (N dx): with coordinate_scale = 1 the image axis is
/// spatial frequency (cycles/m); passing lambda * f maps it onto object-space
/// metres at unit magnification. Amplitudes are rescaled so that inner
/// products are preserved (Parseval).
TransverseField fourier_image(const TransverseField& f, double coordinate_scale = 1.0);

/// Field with every sample moved from (x, y) to (-x, y); components unchanged.
TransverseField mirror_x(const TransverseField& f);

/// Unit-norm Hermite-Gauss TEM_mn mode of the given waist, sampled on `grid`.
TransverseField hermite_gauss_mode(const Grid2D& grid, int m, int n, double waist,
                                   Polarization pol, Plane plane = Plane::Objective,
                                   double offset_x = 0.0);

}  // namespace tweezersense
