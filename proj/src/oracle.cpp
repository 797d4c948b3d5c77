#include "tweezersense/oracle.hpp"

#include <cmath>
#include <numbers>
#include <vector>

#include "tweezersense/errors.hpp"

namespace tweezersense::oracle {

namespace {

struct Stencil {
  int lower;
  double frac;
  double weight;  // trapezoid weight in units of the fine spacing
};

std::vector<Stencil> refined_axis(int samples, int refinement) {
  const int fine = (samples - 1) * refinement + 1;
  std::vector<Stencil> out(fine);
  for (int t = 0; t < fine; ++t) {
    int lower = t / refinement;
    double frac = static_cast<double>(t % refinement) / refinement;
    if (lower == samples - 1) {
      lower = samples - 2;
      frac = 1.0;
    }
    out[t] = {lower, frac, (t == 0 || t == fine - 1) ? 0.5 : 1.0};
  }
  return out;
}

}  // namespace

Complex quadrature_overlap(const TransverseField& fa, const TransverseField& fb, int refinement) {
  if (!(fa.grid() == fb.grid())) throw DimensionError("quadrature_overlap: grid mismatch");
  if (fa.plane() != fb.plane()) throw DomainError("quadrature_overlap: plane mismatch");
  if (refinement != 1 && refinement != 2 && refinement != 4) {
    throw DomainError("quadrature_overlap: refinement must be 1, 2 or 4");
  }
  const Grid2D& g = fa.grid();
  const auto xs = refined_axis(g.samples_x(), refinement);
  const auto ys = refined_axis(g.samples_y(), refinement);

  // Interpolate one coarse-row pair along y, then sample along x.
  std::vector<Complex> row_a(2 * g.samples_x()), row_b(2 * g.samples_x());
  Complex total{0.0, 0.0};
  for (const auto& sy : ys) {
    for (int i = 0; i < g.samples_x(); ++i) {
      const auto lo = g.index(i, sy.lower), hi = g.index(i, sy.lower + 1);
      row_a[2 * i] = (1.0 - sy.frac) * fa.ex()[lo] + sy.frac * fa.ex()[hi];
      row_a[2 * i + 1] = (1.0 - sy.frac) * fa.ey()[lo] + sy.frac * fa.ey()[hi];
      row_b[2 * i] = (1.0 - sy.frac) * fb.ex()[lo] + sy.frac * fb.ex()[hi];
      row_b[2 * i + 1] = (1.0 - sy.frac) * fb.ey()[lo] + sy.frac * fb.ey()[hi];
    }
    Complex row_sum{0.0, 0.0};
    for (const auto& sx : xs) {
      const int l = 2 * sx.lower, h = l + 2;
      const Complex ax = (1.0 - sx.frac) * row_a[l] + sx.frac * row_a[h];
      const Complex ay = (1.0 - sx.frac) * row_a[l + 1] + sx.frac * row_a[h + 1];
      const Complex bx = (1.0 - sx.frac) * row_b[l] + sx.frac * row_b[h];
      const Complex by = (1.0 - sx.frac) * row_b[l + 1] + sx.frac * row_b[h + 1];
      row_sum += sx.weight * (std::conj(ax) * bx + std::conj(ay) * by);
    }
    total += sy.weight * row_sum;
  }
  return total * (g.dx() / refinement) * (g.dy() / refinement);
}

double analytic_displaced_gaussian_overlap(double d, double w) {
  if (!(w > 0.0)) throw DomainError("waist must be > 0");
  return std::exp(-d * d / (2.0 * w * w));
}

double analytic_flipped_overlap_slope(double w) {
  if (!(w > 0.0)) throw DomainError("waist must be > 0");
  return std::sqrt(2.0 / std::numbers::pi) / w;
}

}  // namespace tweezersense::oracle
