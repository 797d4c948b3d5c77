#include "tweezersense/fieldgrid.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <mutex>
#include <numbers>
#include <string>

#include "tweezersense/errors.hpp"

namespace tweezersense {

namespace {

bool valid_samples(int n) { return n >= Grid2D::kMinSamples && n % 2 == 0; }

// fftw_execute is re-entrant but planning is not.
std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

struct FftwBuffer {
  explicit FftwBuffer(std::size_t n) : data(fftw_alloc_complex(n)) {
    if (data == nullptr) throw std::bad_alloc();
  }
  ~FftwBuffer() { fftw_free(data); }
  FftwBuffer(const FftwBuffer&) = delete;
  FftwBuffer& operator=(const FftwBuffer&) = delete;

  Complex* begin() { return reinterpret_cast<Complex*>(data); }
  fftw_complex* data;
};

class ForwardPlan2D {
 public:
  // FFTW_ESTIMATE on fftw_malloc'd buffers gives the same plan, hence the same
  // rounding, on every call.
  ForwardPlan2D(int rows, int cols, FftwBuffer& buf) {
    std::lock_guard lock(planner_mutex());
    plan_ = fftw_plan_dft_2d(rows, cols, buf.data, buf.data, FFTW_FORWARD, FFTW_ESTIMATE);
  }
  ~ForwardPlan2D() {
    std::lock_guard lock(planner_mutex());
    fftw_destroy_plan(plan_);
  }
  ForwardPlan2D(const ForwardPlan2D&) = delete;
  ForwardPlan2D& operator=(const ForwardPlan2D&) = delete;

  void execute() const { fftw_execute(plan_); }

 private:
  fftw_plan plan_;
};

// Phase ramp exp(-2 pi i s k / N) with s = -N/2 + 1/2, the cell-centred offset.
std::vector<Complex> centring_ramp(int n) {
  const double s = -n / 2 + 0.5;
  std::vector<Complex> ramp(n);
  for (int k = 0; k < n; ++k) {
    ramp[k] = std::polar(1.0, -2.0 * std::numbers::pi * s * k / n);
  }
  return ramp;
}

double hermite(int order, double t) {
  double h0 = 1.0;
  if (order == 0) return h0;
  double h1 = 2.0 * t;
  for (int k = 1; k < order; ++k) {
    const double h2 = 2.0 * t * h1 - 2.0 * k * h0;
    h0 = h1;
    h1 = h2;
  }
  return h1;
}

std::vector<double> hermite_gauss_1d(int order, double waist, int count, double spacing,
                                     double offset) {
  // (2/pi)^(1/4) / sqrt(2^m m! w) makes the 1-D factor unit norm.
  const double norm = std::pow(2.0 / std::numbers::pi, 0.25) /
                      std::sqrt(std::ldexp(std::tgamma(order + 1.0), order) * waist);
  std::vector<double> out(count);
  for (int i = 0; i < count; ++i) {
    const double x = (i - count / 2 + 0.5) * spacing - offset;
    out[i] = norm * hermite(order, std::numbers::sqrt2 * x / waist) * std::exp(-x * x / (waist * waist));
  }
  return out;
}

}  // namespace

Grid2D::Grid2D(int samples_x, int samples_y, double extent_x, double extent_y)
    : samples_x_(samples_x), samples_y_(samples_y), extent_x_(extent_x), extent_y_(extent_y) {
  if (!valid_samples(samples_x) || !valid_samples(samples_y)) {
    throw DomainError("grid sample counts must be even and >= 16, got " +
                      std::to_string(samples_x) + "x" + std::to_string(samples_y));
  }
  if (!(extent_x > 0.0) || !(extent_y > 0.0) || !std::isfinite(extent_x) ||
      !std::isfinite(extent_y)) {
    throw DomainError("grid extents must be positive and finite");
  }
}

std::string_view to_string(Plane plane) {
  return plane == Plane::Objective ? "objective" : "image";
}

std::string_view to_string(Polarization pol) { return pol == Polarization::X ? "x" : "y"; }

TransverseField::TransverseField(Grid2D grid, Plane plane)
    : grid_(grid), plane_(plane), ex_(grid.size()), ey_(grid.size()) {}

TransverseField::TransverseField(Grid2D grid, Plane plane, std::vector<Complex> ex,
                                 std::vector<Complex> ey)
    : grid_(grid), plane_(plane), ex_(std::move(ex)), ey_(std::move(ey)) {
  if (ex_.size() != grid_.size() || ey_.size() != grid_.size()) {
    throw DimensionError("field component size does not match grid");
  }
}

bool TransverseField::all_finite() const {
  auto finite = [](Complex c) { return std::isfinite(c.real()) && std::isfinite(c.imag()); };
  return std::all_of(ex_.begin(), ex_.end(), finite) && std::all_of(ey_.begin(), ey_.end(), finite);
}

void TransverseField::check_compatible(const TransverseField& other) const {
  if (!(grid_ == other.grid_)) throw DimensionError("fields sampled on different grids");
  if (plane_ != other.plane_) throw DomainError("fields live on different planes");
}

TransverseField& TransverseField::operator+=(const TransverseField& other) {
  check_compatible(other);
  for (std::size_t k = 0; k < ex_.size(); ++k) {
    ex_[k] += other.ex_[k];
    ey_[k] += other.ey_[k];
  }
  return *this;
}

TransverseField& TransverseField::operator-=(const TransverseField& other) {
  check_compatible(other);
  for (std::size_t k = 0; k < ex_.size(); ++k) {
    ex_[k] -= other.ex_[k];
    ey_[k] -= other.ey_[k];
  }
  return *this;
}

TransverseField& TransverseField::operator*=(Complex scale) {
  for (auto& v : ex_) v *= scale;
  for (auto& v : ey_) v *= scale;
  return *this;
}

Complex inner_product(const TransverseField& a, const TransverseField& b) {
  if (!(a.grid() == b.grid())) throw DimensionError("inner_product: grid mismatch");
  if (a.plane() != b.plane()) throw DomainError("inner_product: plane mismatch");
  const auto ax = a.ex(), ay = a.ey(), bx = b.ex(), by = b.ey();
  Complex sum{0.0, 0.0};
  for (std::size_t k = 0; k < ax.size(); ++k) {
    sum += std::conj(ax[k]) * bx[k] + std::conj(ay[k]) * by[k];
  }
  return sum * a.grid().cell_area();
}

double norm(const TransverseField& f) { return std::sqrt(std::max(0.0, inner_product(f, f).real())); }

TransverseField normalize(const TransverseField& f) {
  const double n = norm(f);
  if (!(n > 0.0) || !std::isfinite(n)) {
    throw DegenerateInputError("normalize: field has zero or non-finite norm");
  }
  return f * Complex{1.0 / n, 0.0};
}

TransverseField fourier_image(const TransverseField& f, double coordinate_scale) {
  if (f.plane() != Plane::Objective) {
    throw DomainError("fourier_image: input must be an objective-plane field");
  }
  if (!(coordinate_scale > 0.0)) throw DomainError("fourier_image: coordinate scale must be > 0");

  const Grid2D& g = f.grid();
  const int nx = g.samples_x(), ny = g.samples_y();
  const Grid2D image(nx, ny, coordinate_scale / g.dx(), coordinate_scale / g.dy());

  const auto rx = centring_ramp(nx);
  const auto ry = centring_ramp(ny);
  const double sx = -nx / 2 + 0.5, sy = -ny / 2 + 0.5;
  // Constant phase of the centred kernel, unitary normalisation, and the
  // rescaling that makes sum |F|^2 dX dY equal sum |f|^2 dx dy.
  const Complex global =
      std::polar(1.0, -2.0 * std::numbers::pi * (sx * sx / nx + sy * sy / ny)) *
      (std::sqrt(g.cell_area() / image.cell_area()) / std::sqrt(static_cast<double>(g.size())));

  FftwBuffer buf(g.size());
  ForwardPlan2D plan(ny, nx, buf);

  auto transform = [&](std::span<const Complex> in) {
    Complex* work = buf.begin();
    for (int j = 0; j < ny; ++j) {
      for (int i = 0; i < nx; ++i) work[g.index(i, j)] = in[g.index(i, j)] * rx[i] * ry[j];
    }
    plan.execute();
    std::vector<Complex> out(g.size());
    for (int j = 0; j < ny; ++j) {
      for (int i = 0; i < nx; ++i) out[g.index(i, j)] = work[g.index(i, j)] * rx[i] * ry[j] * global;
    }
    return out;
  };

  auto ex = transform(f.ex());
  auto ey = transform(f.ey());
  return TransverseField(image, Plane::Image, std::move(ex), std::move(ey));
}

TransverseField mirror_x(const TransverseField& f) {
  const Grid2D& g = f.grid();
  std::vector<Complex> ex(g.size()), ey(g.size());
  const int nx = g.samples_x();
  for (int j = 0; j < g.samples_y(); ++j) {
    for (int i = 0; i < nx; ++i) {
      ex[g.index(i, j)] = f.ex(nx - 1 - i, j);
      ey[g.index(i, j)] = f.ey(nx - 1 - i, j);
    }
  }
  return TransverseField(g, f.plane(), std::move(ex), std::move(ey));
}

TransverseField hermite_gauss_mode(const Grid2D& grid, int m, int n, double waist,
                                   Polarization pol, Plane plane, double offset_x) {
  if (m < 0 || n < 0) throw DomainError("hermite_gauss_mode: mode indices must be >= 0");
  if (!(waist > 0.0)) throw DomainError("hermite_gauss_mode: waist must be > 0");
  const auto ux = hermite_gauss_1d(m, waist, grid.samples_x(), grid.dx(), offset_x);
  const auto uy = hermite_gauss_1d(n, waist, grid.samples_y(), grid.dy(), 0.0);
  std::vector<Complex> values(grid.size());
  for (int j = 0; j < grid.samples_y(); ++j) {
    for (int i = 0; i < grid.samples_x(); ++i) values[grid.index(i, j)] = ux[i] * uy[j];
  }
  std::vector<Complex> zeros(grid.size());
  if (pol == Polarization::X) return TransverseField(grid, plane, std::move(values), std::move(zeros));
  return TransverseField(grid, plane, std::move(zeros), std::move(values));
}

}  // namespace tweezersense
