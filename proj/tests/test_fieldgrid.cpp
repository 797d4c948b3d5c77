#include <cmath>
#include <random>

#include "doctest.h"
#include "tweezersense/errors.hpp"
#include "tweezersense/fieldgrid.hpp"

using namespace tweezersense;

namespace {

const Grid2D kGrid = Grid2D::square(128, 1.0);
constexpr double kWaist = 1.0 / 12.0;

TransverseField random_field(const Grid2D& g, std::mt19937_64& rng, Plane plane = Plane::Objective) {
  std::normal_distribution<double> n;
  std::vector<Complex> ex(g.size()), ey(g.size());
  for (auto& v : ex) v = {n(rng), n(rng)};
  for (auto& v : ey) v = {n(rng), n(rng)};
  return TransverseField(g, plane, std::move(ex), std::move(ey));
}

double max_abs_diff(const TransverseField& a, const TransverseField& b) {
  double m = 0.0;
  for (std::size_t k = 0; k < a.ex().size(); ++k) {
    m = std::max(m, std::abs(a.ex()[k] - b.ex()[k]));
    m = std::max(m, std::abs(a.ey()[k] - b.ey()[k]));
  }
  return m;
}

}  // namespace

TEST_CASE("grid geometry is cell centred") {
  const Grid2D g(32, 16, 2.0, 1.0);
  CHECK(g.dx() == doctest::Approx(1.0 / 16));
  CHECK(g.x(0) == doctest::Approx(-1.0 + 0.5 / 16));
  CHECK(g.x(31) == doctest::Approx(1.0 - 0.5 / 16));
  CHECK(g.x(15) == doctest::Approx(-g.x(16)));
  CHECK(g.y(7) < 0.0);
  CHECK(g.y(8) > 0.0);
  CHECK(g.index(3, 2) == 2 * 32 + 3);
}

TEST_CASE("grid rejects bad sizes") {
  CHECK_THROWS_AS(Grid2D(15, 16, 1.0, 1.0), DomainError);
  CHECK_THROWS_AS(Grid2D(14, 16, 1.0, 1.0), DomainError);
  CHECK_THROWS_AS(Grid2D(16, 16, 0.0, 1.0), DomainError);
  CHECK_THROWS_AS(Grid2D(16, 16, 1.0, INFINITY), DomainError);
}

TEST_CASE("self overlap and orthogonality of basis modes") {
  const auto u00 = hermite_gauss_mode(kGrid, 0, 0, kWaist, Polarization::X);
  const auto u10 = hermite_gauss_mode(kGrid, 1, 0, kWaist, Polarization::X);
  CHECK(std::abs(inner_product(u00, u00) - 1.0) < 1e-6);
  CHECK(std::abs(inner_product(u00, u10)) < 1e-6);
}

TEST_CASE("orthonormality up to total order 4, both polarizations") {
  std::vector<TransverseField> modes;
  for (auto pol : {Polarization::X, Polarization::Y}) {
    for (int order = 0; order <= 4; ++order) {
      for (int m = 0; m <= order; ++m) modes.push_back(hermite_gauss_mode(kGrid, m, order - m, kWaist, pol));
    }
  }
  for (std::size_t a = 0; a < modes.size(); ++a) {
    for (std::size_t b = 0; b < modes.size(); ++b) {
      CHECK(std::abs(inner_product(modes[a], modes[b]) - (a == b ? 1.0 : 0.0)) < 1e-6);
    }
  }
}

TEST_CASE("displaced Gaussian overlap equals exp(-1/2) at d = w") {
  const Grid2D g = Grid2D::square(256, 1.0);
  const double w = 1.0 / 16;
  const auto u = hermite_gauss_mode(g, 0, 0, w, Polarization::X);
  const auto ud = hermite_gauss_mode(g, 0, 0, w, Polarization::X, Plane::Objective, w);
  CHECK(inner_product(u, ud).real() == doctest::Approx(0.6065306597126334).epsilon(1e-5));
}

TEST_CASE("inner product is conjugate linear in the first argument") {
  std::mt19937_64 rng(11);
  const auto a = random_field(kGrid, rng);
  const auto b = random_field(kGrid, rng);
  const Complex s{0.3, -1.7};
  const Complex lhs = inner_product(a * s, b);
  const Complex rhs = std::conj(s) * inner_product(a, b);
  CHECK(std::abs(lhs - rhs) < 1e-12 * std::abs(rhs));
  const Complex lin = inner_product(a, b * s);
  CHECK(std::abs(lin - s * inner_product(a, b)) < 1e-12 * std::abs(lin));
  CHECK(std::abs(inner_product(b, a) - std::conj(inner_product(a, b))) < 1e-12 * std::abs(lin));
}

TEST_CASE("inner product rejects mismatched operands") {
  const auto a = hermite_gauss_mode(kGrid, 0, 0, kWaist, Polarization::X);
  const auto other = hermite_gauss_mode(Grid2D::square(64, 1.0), 0, 0, kWaist, Polarization::X);
  const TransverseField image(kGrid, Plane::Image);
  CHECK_THROWS_AS(inner_product(a, other), DimensionError);
  CHECK_THROWS_AS(inner_product(a, image), DomainError);
  CHECK_THROWS_AS(TransverseField(a) += other, DimensionError);
}

TEST_CASE("normalize") {
  const auto u = hermite_gauss_mode(kGrid, 0, 0, kWaist, Polarization::X);
  CHECK(max_abs_diff(normalize(u * Complex{2.0, 0.0}), u) < 1e-12);
  CHECK(max_abs_diff(normalize(u), u) < 1e-12);
  std::mt19937_64 rng(5);
  for (int k = 0; k < 5; ++k) {
    const auto f = normalize(random_field(kGrid, rng));
    CHECK(std::abs(inner_product(f, f).real() - 1.0) < 1e-12);
  }
  CHECK_THROWS_AS(normalize(TransverseField(kGrid, Plane::Objective)), DegenerateInputError);
}

TEST_CASE("fourier_image is unitary") {
  std::mt19937_64 rng(7);
  for (int k = 0; k < 5; ++k) {
    const auto a = random_field(kGrid, rng);
    const auto b = random_field(kGrid, rng) + a * Complex{0.5, 0.0};
    const Complex direct = inner_product(a, b);
    const Complex imaged = inner_product(fourier_image(a), fourier_image(b));
    CHECK(std::abs(imaged - direct) < 1e-10 * std::abs(direct));
  }
}

TEST_CASE("fourier_image of a Gaussian is a Gaussian of reciprocal waist") {
  const auto u = hermite_gauss_mode(kGrid, 0, 0, kWaist, Polarization::X);
  const auto img = fourier_image(u);
  CHECK(std::abs(norm(img) - 1.0) < 1e-10);
  // Unit coordinate scale: image waist is 1 / (pi w).
  const auto expected =
      hermite_gauss_mode(img.grid(), 0, 0, 1.0 / (M_PI * kWaist), Polarization::X, Plane::Image);
  CHECK(std::abs(std::abs(inner_product(expected, img)) - 1.0) < 1e-8);
  CHECK(img.plane() == Plane::Image);
  CHECK_THROWS_AS(fourier_image(img), DomainError);
}

TEST_CASE("fourier_image preserves parity in each axis") {
  for (int m = 0; m <= 3; ++m) {
    for (int n = 0; n <= 2; ++n) {
      const auto u = hermite_gauss_mode(kGrid, m, n, kWaist, Polarization::Y);
      const auto img = fourier_image(u);
      const Grid2D& g = img.grid();
      const double sx = m % 2 == 0 ? 1.0 : -1.0;
      const double sy = n % 2 == 0 ? 1.0 : -1.0;
      double worst = 0.0, peak = 0.0;
      for (int j = 0; j < g.samples_y(); ++j) {
        for (int i = 0; i < g.samples_x(); ++i) {
          const Complex v = img.ey(i, j);
          const Complex mx = img.ey(g.samples_x() - 1 - i, j);
          const Complex my = img.ey(i, g.samples_y() - 1 - j);
          worst = std::max({worst, std::abs(v - sx * mx), std::abs(v - sy * my)});
          peak = std::max(peak, std::abs(v));
        }
      }
      CHECK(worst < 1e-10 * peak);
    }
  }
}

TEST_CASE("mirror_x reverses the x index") {
  std::mt19937_64 rng(3);
  const auto f = random_field(kGrid, rng);
  const auto m = mirror_x(f);
  CHECK(m.ex(0, 5) == f.ex(127, 5));
  CHECK(max_abs_diff(mirror_x(m), f) == 0.0);
}

TEST_CASE("non-finite values are detected") {
  TransverseField f(kGrid, Plane::Objective);
  CHECK(f.all_finite());
  f.ex()[10] = Complex{NAN, 0.0};
  CHECK_FALSE(f.all_finite());
}
