#include <atomic>
#include <cmath>
#include <numbers>

#include "doctest.h"
#include "harmonic_atlas/quad.hpp"

using namespace harmonic_atlas;

TEST_CASE("gauss-legendre 5-point rule") {
  std::vector<double> x, w;
  gauss_legendre(5, x, w);
  const double a = std::sqrt(5.0 - 2.0 * std::sqrt(10.0 / 7.0)) / 3.0;
  const double b = std::sqrt(5.0 + 2.0 * std::sqrt(10.0 / 7.0)) / 3.0;
  CHECK(x[0] == doctest::Approx(-b).epsilon(1e-15));
  CHECK(x[1] == doctest::Approx(-a).epsilon(1e-15));
  CHECK(std::abs(x[2]) < 1e-15);
  CHECK(w[0] == doctest::Approx((322.0 - 13.0 * std::sqrt(70.0)) / 900.0).epsilon(1e-14));
  CHECK(w[2] == doctest::Approx(128.0 / 225.0).epsilon(1e-14));
  CHECK_THROWS_AS(gauss_legendre(0, x, w), InvalidInputError);
}

TEST_CASE("plane integrals with known values") {
  const QuadratureRule rule;
  const Integral a = integrate_plane([](Complex z) { return 1.0 / std::pow(1.0 + std::norm(z), 2); }, rule);
  CHECK(a.value == doctest::Approx(std::numbers::pi).epsilon(1e-12));
  CHECK(a.converged);
  const Integral g = integrate_plane([](Complex z) { return std::exp(-std::norm(z)); }, rule);
  CHECK(g.value == doctest::Approx(std::numbers::pi).epsilon(1e-10));
}

TEST_CASE("a non-finite integrand is reported with its location") {
  const QuadratureRule rule(8, 8);
  CHECK_THROWS_AS(integrate_plane([](Complex) { return NAN; }, rule), QuadratureError);
}

TEST_CASE("slowly decaying integrands do not converge") {
  const Integral a = integrate_plane([](Complex z) { return 1.0 / (1.0 + std::norm(z)); }, QuadratureRule(40, 16));
  CHECK_FALSE(a.converged);
}

TEST_CASE("pairwise sum and parallel_for") {
  std::vector<double> v(1001, 0.1);
  CHECK(pairwise_sum(v) == doctest::Approx(100.1).epsilon(1e-14));
  std::atomic<int> n{0};
  parallel_for(1000, [&](std::size_t) { ++n; });
  CHECK(n == 1000);
  CHECK_THROWS_AS(parallel_for(10, [](std::size_t i) { if (i == 7) throw InvalidInputError("x"); }),
                  InvalidInputError);
}

TEST_CASE("fourth-order FD of a smooth function") {
  const FDScheme fd;
  auto f = [](Complex z) { return std::sin(z.real()) * std::exp(z.imag()); };
  const Complex z(0.4, -0.3);
  CHECK(fd_derivative(f, z, Direction::x, fd) == doctest::Approx(std::cos(0.4) * std::exp(-0.3)).epsilon(1e-10));
  CHECK(std::abs(fd_laplacian(f, z, fd)) < 1e-6);
  const auto jet = fd_jet(f, z, fd);
  CHECK(jet.dy == doctest::Approx(f(z)).epsilon(1e-10));
}

TEST_CASE("grids") {
  const auto cc = cell_centered_grid(4, 2.0);
  CHECK(cc.size() == 16);
  CHECK(cc.front() == Complex(-1.5, -1.5));
  const auto corners = corner_grid(3, 4.0);
  CHECK(corners[4] == Complex(0.0, 0.0));
  CHECK(corners.front() == Complex(-4.0, -4.0));
  const std::vector<Complex> sing{Complex(0.0, 0.0)};
  CHECK(exclude_near(corners, sing, 1e-2).size() == 8);
}
