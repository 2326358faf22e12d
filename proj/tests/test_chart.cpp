#include <numbers>
#include <random>

#include "doctest.h"
#include "harmonic_atlas/chart.hpp"

using namespace harmonic_atlas;

namespace {
const Complex I(0.0, 1.0);

std::vector<Complex> samples(int n, unsigned seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> c(-4.0, 4.0);
  std::vector<Complex> out;
  for (int i = 0; i < n; ++i) out.emplace_back(c(rng), c(rng));
  return out;
}
}  // namespace

TEST_CASE("stereo at reference points") {
  CHECK((stereo(0.0).u - Vec3(0, 0, -1)).norm() < 1e-15);
  CHECK((stereo(1.0).u - Vec3(1, 0, 0)).norm() < 1e-15);
  CHECK((stereo(1.0 + 2.0 * I).u - Vec3(1.0 / 3, 2.0 / 3, 2.0 / 3)).norm() < 1e-15);
  CHECK((stereo(ExtendedComplex::infinity()).u - Vec3(0, 0, 1)).norm() < 1e-15);
  CHECK(std::abs(stereo(1e200).u3() - 1.0) < 1e-15);
}

TEST_CASE("stereo_prime is stereo of the reciprocal") {
  for (const Complex z : samples(50, 1)) CHECK((stereo_prime(z).u - stereo(1.0 / z).u).norm() < 1e-14);
}

TEST_CASE("stereo_inv inverts stereo and fails at the north pole") {
  for (const Complex z : samples(100, 2)) CHECK(std::abs(stereo_inv(stereo(z)) - z) < 1e-12 * std::max(1.0, std::abs(z)));
  CHECK_THROWS_AS(stereo_inv(SpherePoint::north()), ChartDomainError);
}

TEST_CASE("dstereo matches a finite difference of stereo") {
  for (const Complex f : samples(20, 3)) {
    const Complex g(0.3, -1.1);
    const double h = 1e-6;
    const Vec3 fd = (stereo(f + h * g).u - stereo(f - h * g).u) / (2 * h);
    CHECK((dstereo(f, g).v - fd).norm() < 1e-7);
  }
}

TEST_CASE("dstereo and dstereo_inv are mutually inverse") {
  std::mt19937_64 rng(4);
  std::normal_distribution<double> n;
  for (const Complex f : samples(100, 5)) {
    const Complex g(n(rng), n(rng));
    CHECK(std::abs(dstereo_inv(stereo(f), dstereo(f, g)) - g) < 1e-10 * std::max(1.0, std::abs(g)));
    // Other direction, for a tangent vector at u.
    const SpherePoint u = stereo(f);
    Vec3 v(n(rng), n(rng), n(rng));
    v -= v.dot(u.u) * u.u;
    CHECK((dstereo(f, dstereo_inv(u, {v, u})).v - v).norm() < 1e-10 * std::max(1.0, v.norm()));
  }
}

TEST_CASE("primed-chart tangent maps agree with the reciprocal rule") {
  for (const Complex f : samples(30, 6)) {
    const Complex g(0.4, 0.9);
    const TangentVector v = dstereo(f, g);
    CHECK((dstereo_prime(1.0 / f, -g / (f * f)).v - v.v).norm() < 1e-12 * std::max(1.0, v.v.norm()));
    CHECK(std::abs(dstereo_prime_inv(v.base, v) + g / (f * f)) < 1e-10 * std::max(1.0, std::abs(g / (f * f))));
  }
}

TEST_CASE("rotation by pi about e1 maps S(f) to S(1/f)") {
  for (const Complex f : samples(50, 7))
    CHECK(std::abs(stereo_inv(rotate_x1(stereo(f), {std::numbers::pi})) - 1.0 / f) < 1e-12);
}

TEST_CASE("rotation generator is tangent and pushes forward to a quadratic") {
  for (const Complex f : samples(20, 8)) {
    const SpherePoint u = stereo(f);
    const TangentVector v = rotation_generator(u);
    CHECK(std::abs(v.v.dot(u.u)) < 1e-14);
    CHECK(std::abs(dstereo_inv(u, v) - (-0.5 * I * f * f + 0.5 * I)) < 1e-10 * std::max(1.0, std::norm(f)));
  }
}
