#include "harmonic_atlas/chart.hpp"

#include <cmath>

namespace harmonic_atlas {

namespace {

void require_chart_domain(const SpherePoint& u) {
  if (u.u3() >= 1.0 - tolerances::kPole)
    throw ChartDomainError("point is within eps_pole of the north pole; use the primed chart");
}

}  // namespace

SpherePoint stereo(Complex z) {
  if (std::abs(z) > 1.0) return stereo_prime(1.0 / z);
  const double n2 = std::norm(z);
  const double d = 1.0 + n2;
  return {2.0 * z.real() / d, 2.0 * z.imag() / d, (n2 - 1.0) / d};
}

SpherePoint stereo(const ExtendedComplex& z) {
  if (z.infinite) return SpherePoint::north();
  if (std::abs(z.value) > 1.0) return stereo_prime(1.0 / z.value);
  return stereo(z.value);
}

SpherePoint stereo_prime(Complex z) {
  const double n2 = std::norm(z);
  const double d = 1.0 + n2;
  return {2.0 * z.real() / d, -2.0 * z.imag() / d, (1.0 - n2) / d};
}

Complex stereo_inv(const SpherePoint& u) {
  require_chart_domain(u);
  if (u.u3() > 0.0) {
    // z = 1/h with h = S'^{-1}(u) = (u1 - i u2)/(1 + u3).
    return Complex(1.0 + u.u3(), 0.0) / Complex(u.u1(), -u.u2());
  }
  return Complex(u.u1(), u.u2()) / (1.0 - u.u3());
}

SpherePoint rotate_x1(const SpherePoint& u, RotationAngle alpha) {
  const double c = std::cos(alpha.radians);
  const double s = std::sin(alpha.radians);
  return {u.u1(), u.u2() * c - u.u3() * s, u.u2() * s + u.u3() * c};
}

TangentVector rotation_generator(const SpherePoint& u) {
  return {Vec3(0.0, -u.u3(), u.u2()), u};
}

TangentVector dstereo(Complex f, Complex g) {
  if (std::abs(f) > 1.0) {
    const Complex h = 1.0 / f;
    return dstereo_prime(h, -g * h * h);
  }
  const double f1 = f.real(), f2 = f.imag();
  const double g1 = g.real(), g2 = g.imag();
  const double d = 1.0 + f1 * f1 + f2 * f2;
  const double d2 = d * d;
  Vec3 v(2.0 * (1.0 - f1 * f1 + f2 * f2) / d2 * g1 - 4.0 * f1 * f2 / d2 * g2,
         2.0 * (1.0 + f1 * f1 - f2 * f2) / d2 * g2 - 4.0 * f1 * f2 / d2 * g1,
         4.0 * f1 / d2 * g1 + 4.0 * f2 / d2 * g2);
  return {v, stereo(f)};
}

TangentVector dstereo_prime(Complex h, Complex k) {
  const double h1 = h.real(), h2 = h.imag();
  const double k1 = k.real(), k2 = k.imag();
  const double d = 1.0 + h1 * h1 + h2 * h2;
  const double d2 = d * d;
  Vec3 v((2.0 * (1.0 - h1 * h1 + h2 * h2) * k1 - 4.0 * h1 * h2 * k2) / d2,
         -(2.0 * (1.0 + h1 * h1 - h2 * h2) * k2 - 4.0 * h1 * h2 * k1) / d2,
         -(4.0 * h1 * k1 + 4.0 * h2 * k2) / d2);
  return {v, stereo_prime(h)};
}

Complex dstereo_inv(const SpherePoint& u, const TangentVector& v) {
  require_chart_domain(u);
  const double u1 = u.u1(), u2 = u.u2(), u3 = u.u3();
  const double v1 = v.v.x(), v2 = v.v.y(), v3 = v.v.z();
  if (u3 > 0.0) {
    // Differentiate h = (u1 - i u2)/(1 + u3), then z = 1/h gives dz = -dh/h^2.
    const Complex a(u1, -u2);
    const double b = 1.0 + u3;
    const Complex h = a / b;
    const Complex dh = (Complex(v1, -v2) * b - a * v3) / (b * b);
    return -dh / (h * h);
  }
  const double w = (1.0 - u3) * (1.0 - u3);
  return {(u1 * v3 - u3 * v1 + v1) / w, (u2 * v3 - u3 * v2 + v2) / w};
}

Complex dstereo_prime_inv(const SpherePoint& u, const TangentVector& v) {
  if (u.u3() <= -1.0 + tolerances::kPole)
    throw ChartDomainError("point is within eps_pole of the south pole; use the unprimed chart");
  const Complex a(u.u1(), -u.u2());
  const double b = 1.0 + u.u3();
  return (Complex(v.v.x(), -v.v.y()) * b - a * v.v.z()) / (b * b);
}

}  // namespace harmonic_atlas
