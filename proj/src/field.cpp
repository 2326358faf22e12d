#include "harmonic_atlas/field.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

namespace harmonic_atlas {

namespace {

constexpr Complex kI(0.0, 1.0);

Jacobian push(const TangentVector& dx, const TangentVector& dy) { return {dx.v, dy.v}; }

}  // namespace

HarmonicMapField::HarmonicMapField(RationalMap f)
    : f_(std::move(f)),
      fprime_(derivative(f_)),
      poles_(poles_with_orders(f_)),
      dnum_(f_.numerator().derivative()),
      dden_(f_.denominator().derivative()) {}

std::vector<Complex> HarmonicMapField::singular_points() const {
  std::vector<Complex> out;
  for (const auto& p : poles_.entries) out.push_back(p.location);
  return out;
}

SpherePoint HarmonicMapField::value(Complex z) const {
  const Complex w = f_.chart_variable(z);
  const Complex n = f_.numerator()(w);
  const Complex d = f_.denominator()(w);
  if (std::abs(n) > std::abs(d)) return stereo_prime(d / n);
  return stereo(n / d);
}

Jacobian HarmonicMapField::jacobian(Complex z) const {
  const Complex w = f_.chart_variable(z);
  const Complex n = f_.numerator()(w);
  const Complex d = f_.denominator()(w);
  const Complex dn = dnum_(w);
  const Complex dd = dden_(w);
  // Derivative of the chart value with respect to w, and the chart it lives in.
  const bool primed = std::abs(n) > std::abs(d);
  const Complex value = primed ? d / n : n / d;
  const Complex dvalue = primed ? (dd * n - d * dn) / (n * n) : (dn * d - n * dd) / (d * d);
  const Complex along_y = f_.orientation() == Orientation::holomorphic ? kI : -kI;
  if (primed) return push(dstereo_prime(value, dvalue), dstereo_prime(value, along_y * dvalue));
  return push(dstereo(value, dvalue), dstereo(value, along_y * dvalue));
}

Jacobian PlaneChartField::jacobian(Complex z) const {
  const Complex F = F_(z);
  return push(dstereo(F, Fx_(z)), dstereo(F, Fy_(z)));
}

PlaneChartField stretched_control_field() {
  return PlaneChartField([](Complex z) { return Complex(z.real(), 2.0 * z.imag()); },
                         [](Complex) { return Complex(1.0, 0.0); },
                         [](Complex) { return Complex(0.0, 2.0); });
}

SpherePoint eval_map(const SphereField& F, Complex z) { return F.value(z); }

std::pair<TangentVector, TangentVector> eval_jacobian(const SphereField& F, Complex z) {
  const SpherePoint u = F.value(z);
  const Jacobian J = F.jacobian(z);
  return {TangentVector{J.ux, u}, TangentVector{J.uy, u}};
}

double degree_density(const SpherePoint& u, const Vec3& ux, const Vec3& uy) {
  return degree_convention().sign * u.u.dot(uy.cross(ux));
}

const DegreeConvention& degree_convention() {
  static const DegreeConvention convention = [] {
    // S(z) has positive degree; pick the integrand that is positive on it.
    const Complex z(0.3, -0.2);
    const SpherePoint u = stereo(z);
    const Vec3 ux = dstereo(z, 1.0).v;
    const Vec3 uy = dstereo(z, kI).v;
    const double raw = u.u.dot(uy.cross(ux));
    if (!(std::abs(raw) > 0.0)) throw NumericalFailureError("degree sign calibration failed");
    return DegreeConvention{raw > 0.0 ? 1 : -1};
  }();
  return convention;
}

FieldSample sample(const SphereField& F, Complex z) {
  FieldSample s;
  s.z = z;
  s.u = F.value(z);
  const Jacobian J = F.jacobian(z);
  s.ux = {J.ux, s.u};
  s.uy = {J.uy, s.u};
  s.energy_density = J.ux.squaredNorm() + J.uy.squaredNorm();
  s.degree_density = degree_density(s.u, J.ux, J.uy);
  return s;
}

Integral total_energy(const SphereField& F, const QuadratureRule& rule) {
  return integrate_plane(
      [&](Complex z) {
        const Jacobian J = F.jacobian(z);
        return 0.5 * (J.ux.squaredNorm() + J.uy.squaredNorm());
      },
      rule);
}

Integral de_rham_degree(const SphereField& F, const QuadratureRule& rule) {
  Integral I = integrate_plane(
      [&](Complex z) {
        const Jacobian J = F.jacobian(z);
        return degree_density(F.value(z), J.ux, J.uy);
      },
      rule);
  const double scale = 1.0 / (4.0 * std::numbers::pi);
  I.value *= scale;
  I.coarse_value *= scale;
  return I;
}

Vec3 bogomolny_residual(const SphereField& F, Complex z) {
  const Vec3 u = F.value(z).u;
  const Jacobian J = F.jacobian(z);
  if (F.orientation() == Orientation::holomorphic) return J.ux - u.cross(J.uy);
  return J.uy - u.cross(J.ux);
}

void require_pole_exclusion(const SphereField& F, Complex z, double exclusion) {
  for (const Complex p : F.singular_points()) {
    if (std::abs(z - p) <= exclusion) {
      std::ostringstream msg;
      msg << "point (" << z.real() << ", " << z.imag() << ") is within " << exclusion << " of a pole";
      throw PoleExclusionError(msg.str());
    }
  }
}

Vec3 harmonic_residual(const SphereField& F, Complex z, const FDScheme& fd) {
  require_pole_exclusion(F, z);
  const Vec3 lap = fd_laplacian([&](Complex p) { return F.value(p).u; }, z, fd);
  const Jacobian J = F.jacobian(z);
  return lap + (J.ux.squaredNorm() + J.uy.squaredNorm()) * F.value(z).u;
}

EnergyDecomposition energy_decomposition(const SphereField& F, const QuadratureRule& rule) {
  EnergyDecomposition out;
  out.bogomolny_term = integrate_plane(
      [&](Complex z) { return 0.5 * bogomolny_residual(F, z).squaredNorm(); }, rule);
  const Integral deg = de_rham_degree(F, rule);
  const double s = (F.orientation() == Orientation::holomorphic ? 4.0 : -4.0) * std::numbers::pi;
  out.degree_term = {s * deg.value, s * deg.coarse_value, deg.converged};
  return out;
}

Complex chart_cr_residual(const SphereField& F, Complex z, const FDScheme& fd) {
  // Holomorphy is chart independent, so stay in whichever chart is tame at z.
  const bool primed = F.value(z).u3() > 0.0;
  auto chart = [&](Complex p) {
    const Vec3 u = F.value(p).u;
    if (primed) return Complex(u.x(), -u.y()) / (1.0 + u.z());
    return Complex(u.x(), u.y()) / (1.0 - u.z());
  };
  const Complex wx = fd_derivative(chart, z, Direction::x, fd);
  const Complex wy = fd_derivative(chart, z, Direction::y, fd);
  return F.orientation() == Orientation::holomorphic ? wx + kI * wy : wx - kI * wy;
}

}  // namespace harmonic_atlas
