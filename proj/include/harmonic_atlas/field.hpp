#pragma once

#include <functional>
#include <string>
#include <vector>

#include "harmonic_atlas/chart.hpp"
#include "harmonic_atlas/quad.hpp"
#include "harmonic_atlas/rational.hpp"

namespace harmonic_atlas {

class PoleExclusionError : public Error {
 public:
  using Error::Error;
};

namespace tolerances {
inline constexpr double kPoleExclusion = 1e-2;  // r_excl for FD-based residuals
}

struct Jacobian {
  Vec3 ux = Vec3::Zero();
  Vec3 uy = Vec3::Zero();
};

/// A smooth map R^2 -> S^2 with exact first derivatives.
class SphereField {
 public:
  virtual ~SphereField() = default;

  virtual SpherePoint value(Complex z) const = 0;
  virtual Jacobian jacobian(Complex z) const = 0;
  /// Selects the first-order equation and the sign of the chart CR operator.
  virtual Orientation orientation() const = 0;
  /// Points that FD-based residuals keep r_excl away from.
  virtual std::vector<Complex> singular_points() const { return {}; }
};

/// u = S(f) for a reduced rational f. Near poles of f everything is computed in
/// the primed chart from h = den/num, so values and derivatives are exact there.
class HarmonicMapField final : public SphereField {
 public:
  explicit HarmonicMapField(RationalMap f);

  const RationalMap& f() const { return f_; }
  const RationalMap& fprime() const { return fprime_; }
  const PoleSet& poles() const { return poles_; }

  SpherePoint value(Complex z) const override;
  Jacobian jacobian(Complex z) const override;
  Orientation orientation() const override { return f_.orientation(); }
  std::vector<Complex> singular_points() const override;

 private:
  RationalMap f_;
  RationalMap fprime_;
  PoleSet poles_;
  ComplexPolynomial dnum_;
  ComplexPolynomial dden_;
};

/// u = S(F(z)) for an arbitrary smooth F : C -> C given with its partials.
/// Used for controls that are not generated by a rational function.
class PlaneChartField final : public SphereField {
 public:
  using Fn = std::function<Complex(Complex)>;

  PlaneChartField(Fn F, Fn Fx, Fn Fy, Orientation o = Orientation::holomorphic)
      : F_(std::move(F)), Fx_(std::move(Fx)), Fy_(std::move(Fy)), orientation_(o) {}

  SpherePoint value(Complex z) const override { return stereo(F_(z)); }
  Jacobian jacobian(Complex z) const override;
  Orientation orientation() const override { return orientation_; }

 private:
  Fn F_, Fx_, Fy_;
  Orientation orientation_;
};

/// The non-harmonic control S(x + 2iy): degree 1, energy above 4π.
PlaneChartField stretched_control_field();

struct FieldSample {
  Complex z;
  SpherePoint u;
  TangentVector ux;
  TangentVector uy;
  double energy_density = 0.0;  // |u_x|^2 + |u_y|^2
  double degree_density = 0.0;  // oriented so that S(z) integrates to +1
};

SpherePoint eval_map(const SphereField& F, Complex z);
std::pair<TangentVector, TangentVector> eval_jacobian(const SphereField& F, Complex z);
FieldSample sample(const SphereField& F, Complex z);

/// Sign convention for the degree integrand, fixed once by calibrating on S(z).
struct DegreeConvention {
  int sign = 1;  // multiplies u.(u_y x u_x)
  std::string name() const { return sign > 0 ? "u.(u_y x u_x)" : "u.(u_x x u_y)"; }
};
const DegreeConvention& degree_convention();

double degree_density(const SpherePoint& u, const Vec3& ux, const Vec3& uy);

/// (1/2) the integral of |grad u|^2; equals 4π|deg| for harmonic maps.
Integral total_energy(const SphereField& F, const QuadratureRule& rule);
/// (1/4π) the integral of the degree density.
Integral de_rham_degree(const SphereField& F, const QuadratureRule& rule);

/// u_x - u x u_y (holomorphic) or u_y - u x u_x (antiholomorphic).
Vec3 bogomolny_residual(const SphereField& F, Complex z);

/// Δu + |grad u|^2 u with Δu by finite differences. Throws PoleExclusionError
/// within r_excl of a singular point.
Vec3 harmonic_residual(const SphereField& F, Complex z, const FDScheme& fd);

struct EnergyDecomposition {
  Integral bogomolny_term;  // (1/2) the integral of the squared first-order residual
  Integral degree_term;     // 4π deg (holomorphic) or -4π deg (antiholomorphic)
};
EnergyDecomposition energy_decomposition(const SphereField& F, const QuadratureRule& rule);

/// Cauchy-Riemann residual of the chart pushforward w = S^{-1}(u) (or 1/w in
/// the primed chart when u(z) is in the northern hemisphere), by FD:
/// w_x + i w_y for holomorphic orientation, w_x - i w_y otherwise.
Complex chart_cr_residual(const SphereField& F, Complex z, const FDScheme& fd);

void require_pole_exclusion(const SphereField& F, Complex z, double exclusion = tolerances::kPoleExclusion);

}  // namespace harmonic_atlas
