#pragma once

#include <Eigen/Core>
#include <Eigen/Geometry>

#include "harmonic_atlas/rational.hpp"

namespace harmonic_atlas {

using Vec3 = Eigen::Vector3d;

/// Raised when a point lies outside the domain of the requested chart.
class ChartDomainError : public Error {
 public:
  using Error::Error;
};

namespace tolerances {
inline constexpr double kPole = 1e-9;  // eps_pole: chart-domain guard near N
}

/// Unit vector in R^3.
struct SpherePoint {
  Vec3 u = Vec3(0.0, 0.0, -1.0);

  SpherePoint() = default;
  explicit SpherePoint(const Vec3& v) : u(v) {}
  SpherePoint(double u1, double u2, double u3) : u(u1, u2, u3) {}

  double u1() const { return u.x(); }
  double u2() const { return u.y(); }
  double u3() const { return u.z(); }

  static SpherePoint north() { return {0.0, 0.0, 1.0}; }
  static SpherePoint south() { return {0.0, 0.0, -1.0}; }
};

/// Vector tangent to S^2 at `base`.
struct TangentVector {
  Vec3 v = Vec3::Zero();
  SpherePoint base;
};

struct RotationAngle {
  double radians = 0.0;
};

/// S(z) = (2x, 2y, |z|^2 - 1)/(1 + |z|^2).
SpherePoint stereo(Complex z);
/// S extended to the Riemann sphere: infinity goes to the north pole.
SpherePoint stereo(const ExtendedComplex& z);
/// S'(z) = (2x, -2y, 1 - |z|^2)/(1 + |z|^2); S'(1/z) = S(z).
SpherePoint stereo_prime(Complex z);

/// (u1 + i u2)/(1 - u3). Points with u3 > 0 are inverted through the primed
/// chart, which avoids the cancellation in 1 - u3. Throws ChartDomainError
/// within eps_pole of N.
Complex stereo_inv(const SpherePoint& u);

/// Rotation about the u1 axis: u2, u3 turn by alpha, u1 is fixed.
SpherePoint rotate_x1(const SpherePoint& u, RotationAngle alpha);

/// d/dalpha of rotate_x1 at alpha = 0: (0, -u3, u2).
TangentVector rotation_generator(const SpherePoint& u);

/// Tangent map of S at f applied to g. For |f| > 1 the value is computed in the
/// primed chart as DS'_{1/f}(-g/f^2).
TangentVector dstereo(Complex f, Complex g);
/// Tangent map of S' at h applied to k.
TangentVector dstereo_prime(Complex h, Complex k);

/// Inverse tangent map: dstereo_inv(stereo(f), dstereo(f, g)) = g.
/// Throws ChartDomainError within eps_pole of N.
Complex dstereo_inv(const SpherePoint& u, const TangentVector& v);
/// Inverse of dstereo_prime: the primed-chart pushforward, defined away from S.
Complex dstereo_prime_inv(const SpherePoint& u, const TangentVector& v);

}  // namespace harmonic_atlas
