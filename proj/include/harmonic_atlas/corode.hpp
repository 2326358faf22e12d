#pragma once

#include <array>
#include <functional>
#include <memory>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "harmonic_atlas/linops.hpp"

namespace harmonic_atlas {

/// Second-order forward-mode jet in r: value and first two derivatives.
struct Jet {
  double v = 0.0;
  double d1 = 0.0;
  double d2 = 0.0;

  static Jet constant(double c) { return {c, 0.0, 0.0}; }
};

Jet operator+(const Jet& a, const Jet& b);
Jet operator-(const Jet& a, const Jet& b);
Jet operator-(const Jet& a);
Jet operator*(const Jet& a, const Jet& b);
Jet operator/(const Jet& a, const Jet& b);
Jet operator*(double s, const Jet& a);
Jet operator+(double s, const Jet& a);
/// r^p as a jet in r.
Jet rpow(double r, double p);
/// ln r as a jet in r.
Jet rlog(double r);

/// Leading behaviour r^p (times ln r when flagged) at 0 and at infinity.
struct Asymptotics {
  double p0 = 0.0;
  double pinf = 0.0;
  bool log0 = false;
  bool loginf = false;
};

class RadialProfile {
 public:
  using JetFn = std::function<Jet(double)>;

  /// The zero profile.
  RadialProfile() = default;
  RadialProfile(JetFn jet, Asymptotics asym) : jet_(std::move(jet)), asym_(asym) {}

  /// Profile known only by values; derivatives by central FD with h = 1e-4 r.
  static RadialProfile from_values(std::function<double(double)> f, Asymptotics asym = {});

  bool is_zero() const { return !jet_; }
  double operator()(double r) const { return jet_ ? jet_(r).v : 0.0; }
  Jet jet(double r) const { return jet_ ? jet_(r) : Jet{}; }
  const Asymptotics& asymptotics() const { return asym_; }

  RadialProfile negated() const;

 private:
  JetFn jet_;
  Asymptotics asym_;
};

/// (ξ1, ξ2, η1, η2) for one angular mode k.
struct ProfileSet {
  RadialProfile xi1, xi2, eta1, eta2;
};

enum class ODECase { k_zero, k_ne_m, k_eq_m };
std::string to_string(ODECase c);
ODECase classify_case(int m, int k);

/// Constants C1..C8 for one angular mode.
struct ODESolutionFamily {
  int m = 1;
  int k = 0;
  ODECase kind = ODECase::k_zero;
  std::array<double, 8> constants{};

  /// The family with C_index = 1 (index 1..8) and all others 0.
  static ODESolutionFamily direction(int m, int k, int index);
};

struct ODEResidual {
  Eigen::Vector4d raw = Eigen::Vector4d::Zero();
  Eigen::Vector4d relative = Eigen::Vector4d::Zero();  // |R_i| / sum of |terms of R_i|

  double max_relative() const { return relative.maxCoeff(); }
};

/// The four angular-mode equations at radius r.
ODEResidual ode_residual(int m, int k, const ProfileSet& p, double r);

/// The closed forms as printed, for every constant direction. For k = 0 the
/// printed ξ1/η1 pair is mirrored into ξ2 (C5, C6) and η2 (C7, C8).
ProfileSet closed_form_profiles(const ODESolutionFamily& family);

/// Numerical solution of the angular-mode system matching `seed` (value and
/// derivative) at r0, by adaptive Runge-Kutta-Fehlberg 7(8) in t = ln r.
ProfileSet integrate_profiles(int m, int k, const ProfileSet& seed, double r0 = 1e-4);

inline constexpr std::array<double, 5> kProbeRadii{1e-2, 1e-1, 1.0, 1e1, 1e2};
inline constexpr double kClosedFormAcceptance = 1e-8;
inline constexpr double kReplacementAcceptance = 1e-6;
inline constexpr double kSlopeTolerance = 0.1;

double max_probe_residual(int m, int k, const ProfileSet& p);

/// E = Ca[ξ1 sinQ cos kθ E1 + η2 sin kθ E2] + Cb[ξ2 sinQ sin kθ E1 + η1 cos kθ E2]
/// along S(z^m).
TangentField assemble_E(int m, int k, const ProfileSet& p, double Ca = 1.0, double Cb = 1.0,
                        std::shared_ptr<const HarmonicMapField> base = nullptr);

struct BoundednessVerdict {
  bool zero_field = false;
  bool symbolic = false;
  bool numeric = false;
  double sup = 0.0;
  double slope0 = 0.0;    // log-log slope between 1e-4 and 1e-2
  double slopeinf = 0.0;  // log-log slope between 1e2 and 1e4

  bool bounded() const { return !zero_field && symbolic && numeric; }
  bool agree() const { return zero_field || symbolic == numeric; }
};

BoundednessVerdict classify_boundedness(int m, int k, const ProfileSet& p);

struct DirectionReport {
  int m = 1;
  int k = 0;
  int index = 1;  // constant C_index
  double printed_residual = 0.0;
  bool printed_accepted = false;
  bool replaced = false;
  double replacement_residual = 0.0;
  double consistency_residual = 0.0;  // against the two-equation polar system
  BoundednessVerdict boundedness;
  ProfileSet profiles;  // printed if accepted, otherwise the integrated replacement
};

/// Residual acceptance, replacement and boundedness for one direction.
DirectionReport analyse_direction(int m, int k, int index);

/// Bounded, nonzero directions for mode k.
std::vector<int> bounded_filter(int m, int k);

/// Residual of the linearized polar system, with ξ and η assembled on the
/// plane and all derivatives by FD; relative to the sum of term magnitudes.
double polar_system_residual(int m, int k, const ProfileSet& p, Complex z);

/// Bounded assembled fields for k = 0..m.
KernelBasis ode_kernel_basis(int m);

/// Largest principal angle between the spans; throws NumericalFailureError if
/// either family is rank deficient.
double match_subspaces(const KernelBasis& a, const KernelBasis& b, const QuadratureRule& rule = subspace_rule());

struct ODEReport {
  int m = 1;
  std::vector<DirectionReport> directions;  // k = 0..m+1, C1..C8
  std::vector<int> bounded_counts;          // per k
  int bounded_total = 0;
  double subspace_angle = 0.0;
  bool all_accepted_or_replaced = true;
  std::vector<std::string> flagged;  // printed forms that failed acceptance
};

ODEReport analyse_corotational(int m);

}  // namespace harmonic_atlas
