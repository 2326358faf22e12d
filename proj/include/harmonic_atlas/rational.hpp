#pragma once

#include <complex>
#include <limits>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace harmonic_atlas {

using Complex = std::complex<double>;

/// Base of all library errors.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class InvalidInputError : public Error {
 public:
  using Error::Error;
};

class NumericalFailureError : public Error {
 public:
  using Error::Error;
};

namespace tolerances {
inline constexpr double kZeroCoefficient = 1e-12;  // eps_0
inline constexpr double kGcd = 1e-8;               // eps_gcd
inline constexpr double kRootCluster = 1e-9;       // eps_root
}  // namespace tolerances

/// Polynomial with complex coefficients stored in ascending powers:
/// coeffs()[j] multiplies z^j. Trailing coefficients below eps_0 relative to
/// the largest coefficient are dropped, so the leading coefficient is always
/// significant. The zero polynomial has no coefficients.
class ComplexPolynomial {
 public:
  static constexpr int kZeroDegree = std::numeric_limits<int>::min();

  ComplexPolynomial() = default;
  explicit ComplexPolynomial(std::vector<Complex> coeffs);
  ComplexPolynomial(std::initializer_list<Complex> coeffs)
      : ComplexPolynomial(std::vector<Complex>(coeffs)) {}

  static ComplexPolynomial monomial(int power, Complex coefficient = 1.0);
  static ComplexPolynomial constant(Complex c) { return ComplexPolynomial({c}); }

  bool is_zero() const { return coeffs_.empty(); }
  /// kZeroDegree for the zero polynomial.
  int degree() const { return is_zero() ? kZeroDegree : static_cast<int>(coeffs_.size()) - 1; }
  std::span<const Complex> coeffs() const { return coeffs_; }
  Complex coefficient(int j) const;
  Complex leading() const;
  double norm() const;

  Complex operator()(Complex z) const;
  ComplexPolynomial derivative() const;

  friend ComplexPolynomial operator+(const ComplexPolynomial& a, const ComplexPolynomial& b);
  friend ComplexPolynomial operator-(const ComplexPolynomial& a, const ComplexPolynomial& b);
  friend ComplexPolynomial operator*(const ComplexPolynomial& a, const ComplexPolynomial& b);
  friend ComplexPolynomial operator*(Complex s, const ComplexPolynomial& p);
  ComplexPolynomial operator-() const { return Complex(-1.0) * *this; }

 private:
  std::vector<Complex> coeffs_;
};

struct PolynomialDivision {
  ComplexPolynomial quotient;
  ComplexPolynomial remainder;
};

/// Long division a = q*b + r with deg r < deg b. Throws on b == 0.
PolynomialDivision divide(const ComplexPolynomial& a, const ComplexPolynomial& b);

/// Monic approximate GCD by the Euclidean algorithm; a remainder is treated as
/// zero once its norm drops below `tol` times the norm of the current divisor
/// (both operands are kept at unit norm).
ComplexPolynomial approximate_gcd(const ComplexPolynomial& a, const ComplexPolynomial& b,
                                  double tol = tolerances::kGcd);

/// All roots of p (deg >= 1) by Aberth-Ehrlich simultaneous iteration.
/// Throws NumericalFailureError if the iteration does not settle.
std::vector<Complex> aberth_roots(const ComplexPolynomial& p, int max_iterations = 500);

enum class Orientation { holomorphic, antiholomorphic };

std::string to_string(Orientation o);
Orientation orientation_from_string(const std::string& s);

/// Value on the Riemann sphere: finite complex or the point at infinity.
struct ExtendedComplex {
  Complex value{};
  bool infinite = false;

  static ExtendedComplex infinity() { return {Complex{}, true}; }
};

/// Irreducible quotient numerator/denominator with monic denominator. For the
/// antiholomorphic orientation the map is z -> f(conj z) for the stored f;
/// all algebra acts on the stored variable w.
class RationalMap {
 public:
  /// The constant map 0.
  RationalMap();

  const ComplexPolynomial& numerator() const { return num_; }
  const ComplexPolynomial& denominator() const { return den_; }
  Orientation orientation() const { return orientation_; }

  bool is_constant() const { return num_.degree() <= 0 && den_.degree() == 0; }

  /// Stored-variable value num(w)/den(w), with the infinity marker at poles.
  ExtendedComplex eval_core(Complex w) const;

  /// Stored variable for a plane point: z or conj(z).
  Complex chart_variable(Complex z) const {
    return orientation_ == Orientation::holomorphic ? z : std::conj(z);
  }

  friend RationalMap reduce(ComplexPolynomial num, ComplexPolynomial den, Orientation orientation);

 private:
  RationalMap(ComplexPolynomial num, ComplexPolynomial den, Orientation o)
      : num_(std::move(num)), den_(std::move(den)), orientation_(o) {}

  ComplexPolynomial num_;
  ComplexPolynomial den_;
  Orientation orientation_ = Orientation::holomorphic;
};

/// Cancels the approximate GCD and makes the denominator monic.
/// Throws InvalidInputError for a zero denominator.
RationalMap reduce(ComplexPolynomial num, ComplexPolynomial den,
                   Orientation orientation = Orientation::holomorphic);

inline RationalMap reduce(const RationalMap& f) {
  return reduce(f.numerator(), f.denominator(), f.orientation());
}

/// f(z) (f(conj z) when antiholomorphic); infinity marker at poles.
ExtendedComplex eval(const RationalMap& f, Complex z);

/// Quotient-rule derivative in the stored variable, reduced.
RationalMap derivative(const RationalMap& f);

/// max(deg num, deg den), negated for the antiholomorphic orientation.
int algebraic_degree(const RationalMap& f);

struct Pole {
  Complex location;
  int order = 0;
};

struct PoleSet {
  std::vector<Pole> entries;

  int total_order() const;
};

/// Poles in the z-plane (conjugated for the antiholomorphic orientation) with
/// multiplicities. Multiplicities come from a square-free decomposition of the
/// denominator; each square-free factor is rooted by Aberth iteration and
/// coincident roots are merged at eps_root.
PoleSet poles_with_orders(const RationalMap& f);

}  // namespace harmonic_atlas
