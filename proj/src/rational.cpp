#include "harmonic_atlas/rational.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace harmonic_atlas {

namespace {

constexpr double kEps = std::numeric_limits<double>::epsilon();

ComplexPolynomial scaled(const ComplexPolynomial& p, Complex s) { return s * p; }

ComplexPolynomial unit_norm(const ComplexPolynomial& p) {
  const double n = p.norm();
  return n > 0.0 ? scaled(p, 1.0 / n) : p;
}

ComplexPolynomial monic(const ComplexPolynomial& p) {
  return p.is_zero() ? p : scaled(p, 1.0 / p.leading());
}

// Sum of |c_j| |w|^j: the magnitude bound for evaluating p at w.
double evaluation_scale(const ComplexPolynomial& p, Complex w) {
  double s = 0.0;
  const double r = std::abs(w);
  for (auto it = p.coeffs().rbegin(); it != p.coeffs().rend(); ++it) s = s * r + std::abs(*it);
  return s;
}

}  // namespace

ComplexPolynomial::ComplexPolynomial(std::vector<Complex> coeffs) : coeffs_(std::move(coeffs)) {
  double biggest = 0.0;
  for (const auto& c : coeffs_) biggest = std::max(biggest, std::abs(c));
  while (!coeffs_.empty() &&
         (biggest == 0.0 || std::abs(coeffs_.back()) <= tolerances::kZeroCoefficient * biggest)) {
    coeffs_.pop_back();
  }
}

ComplexPolynomial ComplexPolynomial::monomial(int power, Complex coefficient) {
  if (power < 0) throw InvalidInputError("monomial power must be nonnegative");
  std::vector<Complex> c(static_cast<std::size_t>(power) + 1, Complex{});
  c.back() = coefficient;
  return ComplexPolynomial(std::move(c));
}

Complex ComplexPolynomial::coefficient(int j) const {
  if (j < 0 || j >= static_cast<int>(coeffs_.size())) return {};
  return coeffs_[static_cast<std::size_t>(j)];
}

Complex ComplexPolynomial::leading() const { return is_zero() ? Complex{} : coeffs_.back(); }

double ComplexPolynomial::norm() const {
  double s = 0.0;
  for (const auto& c : coeffs_) s += std::norm(c);
  return std::sqrt(s);
}

Complex ComplexPolynomial::operator()(Complex z) const {
  Complex acc{};
  for (auto it = coeffs_.rbegin(); it != coeffs_.rend(); ++it) acc = acc * z + *it;
  return acc;
}

ComplexPolynomial ComplexPolynomial::derivative() const {
  if (coeffs_.size() <= 1) return {};
  std::vector<Complex> d(coeffs_.size() - 1);
  for (std::size_t j = 1; j < coeffs_.size(); ++j) d[j - 1] = coeffs_[j] * static_cast<double>(j);
  return ComplexPolynomial(std::move(d));
}

ComplexPolynomial operator+(const ComplexPolynomial& a, const ComplexPolynomial& b) {
  std::vector<Complex> c(std::max(a.coeffs_.size(), b.coeffs_.size()), Complex{});
  for (std::size_t j = 0; j < a.coeffs_.size(); ++j) c[j] += a.coeffs_[j];
  for (std::size_t j = 0; j < b.coeffs_.size(); ++j) c[j] += b.coeffs_[j];
  return ComplexPolynomial(std::move(c));
}

ComplexPolynomial operator-(const ComplexPolynomial& a, const ComplexPolynomial& b) {
  return a + (-b);
}

ComplexPolynomial operator*(const ComplexPolynomial& a, const ComplexPolynomial& b) {
  if (a.is_zero() || b.is_zero()) return {};
  std::vector<Complex> c(a.coeffs_.size() + b.coeffs_.size() - 1, Complex{});
  for (std::size_t i = 0; i < a.coeffs_.size(); ++i)
    for (std::size_t j = 0; j < b.coeffs_.size(); ++j) c[i + j] += a.coeffs_[i] * b.coeffs_[j];
  return ComplexPolynomial(std::move(c));
}

ComplexPolynomial operator*(Complex s, const ComplexPolynomial& p) {
  std::vector<Complex> c(p.coeffs_.begin(), p.coeffs_.end());
  for (auto& x : c) x *= s;
  return ComplexPolynomial(std::move(c));
}

PolynomialDivision divide(const ComplexPolynomial& a, const ComplexPolynomial& b) {
  if (b.is_zero()) throw InvalidInputError("polynomial division by zero");
  if (a.degree() < b.degree()) return {ComplexPolynomial{}, a};
  std::vector<Complex> rem(a.coeffs().begin(), a.coeffs().end());
  const int db = b.degree();
  const int dq = a.degree() - db;
  std::vector<Complex> quot(static_cast<std::size_t>(dq) + 1, Complex{});
  const Complex lead = b.leading();
  for (int k = dq; k >= 0; --k) {
    const Complex q = rem[static_cast<std::size_t>(k + db)] / lead;
    quot[static_cast<std::size_t>(k)] = q;
    for (int j = 0; j <= db; ++j) rem[static_cast<std::size_t>(k + j)] -= q * b.coefficient(j);
  }
  rem.resize(static_cast<std::size_t>(db));
  return {ComplexPolynomial(std::move(quot)), ComplexPolynomial(std::move(rem))};
}

ComplexPolynomial approximate_gcd(const ComplexPolynomial& a, const ComplexPolynomial& b,
                                  double tol) {
  if (a.is_zero() && b.is_zero()) throw InvalidInputError("gcd of two zero polynomials");
  if (b.is_zero() || b.norm() <= tol * a.norm()) return monic(a);
  if (a.is_zero() || a.norm() <= tol * b.norm()) return monic(b);

  ComplexPolynomial x = unit_norm(a);
  ComplexPolynomial y = unit_norm(b);
  if (x.degree() < y.degree()) std::swap(x, y);
  while (y.degree() > 0) {
    ComplexPolynomial r = divide(x, y).remainder;
    if (r.is_zero() || r.norm() < tol) return monic(y);
    x = std::move(y);
    y = unit_norm(r);
  }
  return ComplexPolynomial::constant(1.0);
}

std::vector<Complex> aberth_roots(const ComplexPolynomial& p, int max_iterations) {
  const int n = p.degree();
  if (n < 1) throw InvalidInputError("aberth_roots needs a polynomial of degree >= 1");
  const ComplexPolynomial poly = monic(p);
  if (n == 1) return {-poly.coefficient(0)};
  const ComplexPolynomial dpoly = poly.derivative();

  // Fujiwara-style radius for the initial circle.
  double radius = 0.0;
  for (int j = 0; j < n; ++j)
    radius = std::max(radius, std::pow(std::abs(poly.coefficient(j)), 1.0 / (n - j)));
  radius = std::max(radius, 1e-3);

  std::vector<Complex> z(static_cast<std::size_t>(n));
  for (int k = 0; k < n; ++k)
    z[static_cast<std::size_t>(k)] =
        std::polar(radius, 2.0 * std::numbers::pi * k / n + 0.4);

  for (int iter = 0; iter < max_iterations; ++iter) {
    bool settled = true;
    for (int i = 0; i < n; ++i) {
      auto& zi = z[static_cast<std::size_t>(i)];
      const Complex pv = poly(zi);
      if (std::abs(pv) <= 8.0 * kEps * evaluation_scale(poly, zi)) continue;
      const Complex ratio = pv / dpoly(zi);
      Complex repulsion{};
      for (int j = 0; j < n; ++j)
        if (j != i) repulsion += 1.0 / (zi - z[static_cast<std::size_t>(j)]);
      const Complex step = ratio / (1.0 - ratio * repulsion);
      zi -= step;
      if (!std::isfinite(zi.real()) || !std::isfinite(zi.imag()))
        throw NumericalFailureError("aberth iteration diverged");
      if (std::abs(step) > 4.0 * kEps * std::max(1.0, std::abs(zi))) settled = false;
    }
    if (settled) return z;
  }
  throw NumericalFailureError("aberth iteration did not converge");
}

std::string to_string(Orientation o) {
  return o == Orientation::holomorphic ? "holomorphic" : "antiholomorphic";
}

Orientation orientation_from_string(const std::string& s) {
  if (s == "holomorphic") return Orientation::holomorphic;
  if (s == "antiholomorphic") return Orientation::antiholomorphic;
  throw InvalidInputError("unknown orientation '" + s + "'");
}

RationalMap::RationalMap()
    : num_(), den_(ComplexPolynomial::constant(1.0)), orientation_(Orientation::holomorphic) {}

ExtendedComplex RationalMap::eval_core(Complex w) const {
  const Complex n = num_(w);
  const Complex d = den_(w);
  const double dscale = evaluation_scale(den_, w);
  if (std::abs(d) <= tolerances::kZeroCoefficient * dscale) {
    if (std::abs(n) <= tolerances::kZeroCoefficient * evaluation_scale(num_, w))
      throw NumericalFailureError("0/0 while evaluating a reduced rational map");
    return ExtendedComplex::infinity();
  }
  return {n / d, false};
}

RationalMap reduce(ComplexPolynomial num, ComplexPolynomial den, Orientation orientation) {
  if (den.is_zero()) throw InvalidInputError("rational map with zero denominator");
  if (num.is_zero()) return RationalMap(ComplexPolynomial{}, ComplexPolynomial::constant(1.0), orientation);
  const ComplexPolynomial g = approximate_gcd(num, den);
  if (g.degree() > 0) {
    num = divide(num, g).quotient;
    den = divide(den, g).quotient;
  }
  const Complex lead = den.leading();
  return RationalMap(scaled(num, 1.0 / lead), scaled(den, 1.0 / lead), orientation);
}

ExtendedComplex eval(const RationalMap& f, Complex z) { return f.eval_core(f.chart_variable(z)); }

RationalMap derivative(const RationalMap& f) {
  const auto& n = f.numerator();
  const auto& d = f.denominator();
  return reduce(n.derivative() * d - n * d.derivative(), d * d, f.orientation());
}

int algebraic_degree(const RationalMap& f) {
  const int deg = std::max({f.numerator().degree(), f.denominator().degree(), 0});
  return f.orientation() == Orientation::holomorphic ? deg : -deg;
}

int PoleSet::total_order() const {
  int s = 0;
  for (const auto& p : entries) s += p.order;
  return s;
}

PoleSet poles_with_orders(const RationalMap& f) {
  PoleSet out;
  const ComplexPolynomial den = monic(f.denominator());
  if (den.degree() < 1) return out;

  // Yun's square-free decomposition: den = prod a_i^i.
  std::vector<std::pair<ComplexPolynomial, int>> factors;
  const ComplexPolynomial dden = den.derivative();
  const ComplexPolynomial a0 = approximate_gcd(den, dden);
  ComplexPolynomial b = divide(den, a0).quotient;
  ComplexPolynomial c = divide(dden, a0).quotient;
  ComplexPolynomial d = c - b.derivative();
  for (int i = 1; b.degree() > 0; ++i) {
    const ComplexPolynomial a = approximate_gcd(b, d);
    if (a.degree() > 0) factors.emplace_back(a, i);
    b = divide(b, a).quotient;
    c = divide(d, a).quotient;
    d = c - b.derivative();
    if (i > den.degree()) throw NumericalFailureError("square-free decomposition did not terminate");
  }

  for (const auto& [factor, mult] : factors) {
    for (const Complex root : aberth_roots(factor)) {
      auto it = std::find_if(out.entries.begin(), out.entries.end(), [&](const Pole& p) {
        return std::abs(p.location - root) <= tolerances::kRootCluster * std::max(1.0, std::abs(root));
      });
      if (it == out.entries.end()) {
        out.entries.push_back({root, mult});
      } else {
        it->location = (it->location * static_cast<double>(it->order) + root * static_cast<double>(mult)) /
                       static_cast<double>(it->order + mult);
        it->order += mult;
      }
    }
  }
  if (out.total_order() != den.degree())
    throw NumericalFailureError("pole multiplicities do not add up to the denominator degree");
  if (f.orientation() == Orientation::antiholomorphic)
    for (auto& p : out.entries) p.location = std::conj(p.location);
  return out;
}

}  // namespace harmonic_atlas
