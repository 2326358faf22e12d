#include "harmonic_atlas/linops.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <random>

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

namespace harmonic_atlas {

namespace {

constexpr Complex kI(0.0, 1.0);

Vec3 unbounded_marker() {
  const double inf = std::numeric_limits<double>::infinity();
  return Vec3(inf, inf, inf);
}

// Derivatives of V along x and y.
std::pair<Vec3, Vec3> gradient(const TangentField& V, Complex z, const FDScheme& fd) {
  return {fd_derivative(V, z, Direction::x, fd), fd_derivative(V, z, Direction::y, fd)};
}

TangentField corotational_field(std::shared_ptr<const HarmonicMapField> base, int m, int power, int freq,
                                Vec3 (*combine)(const CorotationalFrame&, double, double), std::string label) {
  return TangentField(
      base,
      [m, power, freq, combine](Complex z) {
        const CorotationalFrame f(m, z);
        return (f.amplitude(m, power) * combine(f, std::cos(freq * f.theta), std::sin(freq * f.theta))).eval();
      },
      {Provenance::Source::corotational, std::move(label)});
}

}  // namespace

CorotationalFrame::CorotationalFrame(int m, Complex z) : r(std::abs(z)), theta(std::arg(z)) {
  const double t = std::pow(r, m);
  // t^2 overflows long before r does; use the reciprocal form far out.
  if (t > 1.0) {
    const double s = 1.0 / t;
    sinQ = 2.0 * s / (1.0 + s * s);
    cosQ = (1.0 - s * s) / (1.0 + s * s);
  } else {
    sinQ = 2.0 * t / (1.0 + t * t);
    cosQ = (t * t - 1.0) / (1.0 + t * t);
  }
  const double c = std::cos(m * theta), s = std::sin(m * theta);
  E1 = Vec3(-s, c, 0.0);
  E2 = Vec3(c * cosQ, s * cosQ, -sinQ);
}

double CorotationalFrame::amplitude(int m, int p) const {
  if (r == 0.0) return p == 0 ? 1.0 : 0.0;
  return std::exp(p * std::log(r)) / (1.0 + std::exp(2.0 * m * std::log(r)));
}

std::shared_ptr<const HarmonicMapField> corotational_map(int m) {
  return std::make_shared<HarmonicMapField>(
      reduce(ComplexPolynomial::monomial(m), ComplexPolynomial::constant(1.0)));
}

// ---------------------------------------------------------------------------
// Operators

Vec3 apply_L1(const SphereField& F, const TangentField& V, Complex z, const FDScheme& fd) {
  require_pole_exclusion(F, z);
  const Vec3 u = F.value(z).u;
  const Jacobian J = F.jacobian(z);
  const Vec3 v = V(z);
  const auto [vx, vy] = gradient(V, z, fd);
  if (F.orientation() == Orientation::holomorphic) return vx - v.cross(J.uy) - u.cross(vy);
  return vy - v.cross(J.ux) - u.cross(vx);
}

Vec3 apply_L(const SphereField& F, const TangentField& V, Complex z, const FDScheme& fd) {
  require_pole_exclusion(F, z);
  const Vec3 u = F.value(z).u;
  const Jacobian J = F.jacobian(z);
  const auto jet = fd_jet(V, z, fd);
  const double grad2 = J.ux.squaredNorm() + J.uy.squaredNorm();
  return jet.laplacian + grad2 * jet.value + 2.0 * (J.ux.dot(jet.dx) + J.uy.dot(jet.dy)) * u;
}

ClaimResiduals claim_residuals(const SphereField& F, const TangentField& V, Complex z, const FDScheme& fd) {
  require_pole_exclusion(F, z);
  const Jacobian J = F.jacobian(z);
  const auto [vx, vy] = gradient(V, z, fd);
  return {J.ux.dot(vx) - J.uy.dot(vy), J.ux.dot(vy) + J.uy.dot(vx)};
}

Complex cr_of_pushforward(const SphereField& F, const TangentField& V, Complex z, const FDScheme& fd) {
  require_pole_exclusion(F, z);
  const bool primed = F.value(z).u3() > 0.0;
  auto pushforward = [&](Complex p) {
    const TangentVector t = V.evaluate(p);
    return primed ? dstereo_prime_inv(t.base, t) : dstereo_inv(t.base, t);
  };
  const Complex wx = fd_derivative(pushforward, z, Direction::x, fd);
  const Complex wy = fd_derivative(pushforward, z, Direction::y, fd);
  return F.orientation() == Orientation::holomorphic ? wx + kI * wy : wx - kI * wy;
}

// ---------------------------------------------------------------------------
// Kernel construction

BoundednessProbe probe_boundedness(const TangentField& V) {
  std::vector<Complex> centres{Complex{}};
  std::vector<double> radii{1e-4, 1e-2, 1.0, 1e2, 1e4};
  if (const auto* h = dynamic_cast<const HarmonicMapField*>(&V.base()))
    for (const auto& p : h->poles().entries) centres.push_back(p.location);

  BoundednessProbe probe{true, 0.0};
  for (std::size_t c = 0; c < centres.size(); ++c) {
    for (const double r : radii) {
      if (c > 0 && r > 1e-2) break;  // rings around poles stay local
      for (int j = 0; j < 16; ++j) {
        const Complex z = centres[c] + std::polar(r, 2.0 * std::numbers::pi * (j + 0.5) / 16.0);
        const double n = V(z).norm();
        if (!std::isfinite(n)) {
          probe.sup = std::numeric_limits<double>::infinity();
          probe.bounded = false;
          return probe;
        }
        probe.sup = std::max(probe.sup, n);
      }
    }
  }
  probe.bounded = probe.sup <= kBoundednessCeiling;
  return probe;
}

KernelCandidate kernel_field_from_perturbation(std::shared_ptr<const HarmonicMapField> F,
                                               const RationalMap& g, Provenance provenance) {
  const ComplexPolynomial& num = F->f().numerator();
  const ComplexPolynomial& den = F->f().denominator();
  // -g/f^2 as a reduced rational function: the perturbation seen from the primed chart.
  const RationalMap k = num.is_zero() ? RationalMap()
                                      : reduce(-(g.numerator() * den * den), g.denominator() * num * num);
  auto vector = [F, g, k](Complex z) -> Vec3 {
    const Complex w = F->f().chart_variable(z);
    const Complex n = F->f().numerator()(w);
    const Complex d = F->f().denominator()(w);
    if (std::abs(n) > std::abs(d)) {
      const ExtendedComplex kv = k.eval_core(w);
      if (kv.infinite) return unbounded_marker();
      return dstereo_prime(d / n, kv.value).v;
    }
    const ExtendedComplex gv = g.eval_core(w);
    if (gv.infinite) return unbounded_marker();
    return dstereo(n / d, gv.value).v;
  };
  TangentField field(F, vector, std::move(provenance));
  const BoundednessProbe probe = probe_boundedness(field);
  return {std::move(field), probe};
}

std::vector<KernelCandidate> perturbation_candidates(std::shared_ptr<const HarmonicMapField> F) {
  const ComplexPolynomial& num = F->f().numerator();
  const ComplexPolynomial& den = F->f().denominator();
  const int m = std::abs(algebraic_degree(F->f()));
  std::vector<KernelCandidate> out;

  if (m == 0) {
    const RationalMap one = reduce(ComplexPolynomial::constant(1.0), ComplexPolynomial::constant(1.0));
    const RationalMap i = reduce(ComplexPolynomial::constant(kI), ComplexPolynomial::constant(1.0));
    out.push_back(kernel_field_from_perturbation(F, one, {Provenance::Source::perturbation, "a0.re"}));
    out.push_back(kernel_field_from_perturbation(F, i, {Provenance::Source::perturbation, "a0.im"}));
    return out;
  }

  auto label = [](char which, int j, int degree, bool imaginary) {
    // Powers past the stored degree are padding directions.
    const char tag = j > degree ? 'c' : which;
    return std::string(1, tag) + std::to_string(j) + (imaginary ? ".im" : ".re");
  };
  for (int j = 0; j <= m + 1; ++j) {
    for (const bool imaginary : {false, true}) {
      const Complex s = imaginary ? kI : Complex(1.0);
      // num + ε s z^j over den.
      out.push_back(kernel_field_from_perturbation(
          F, reduce(ComplexPolynomial::monomial(j, s), den),
          {Provenance::Source::perturbation, label('a', j, num.degree(), imaginary)}));
      // num over den + ε s z^j, to first order.
      out.push_back(kernel_field_from_perturbation(
          F, reduce(-(ComplexPolynomial::monomial(j, s) * num), den * den),
          {Provenance::Source::perturbation, label('b', j, den.degree(), imaginary)}));
    }
  }
  return out;
}

KernelBasis general_kernel_basis(std::shared_ptr<const HarmonicMapField> F) {
  KernelBasis basis;
  basis.base_map = F;
  basis.m = algebraic_degree(F->f());
  for (auto& c : perturbation_candidates(F))
    if (c.probe.bounded) basis.fields.push_back(std::move(c.field));
  return basis;
}

KernelBasis corotational_kernel_basis(int m) {
  if (m < 1) throw InvalidInputError("corotational basis needs m >= 1");
  KernelBasis basis;
  basis.base_map = corotational_map(m);
  basis.m = m;
  auto& out = basis.fields;
  const auto base = basis.base_map;

  for (int k = 0; k <= m; ++k) {
    out.push_back(corotational_field(
        base, m, m - k, k,
        [](const CorotationalFrame& f, double c, double s) -> Vec3 { return -c * f.E1 + s * f.E2; },
        "E" + std::to_string(k) + "1"));
    out.push_back(corotational_field(
        base, m, m - k, k,
        [](const CorotationalFrame& f, double c, double s) -> Vec3 { return s * f.E1 + c * f.E2; },
        "E" + std::to_string(k) + "2"));
  }
  for (int nu = 1; nu <= m - 1; ++nu) {
    out.push_back(corotational_field(
        base, m, m + nu, nu,
        [](const CorotationalFrame& f, double c, double s) -> Vec3 { return -c * f.E1 - s * f.E2; },
        "Et" + std::to_string(nu) + "1"));
    out.push_back(corotational_field(
        base, m, m + nu, nu,
        [](const CorotationalFrame& f, double c, double s) -> Vec3 { return -s * f.E1 + c * f.E2; },
        "Et" + std::to_string(nu) + "2"));
  }
  out.emplace_back(
      base,
      [base](Complex z) {
        const Vec3 u = base->value(z).u;
        return Vec3(0.0, u.z(), -u.y());
      },
      Provenance{Provenance::Source::corotational, "Et" + std::to_string(m) + "1"});
  out.emplace_back(
      base,
      [base](Complex z) {
        const Vec3 u = base->value(z).u;
        return Vec3(u.z(), 0.0, -u.x());
      },
      Provenance{Provenance::Source::corotational, "Et" + std::to_string(m) + "2"});
  return basis;
}

std::vector<TangentField> printed_tilde_fields(int m) {
  const auto base = corotational_map(m);
  std::vector<TangentField> out;
  for (int nu = 1; nu <= m - 1; ++nu) {
    out.push_back(corotational_field(
        base, m, m + nu, nu,
        [](const CorotationalFrame& f, double c, double s) -> Vec3 { return -c * f.E1 + s * f.E2; },
        "printed Et" + std::to_string(nu) + "1"));
    out.push_back(corotational_field(
        base, m, m + nu, nu,
        [](const CorotationalFrame& f, double c, double s) -> Vec3 { return s * f.E1 + c * f.E2; },
        "printed Et" + std::to_string(nu) + "2"));
  }
  return out;
}

std::vector<TangentField> symmetry_fields(std::shared_ptr<const HarmonicMapField> F) {
  std::vector<TangentField> out;
  auto add = [&](std::string label, TangentField::Fn fn) {
    out.emplace_back(F, std::move(fn), Provenance{Provenance::Source::symmetry, std::move(label)});
  };
  if (!F->f().is_constant()) {
    add("translation_x", [F](Complex z) { return F->jacobian(z).ux; });
    add("translation_y", [F](Complex z) { return F->jacobian(z).uy; });
    add("dilation", [F](Complex z) {
      const Jacobian J = F->jacobian(z);
      return (z.real() * J.ux + z.imag() * J.uy).eval();
    });
    add("domain_rotation", [F](Complex z) {
      const Jacobian J = F->jacobian(z);
      return (-z.imag() * J.ux + z.real() * J.uy).eval();
    });
  }
  for (int i = 0; i < 3; ++i) {
    const Vec3 e = Vec3::Unit(i);
    add("target_rotation_" + std::to_string(i + 1), [F, e](Complex z) { return F->value(z).u.cross(e).eval(); });
    add("projected_constant_" + std::to_string(i + 1), [F, e](Complex z) {
      const Vec3 u = F->value(z).u;
      return (e - e.dot(u) * u).eval();
    });
  }
  return out;
}

TangentField bump_control_field(std::shared_ptr<const SphereField> F, const Vec3& c, Complex z0, double width) {
  return TangentField(
      F,
      [F, c, z0, width](Complex z) {
        const Vec3 u = F->value(z).u;
        const double phi = std::exp(-std::norm(z - z0) / (width * width));
        return (phi * (c - c.dot(u) * u)).eval();
      },
      {Provenance::Source::control, "bump"});
}

std::vector<TangentField> random_control_fields(std::shared_ptr<const SphereField> F, int count,
                                                unsigned long seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss;
  std::uniform_real_distribution<double> centre(-2.0, 2.0);
  std::uniform_real_distribution<double> width(0.5, 1.5);
  std::vector<TangentField> out;
  for (int i = 0; i < count; ++i) {
    Vec3 c(gauss(rng), gauss(rng), gauss(rng));
    c.normalize();
    const Complex z0(centre(rng), centre(rng));
    out.push_back(bump_control_field(F, c, z0, width(rng)));
  }
  return out;
}

// ---------------------------------------------------------------------------
// Rank and subspaces

double gram_weight(Complex z) {
  const double d = 1.0 + std::norm(z);
  return 1.0 / (d * d);
}

Eigen::MatrixXd sample_fields(std::span<const TangentField> fields, const QuadratureRule& rule) {
  const auto nodes = rule.nodes();
  Eigen::MatrixXd S(3 * static_cast<Eigen::Index>(nodes.size()), static_cast<Eigen::Index>(fields.size()));
  parallel_for(nodes.size(), [&](std::size_t i) {
    const double w = std::sqrt(nodes[i].weight * gram_weight(nodes[i].z));
    for (std::size_t j = 0; j < fields.size(); ++j)
      S.block<3, 1>(3 * static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = w * fields[j](nodes[i].z);
  });
  if (!S.allFinite()) throw QuadratureError("non-finite tangent field value while sampling");
  return S;
}

namespace {

std::pair<Eigen::MatrixXd, Eigen::VectorXd> normalized_spectrum(const Eigen::MatrixXd& S) {
  Eigen::MatrixXd G = S.transpose() * S;
  const double biggest = G.diagonal().maxCoeff();
  Eigen::VectorXd scale(G.rows());
  for (Eigen::Index i = 0; i < G.rows(); ++i)
    scale(i) = G(i, i) > 1e-300 && G(i, i) > 1e-28 * biggest ? 1.0 / std::sqrt(G(i, i)) : 0.0;
  G = scale.asDiagonal() * G * scale.asDiagonal();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(G, Eigen::EigenvaluesOnly);
  return {G, eig.eigenvalues()};
}

int count_rank(const Eigen::VectorXd& eigenvalues, double tol) {
  if (eigenvalues.size() == 0) return 0;
  const double top = eigenvalues.maxCoeff();
  if (top <= 0.0) return 0;
  return static_cast<int>((eigenvalues.array() > tol * top).count());
}

}  // namespace

GramSpectrum gram_spectrum(std::span<const TangentField> fields, const QuadratureRule& rule, double tol) {
  GramSpectrum out;
  if (fields.empty()) return out;
  auto [G, ev] = normalized_spectrum(sample_fields(fields, rule));
  out.gram = std::move(G);
  out.eigenvalues = std::move(ev);
  out.rank = count_rank(out.eigenvalues, tol);
  out.coarse_rank = count_rank(normalized_spectrum(sample_fields(fields, rule.coarsened())).second, tol);
  out.converged = out.rank == out.coarse_rank;
  return out;
}

int gram_rank(const KernelBasis& B, const QuadratureRule& rule, double tol) {
  return gram_spectrum(B.fields, rule, tol).rank;
}

Eigen::MatrixXd orthonormal_span(const Eigen::MatrixXd& A, double rel_tol) {
  Eigen::MatrixXd N = A;
  for (Eigen::Index j = 0; j < N.cols(); ++j) {
    const double n = N.col(j).norm();
    if (n > 0.0) N.col(j) /= n;
  }
  Eigen::BDCSVD<Eigen::MatrixXd> svd(N, Eigen::ComputeThinU);
  const auto& sv = svd.singularValues();
  Eigen::Index r = 0;
  if (sv.size() > 0 && sv(0) > 0.0)
    while (r < sv.size() && sv(r) > rel_tol * sv(0)) ++r;
  return svd.matrixU().leftCols(r);
}

double largest_principal_angle(const Eigen::MatrixXd& QA, const Eigen::MatrixXd& QB) {
  if (QA.cols() != QB.cols()) return std::numbers::pi / 2.0;
  if (QA.cols() == 0) return 0.0;
  auto one_way = [](const Eigen::MatrixXd& P, const Eigen::MatrixXd& Q) {
    const Eigen::MatrixXd R = Q - P * (P.transpose() * Q);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(R.transpose() * R, Eigen::EigenvaluesOnly);
    return std::sqrt(std::max(0.0, eig.eigenvalues().maxCoeff()));
  };
  const double s = std::max(one_way(QA, QB), one_way(QB, QA));
  return std::asin(std::min(1.0, s));
}

double projection_residual(const Eigen::MatrixXd& Q, const Eigen::VectorXd& b) {
  const double n = b.norm();
  if (n == 0.0) return 0.0;
  return (b - Q * (Q.transpose() * b)).norm() / n;
}

const QuadratureRule& subspace_rule() {
  static const QuadratureRule rule(64, 64);
  return rule;
}

double subspace_angle(std::span<const TangentField> A, std::span<const TangentField> B,
                      const QuadratureRule& rule) {
  return largest_principal_angle(orthonormal_span(sample_fields(A, rule)),
                                 orthonormal_span(sample_fields(B, rule)));
}

}  // namespace harmonic_atlas
