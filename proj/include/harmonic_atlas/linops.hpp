#pragma once

#include <functional>
#include <memory>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "harmonic_atlas/field.hpp"

namespace harmonic_atlas {

struct Provenance {
  enum class Source { perturbation, corotational, ode, symmetry, control };
  Source source = Source::perturbation;
  std::string label;  // e.g. "a1.re", "E02", "ode k=1 C2", "translation_x"
};

/// A vector field along a sphere-valued map; evaluate() attaches the base point.
class TangentField {
 public:
  using Fn = std::function<Vec3(Complex)>;

  TangentField(std::shared_ptr<const SphereField> base, Fn vector, Provenance provenance)
      : base_(std::move(base)), vector_(std::move(vector)), provenance_(std::move(provenance)) {}

  Vec3 operator()(Complex z) const { return vector_(z); }
  TangentVector evaluate(Complex z) const { return {vector_(z), base_->value(z)}; }

  const SphereField& base() const { return *base_; }
  const Provenance& provenance() const { return provenance_; }

 private:
  std::shared_ptr<const SphereField> base_;
  Fn vector_;
  Provenance provenance_;
};

struct KernelBasis {
  std::shared_ptr<const HarmonicMapField> base_map;
  std::vector<TangentField> fields;
  int m = 0;  // signed degree

  int expected_dim() const { return 4 * std::abs(m) + 2; }
};

// ---------------------------------------------------------------------------
// Operators

/// v_x - v x u_y - u x v_y (holomorphic) or v_y - v x u_x - u x v_x
/// (antiholomorphic); v derivatives by FD, u derivatives exact.
Vec3 apply_L1(const SphereField& F, const TangentField& V, Complex z, const FDScheme& fd);

/// Δv + |grad u|^2 v + 2 (u_x.v_x + u_y.v_y) u.
Vec3 apply_L(const SphereField& F, const TangentField& V, Complex z, const FDScheme& fd);

struct ClaimResiduals {
  double uvy = 0.0;  // u_x.v_x - u_y.v_y
  double uvx = 0.0;  // u_x.v_y + u_y.v_x
};
ClaimResiduals claim_residuals(const SphereField& F, const TangentField& V, Complex z, const FDScheme& fd);

/// CR residual of the chart pushforward of V, by FD. The chart is the one in
/// which u(z) lies (unprimed for u3 <= 0), so the pushforward stays bounded
/// near poles of f.
Complex cr_of_pushforward(const SphereField& F, const TangentField& V, Complex z, const FDScheme& fd);

// ---------------------------------------------------------------------------
// Kernel construction

struct BoundednessProbe {
  bool bounded = false;
  double sup = 0.0;
};

inline constexpr double kBoundednessCeiling = 1e3;

/// sup |v| over radii {1e-4, 1e-2, 1, 1e2, 1e4} x 16 angles; non-finite values
/// count as unbounded.
BoundednessProbe probe_boundedness(const TangentField& V);

struct KernelCandidate {
  TangentField field;
  BoundednessProbe probe;
};

/// z -> dstereo(f, g) for the perturbation f + εg, evaluated in the primed chart
/// as dstereo_prime(1/f, -g/f^2) wherever |f| > 1.
KernelCandidate kernel_field_from_perturbation(std::shared_ptr<const HarmonicMapField> F,
                                               const RationalMap& g, Provenance provenance = {});

/// Every bounded field obtained by moving one numerator or denominator
/// coefficient (powers 0..m+1) in the real or imaginary direction.
KernelBasis general_kernel_basis(std::shared_ptr<const HarmonicMapField> F);

/// All candidates, bounded or not, in enumeration order.
std::vector<KernelCandidate> perturbation_candidates(std::shared_ptr<const HarmonicMapField> F);

/// S(z^m).
std::shared_ptr<const HarmonicMapField> corotational_map(int m);

/// Polar data of S(z^m) at z: sin Q_m, cos Q_m and the frame E1, E2.
struct CorotationalFrame {
  double r, theta, sinQ, cosQ;
  Vec3 E1, E2;

  CorotationalFrame(int m, Complex z);
  /// r^p / (1 + r^{2m}) without overflow.
  double amplitude(int m, int p) const;
};

/// The explicit 4m+2 fields along S(z^m): E_k1, E_k2 (k = 0..m), the tilde
/// families for 1 <= ν <= m-1, and the two rotation-type fields.
KernelBasis corotational_kernel_basis(int m);

/// Tilde fields exactly as first printed for 1 <= ν <= m-1; they are not
/// kernel fields and serve as a regression check.
std::vector<TangentField> printed_tilde_fields(int m);

/// Translations, dilation, domain rotation, target rotations u x e_i and
/// projected constants e_i - (e_i.u)u. Zero fields are omitted.
std::vector<TangentField> symmetry_fields(std::shared_ptr<const HarmonicMapField> F);

/// P_u(c φ(z)) with φ a Gaussian bump centred at z0: tangent, bounded, not in
/// the kernel.
TangentField bump_control_field(std::shared_ptr<const SphereField> F, const Vec3& c, Complex z0,
                                double width = 1.0);

/// `count` bump controls with random directions and centres from a fixed seed.
std::vector<TangentField> random_control_fields(std::shared_ptr<const SphereField> F, int count,
                                                unsigned long seed = 20240611);

// ---------------------------------------------------------------------------
// Rank and subspaces

inline constexpr double kGramTolerance = 1e-8;

/// (1+|z|^2)^{-2}
double gram_weight(Complex z);

struct GramSpectrum {
  Eigen::MatrixXd gram;             // diagonal-normalized
  Eigen::VectorXd eigenvalues;      // ascending
  int rank = 0;
  int coarse_rank = 0;
  bool converged = true;
};

/// Weighted Gram matrix of the fields, normalized to unit diagonal (zero
/// fields keep a zero row), with its spectrum and the rank at `tol`.
GramSpectrum gram_spectrum(std::span<const TangentField> fields, const QuadratureRule& rule,
                           double tol = kGramTolerance);
int gram_rank(const KernelBasis& B, const QuadratureRule& rule, double tol = kGramTolerance);

/// Columns are fields sampled at the nodes of `rule` (three rows per node),
/// scaled by the square root of weight * gram_weight.
Eigen::MatrixXd sample_fields(std::span<const TangentField> fields, const QuadratureRule& rule);

/// Orthonormal basis for the column span; columns are unit-normalized first
/// and singular values below `rel_tol` times the largest are dropped.
Eigen::MatrixXd orthonormal_span(const Eigen::MatrixXd& A, double rel_tol = 1e-4);

/// Largest principal angle between two spans; π/2 if the dimensions differ.
double largest_principal_angle(const Eigen::MatrixXd& QA, const Eigen::MatrixXd& QB);

/// |(I - Q Q^T) b| / |b|.
double projection_residual(const Eigen::MatrixXd& Q, const Eigen::VectorXd& b);

/// Quadrature rule for subspace comparisons (64 x 64).
const QuadratureRule& subspace_rule();

double subspace_angle(std::span<const TangentField> A, std::span<const TangentField> B,
                      const QuadratureRule& rule = subspace_rule());

}  // namespace harmonic_atlas
