#pragma once

#include <algorithm>
#include <cstddef>
#include <functional>
#include <span>
#include <type_traits>
#include <vector>

#include "harmonic_atlas/rational.hpp"

namespace harmonic_atlas {

class QuadratureError : public Error {
 public:
  using Error::Error;
};

// ---------------------------------------------------------------------------
// Parallel loops and reductions

/// Worker count: hardware concurrency, capped by HARMONIC_ATLAS_THREADS.
unsigned worker_count();

/// Runs body(i) for i in [0, n) over contiguous chunks. Each index is handled
/// exactly once, so writes to per-index slots are race free.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body);

/// Pairwise summation in index order; bitwise reproducible for a fixed input.
double pairwise_sum(std::span<const double> values);

// ---------------------------------------------------------------------------
// Plane quadrature

struct QuadratureNode {
  Complex z;
  double weight = 0.0;  // area element included
};

/// Polar product rule on R^2. Radii come from Gauss-Legendre nodes s in (0,1)
/// mapped by r = s/(1-s); angles are uniform (trapezoid, spectrally accurate
/// for periodic integrands).
class QuadratureRule {
 public:
  static constexpr int kDefaultRadial = 200;
  static constexpr int kDefaultAngular = 256;

  explicit QuadratureRule(int n_radial = kDefaultRadial, int n_angular = kDefaultAngular);

  int n_radial() const { return n_radial_; }
  int n_angular() const { return n_angular_; }
  std::span<const QuadratureNode> nodes() const { return nodes_; }

  /// The (N_r/2, N_theta/2) rule used for convergence checks.
  QuadratureRule coarsened() const;

 private:
  int n_radial_;
  int n_angular_;
  std::vector<QuadratureNode> nodes_;
};

/// Gauss-Legendre nodes and weights on [-1, 1].
void gauss_legendre(int n, std::vector<double>& nodes, std::vector<double>& weights);

struct Integral {
  double value = 0.0;
  double coarse_value = 0.0;
  bool converged = true;
};

inline constexpr double kQuadratureAgreement = 1e-4;

/// Integrates density over R^2 and compares against the coarsened rule at
/// 1e-4 relative (absolute for values below 1). Throws QuadratureError with
/// the node location on a non-finite density value.
Integral integrate_plane(const std::function<double(Complex)>& density, const QuadratureRule& rule);

/// Density values at every node of `rule`, evaluated in parallel.
std::vector<double> evaluate_on_nodes(const std::function<double(Complex)>& density,
                                      const QuadratureRule& rule);

// ---------------------------------------------------------------------------
// Finite differences

enum class Direction { x, y };

namespace detail {
// Forces Eigen expression templates to a concrete value; other types pass through.
template <class T>
auto settle(T&& x) {
  if constexpr (requires { x.eval(); })
    return x.eval();
  else
    return std::decay_t<T>(x);
}
}  // namespace detail

struct FDScheme {
  int order = 4;     // 2 or 4
  double h0 = 1e-3;  // base step

  double step(Complex z) const { return h0 * std::max(1.0, std::abs(z)); }
};

/// Central first derivative along x or y.
template <class Fn>
auto fd_derivative(const Fn& field, Complex z, Direction dir, const FDScheme& scheme) {
  const double h = scheme.step(z);
  const Complex e = dir == Direction::x ? Complex(h, 0.0) : Complex(0.0, h);
  if (scheme.order == 2) return detail::settle((field(z + e) - field(z - e)) * (1.0 / (2.0 * h)));
  return detail::settle((field(z - 2.0 * e) - field(z + 2.0 * e) + (field(z + e) - field(z - e)) * 8.0) *
                        (1.0 / (12.0 * h)));
}

/// 5-point (order 2) or 9-point cross (order 4) Laplacian.
template <class Fn>
auto fd_laplacian(const Fn& field, Complex z, const FDScheme& scheme) {
  const double h = scheme.step(z);
  const Complex ex(h, 0.0), ey(0.0, h);
  const auto centre = detail::settle(field(z));
  if (scheme.order == 2) {
    return detail::settle((field(z + ex) + field(z - ex) + field(z + ey) + field(z - ey) - centre * 4.0) *
                          (1.0 / (h * h)));
  }
  const auto near = detail::settle(field(z + ex) + field(z - ex) + field(z + ey) + field(z - ey));
  const auto far = detail::settle(field(z + 2.0 * ex) + field(z - 2.0 * ex) + field(z + 2.0 * ey) +
                                  field(z - 2.0 * ey));
  return detail::settle((near * 16.0 - far - centre * 60.0) * (1.0 / (12.0 * h * h)));
}

/// Value, first derivatives and Laplacian from one shared cross stencil.
template <class T>
struct StencilJet {
  T value;
  T dx;
  T dy;
  T laplacian;
};

template <class Fn>
auto fd_jet(const Fn& field, Complex z, const FDScheme& scheme) {
  using T = decltype(detail::settle(field(z)));
  const double h = scheme.step(z);
  const Complex ex(h, 0.0), ey(0.0, h);
  const T c = field(z);
  const T xp = field(z + ex), xm = field(z - ex), yp = field(z + ey), ym = field(z - ey);
  StencilJet<T> jet{c, T{}, T{}, T{}};
  if (scheme.order == 2) {
    jet.dx = (xp - xm) * (1.0 / (2.0 * h));
    jet.dy = (yp - ym) * (1.0 / (2.0 * h));
    jet.laplacian = (xp + xm + yp + ym - c * 4.0) * (1.0 / (h * h));
    return jet;
  }
  const T xpp = field(z + 2.0 * ex), xmm = field(z - 2.0 * ex);
  const T ypp = field(z + 2.0 * ey), ymm = field(z - 2.0 * ey);
  jet.dx = (xmm - xpp + (xp - xm) * 8.0) * (1.0 / (12.0 * h));
  jet.dy = (ymm - ypp + (yp - ym) * 8.0) * (1.0 / (12.0 * h));
  jet.laplacian = ((xp + xm + yp + ym) * 16.0 - (xpp + xmm + ypp + ymm) - c * 60.0) *
                  (1.0 / (12.0 * h * h));
  return jet;
}

// ---------------------------------------------------------------------------
// Sampling grids

/// Cell-centred N x N grid on [-R, R]^2, row-major (y outer, x inner).
std::vector<Complex> cell_centered_grid(int n, double radius);

/// N x N grid including the corners, row-major (y outer, x inner).
std::vector<Complex> corner_grid(int n, double radius);

/// Drops points within `exclusion` of any of `singular`.
std::vector<Complex> exclude_near(std::span<const Complex> points, std::span<const Complex> singular,
                                  double exclusion);

}  // namespace harmonic_atlas
