// Prints one PASS/FAIL line per acceptance criterion; exit status 1 if any fails.

#include <cmath>
#include <cstdio>
#include <memory>
#include <numbers>
#include <random>
#include <string>
#include <vector>

#include "harmonic_atlas/corode.hpp"
#include "harmonic_atlas/field.hpp"
#include "harmonic_atlas/linops.hpp"

using namespace harmonic_atlas;

namespace {

using Poly = ComplexPolynomial;
const Complex I(0.0, 1.0);

struct Named {
  std::string name;
  RationalMap f;
};

RationalMap map(std::vector<Complex> num, std::vector<Complex> den = {1.0},
                Orientation o = Orientation::holomorphic) {
  return reduce(Poly(std::move(num)), Poly(std::move(den)), o);
}

std::vector<Named> suite() {
  return {{"z", map({0, 1})},
          {"z^2", map({0, 0, 1})},
          {"z^3", map({0, 0, 0, 1})},
          {"z^4", map({0, 0, 0, 0, 1})},
          {"(z^2+1)/z", map({1, 0, 1}, {0, 1})},
          {"1/z", map({1}, {0, 1})},
          {"conj z", map({0, 1}, {1}, Orientation::antiholomorphic)},
          {"conj z^2", map({0, 0, 1}, {1}, Orientation::antiholomorphic)}};
}

int failures = 0;

void report(int id, bool pass, const std::string& detail) {
  std::printf("criterion %2d: %s  %s\n", id, pass ? "PASS" : "FAIL", detail.c_str());
  std::fflush(stdout);
  if (!pass) ++failures;
}

std::string fmt(const char* f, double a) {
  char buf[128];
  std::snprintf(buf, sizeof buf, f, a);
  return buf;
}

const FDScheme kFD{};

std::vector<Complex> residual_grid(const HarmonicMapField& F) {
  return exclude_near(cell_centered_grid(64, 4.0), F.singular_points(), tolerances::kPoleExclusion);
}

double grid_sup(const std::vector<Complex>& grid, const std::function<double(Complex)>& fn) {
  std::vector<double> v(grid.size());
  parallel_for(grid.size(), [&](std::size_t i) { v[i] = fn(grid[i]); });
  double s = 0.0;
  for (double x : v) s = std::max(s, std::isfinite(x) ? x : INFINITY);
  return s;
}

struct KernelSups {
  double L1 = 0.0, L = 0.0, claim = 0.0, cr = 0.0;
};

KernelSups kernel_sups(const HarmonicMapField& F, const std::vector<TangentField>& fields) {
  const auto grid = residual_grid(F);
  KernelSups s;
  for (const auto& v : fields) {
    s.L1 = std::max(s.L1, grid_sup(grid, [&](Complex z) { return apply_L1(F, v, z, kFD).norm(); }));
    s.L = std::max(s.L, grid_sup(grid, [&](Complex z) { return apply_L(F, v, z, kFD).norm(); }));
    s.claim = std::max(s.claim, grid_sup(grid, [&](Complex z) {
      const auto c = claim_residuals(F, v, z, kFD);
      return std::max(std::abs(c.uvy), std::abs(c.uvx));
    }));
    s.cr = std::max(s.cr, grid_sup(grid, [&](Complex z) { return std::abs(cr_of_pushforward(F, v, z, kFD)); }));
  }
  return s;
}

std::vector<Complex> random_points(int n, unsigned seed, double half = 3.0) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> c(-half, half);
  std::vector<Complex> out;
  for (int i = 0; i < n; ++i) out.emplace_back(c(rng), c(rng));
  return out;
}

}  // namespace

int main() {
  const QuadratureRule rule;
  std::printf("degree sign convention: %s\n", degree_convention().name().c_str());

  // 1 and 2
  {
    bool ok1 = true, ok2 = true;
    double worst_deg = 0.0, worst_energy = 0.0;
    for (const auto& [name, f] : suite()) {
      const HarmonicMapField F(f);
      const int d = algebraic_degree(f);
      const Integral nd = de_rham_degree(F, rule);
      const double err = std::abs(nd.value - d);
      worst_deg = std::max(worst_deg, err);
      ok1 = ok1 && std::lround(nd.value) == d && err < 1e-3 && nd.converged;
      const Integral E = total_energy(F, rule);
      const double rel = std::abs(E.value - 4.0 * std::numbers::pi * std::abs(d)) / (4.0 * std::numbers::pi * std::abs(d));
      worst_energy = std::max(worst_energy, rel);
      ok2 = ok2 && rel < 1e-6 && E.converged;
    }
    report(1, ok1, fmt("max |numeric - algebraic| = %.3e (tol 1e-3)", worst_deg));
    report(2, ok2, fmt("max relative energy error = %.3e (tol 1e-6)", worst_energy));
  }

  // 3 and 4
  {
    double bog = 0.0, harm = 0.0;
    for (const auto& [name, f] : suite()) {
      const HarmonicMapField F(f);
      std::vector<Complex> pts;
      for (const Complex z : random_points(400, 11))
        if (pts.size() < 200 && !exclude_near(std::span<const Complex>(&z, 1), F.singular_points(), 1e-2).empty())
          pts.push_back(z);
      bog = std::max(bog, grid_sup(pts, [&](Complex z) { return bogomolny_residual(F, z).norm(); }));
      harm = std::max(harm, grid_sup(residual_grid(F), [&](Complex z) { return harmonic_residual(F, z, kFD).norm(); }));
    }
    report(3, bog < 1e-10, fmt("max Bogomolny residual = %.3e (tol 1e-10)", bog));
    report(4, harm < 1e-5, fmt("max harmonic-map residual = %.3e (tol 1e-5)", harm));
  }

  // 5
  {
    struct Case {
      const char* name;
      RationalMap f;
      int expected;
    };
    const std::vector<Case> cases{{"z", map({0, 1}), 6},
                                  {"(z^2+1)/z", map({1, 0, 1}, {0, 1}), 10},
                                  {"z^3", map({0, 0, 0, 1}), 14},
                                  {"constant", map({0.3 + 0.1 * I}), 2}};
    bool ok = true;
    std::string detail = "ranks:";
    for (const auto& c : cases) {
      const KernelBasis B = general_kernel_basis(std::make_shared<HarmonicMapField>(c.f));
      const int r = gram_rank(B, rule);
      ok = ok && r == c.expected;
      detail += " " + std::string(c.name) + "=" + std::to_string(r) + "/" + std::to_string(c.expected);
    }
    report(5, ok, detail);
  }

  // 6, 8, 9 over the general kernel of several maps
  KernelSups general;
  for (const RationalMap& f : {map({0, 1}), map({1, 0, 1}, {0, 1}), map({0, 0, 0, 1}), map({1}, {0, 1}),
                               map({0, 1}, {1}, Orientation::antiholomorphic)}) {
    const auto F = std::make_shared<HarmonicMapField>(f);
    const KernelSups s = kernel_sups(*F, general_kernel_basis(F).fields);
    general.L1 = std::max(general.L1, s.L1);
    general.L = std::max(general.L, s.L);
    general.claim = std::max(general.claim, s.claim);
    general.cr = std::max(general.cr, s.cr);
  }
  {
    const auto F = std::make_shared<HarmonicMapField>(map({0, 1}));
    const auto grid = residual_grid(*F);
    double weakest = INFINITY;
    for (const auto& v : random_control_fields(F, 20)) {
      const double a = grid_sup(grid, [&](Complex z) { return apply_L1(*F, v, z, kFD).norm(); });
      const double b = grid_sup(grid, [&](Complex z) { return apply_L(*F, v, z, kFD).norm(); });
      weakest = std::min({weakest, a, b});
    }
    const bool ok = general.L1 < 1e-6 && general.L < 1e-5 && weakest > 1e-2;
    char buf[256];
    std::snprintf(buf, sizeof buf, "kernel sup L1 = %.3e, L = %.3e; weakest control = %.3e", general.L1, general.L,
                  weakest);
    report(6, ok, buf);
  }

  // 7
  {
    bool ok = true;
    std::string detail;
    for (int m = 1; m <= 3; ++m) {
      const KernelBasis C = corotational_kernel_basis(m);
      const auto F = corotational_map(m);
      const KernelSups s = kernel_sups(*F, C.fields);
      const KernelBasis G = general_kernel_basis(F);
      const double angle = subspace_angle(C.fields, G.fields);
      const bool here = static_cast<int>(C.fields.size()) == 4 * m + 2 && s.L1 < 1e-6 && s.L < 1e-5 && angle < 1e-6;
      ok = ok && here;
      char buf[160];
      std::snprintf(buf, sizeof buf, "m=%d: %zu fields, L1 %.1e, L %.1e, angle %.1e; ", m, C.fields.size(), s.L1, s.L,
                    angle);
      detail += buf;
    }
    report(7, ok, detail);
  }

  report(8, general.claim < 1e-6, fmt("max claim residual = %.3e (tol 1e-6)", general.claim));
  report(9, general.cr < 1e-5, fmt("max pushforward CR residual = %.3e (tol 1e-5)", general.cr));

  // 10
  {
    bool ok = true;
    std::string detail;
    for (int m = 1; m <= 3; ++m) {
      const ODEReport rep = analyse_corotational(m);
      double replaced = 0.0;
      for (const auto& d : rep.directions) {
        if (d.replaced) replaced = std::max(replaced, d.replacement_residual);
        ok = ok && (d.printed_accepted || (d.replaced && d.replacement_residual < kReplacementAcceptance));
      }
      ok = ok && rep.bounded_total == 4 * m + 2 && rep.subspace_angle < 1e-6 && rep.bounded_counts.back() == 0;
      char buf[200];
      std::snprintf(buf, sizeof buf, "m=%d: bounded %d, angle %.1e, flagged %zu (replacement residual %.1e); ", m,
                    rep.bounded_total, rep.subspace_angle, rep.flagged.size(), replaced);
      detail += buf;
    }
    report(10, ok, detail);
  }

  // 11: tangent vectors as printed for d/da of S(1/(z-a)) and S(1/(z-a)^2), and e1 x u.
  {
    double worst = 0.0;
    for (const Complex z : random_points(20, 5)) {
      const double x = z.real(), y = z.imag();
      const double q = x * x + y * y + 1.0;
      const Vec3 v1(-2.0 * (-x * x + y * y + 1.0) / (q * q), -4.0 * x * y / (q * q), 4.0 * x / (q * q));
      worst = std::max(worst, std::abs(dstereo_inv(stereo(1.0 / z), {v1, stereo(1.0 / z)}) - 1.0 / (z * z)));

      const double x2 = x * x, y2 = y * y, s = x2 * x2 + 2 * x2 * y2 + y2 * y2 + 1.0;
      const Vec3 v2(-4.0 * x * (-x2 * x2 + 2 * x2 * y2 + 3 * y2 * y2 + 1.0) / (s * s),
                    -4.0 * y * (3 * x2 * x2 + 2 * x2 * y2 - y2 * y2 - 1.0) / (s * s), 8.0 * x * (x2 + y2) / (s * s));
      const SpherePoint u2 = stereo(1.0 / (z * z));
      worst = std::max(worst, std::abs(dstereo_inv(u2, {v2, u2}) - 2.0 / (z * z * z)));

      const RationalMap g = map({1, 0, 1}, {0, 1});
      const Complex fz = eval(g, z).value;
      const SpherePoint u3 = stereo(fz);
      const Complex expect = -0.5 * I * fz * fz + 0.5 * I;
      worst = std::max(worst, std::abs(dstereo_inv(u3, rotation_generator(u3)) - expect) / std::max(1.0, std::abs(expect)));
    }
    report(11, worst < 1e-8, fmt("max deviation = %.3e (tol 1e-8)", worst));
  }

  // 12
  {
    const RationalMap f = map({1, 0, 1}, {0, 1});
    double worst = 0.0;
    for (const Complex z : random_points(50, 9)) {
      const Complex fz = eval(f, z).value;
      const Complex w = stereo_inv(rotate_x1(stereo(fz), {std::numbers::pi}));
      worst = std::max(worst, std::abs(w - 1.0 / fz) / std::max(1.0, std::abs(1.0 / fz)));
    }
    report(12, worst < 1e-10, fmt("max deviation = %.3e (tol 1e-10)", worst));
  }

  std::printf("%d criteria failed\n", failures);
  return failures == 0 ? 0 : 1;
}
