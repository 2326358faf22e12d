#include "harmonic_atlas/corode.hpp"

#include <cmath>
#include <sstream>

#include <boost/numeric/odeint.hpp>

namespace harmonic_atlas {

// ---------------------------------------------------------------------------
// Jets

Jet operator+(const Jet& a, const Jet& b) { return {a.v + b.v, a.d1 + b.d1, a.d2 + b.d2}; }
Jet operator-(const Jet& a, const Jet& b) { return {a.v - b.v, a.d1 - b.d1, a.d2 - b.d2}; }
Jet operator-(const Jet& a) { return {-a.v, -a.d1, -a.d2}; }
Jet operator*(const Jet& a, const Jet& b) {
  return {a.v * b.v, a.d1 * b.v + a.v * b.d1, a.d2 * b.v + 2.0 * a.d1 * b.d1 + a.v * b.d2};
}
Jet operator/(const Jet& a, const Jet& b) {
  const double q = a.v / b.v;
  const double q1 = (a.d1 - q * b.d1) / b.v;
  const double q2 = (a.d2 - 2.0 * q1 * b.d1 - q * b.d2) / b.v;
  return {q, q1, q2};
}
Jet operator*(double s, const Jet& a) { return {s * a.v, s * a.d1, s * a.d2}; }
Jet operator+(double s, const Jet& a) { return {s + a.v, a.d1, a.d2}; }

Jet rpow(double r, double p) {
  const double v = std::pow(r, p);
  return {v, p * v / r, p * (p - 1.0) * v / (r * r)};
}

Jet rlog(double r) { return {std::log(r), 1.0 / r, -1.0 / (r * r)}; }

// ---------------------------------------------------------------------------
// Profiles

RadialProfile RadialProfile::from_values(std::function<double(double)> f, Asymptotics asym) {
  return RadialProfile(
      [f = std::move(f)](double r) {
        const double h = 1e-4 * r;
        const double c = f(r), p = f(r + h), m = f(r - h);
        return Jet{c, (p - m) / (2.0 * h), (p - 2.0 * c + m) / (h * h)};
      },
      asym);
}

RadialProfile RadialProfile::negated() const {
  if (is_zero()) return {};
  return RadialProfile([jet = jet_](double r) { return -jet(r); }, asym_);
}

std::string to_string(ODECase c) {
  switch (c) {
    case ODECase::k_zero: return "k_zero";
    case ODECase::k_ne_m: return "k_ne_m";
    case ODECase::k_eq_m: return "k_eq_m";
  }
  return "unknown";
}

ODECase classify_case(int m, int k) {
  if (m < 1 || k < 0) throw InvalidInputError("mode needs m >= 1 and k >= 0");
  if (k == 0) return ODECase::k_zero;
  return k == m ? ODECase::k_eq_m : ODECase::k_ne_m;
}

ODESolutionFamily ODESolutionFamily::direction(int m, int k, int index) {
  if (index < 1 || index > 8) throw InvalidInputError("constant index must be in 1..8");
  ODESolutionFamily f;
  f.m = m;
  f.k = k;
  f.kind = classify_case(m, k);
  f.constants[static_cast<std::size_t>(index - 1)] = 1.0;
  return f;
}

namespace {

// Printed ξ-type (X_i) and η-type (Y_i) profiles, i = 1..4.
RadialProfile printed_x(int m, int k, int i) {
  const double M = m, K = k;
  switch (classify_case(m, k)) {
    case ODECase::k_zero:
      if (i == 1) return RadialProfile([](double) { return Jet::constant(1.0); }, {0, 0});
      if (i == 2)
        return RadialProfile(
            [M](double r) {
              return (rpow(r, 4 * M) + 4 * M * (rpow(r, 2 * M) * rlog(r)) - Jet::constant(1.0)) /
                     (2 * M * rpow(r, 2 * M));
            },
            {-2 * M, 2 * M});
      return {};
    case ODECase::k_ne_m:
      switch (i) {
        case 1: return RadialProfile([K](double r) { return -0.5 * rpow(r, -K); }, {-K, -K});
        case 2: return RadialProfile([K](double r) { return 0.5 * rpow(r, K); }, {K, K});
        case 3:
          return RadialProfile(
              [M, K](double r) {
                return -0.5 * ((rpow(r, K + 4 * M) + (4 * K + 4 * M) / K * rpow(r, K + 2 * M) +
                                (K + M) / (K - M) * rpow(r, K)) /
                               rpow(r, 2 * M));
              },
              {K - 2 * M, K + 2 * M});
        case 4:
          return RadialProfile(
              [M, K](double r) {
                return (-rpow(r, 4 * M) + (4 * K - 4 * M) / K * rpow(r, 2 * M) +
                        Jet::constant((K - M) / (K + M))) /
                       rpow(r, K + 2 * M);
              },
              {-K - 2 * M, 2 * M - K});
      }
      return {};
    case ODECase::k_eq_m:
      switch (i) {
        case 1:
          return RadialProfile([M](double r) { return (rpow(r, 2 * M) - Jet::constant(1.0)) / (2.0 * rpow(r, M)); },
                               {-M, M});
        case 2: return RadialProfile([M](double r) { return (-1.0 / (4 * M)) * rpow(r, -M); }, {-M, -M});
        case 3:
          return RadialProfile(
              [M](double r) {
                const Jet L = rlog(r);
                return (-rpow(r, 6 * M) + 4 * M * (rpow(r, 4 * M) * L) - 7.0 * rpow(r, 4 * M) -
                        4 * M * (rpow(r, 2 * M) * L) - 13.0 * rpow(r, 2 * M) - Jet::constant(1.0)) /
                       (4 * M * rpow(r, 3 * M));
              },
              {-3 * M, 3 * M});
        case 4:
          return RadialProfile(
              [M](double r) {
                return (4 * M * (rpow(r, 4 * M) * rlog(r)) - 7.0 * rpow(r, 2 * M) - Jet::constant(1.0)) /
                       (4 * M * rpow(r, 3 * M));
              },
              {-3 * M, M, false, true});
      }
      return {};
  }
  return {};
}

RadialProfile printed_y(int m, int k, int i) {
  const double M = m, K = k;
  auto D = [M](double r) { return 1.0 + rpow(r, 2 * M); };
  switch (classify_case(m, k)) {
    case ODECase::k_zero:
      if (i == 3) return RadialProfile([M, D](double r) { return rpow(r, M) / D(r); }, {M, -M});
      if (i == 4)
        return RadialProfile(
            [M](double r) {
              return (rpow(r, 4 * M) + 4 * M * (rpow(r, 2 * M) * rlog(r)) - Jet::constant(1.0)) /
                     (rpow(r, M) * (1.0 + rpow(r, 3 * M)));
            },
            {-M, 0});
      return {};
    case ODECase::k_ne_m:
      switch (i) {
        case 1: return RadialProfile([M, K, D](double r) { return Jet::constant(1.0) / (D(r) * rpow(r, K - M)); }, {M - K, -M - K});
        case 2: return RadialProfile([M, K, D](double r) { return rpow(r, K + M) / D(r); }, {K + M, K - M});
        case 3:
          return RadialProfile(
              [M, K, D](double r) {
                return (rpow(r, K + 4 * M) + (K + M) / (K - M) * rpow(r, K)) / (D(r) * rpow(r, M));
              },
              {K - M, K + M});
        case 4:
          return RadialProfile(
              [M, K, D](double r) {
                return (2.0 * rpow(r, 4 * M) + Jet::constant((2 * K - 2 * M) / (K + M))) / (D(r) * rpow(r, K + M));
              },
              {-K - M, M - K});
      }
      return {};
    case ODECase::k_eq_m:
      switch (i) {
        case 1: return RadialProfile([](double) { return Jet::constant(1.0); }, {0, 0});
        case 2: return RadialProfile([M, D](double r) { return Jet::constant(1.0 / (2 * M)) / D(r); }, {0, -2 * M});
        case 3:
          return RadialProfile(
              [M, D](double r) {
                const Jet L = rlog(r);
                return (rpow(r, 6 * M) + 4 * M * (rpow(r, 4 * M) * L) + rpow(r, 4 * M) +
                        4 * M * (rpow(r, 2 * M) * L) + 5.0 * rpow(r, 2 * M) - Jet::constant(1.0)) /
                       (2 * M * (rpow(r, 2 * M) * D(r)));
              },
              {-2 * M, 2 * M});
        case 4:
          return RadialProfile(
              [M, D](double r) {
                return (4 * M * (rpow(r, 4 * M) * rlog(r)) - rpow(r, 2 * M) - Jet::constant(1.0)) /
                       (2 * M * (rpow(r, 2 * M) * D(r)));
              },
              {-2 * M, 0, false, true});
      }
      return {};
  }
  return {};
}

ProfileSet direction_profiles(int m, int k, int index) {
  ProfileSet p;
  if (k == 0) {
    // Printed: ξ1 from C1, C2 and η1 from C3, C4; C5..C8 mirror them into ξ2, η2.
    const int i = index > 4 ? index - 4 : index;
    RadialProfile prof = i <= 2 ? printed_x(m, k, i) : printed_y(m, k, i);
    if (index <= 2) p.xi1 = prof;
    else if (index <= 4) p.eta1 = prof;
    else if (index <= 6) p.xi2 = prof;
    else p.eta2 = prof;
    return p;
  }
  if (index <= 4) {
    p.xi1 = printed_x(m, k, index);
    p.eta2 = printed_y(m, k, index);
  } else {
    p.xi2 = printed_x(m, k, index - 4);
    p.eta1 = printed_y(m, k, index - 4).negated();
  }
  return p;
}

RadialProfile add_scaled(const RadialProfile& a, const RadialProfile& b, double s) {
  if (s == 0.0 || b.is_zero()) return a;
  if (a.is_zero()) {
    return RadialProfile([b, s](double r) { return s * b.jet(r); }, b.asymptotics());
  }
  return RadialProfile([a, b, s](double r) { return a.jet(r) + s * b.jet(r); }, a.asymptotics());
}

// Coefficients of the angular-mode equations at r.
struct Coefficients {
  double A, B, C, F;
};

Coefficients coefficients(int m, int k, double r) {
  const double t2 = std::pow(r, 2 * m);
  const double D = 1.0 + t2;
  const double g = (1.0 - t2) / D;  // (1 - r^{2m})/(1 + r^{2m})
  Coefficients c;
  c.A = 2.0 * m * g / r;
  c.B = m * k * (1.0 - t2) / std::pow(r, m + 2);
  // (r^{4m} - 6 r^{2m} + 1)/D^2 = g^2 - 4 r^{2m}/D^2
  c.C = (g * g - 4.0 * t2 / (D * D)) * m * m / (r * r);
  c.F = -4.0 * m * k * std::pow(r, m - 2) * g / D;
  return c;
}

double relative(double sum, std::initializer_list<double> terms) {
  double s = 0.0;
  for (double t : terms) s += std::abs(t);
  return s > 0.0 ? std::abs(sum) / s : 0.0;
}

using State = std::array<double, 8>;

// Angular-mode system in t = ln r with state (ξ1, rξ1', ξ2, rξ2', η1, rη1', η2, rη2').
struct ModeSystem {
  int m, k;

  void operator()(const State& s, State& ds, double t) const {
    const double r = std::exp(t);
    const double t2 = std::pow(r, 2 * m);
    const double D = 1.0 + t2;
    const double g = (1.0 - t2) / D;
    const double a = 2.0 * m * g;
    const double b = m * k * (1.0 - t2) / std::pow(r, m);
    const double c = (g * g - 4.0 * t2 / (D * D)) * m * m;
    const double f = -4.0 * m * k * std::pow(r, m) * g / D;
    const double k2 = static_cast<double>(k) * k;
    ds[0] = s[1];
    ds[1] = k2 * s[0] - a * s[1] + b * s[6];
    ds[2] = s[3];
    ds[3] = k2 * s[2] - a * s[3] - b * s[4];
    ds[4] = s[5];
    ds[5] = k2 * s[4] + c * s[4] + f * s[2];
    ds[6] = s[7];
    ds[7] = k2 * s[6] + c * s[6] - f * s[0];
  }
};

struct IntegratedMode {
  ModeSystem system;
  double r0;
  State initial;

  State at(double r) const {
    State x = initial;
    const double t0 = std::log(r0), t1 = std::log(r);
    if (t1 == t0) return x;
    namespace odeint = boost::numeric::odeint;
    auto stepper = odeint::make_controlled(1e-200, 1e-12, odeint::runge_kutta_fehlberg78<State>());
    const double dt = t1 > t0 ? 1e-3 : -1e-3;
    odeint::integrate_adaptive(stepper, system, x, t0, t1, dt);
    for (double v : x)
      if (!std::isfinite(v)) throw NumericalFailureError("angular-mode integration produced a non-finite state");
    return x;
  }
};

RadialProfile integrated_component(std::shared_ptr<const IntegratedMode> mode, int slot, Asymptotics asym) {
  return RadialProfile(
      [mode, slot](double r) {
        auto slope = [&](double rr) {
          const State s = mode->at(rr);
          return s[static_cast<std::size_t>(2 * slot + 1)] / rr;
        };
        const State s = mode->at(r);
        const double h = 1e-4 * r;
        return Jet{s[static_cast<std::size_t>(2 * slot)], s[static_cast<std::size_t>(2 * slot + 1)] / r,
                   (slope(r + h) - slope(r - h)) / (2.0 * h)};
      },
      asym);
}

double amplitude(int k, const ProfileSet& p, double r, double sinQ) {
  double a = std::abs(p.xi1(r)) * sinQ + std::abs(p.eta1(r));
  if (k != 0) a += std::abs(p.xi2(r)) * sinQ + std::abs(p.eta2(r));
  return a;
}

bool end_bounded(double p, bool log_flag, bool at_zero) {
  if (p == 0.0) return !log_flag;
  return at_zero ? p > 0.0 : p < 0.0;
}

}  // namespace

ProfileSet closed_form_profiles(const ODESolutionFamily& family) {
  ProfileSet out;
  for (int i = 1; i <= 8; ++i) {
    const double c = family.constants[static_cast<std::size_t>(i - 1)];
    if (c == 0.0) continue;
    const ProfileSet d = direction_profiles(family.m, family.k, i);
    out.xi1 = add_scaled(out.xi1, d.xi1, c);
    out.xi2 = add_scaled(out.xi2, d.xi2, c);
    out.eta1 = add_scaled(out.eta1, d.eta1, c);
    out.eta2 = add_scaled(out.eta2, d.eta2, c);
  }
  return out;
}

ODEResidual ode_residual(int m, int k, const ProfileSet& p, double r) {
  const Coefficients c = coefficients(m, k, r);
  const double k2 = static_cast<double>(k) * k;
  const Jet x1 = p.xi1.jet(r), x2 = p.xi2.jet(r), e1 = p.eta1.jet(r), e2 = p.eta2.jet(r);
  const double r2 = r * r;
  ODEResidual out;

  auto xi_eq = [&](int i, const Jet& x, double coupling) {
    const double t[] = {-x.d2, -x.d1 / r, k2 * x.v / r2, -c.A * x.d1, coupling};
    const double sum = t[0] + t[1] + t[2] + t[3] + t[4];
    out.raw(i) = sum;
    out.relative(i) = relative(sum, {t[0], t[1], t[2], t[3], t[4]});
  };
  auto eta_eq = [&](int i, const Jet& e, double coupling) {
    const double t[] = {-e.d2, -e.d1 / r, k2 * e.v / r2, c.C * e.v, coupling};
    const double sum = t[0] + t[1] + t[2] + t[3] + t[4];
    out.raw(i) = sum;
    out.relative(i) = relative(sum, {t[0], t[1], t[2], t[3], t[4]});
  };
  xi_eq(0, x1, c.B * e2.v);
  xi_eq(1, x2, -c.B * e1.v);
  eta_eq(2, e1, c.F * x2.v);
  eta_eq(3, e2, -c.F * x1.v);
  return out;
}

ProfileSet integrate_profiles(int m, int k, const ProfileSet& seed, double r0) {
  auto mode = std::make_shared<IntegratedMode>();
  mode->system = {m, k};
  mode->r0 = r0;
  const RadialProfile* slots[] = {&seed.xi1, &seed.xi2, &seed.eta1, &seed.eta2};
  // Seed order (ξ1, ξ2, η1, η2) maps to state slots 0, 1, 2, 3.
  for (int s = 0; s < 4; ++s) {
    const Jet j = slots[s]->jet(r0);
    mode->initial[static_cast<std::size_t>(2 * s)] = j.v;
    mode->initial[static_cast<std::size_t>(2 * s + 1)] = r0 * j.d1;
  }
  ProfileSet out;
  if (!seed.xi1.is_zero() || !seed.eta2.is_zero() || !seed.xi2.is_zero() || !seed.eta1.is_zero()) {
    // Components can become nonzero through the coupling even if their seed is zero.
    out.xi1 = integrated_component(mode, 0, seed.xi1.asymptotics());
    out.xi2 = integrated_component(mode, 1, seed.xi2.asymptotics());
    out.eta1 = integrated_component(mode, 2, seed.eta1.asymptotics());
    out.eta2 = integrated_component(mode, 3, seed.eta2.asymptotics());
    // Components that are zero and uncoupled stay exactly zero; keep them marked zero.
    // For k = 0 nothing is coupled; otherwise ξ1 pairs with η2 and ξ2 with η1.
    if (k == 0) {
      RadialProfile* outs[] = {&out.xi1, &out.xi2, &out.eta1, &out.eta2};
      for (int s = 0; s < 4; ++s)
        if (slots[s]->is_zero()) *outs[s] = {};
    } else {
      if (seed.xi1.is_zero() && seed.eta2.is_zero()) out.xi1 = out.eta2 = {};
      if (seed.xi2.is_zero() && seed.eta1.is_zero()) out.xi2 = out.eta1 = {};
    }
  }
  return out;
}

double max_probe_residual(int m, int k, const ProfileSet& p) {
  double worst = 0.0;
  for (const double r : kProbeRadii) worst = std::max(worst, ode_residual(m, k, p, r).max_relative());
  return worst;
}

TangentField assemble_E(int m, int k, const ProfileSet& p, double Ca, double Cb,
                        std::shared_ptr<const HarmonicMapField> base) {
  if (!base) base = corotational_map(m);
  return TangentField(
      base,
      [m, k, p, Ca, Cb](Complex z) {
        const CorotationalFrame f(m, z);
        const double r = std::max(f.r, 1e-12);
        const double c = std::cos(k * f.theta), s = std::sin(k * f.theta);
        Vec3 v = Vec3::Zero();
        if (Ca != 0.0) {
          if (!p.xi1.is_zero()) v += Ca * p.xi1(r) * f.sinQ * c * f.E1;
          if (!p.eta2.is_zero()) v += Ca * p.eta2(r) * s * f.E2;
        }
        if (Cb != 0.0) {
          if (!p.xi2.is_zero()) v += Cb * p.xi2(r) * f.sinQ * s * f.E1;
          if (!p.eta1.is_zero()) v += Cb * p.eta1(r) * c * f.E2;
        }
        return v;
      },
      {Provenance::Source::ode, "ode k=" + std::to_string(k)});
}

BoundednessVerdict classify_boundedness(int m, int k, const ProfileSet& p) {
  BoundednessVerdict v;
  const bool live_a = !p.xi1.is_zero() || !p.eta1.is_zero();
  const bool live_b = k != 0 && (!p.xi2.is_zero() || !p.eta2.is_zero());
  v.zero_field = !live_a && !live_b;
  if (v.zero_field) return v;

  v.symbolic = true;
  auto check = [&](const RadialProfile& prof, double shift) {
    if (prof.is_zero()) return;
    const Asymptotics& a = prof.asymptotics();
    if (!end_bounded(a.p0 + shift, a.log0, true) || !end_bounded(a.pinf - shift, a.loginf, false))
      v.symbolic = false;
  };
  // ξ enters multiplied by sin Q_m, which behaves like r^m at 0 and r^{-m} at infinity.
  check(p.xi1, m);
  check(p.eta1, 0);
  if (k != 0) {
    check(p.xi2, m);
    check(p.eta2, 0);
  }

  auto a_at = [&](double r) {
    const CorotationalFrame f(m, Complex(r, 0.0));
    return amplitude(k, p, r, f.sinQ);
  };
  const double radii[] = {1e-4, 1e-2, 1.0, 1e2, 1e4};
  double values[5];
  for (int i = 0; i < 5; ++i) {
    values[i] = a_at(radii[i]);
    v.sup = std::max(v.sup, std::isfinite(values[i]) ? values[i] : std::numeric_limits<double>::infinity());
  }
  auto slope = [](double lo, double hi) {
    const double tiny = 1e-300;
    return std::log(std::max(hi, tiny) / std::max(lo, tiny)) / std::log(100.0);
  };
  v.slope0 = slope(values[0], values[1]);
  v.slopeinf = slope(values[3], values[4]);
  v.numeric = v.sup <= kBoundednessCeiling && v.slope0 >= -kSlopeTolerance && v.slopeinf <= kSlopeTolerance;
  return v;
}

double polar_system_residual(int m, int k, const ProfileSet& p, Complex z) {
  auto angular = [k](const RadialProfile& a, const RadialProfile& b) {
    return [pa = &a, pb = &b, k](Complex w) {
      const double r = std::abs(w), th = std::arg(w);
      return (*pa)(r) * std::cos(k * th) + (*pb)(r) * std::sin(k * th);
    };
  };
  const auto xi = angular(p.xi1, p.xi2);
  const auto eta = angular(p.eta1, p.eta2);
  const FDScheme fd;
  const double x = z.real(), y = z.imag(), r = std::abs(z);
  const double lap_xi = fd_laplacian(xi, z, fd);
  const double lap_eta = fd_laplacian(eta, z, fd);
  const double xi_x = fd_derivative(xi, z, Direction::x, fd), xi_y = fd_derivative(xi, z, Direction::y, fd);
  const double eta_x = fd_derivative(eta, z, Direction::x, fd), eta_y = fd_derivative(eta, z, Direction::y, fd);
  const double xi_r = (x * xi_x + y * xi_y) / r;
  const double xi_th = -y * xi_x + x * xi_y;
  const double eta_th = -y * eta_x + x * eta_y;

  const CorotationalFrame f(m, z);
  const double sin2Q = 2.0 * f.sinQ * f.cosQ;
  const double cos2Q = f.cosQ * f.cosQ - f.sinQ * f.sinQ;
  const double Qr = -2.0 * m * std::pow(r, m - 1) / (1.0 + std::pow(r, 2 * m));
  const double r2 = r * r;

  const double a[] = {f.sinQ * f.sinQ * lap_xi, sin2Q * Qr * xi_r, sin2Q * m / r2 * eta_th};
  const double b[] = {-lap_eta, cos2Q * m * m / r2 * eta(z), sin2Q * m / r2 * xi_th};
  // One shared scale, including the sizes of the profiles themselves: an
  // equation can consist of cancelling terms or of FD noise alone.
  double scale = (std::abs(xi(z)) + std::abs(eta(z))) * m * m / r2 +
                 (std::hypot(xi_x, xi_y) + std::hypot(eta_x, eta_y)) / r;
  for (const double t : {a[0], a[1], a[2], b[0], b[1], b[2]}) scale += std::abs(t);
  if (scale == 0.0) return 0.0;
  return std::max(std::abs(a[0] + a[1] + a[2]), std::abs(b[0] + b[1] + b[2])) / scale;
}

DirectionReport analyse_direction(int m, int k, int index) {
  DirectionReport rep;
  rep.m = m;
  rep.k = k;
  rep.index = index;
  const ProfileSet printed = closed_form_profiles(ODESolutionFamily::direction(m, k, index));
  rep.printed_residual = max_probe_residual(m, k, printed);
  rep.printed_accepted = rep.printed_residual < kClosedFormAcceptance;
  rep.profiles = printed;
  if (!rep.printed_accepted) {
    rep.replaced = true;
    rep.profiles = integrate_profiles(m, k, printed);
    rep.replacement_residual = max_probe_residual(m, k, rep.profiles);
  }
  for (const double r : {0.5, 2.0})
    rep.consistency_residual =
        std::max(rep.consistency_residual, polar_system_residual(m, k, rep.profiles, std::polar(r, 0.7)));
  rep.boundedness = classify_boundedness(m, k, rep.profiles);
  return rep;
}

std::vector<int> bounded_filter(int m, int k) {
  std::vector<int> out;
  for (int i = 1; i <= 8; ++i)
    if (analyse_direction(m, k, i).boundedness.bounded()) out.push_back(i);
  return out;
}

namespace {

KernelBasis basis_from_reports(int m, const std::vector<DirectionReport>& reports) {
  KernelBasis basis;
  basis.base_map = corotational_map(m);
  basis.m = m;
  for (const auto& rep : reports) {
    if (rep.k > m || !rep.boundedness.bounded()) continue;
    TangentField f = assemble_E(m, rep.k, rep.profiles, 1.0, 1.0, basis.base_map);
    basis.fields.emplace_back(basis.base_map, [f](Complex z) { return f(z); },
                              Provenance{Provenance::Source::ode,
                                         "ode k=" + std::to_string(rep.k) + " C" + std::to_string(rep.index)});
  }
  return basis;
}

}  // namespace

KernelBasis ode_kernel_basis(int m) {
  std::vector<DirectionReport> reports;
  for (int k = 0; k <= m; ++k)
    for (int i = 1; i <= 8; ++i) reports.push_back(analyse_direction(m, k, i));
  return basis_from_reports(m, reports);
}

double match_subspaces(const KernelBasis& a, const KernelBasis& b, const QuadratureRule& rule) {
  const Eigen::MatrixXd QA = orthonormal_span(sample_fields(a.fields, rule));
  const Eigen::MatrixXd QB = orthonormal_span(sample_fields(b.fields, rule));
  if (QA.cols() < static_cast<Eigen::Index>(a.fields.size()) ||
      QB.cols() < static_cast<Eigen::Index>(b.fields.size()))
    throw NumericalFailureError("rank-deficient basis in subspace comparison");
  return largest_principal_angle(QA, QB);
}

ODEReport analyse_corotational(int m) {
  if (m < 1) throw InvalidInputError("angular-mode analysis needs m >= 1");
  ODEReport rep;
  rep.m = m;
  rep.bounded_counts.assign(static_cast<std::size_t>(m + 2), 0);
  for (int k = 0; k <= m + 1; ++k) {
    for (int i = 1; i <= 8; ++i) {
      DirectionReport d = analyse_direction(m, k, i);
      if (!d.printed_accepted) {
        std::ostringstream msg;
        msg << "m=" << m << " k=" << k << " C" << i << " printed residual " << d.printed_residual;
        rep.flagged.push_back(msg.str());
        if (!(d.replacement_residual < kReplacementAcceptance)) rep.all_accepted_or_replaced = false;
      }
      if (d.boundedness.bounded()) {
        ++rep.bounded_counts[static_cast<std::size_t>(k)];
        ++rep.bounded_total;
      }
      rep.directions.push_back(std::move(d));
    }
  }
  const KernelBasis ode = basis_from_reports(m, rep.directions);
  rep.subspace_angle = match_subspaces(ode, corotational_kernel_basis(m));
  return rep;
}

}  // namespace harmonic_atlas
