#include "harmonic_atlas/quad.hpp"

#include <cmath>
#include <cstdlib>
#include <numbers>
#include <sstream>
#include <string>
#include <thread>

namespace harmonic_atlas {

unsigned worker_count() {
  unsigned n = std::max(1u, std::thread::hardware_concurrency());
  if (const char* env = std::getenv("HARMONIC_ATLAS_THREADS")) {
    try {
      const long cap = std::stol(env);
      if (cap >= 1) n = std::min<unsigned>(n, static_cast<unsigned>(cap));
    } catch (const std::exception&) {
    }
  }
  return n;
}

void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body) {
  const std::size_t workers = std::min<std::size_t>(worker_count(), n);
  if (workers <= 1) {
    for (std::size_t i = 0; i < n; ++i) body(i);
    return;
  }
  std::vector<std::thread> pool;
  std::vector<std::exception_ptr> errors(workers);
  const std::size_t chunk = (n + workers - 1) / workers;
  for (std::size_t w = 0; w < workers; ++w) {
    pool.emplace_back([&, w] {
      try {
        const std::size_t end = std::min(n, (w + 1) * chunk);
        for (std::size_t i = w * chunk; i < end; ++i) body(i);
      } catch (...) {
        errors[w] = std::current_exception();
      }
    });
  }
  for (auto& t : pool) t.join();
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
}

double pairwise_sum(std::span<const double> values) {
  if (values.size() <= 16) {
    double s = 0.0;
    for (double v : values) s += v;
    return s;
  }
  const std::size_t half = values.size() / 2;
  return pairwise_sum(values.first(half)) + pairwise_sum(values.subspan(half));
}

void gauss_legendre(int n, std::vector<double>& nodes, std::vector<double>& weights) {
  if (n < 1) throw InvalidInputError("Gauss-Legendre order must be positive");
  nodes.assign(static_cast<std::size_t>(n), 0.0);
  weights.assign(static_cast<std::size_t>(n), 0.0);
  for (int i = 0; i < (n + 1) / 2; ++i) {
    double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int iter = 0; iter < 100; ++iter) {
      double p0 = 1.0, p1 = x;
      for (int k = 2; k <= n; ++k) {
        const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      if (n == 1) p0 = 1.0;
      dp = n * (x * p1 - p0) / (x * x - 1.0);
      const double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    // Recompute the derivative at the converged node.
    double p0 = 1.0, p1 = x;
    for (int k = 2; k <= n; ++k) {
      const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
      p0 = p1;
      p1 = p2;
    }
    dp = n * (x * p1 - p0) / (x * x - 1.0);
    const double w = 2.0 / ((1.0 - x * x) * dp * dp);
    nodes[static_cast<std::size_t>(i)] = -x;
    nodes[static_cast<std::size_t>(n - 1 - i)] = x;
    weights[static_cast<std::size_t>(i)] = w;
    weights[static_cast<std::size_t>(n - 1 - i)] = w;
  }
}

QuadratureRule::QuadratureRule(int n_radial, int n_angular) : n_radial_(n_radial), n_angular_(n_angular) {
  if (n_radial < 1 || n_angular < 1) throw InvalidInputError("quadrature sizes must be positive");
  std::vector<double> x, w;
  gauss_legendre(n_radial, x, w);
  const double dtheta = 2.0 * std::numbers::pi / n_angular;
  nodes_.reserve(static_cast<std::size_t>(n_radial) * static_cast<std::size_t>(n_angular));
  for (int i = 0; i < n_radial; ++i) {
    const double s = 0.5 * (x[static_cast<std::size_t>(i)] + 1.0);
    const double ws = 0.5 * w[static_cast<std::size_t>(i)];
    const double r = s / (1.0 - s);
    const double radial_weight = ws * r / ((1.0 - s) * (1.0 - s)) * dtheta;
    for (int j = 0; j < n_angular; ++j)
      nodes_.push_back({std::polar(r, j * dtheta), radial_weight});
  }
}

QuadratureRule QuadratureRule::coarsened() const {
  return QuadratureRule(std::max(1, n_radial_ / 2), std::max(1, n_angular_ / 2));
}

std::vector<double> evaluate_on_nodes(const std::function<double(Complex)>& density,
                                      const QuadratureRule& rule) {
  const auto nodes = rule.nodes();
  std::vector<double> out(nodes.size());
  parallel_for(nodes.size(), [&](std::size_t i) {
    const double v = density(nodes[i].z);
    if (!std::isfinite(v)) {
      std::ostringstream msg;
      msg << "non-finite integrand at z = (" << nodes[i].z.real() << ", " << nodes[i].z.imag() << ")";
      throw QuadratureError(msg.str());
    }
    out[i] = v * nodes[i].weight;
  });
  return out;
}

Integral integrate_plane(const std::function<double(Complex)>& density, const QuadratureRule& rule) {
  Integral result;
  result.value = pairwise_sum(evaluate_on_nodes(density, rule));
  result.coarse_value = pairwise_sum(evaluate_on_nodes(density, rule.coarsened()));
  result.converged = std::abs(result.value - result.coarse_value) <=
                     kQuadratureAgreement * std::max(1.0, std::abs(result.value));
  return result;
}

std::vector<Complex> cell_centered_grid(int n, double radius) {
  if (n < 1 || radius <= 0.0) throw InvalidInputError("grid needs n >= 1 and radius > 0");
  std::vector<Complex> out;
  out.reserve(static_cast<std::size_t>(n) * static_cast<std::size_t>(n));
  const double cell = 2.0 * radius / n;
  for (int j = 0; j < n; ++j)
    for (int i = 0; i < n; ++i) out.emplace_back(-radius + (i + 0.5) * cell, -radius + (j + 0.5) * cell);
  return out;
}

std::vector<Complex> corner_grid(int n, double radius) {
  if (n < 2 || radius <= 0.0) throw InvalidInputError("grid needs n >= 2 and radius > 0");
  std::vector<Complex> out;
  out.reserve(static_cast<std::size_t>(n) * static_cast<std::size_t>(n));
  const double step = 2.0 * radius / (n - 1);
  for (int j = 0; j < n; ++j)
    for (int i = 0; i < n; ++i) out.emplace_back(-radius + i * step, -radius + j * step);
  return out;
}

std::vector<Complex> exclude_near(std::span<const Complex> points, std::span<const Complex> singular,
                                  double exclusion) {
  std::vector<Complex> out;
  out.reserve(points.size());
  for (const Complex z : points) {
    bool keep = true;
    for (const Complex p : singular)
      if (std::abs(z - p) <= exclusion) {
        keep = false;
        break;
      }
    if (keep) out.push_back(z);
  }
  return out;
}

}  // namespace harmonic_atlas
