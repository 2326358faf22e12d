#include "harmonic_atlas/cli.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <memory>
#include <numbers>
#include <random>
#include <sstream>

#include "CLI11.hpp"

#include "harmonic_atlas/corode.hpp"
#include "harmonic_atlas/field.hpp"
#include "harmonic_atlas/linops.hpp"

namespace harmonic_atlas::cli {

using nlohmann::json;

void Tolerances::override_with(const std::string& assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string::npos) throw InvalidInputError("tolerance override must look like key=value");
  const std::string key = assignment.substr(0, eq);
  if (!values.contains(key)) throw InvalidInputError("unknown tolerance '" + key + "'");
  try {
    std::size_t used = 0;
    const double v = std::stod(assignment.substr(eq + 1), &used);
    if (used != assignment.size() - eq - 1 || !(v > 0.0)) throw std::invalid_argument("bad");
    values[key] = v;
  } catch (const std::exception&) {
    throw InvalidInputError("bad tolerance value in '" + assignment + "'");
  }
}

// ---------------------------------------------------------------------------
// Map descriptors

namespace {

ComplexPolynomial parse_coefficients(const json& doc, const char* name) {
  if (!doc.is_array()) throw InvalidInputError(std::string(name) + " must be an array of [re, im] pairs");
  std::vector<Complex> c;
  for (const auto& pair : doc) {
    if (!pair.is_array() || pair.size() != 2 || !pair[0].is_number() || !pair[1].is_number())
      throw InvalidInputError(std::string(name) + " entries must be [re, im] number pairs");
    const double re = pair[0].get<double>(), im = pair[1].get<double>();
    if (!std::isfinite(re) || !std::isfinite(im)) throw InvalidInputError("non-finite coefficient");
    c.emplace_back(re, im);
  }
  return ComplexPolynomial(std::move(c));
}

json coefficients_json(const ComplexPolynomial& p) {
  json out = json::array();
  for (const Complex c : p.coeffs()) out.push_back({c.real(), c.imag()});
  if (out.empty()) out.push_back({0.0, 0.0});
  return out;
}

}  // namespace

RationalMap parse_map_descriptor(const json& doc) {
  if (!doc.is_object()) throw InvalidInputError("map descriptor must be a JSON object");
  if (!doc.contains("numerator")) throw InvalidInputError("map descriptor needs a numerator");
  const ComplexPolynomial num = parse_coefficients(doc.at("numerator"), "numerator");
  const ComplexPolynomial den = doc.contains("denominator") ? parse_coefficients(doc.at("denominator"), "denominator")
                                                            : ComplexPolynomial::constant(1.0);
  Orientation o = Orientation::holomorphic;
  if (doc.contains("orientation")) {
    if (!doc.at("orientation").is_string()) throw InvalidInputError("orientation must be a string");
    o = orientation_from_string(doc.at("orientation").get<std::string>());
  }
  return reduce(num, den, o);
}

RationalMap parse_map_descriptor_text(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw InvalidInputError(std::string("malformed JSON: ") + e.what());
  }
  return parse_map_descriptor(doc);
}

RationalMap load_map(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InvalidInputError("cannot read map file '" + path + "'");
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_map_descriptor_text(buf.str());
}

json map_descriptor(const RationalMap& f) {
  return {{"numerator", coefficients_json(f.numerator())},
          {"denominator", coefficients_json(f.denominator())},
          {"orientation", to_string(f.orientation())}};
}

int corotational_degree(const RationalMap& f) {
  if (f.orientation() != Orientation::holomorphic || f.denominator().degree() != 0) return 0;
  const int m = f.numerator().degree();
  if (m < 1 || std::abs(f.numerator().leading() - 1.0) > 1e-12) return 0;
  for (int j = 0; j < m; ++j)
    if (std::abs(f.numerator().coefficient(j)) > 1e-12) return 0;
  return m;
}

// ---------------------------------------------------------------------------
// Commands

namespace {

std::string fixed3(double x) {
  if (std::abs(x) < 5e-4) x = 0.0;  // avoid "-0.000"
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.3f", x);
  return buf;
}

double sup_over(const std::vector<Complex>& points, const std::function<double(Complex)>& fn) {
  std::vector<double> values(points.size(), 0.0);
  parallel_for(points.size(), [&](std::size_t i) { values[i] = fn(points[i]); });
  double worst = 0.0;
  for (double v : values) worst = std::max(worst, std::isfinite(v) ? v : std::numeric_limits<double>::infinity());
  return worst;
}

std::vector<Complex> random_points(const HarmonicMapField& F, int count, unsigned long seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> coord(-3.0, 3.0);
  std::vector<Complex> out;
  const auto poles = F.singular_points();
  while (static_cast<int>(out.size()) < count) {
    const Complex z(coord(rng), coord(rng));
    if (exclude_near(std::span<const Complex>(&z, 1), poles, tolerances::kPoleExclusion).empty()) continue;
    out.push_back(z);
  }
  return out;
}

struct CheckList {
  json items = json::array();
  bool all_passed = true;

  void add(const std::string& name, double value, double tolerance, bool passed) {
    items.push_back({{"name", name}, {"value", value}, {"tolerance", tolerance}, {"passed", passed}});
    all_passed = all_passed && passed;
  }
  void below(const std::string& name, double value, double tolerance) {
    add(name, value, tolerance, value < tolerance);
  }
};

json tolerances_json(const Settings& s) {
  json t = s.tol.values;
  t["pole_exclusion"] = tolerances::kPoleExclusion;
  t["boundedness_ceiling"] = kBoundednessCeiling;
  t["quadrature_agreement"] = kQuadratureAgreement;
  return t;
}

json settings_json(const Settings& s) {
  return {{"n_radial", s.n_radial}, {"n_angular", s.n_angular}, {"h0", s.h0},
          {"grid", s.grid},         {"radius", s.radius}};
}

json ode_summary(const ODEReport& rep) {
  json per_case = json::object();
  json directions = json::array();
  for (const auto& d : rep.directions) {
    const std::string key = to_string(classify_case(d.m, d.k));
    const double residual = d.printed_accepted ? d.printed_residual : d.replacement_residual;
    per_case[key] = std::max(per_case.value(key, 0.0), residual);
    directions.push_back({{"k", d.k},
                          {"constant", "C" + std::to_string(d.index)},
                          {"case", key},
                          {"printed_residual", d.printed_residual},
                          {"printed_accepted", d.printed_accepted},
                          {"replaced", d.replaced},
                          {"replacement_residual", d.replacement_residual},
                          {"polar_system_residual", d.consistency_residual},
                          {"zero_field", d.boundedness.zero_field},
                          {"bounded", d.boundedness.bounded()},
                          {"bounded_symbolic", d.boundedness.symbolic},
                          {"bounded_numeric", d.boundedness.numeric},
                          {"sampled_sup", d.boundedness.sup},
                          {"slope_at_zero", d.boundedness.slope0},
                          {"slope_at_infinity", d.boundedness.slopeinf}});
  }
  double polar = 0.0;
  for (const auto& d : rep.directions) polar = std::max(polar, d.consistency_residual);
  return {{"m", rep.m},
          {"per_case_residual_max", per_case},
          {"bounded_counts_per_k", rep.bounded_counts},
          {"bounded_total", rep.bounded_total},
          {"expected_dim", 4 * rep.m + 2},
          {"subspace_angle", rep.subspace_angle},
          {"polar_system_residual_max", polar},
          {"flagged", rep.flagged},
          {"all_accepted_or_replaced", rep.all_accepted_or_replaced},
          {"directions", directions}};
}

void add_ode_checks(const ODEReport& rep, const Settings& s, CheckList& checks) {
  double replacement = 0.0;
  for (const auto& d : rep.directions)
    if (d.replaced) replacement = std::max(replacement, d.replacement_residual);
  double polar = 0.0;
  for (const auto& d : rep.directions) polar = std::max(polar, d.consistency_residual);
  checks.below("ode_replacement_residual", replacement, s.tol["ode_replacement"]);
  checks.add("ode_bounded_total", rep.bounded_total, 4 * rep.m + 2, rep.bounded_total == 4 * rep.m + 2);
  checks.add("ode_k_above_m_bounded", rep.bounded_counts.back(), 0, rep.bounded_counts.back() == 0);
  checks.below("ode_subspace_angle", rep.subspace_angle, s.tol["subspace"]);
  checks.below("ode_polar_system_residual", polar, s.tol["ode_replacement"]);
}

}  // namespace

DegreeResult degree_command(const RationalMap& f, const Settings& s) {
  const HarmonicMapField F(f);
  const QuadratureRule rule(s.n_radial, s.n_angular);
  const Integral d = de_rham_degree(F, rule);
  const int alg = algebraic_degree(f);
  DegreeResult out;
  out.line = "algebraic=" + std::to_string(alg) + " numeric=" + fixed3(d.value);
  if (!d.converged) out.exit_code = kNonConvergence;
  else out.exit_code = std::abs(d.value - alg) < s.tol["degree"] ? kOk : kVerificationFailure;
  return out;
}

Report verify_command(const RationalMap& f, const Settings& s) {
  const auto F = std::make_shared<HarmonicMapField>(f);
  const QuadratureRule rule(s.n_radial, s.n_angular);
  const FDScheme fd{4, s.h0};
  CheckList checks;
  json doc;
  json convergence;

  const int deg = algebraic_degree(f);
  doc["map"] = map_descriptor(f);
  doc["algebraic_degree"] = deg;
  doc["degree_sign_convention"] = degree_convention().name();

  const Integral nd = de_rham_degree(*F, rule);
  doc["numeric_degree"] = nd.value;
  convergence["degree"] = nd.converged;
  checks.below("degree", std::abs(nd.value - deg), s.tol["degree"]);

  const Integral E = total_energy(*F, rule);
  const double target = 4.0 * std::numbers::pi * std::abs(deg);
  const double energy_error = std::abs(E.value - target) / (4.0 * std::numbers::pi * std::max(1, std::abs(deg)));
  doc["total_energy"] = E.value;
  doc["energy_identity_error"] = energy_error;
  convergence["energy"] = E.converged;
  checks.below("energy_identity", energy_error, s.tol["energy"]);

  const EnergyDecomposition dec = energy_decomposition(*F, rule);
  doc["energy_decomposition"] = {{"bogomolny_term", dec.bogomolny_term.value},
                                 {"degree_term", dec.degree_term.value}};
  convergence["energy_decomposition"] = dec.bogomolny_term.converged && dec.degree_term.converged;

  const auto random = random_points(*F, 200, 7);
  const double bog = sup_over(random, [&](Complex z) { return bogomolny_residual(*F, z).norm(); });
  doc["bogomolny_sup"] = bog;
  checks.below("bogomolny", bog, s.tol["bogomolny"]);

  const auto all_grid = cell_centered_grid(s.grid, s.radius);
  const auto poles = F->singular_points();
  const auto grid = exclude_near(all_grid, poles, tolerances::kPoleExclusion);
  const double harm = sup_over(grid, [&](Complex z) { return harmonic_residual(*F, z, fd).norm(); });
  doc["harmonic_residual_sup"] = harm;
  checks.below("harmonic_residual", harm, s.tol["harmonic"]);

  const double cr = sup_over(grid, [&](Complex z) { return std::abs(chart_cr_residual(*F, z, fd)); });
  doc["chart_cr_sup"] = cr;
  checks.below("chart_cr", cr, s.tol["cr"]);

  const KernelBasis basis = general_kernel_basis(F);
  const GramSpectrum gram = gram_spectrum(basis.fields, rule, s.tol["gram"]);
  convergence["gram"] = gram.converged;
  json kernel;
  kernel["constructed_count"] = basis.fields.size();
  kernel["gram_rank"] = gram.rank;
  kernel["expected_dim"] = basis.expected_dim();
  kernel["dimension_consistent"] = gram.rank == basis.expected_dim();
  json labels = json::array(), l1 = json::array(), l = json::array(), claims = json::array();
  double cr_sup = 0.0, l1_sup = 0.0, l_sup = 0.0, claim_sup = 0.0;
  for (const auto& v : basis.fields) {
    const double a = sup_over(grid, [&](Complex z) { return apply_L1(*F, v, z, fd).norm(); });
    const double b = sup_over(grid, [&](Complex z) { return apply_L(*F, v, z, fd).norm(); });
    const double c = sup_over(grid, [&](Complex z) {
      const ClaimResiduals r = claim_residuals(*F, v, z, fd);
      return std::max(std::abs(r.uvy), std::abs(r.uvx));
    });
    const double w = sup_over(grid, [&](Complex z) { return std::abs(cr_of_pushforward(*F, v, z, fd)); });
    labels.push_back(v.provenance().label);
    l1.push_back(a);
    l.push_back(b);
    claims.push_back(c);
    l1_sup = std::max(l1_sup, a);
    l_sup = std::max(l_sup, b);
    claim_sup = std::max(claim_sup, c);
    cr_sup = std::max(cr_sup, w);
  }
  kernel["field_labels"] = labels;
  kernel["per_field_L1_sup"] = l1;
  kernel["per_field_L_sup"] = l;
  kernel["per_field_claim_sup"] = claims;
  kernel["cr_sup"] = cr_sup;
  json eig = json::array();
  for (Eigen::Index i = 0; i < gram.eigenvalues.size(); ++i) eig.push_back(gram.eigenvalues(i));
  kernel["gram_eigenvalues"] = eig;
  doc["kernel"] = kernel;
  checks.add("gram_rank", gram.rank, basis.expected_dim(), gram.rank == basis.expected_dim());
  checks.below("kernel_L1", l1_sup, s.tol["L1"]);
  checks.below("kernel_L", l_sup, s.tol["L"]);
  checks.below("kernel_claims", claim_sup, s.tol["claim"]);
  checks.below("kernel_cr", cr_sup, s.tol["cr"]);

  if (const int m = corotational_degree(f); m > 0) {
    const ODEReport rep = analyse_corotational(m);
    doc["ode"] = ode_summary(rep);
    add_ode_checks(rep, s, checks);
  }

  doc["convergence"] = convergence;
  doc["tolerances"] = tolerances_json(s);
  doc["settings"] = settings_json(s);
  doc["checks"] = checks.items;
  doc["passed"] = checks.all_passed;

  bool converged = true;
  for (const auto& [k, v] : convergence.items()) converged = converged && v.get<bool>();
  Report out{doc, kOk};
  if (!converged) out.exit_code = kNonConvergence;
  else if (!checks.all_passed) out.exit_code = kVerificationFailure;
  return out;
}

Report ode_command(int m, const Settings& s) {
  if (m < 1) throw InvalidInputError("--m must be at least 1");
  const ODEReport rep = analyse_corotational(m);
  CheckList checks;
  add_ode_checks(rep, s, checks);
  for (const auto& d : rep.directions)
    checks.add("printed_form m=" + std::to_string(m) + " k=" + std::to_string(d.k) + " C" + std::to_string(d.index),
               d.printed_residual, s.tol["ode_residual"], d.printed_accepted);
  json doc = ode_summary(rep);
  doc["tolerances"] = tolerances_json(s);
  doc["checks"] = checks.items;
  doc["passed"] = checks.all_passed;
  return {doc, checks.all_passed ? kOk : kVerificationFailure};
}

void write_samples(const RationalMap& f, int n, double radius, std::ostream& out) {
  const HarmonicMapField F(f);
  out << "x,y,u1,u2,u3,energy_density,degree_density\n";
  char buf[512];
  for (const Complex z : corner_grid(n, radius)) {
    const FieldSample s = sample(F, z);
    std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g\n", z.real(), z.imag(), s.u.u1(),
                  s.u.u2(), s.u.u3(), s.energy_density, s.degree_density);
    out << buf;
  }
}

// ---------------------------------------------------------------------------
// Entry point

namespace {

void emit(const std::string& text, const std::string& path) {
  if (path.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream out(path);
  if (!out) throw InvalidInputError("cannot write '" + path + "'");
  out << text;
  if (!out) throw InvalidInputError("failed writing '" + path + "'");
}

}  // namespace

int run(int argc, char** argv) {
  CLI::App app{"Verification of harmonic maps R^2 -> S^2 generated by rational functions"};
  app.require_subcommand(1);

  Settings s;
  std::string map_path, out_path;
  std::vector<std::string> tol_overrides;
  int m = 0;
  int sample_grid = 64;

  auto quadrature_flags = [&](CLI::App* sub) {
    sub->add_option("--nr", s.n_radial, "radial Gauss-Legendre nodes")->check(CLI::PositiveNumber);
    sub->add_option("--ntheta", s.n_angular, "angular nodes")->check(CLI::PositiveNumber);
  };

  auto* degree = app.add_subcommand("degree", "print algebraic and numeric degree");
  degree->add_option("map", map_path, "map descriptor JSON")->required();
  quadrature_flags(degree);

  auto* verify = app.add_subcommand("verify", "run the full verification suite");
  verify->add_option("map", map_path, "map descriptor JSON")->required();
  quadrature_flags(verify);
  verify->add_option("--h0", s.h0, "finite-difference base step")->check(CLI::PositiveNumber);
  verify->add_option("--tol", tol_overrides, "tolerance override key=value (repeatable)");
  verify->add_option("--grid", s.grid, "residual grid size")->check(CLI::PositiveNumber);
  verify->add_option("--radius", s.radius, "residual grid half-width")->check(CLI::PositiveNumber);
  verify->add_option("-o", out_path, "write the report here instead of stdout");

  auto* ode = app.add_subcommand("ode", "angular-mode analysis along S(z^m)");
  ode->add_option("--m", m, "corotational degree")->required()->check(CLI::PositiveNumber);
  ode->add_option("--tol", tol_overrides, "tolerance override key=value (repeatable)");
  ode->add_option("-o", out_path, "write the report here instead of stdout");

  auto* samples = app.add_subcommand("samples", "write field samples as CSV");
  samples->add_option("map", map_path, "map descriptor JSON")->required();
  samples->add_option("--grid", sample_grid, "samples per side")->check(CLI::Range(2, 100000));
  samples->add_option("--radius", s.radius, "grid half-width")->check(CLI::PositiveNumber);
  samples->add_option("-o", out_path, "CSV output path (stdout if omitted)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kInputError;
  }

  try {
    for (const auto& t : tol_overrides) s.tol.override_with(t);
    if (degree->parsed()) {
      const DegreeResult r = degree_command(load_map(map_path), s);
      std::cout << r.line << "\n";
      return r.exit_code;
    }
    if (verify->parsed()) {
      const Report r = verify_command(load_map(map_path), s);
      emit(r.doc.dump(2) + "\n", out_path);
      return r.exit_code;
    }
    if (ode->parsed()) {
      const Report r = ode_command(m, s);
      emit(r.doc.dump(2) + "\n", out_path);
      return r.exit_code;
    }
    if (samples->parsed()) {
      const RationalMap f = load_map(map_path);
      std::ostringstream csv;
      write_samples(f, sample_grid, s.radius, csv);
      emit(csv.str(), out_path);
      return kOk;
    }
  } catch (const InvalidInputError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kInputError;
  } catch (const QuadratureError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kNonConvergence;
  } catch (const NumericalFailureError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kNonConvergence;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kVerificationFailure;
  }
  return kInputError;
}

}  // namespace harmonic_atlas::cli
