#pragma once

#include <iosfwd>
#include <map>
#include <string>

#include "json.hpp"

#include "harmonic_atlas/rational.hpp"

namespace harmonic_atlas::cli {

enum ExitCode : int { kOk = 0, kVerificationFailure = 1, kInputError = 2, kNonConvergence = 3 };

/// Pass/fail thresholds used by `verify`; every entry can be overridden with
/// --tol key=value and is echoed in the report.
struct Tolerances {
  std::map<std::string, double> values{
      {"degree", 1e-3},          {"energy", 1e-6},        {"bogomolny", 1e-10},
      {"harmonic", 1e-5},        {"L1", 1e-6},            {"L", 1e-5},
      {"claim", 1e-6},           {"cr", 1e-5},            {"gram", 1e-8},
      {"ode_residual", 1e-8},    {"ode_replacement", 1e-6}, {"subspace", 1e-6},
  };

  double operator[](const std::string& key) const { return values.at(key); }
  /// Parses "key=value"; throws InvalidInputError on unknown keys or bad numbers.
  void override_with(const std::string& assignment);
};

struct Settings {
  int n_radial = 200;
  int n_angular = 256;
  double h0 = 1e-3;
  int grid = 64;
  double radius = 4.0;
  Tolerances tol;
};

/// {"numerator": [[re, im], ...], "denominator": [...], "orientation": "..."}
/// with ascending powers. A missing denominator means 1; a missing orientation
/// means holomorphic. Throws InvalidInputError.
RationalMap parse_map_descriptor(const nlohmann::json& doc);
RationalMap parse_map_descriptor_text(const std::string& text);
RationalMap load_map(const std::string& path);
nlohmann::json map_descriptor(const RationalMap& f);

/// m for f = z^m (m >= 1, holomorphic), where the angular-mode analysis applies; 0 otherwise.
int corotational_degree(const RationalMap& f);

struct DegreeResult {
  std::string line;  // "algebraic=2 numeric=2.000"
  int exit_code = kOk;
};
DegreeResult degree_command(const RationalMap& f, const Settings& s);

struct Report {
  nlohmann::json doc;
  int exit_code = kOk;
};
Report verify_command(const RationalMap& f, const Settings& s);
Report ode_command(int m, const Settings& s);

/// CSV of samples on an N x N grid with corners on [-R, R]^2.
void write_samples(const RationalMap& f, int n, double radius, std::ostream& out);

/// Entry point of the harmonic_atlas executable.
int run(int argc, char** argv);

}  // namespace harmonic_atlas::cli
