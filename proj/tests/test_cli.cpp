#include <numbers>
#include <sstream>
#include <string>

#include "doctest.h"
#include "harmonic_atlas/cli.hpp"

using namespace harmonic_atlas;
using namespace harmonic_atlas::cli;
using nlohmann::json;

namespace {
const std::string kData = HARMONIC_ATLAS_TEST_DATA;

std::vector<std::string> lines(const std::string& s) {
  std::vector<std::string> out;
  std::istringstream in(s);
  for (std::string l; std::getline(in, l);) out.push_back(l);
  return out;
}
}  // namespace

TEST_CASE("descriptor parsing") {
  const RationalMap f = parse_map_descriptor_text(R"({"numerator": [[1,0],[0,0],[1,0]], "denominator": [[0,0],[1,0]]})");
  CHECK(f.numerator().degree() == 2);
  CHECK(f.orientation() == Orientation::holomorphic);
  CHECK(parse_map_descriptor_text(R"({"numerator": [[0,0],[1,0]], "orientation": "antiholomorphic"})").orientation() ==
        Orientation::antiholomorphic);
  CHECK_THROWS_AS(parse_map_descriptor_text("{"), InvalidInputError);
  CHECK_THROWS_AS(parse_map_descriptor_text(R"({"numerator": [[1]]})"), InvalidInputError);
  CHECK_THROWS_AS(parse_map_descriptor_text(R"({"numerator": [[1,0]], "denominator": []})"), InvalidInputError);
  CHECK_THROWS_AS(parse_map_descriptor_text(R"({"numerator": [[1,0]], "orientation": "up"})"), InvalidInputError);
  CHECK_THROWS_AS(load_map(kData + "/does_not_exist.json"), InvalidInputError);
}

TEST_CASE("descriptor round trip") {
  const RationalMap f = load_map(kData + "/z_plus_inv_z.json");
  const RationalMap g = parse_map_descriptor(map_descriptor(f));
  REQUIRE(g.numerator().degree() == f.numerator().degree());
  REQUIRE(g.denominator().degree() == f.denominator().degree());
  for (int j = 0; j <= f.numerator().degree(); ++j)
    CHECK(std::abs(g.numerator().coefficient(j) - f.numerator().coefficient(j)) < 1e-12);
  for (int j = 0; j <= f.denominator().degree(); ++j)
    CHECK(std::abs(g.denominator().coefficient(j) - f.denominator().coefficient(j)) < 1e-12);
}

TEST_CASE("tolerance overrides") {
  Tolerances t;
  t.override_with("gram=1e-9");
  CHECK(t["gram"] == 1e-9);
  CHECK_THROWS_AS(t.override_with("gram"), InvalidInputError);
  CHECK_THROWS_AS(t.override_with("nope=1"), InvalidInputError);
  CHECK_THROWS_AS(t.override_with("gram=abc"), InvalidInputError);
  CHECK_THROWS_AS(t.override_with("gram=-1"), InvalidInputError);
}

TEST_CASE("corotational degree detection") {
  CHECK(corotational_degree(load_map(kData + "/z2.json")) == 2);
  CHECK(corotational_degree(load_map(kData + "/z_plus_inv_z.json")) == 0);
  CHECK(corotational_degree(load_map(kData + "/conj_z.json")) == 0);
}

TEST_CASE("degree command lines") {
  const Settings s;
  CHECK(degree_command(load_map(kData + "/z_plus_inv_z.json"), s).line == "algebraic=2 numeric=2.000");
  CHECK(degree_command(load_map(kData + "/conj_z.json"), s).line == "algebraic=-1 numeric=-1.000");
  const DegreeResult c = degree_command(load_map(kData + "/constant.json"), s);
  CHECK(c.line == "algebraic=0 numeric=0.000");
  CHECK(c.exit_code == kOk);
}

TEST_CASE("verify report for z") {
  const Report r = verify_command(load_map(kData + "/z.json"), Settings{});
  CHECK(r.exit_code == kOk);
  CHECK(r.doc["kernel"]["gram_rank"] == 6);
  CHECK(r.doc["kernel"]["expected_dim"] == 6);
  CHECK(r.doc["kernel"]["dimension_consistent"] == true);
  CHECK(r.doc["total_energy"].get<double>() == doctest::Approx(4.0 * std::numbers::pi).epsilon(1e-10));
  CHECK(r.doc.contains("ode"));
  CHECK(r.doc["tolerances"]["gram"] == 1e-8);
}

TEST_CASE("verify fails honestly under an impossible tolerance") {
  Settings s;
  s.tol.override_with("harmonic=1e-30");
  const Report r = verify_command(load_map(kData + "/inv_z.json"), s);
  CHECK(r.exit_code == kVerificationFailure);
  CHECK_FALSE(r.doc.contains("ode"));
}

TEST_CASE("ode command flags printed forms") {
  const Report r = ode_command(1, Settings{});
  CHECK(r.exit_code == kVerificationFailure);
  CHECK(r.doc["bounded_total"] == 6);
  CHECK(r.doc["subspace_angle"].get<double>() < 1e-6);
  CHECK_THROWS_AS(ode_command(0, Settings{}), InvalidInputError);
}

TEST_CASE("samples CSV") {
  std::ostringstream out;
  write_samples(load_map(kData + "/z.json"), 3, 4.0, out);
  const auto l = lines(out.str());
  REQUIRE(l.size() == 10);
  CHECK(l[0] == "x,y,u1,u2,u3,energy_density,degree_density");
  CHECK(l[5].rfind("0,0,0,0,-1,", 0) == 0);
}

TEST_CASE("samples give a crude degree with the right sign") {
  for (const auto& [name, sign] : {std::pair{"z2.json", 1}, std::pair{"conj_z.json", -1}}) {
    std::ostringstream out;
    const int n = 201;
    const double R = 8.0;
    write_samples(load_map(kData + "/" + name), n, R, out);
    double sum = 0.0;
    const double cell = (2 * R / (n - 1)) * (2 * R / (n - 1));
    auto l = lines(out.str());
    for (std::size_t i = 1; i < l.size(); ++i) sum += std::stod(l[i].substr(l[i].rfind(',') + 1)) * cell;
    CHECK(sum * sign > 0.5);
  }
}

TEST_CASE("run maps errors to exit codes") {
  auto call = [](std::vector<std::string> args) {
    std::vector<char*> argv;
    for (auto& a : args) argv.push_back(a.data());
    return run(static_cast<int>(argv.size()), argv.data());
  };
  CHECK(call({"harmonic_atlas", "degree", kData + "/malformed.json"}) == kInputError);
  CHECK(call({"harmonic_atlas", "degree", kData + "/missing.json"}) == kInputError);
  CHECK(call({"harmonic_atlas", "ode", "--m", "0"}) == kInputError);
  CHECK(call({"harmonic_atlas", "bogus"}) == kInputError);
  CHECK(call({"harmonic_atlas", "degree", kData + "/z.json"}) == kOk);
}
