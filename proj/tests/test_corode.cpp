#include <cmath>

#include "doctest.h"
#include "harmonic_atlas/corode.hpp"

using namespace harmonic_atlas;

TEST_CASE("jet arithmetic") {
  const double r = 1.7;
  const Jet x = rpow(r, 1.0);
  const Jet f = x * x / (1.0 + x * x);
  // f = r^2 / (1 + r^2): f' = 2r/(1+r^2)^2, f'' = (2 - 6 r^2)/(1+r^2)^3
  CHECK(f.v == doctest::Approx(r * r / (1 + r * r)));
  CHECK(f.d1 == doctest::Approx(2 * r / std::pow(1 + r * r, 2)));
  CHECK(f.d2 == doctest::Approx((2 - 6 * r * r) / std::pow(1 + r * r, 3)));
  const Jet l = rlog(r);
  CHECK(l.d1 == doctest::Approx(1 / r));
  CHECK(l.d2 == doctest::Approx(-1 / (r * r)));
  const Jet p = rpow(r, -2.5);
  CHECK(p.d2 == doctest::Approx(-2.5 * -3.5 * std::pow(r, -4.5)));
}

TEST_CASE("case classification") {
  CHECK(classify_case(2, 0) == ODECase::k_zero);
  CHECK(classify_case(2, 2) == ODECase::k_eq_m);
  CHECK(classify_case(2, 1) == ODECase::k_ne_m);
  CHECK(classify_case(2, 3) == ODECase::k_ne_m);
}

TEST_CASE("dilation profile solves the k=0 equations") {
  const ProfileSet p = closed_form_profiles(ODESolutionFamily::direction(1, 0, 3));
  for (const double r : {0.1, 1.0, 10.0}) {
    CHECK(p.eta1(r) == doctest::Approx(r / (1 + r * r)));
    CHECK(ode_residual(1, 0, p, r).raw.cwiseAbs().maxCoeff() < 1e-8);
  }
}

TEST_CASE("printed k=m forms pass residual acceptance") {
  for (int m = 1; m <= 3; ++m)
    for (int i = 1; i <= 8; ++i) CHECK(max_probe_residual(m, m, closed_form_profiles(ODESolutionFamily::direction(m, m, i))) < kClosedFormAcceptance);
}

TEST_CASE("a failing printed form is replaced by an accurate integration") {
  const DirectionReport d = analyse_direction(1, 2, 4);
  CHECK_FALSE(d.printed_accepted);
  CHECK(d.replaced);
  CHECK(d.replacement_residual < kReplacementAcceptance);
  CHECK(d.consistency_residual < 1e-6);
}

TEST_CASE("bounded directions per mode") {
  CHECK(bounded_filter(1, 0) == std::vector<int>{1, 3});
  CHECK(bounded_filter(2, 1) == std::vector<int>{1, 2, 5, 6});
  CHECK(bounded_filter(2, 2) == std::vector<int>{1, 2, 5, 6});
  CHECK(bounded_filter(1, 2).empty());
}

TEST_CASE("symbolic and numeric boundedness agree") {
  for (int k = 0; k <= 3; ++k)
    for (int i = 1; i <= 8; ++i) {
      const DirectionReport d = analyse_direction(2, k, i);
      CAPTURE(k);
      CAPTURE(i);
      CHECK(d.boundedness.agree());
    }
}

TEST_CASE("the ODE kernel matches the corotational basis") {
  for (int m = 1; m <= 2; ++m) {
    const ODEReport rep = analyse_corotational(m);
    CHECK(rep.bounded_total == 4 * m + 2);
    CHECK(rep.bounded_counts.back() == 0);
    CHECK(rep.subspace_angle < 1e-6);
    CHECK(rep.all_accepted_or_replaced);
    CHECK_FALSE(rep.flagged.empty());
  }
}
