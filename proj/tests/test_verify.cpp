#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "truncpoly/verify.hpp"

using namespace truncpoly;

TEST_CASE("multi-index remainder sums") {
  // d=1, k=1: sum over beta with |beta| = 2 of 1/beta! = 1/2; bound 15^2
  CheckReport r = check_multiindex_sum(1, 1);
  CHECK(r.passed);
  CHECK(r.observed == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(r.bound == doctest::Approx(225.0).epsilon(1e-12));

  // d=2, k=2: |beta| = 3 -> sum = 2*(1/6) + 2*(1/2) + 2*(1/2)... enumerate:
  // (3,0),(0,3): 1/6 each; (2,1),(1,2): 1/2 each -> total 4/3
  CheckReport r2 = check_multiindex_sum(2, 2);
  CHECK(r2.passed);
  CHECK(r2.observed == doctest::Approx(4.0 / 3.0).epsilon(1e-12));
}

TEST_CASE("Taylor remainder checks") {
  // a linear function is its own Taylor polynomial for k >= 1
  PolyCoeffs lin(make_basis(1, 1), Vec::Constant(1, 0.6));
  CheckReport r = check_taylor_remainder(poly_target(lin), 2, 1024);
  CHECK(r.passed);
  CHECK(r.observed <= 1e-12);

  // sin(10x): derivatives bounded by 10^r, so M = 10; k = 30 makes the
  // remainder bound (150/30)^31 * ... hold with a huge margin
  CheckReport s = check_taylor_remainder(sin10_target(), 30, 1024);
  CHECK(s.passed);

  // e^x has M = 1; k = 6 is comfortably inside the regime
  CheckReport e = check_taylor_remainder(exp_scaled_target(1.0), 6, 1024);
  CHECK(e.passed);
  CHECK(e.observed <= 1e-3);
}

TEST_CASE("anti-concentration scaling is stable for a linear polynomial") {
  PolyCoeffs p(make_basis(1, 1), Vec::Constant(1, 1.0));
  CheckReport r = check_carbery_wright_scaling(p, {0.01, 0.03, 0.1, 0.3},
                                               QuadratureSpec::mc(1 << 20, 5));
  CHECK(r.passed);
  // for p = x the constant vol{|p|<=g}*||p||_2 / g is exactly ||p||_2 at
  // every gamma, so the max/min ratio is ~1
  CHECK(r.observed <= 1.2);
}

TEST_CASE("distortion lower bound on a fixed pair") {
  auto basis = make_basis(1, 1);
  PolyCoeffs p(basis, Vec::Constant(1, 1.0));
  PolyCoeffs q(basis, Vec::Constant(1, -1.0));
  SurvivalSet S = SurvivalSet::intervals({{0.0, 0.5}});
  CheckReport r = check_distortion_lower(p, q, S, 1.0, QuadratureSpec::gl(64));
  CHECK(r.passed);
  CHECK(r.note.rfind("skipped", 0) != 0);

  // identical pair: TV on S vanishes, so the ratio is undefined and skipped
  CheckReport skip = check_distortion_lower(p, p, S, 1.0, QuadratureSpec::gl(64));
  CHECK(skip.passed);
  CHECK(skip.note.find("skipped") != std::string::npos);
}

TEST_CASE("Pinsker suite on explicit pairs") {
  QuadratureSpec spec = QuadratureSpec::gl(64);
  SurvivalSet box = SurvivalSet::cube(1);
  TruncatedDensity uniform(zero_target(1), box, spec);
  PolyCoeffs lin(make_basis(1, 1), Vec::Constant(1, 1.0));
  TruncatedDensity expx(lin, box, spec);
  std::vector<DensityPair> pairs;
  pairs.emplace_back(uniform, uniform);
  pairs.emplace_back(uniform, expx);
  CheckReport r = check_pinsker_suite(pairs, spec);
  CHECK(r.passed);
  CHECK(r.observed <= 1e-6);
}

TEST_CASE("KL vs sup-norm distance") {
  QuadratureSpec spec = QuadratureSpec::gl(64);
  SurvivalSet S = SurvivalSet::intervals({{0.0, 0.5}});
  std::vector<std::pair<LogDensity, LogDensity>> pairs;
  pairs.emplace_back(sin10_target(), zero_target(1));
  pairs.emplace_back(zero_target(1), exp_scaled_target(0.5));
  CheckReport r = check_kl_supnorm(pairs, S, spec);
  CHECK(r.passed);
}

TEST_CASE("suite registry") {
  auto names = suite_names();
  CHECK(names.size() >= 6);
  for (const char* expected :
       {"carbery_wright", "distortion", "kl_supnorm", "multiindex", "pinsker", "taylor"})
    CHECK(std::find(names.begin(), names.end(), expected) != names.end());

  auto pinsker = run_suite("pinsker");
  REQUIRE(pinsker.size() >= 1);
  for (const auto& r : pinsker) CHECK(r.passed);

  CHECK_THROWS_AS(run_suite("no_such_suite"), std::invalid_argument);
  try {
    run_suite("no_such_suite");
  } catch (const std::invalid_argument& e) {
    CHECK(std::string(e.what()).find("pinsker") != std::string::npos);
  }
}

TEST_CASE("the full verification battery passes") {
  auto reports = run_suite("");
  CHECK(reports.size() >= 6);
  for (const auto& r : reports) {
    INFO(r.name, ": observed=", r.observed, " bound=", r.bound);
    CHECK(r.passed);
    CHECK(r.margin == doctest::Approx(r.bound - r.observed).epsilon(1e-12));
    CHECK(!r.config_digest.empty());
  }
}
