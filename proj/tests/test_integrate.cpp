#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <fstream>
#include <json.hpp>

#include "oracle.hpp"
#include "truncpoly/integrate.hpp"
#include "truncpoly/rng.hpp"

using namespace truncpoly;

namespace {

nlohmann::json load_fixture() {
  std::ifstream in(FIXTURE_DIR "/example1d.json");
  REQUIRE(in.good());
  return nlohmann::json::parse(in);
}

}  // namespace

TEST_CASE("Gauss-Legendre nodes integrate high-degree monomials exactly") {
  std::vector<double> nodes, weights;
  for (int n : {2, 4, 8, 16}) {
    gauss_legendre_nodes(n, nodes, weights);
    // int_{-1}^{1} x^{2n-2} = 2 / (2n-1), the highest even power still exact
    double sum = 0.0;
    for (int i = 0; i < n; ++i) sum += weights[i] * std::pow(nodes[i], 2 * n - 2);
    CHECK(sum == doctest::Approx(2.0 / (2 * n - 1)).epsilon(1e-12));
  }
}

TEST_CASE("box integration basics") {
  auto one = [](const Vec&) { return 1.0; };
  CHECK(integrate_box(one, 1, QuadratureSpec::gl(32)).value == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(integrate_box(one, 2, QuadratureSpec::tensor(32)).value ==
        doctest::Approx(1.0).epsilon(1e-12));
  auto linear = [](const Vec& x) { return x[0]; };
  CHECK(integrate_box(linear, 1, QuadratureSpec::gl(32)).value ==
        doctest::Approx(0.5).epsilon(1e-12));
}

TEST_CASE("exp(sin(10x)) over the box matches the committed oracle value") {
  auto fixture = load_fixture();
  auto g = [](const Vec& x) { return std::exp(std::sin(10.0 * x[0])); };
  IntegralResult r = integrate_box(g, 1, QuadratureSpec::gl(64));
  CHECK(r.value == doctest::Approx(fixture["exp_sin10_integral_box"].get<double>()).epsilon(1e-10));
}

TEST_CASE("set integration over intervals") {
  SurvivalSet half = SurvivalSet::intervals({{0.0, 0.5}});
  auto one = [](const Vec&) { return 1.0; };
  CHECK(integrate_set(one, half, QuadratureSpec::gl(64)).value ==
        doctest::Approx(0.5).epsilon(1e-13));

  auto fixture = load_fixture();
  auto g = [](const Vec& x) { return std::exp(std::sin(10.0 * x[0])); };
  CHECK(integrate_set(g, half, QuadratureSpec::gl(64)).value ==
        doctest::Approx(fixture["exp_sin10_integral_half"].get<double>()).epsilon(1e-10));
}

TEST_CASE("half-cube membership set in d=2") {
  SurvivalSet S = SurvivalSet::from_membership(
      2, [](const Vec& x) { return x[0] <= 0.5; }, 1 << 16, 42);
  CHECK(std::abs(S.volume_estimate() - 0.5) <= 3.0 * S.volume_stderr());
  auto one = [](const Vec&) { return 1.0; };
  IntegralResult r = integrate_set(one, S, QuadratureSpec::mc(1 << 16, 7));
  CHECK(std::abs(r.value - 0.5) <= 3.0 * r.error_estimate);
}

TEST_CASE("membership-only 1-D sets are bracketed into intervals") {
  SurvivalSet S = SurvivalSet::from_membership(
      1, [](const Vec& x) { return x[0] >= 0.25 && x[0] <= 0.75; }, 1 << 12, 3);
  REQUIRE(S.exact_1d().has_value());
  REQUIRE(S.exact_1d()->size() == 1);
  CHECK((*S.exact_1d())[0].a == doctest::Approx(0.25).epsilon(1e-9));
  CHECK((*S.exact_1d())[0].b == doctest::Approx(0.75).epsilon(1e-9));
  CHECK(S.volume_estimate() == doctest::Approx(0.5).epsilon(1e-8));
  CHECK(S.volume_stderr() == 0.0);
}

TEST_CASE("interval validation") {
  CHECK_THROWS_AS(SurvivalSet::intervals({{0.5, 0.4}}), std::invalid_argument);
  CHECK_THROWS_AS(SurvivalSet::intervals({{-0.1, 0.5}}), std::invalid_argument);
  CHECK_THROWS_AS(SurvivalSet::intervals({{0.0, 0.6}, {0.5, 1.0}}), std::invalid_argument);
}

TEST_CASE("volume estimation") {
  SurvivalSet half = SurvivalSet::intervals({{0.0, 0.5}});
  VolumeEstimate exact = estimate_volume(half, 1000, 5);
  CHECK(exact.value == 0.5);
  CHECK(exact.std_error == 0.0);

  VolumeEstimate cube = estimate_volume(SurvivalSet::cube(2), 1000, 5);
  CHECK(cube.value == 1.0);
  CHECK(cube.std_error == 0.0);

  Vec center = Vec::Constant(2, 0.5);
  SurvivalSet quarter_ball = SurvivalSet::ball(2, center, 0.25);
  VolumeEstimate v = estimate_volume(quarter_ball, 1 << 18, 9);
  CHECK(std::abs(v.value - M_PI / 16.0) <= 3.0 * v.std_error);
  SurvivalSet half_ball = SurvivalSet::ball(2, center, 0.5);
  VolumeEstimate w = estimate_volume(half_ball, 1 << 18, 9);
  CHECK(std::abs(w.value - M_PI / 4.0) <= 3.0 * w.std_error);

  CHECK_THROWS_AS(estimate_volume(half, 50, 5), std::invalid_argument);
}

TEST_CASE("linearity and monotonicity") {
  auto g = [](const Vec& x) { return std::sin(3.0 * x[0]); };
  auto h = [](const Vec& x) { return std::exp(x[0]); };
  QuadratureSpec spec = QuadratureSpec::gl(32);
  double combined =
      integrate_box([&](const Vec& x) { return 2.0 * g(x) - 3.0 * h(x); }, 1, spec).value;
  double split = 2.0 * integrate_box(g, 1, spec).value - 3.0 * integrate_box(h, 1, spec).value;
  CHECK(combined == doctest::Approx(split).epsilon(1e-10));

  SurvivalSet part = SurvivalSet::intervals({{0.1, 0.4}, {0.6, 0.9}});
  double on_set = integrate_set(h, part, spec).value;
  double on_box = integrate_box(h, 1, spec).value;
  CHECK(on_set <= on_box + 1e-12);
}

TEST_CASE("exp of a bounded polynomial is volume-sandwiched") {
  Rng rng(13, Rng::hash_tag("volume_sandwich"));
  SurvivalSet S = SurvivalSet::intervals({{0.2, 0.7}});
  for (int trial = 0; trial < 10; ++trial) {
    double a = rng.uniform(-1, 1), b = rng.uniform(-1, 1);
    auto p = [a, b](const Vec& x) { return a * x[0] + b * x[0] * x[0]; };
    double sup = 0.0;
    for (int i = 0; i <= 1000; ++i) {
      Vec x(1);
      x[0] = i / 1000.0;
      sup = std::max(sup, std::abs(p(x)));
    }
    double integral =
        integrate_set([&](const Vec& x) { return std::exp(p(x)); }, S, QuadratureSpec::gl(64))
            .value;
    double vol = S.volume_estimate();
    CHECK(integral >= std::exp(-sup) * vol - 1e-10);
    CHECK(integral <= std::exp(sup) * vol + 1e-10);
  }
}

TEST_CASE("Simpson oracle agrees with Gauss-Legendre on a smooth integrand") {
  auto g = [](double x) { return std::exp(std::sin(10.0 * x)); };
  double simpson = oracle::simpson(g, 0.0, 1.0);
  double gl = integrate_box([&](const Vec& x) { return g(x[0]); }, 1, QuadratureSpec::gl(64)).value;
  CHECK(gl == doctest::Approx(simpson).epsilon(1e-11));
}
