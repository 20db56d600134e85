#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "truncpoly/basis.hpp"
#include "truncpoly/rng.hpp"

using namespace truncpoly;

namespace {

double binomial(int n, int k) {
  double r = 1.0;
  for (int j = 1; j <= k; ++j) r *= static_cast<double>(n - k + j) / j;
  return r;
}

Vec point(std::initializer_list<double> vals) {
  Vec x(static_cast<int>(vals.size()));
  int i = 0;
  for (double v : vals) x[i++] = v;
  return x;
}

}  // namespace

TEST_CASE("canonical ordering d=1 k=3") {
  MonomialBasis b(1, 3);
  REQUIRE(b.size() == 3);
  CHECK(b.indices()[0].exponents == std::vector<int>{1});
  CHECK(b.indices()[1].exponents == std::vector<int>{2});
  CHECK(b.indices()[2].exponents == std::vector<int>{3});
}

TEST_CASE("canonical ordering d=2 k=2") {
  MonomialBasis b(2, 2);
  REQUIRE(b.size() == 5);
  std::vector<std::vector<int>> expected{{0, 1}, {0, 2}, {1, 0}, {1, 1}, {2, 0}};
  for (int i = 0; i < 5; ++i) CHECK(b.indices()[i].exponents == expected[i]);
}

TEST_CASE("basis count is C(d+k,k)-1") {
  for (int d = 1; d <= 6; ++d)
    for (int k = 1; k <= 10; ++k) {
      MonomialBasis b(d, k);
      CHECK(b.size() == static_cast<int>(std::lround(binomial(d + k, k))) - 1);
    }
}

TEST_CASE("monomial profile values") {
  MonomialBasis b1(1, 2);
  Vec p = b1.profile(point({0.5}));
  CHECK(p[0] == doctest::Approx(0.5));
  CHECK(p[1] == doctest::Approx(0.25));
  CHECK(b1.profile(point({0.0})).cwiseAbs().maxCoeff() == 0.0);

  MonomialBasis b2(2, 1);
  Vec q = b2.profile(point({1.0, 1.0}));
  CHECK(q[0] == 1.0);
  CHECK(q[1] == 1.0);

  CHECK_THROWS_AS(b1.profile(point({0.1, 0.2})), std::invalid_argument);
}

TEST_CASE("polynomial evaluation") {
  auto basis = make_basis(1, 2);
  PolyCoeffs zero(basis, Vec::Zero(2));
  CHECK(zero(point({0.7})) == 0.0);

  PolyCoeffs p(basis, point({1.0, -1.0}));
  CHECK(p(point({0.5})) == doctest::Approx(0.25));
  CHECK(p(point({0.0})) == 0.0);

  CHECK_THROWS_AS(PolyCoeffs(basis, Vec::Zero(3)), std::invalid_argument);
}

TEST_CASE("evaluation is linear in coefficients") {
  auto basis = make_basis(2, 3);
  Rng rng(1, Rng::hash_tag("linearity"));
  Vec v1(basis->size()), v2(basis->size());
  for (int i = 0; i < basis->size(); ++i) {
    v1[i] = rng.uniform(-1, 1);
    v2[i] = rng.uniform(-1, 1);
  }
  for (int trial = 0; trial < 50; ++trial) {
    Vec x = point({rng.uniform(), rng.uniform()});
    double a = rng.uniform(-2, 2), b = rng.uniform(-2, 2);
    double combined = PolyCoeffs(basis, a * v1 + b * v2)(x);
    double split = a * PolyCoeffs(basis, v1)(x) + b * PolyCoeffs(basis, v2)(x);
    CHECK(combined == doctest::Approx(split).epsilon(1e-12));
  }
}

TEST_CASE("multi-index factorial") {
  CHECK(multi_index_factorial({{0, 0}}) == 1);
  CHECK(multi_index_factorial({{2, 3}}) == 12);
  CHECK(multi_index_factorial({{1, 1, 1}}) == 1);
  CHECK(static_cast<double>(multi_index_factorial({{10, 3}})) ==
        doctest::Approx(3628800.0 * 6.0));
  CHECK_THROWS_AS(multi_index_factorial({{40}}), std::overflow_error);
  CHECK_THROWS_AS(multi_index_factorial({{-1}}), std::invalid_argument);
}

TEST_CASE("coefficient l1 bound") {
  CHECK(coeff_l1_bound(1.0, 1, 1) == doctest::Approx(64.0));
  CHECK(coeff_l1_bound(2.0, 1, 1) == doctest::Approx(128.0));
  CHECK(coeff_l1_bound(1.0, 2, 2) == doctest::Approx(262144.0));
  CHECK_THROWS_AS(coeff_l1_bound(0.0, 1, 1), std::invalid_argument);
}

TEST_CASE("sup norm on simple polynomials") {
  auto b1 = make_basis(1, 1);
  SupNormResult zero = poly_sup_norm(PolyCoeffs(b1, Vec::Zero(1)), 1e-8);
  CHECK(zero.value == 0.0);

  SupNormResult slope = poly_sup_norm(PolyCoeffs(b1, Vec::Constant(1, 2.0)), 1e-8);
  CHECK(slope.value == doctest::Approx(2.0).epsilon(1e-8));
  CHECK(slope.argmax[0] == doctest::Approx(1.0).epsilon(1e-6));

  auto b2 = make_basis(1, 2);
  SupNormResult parab = poly_sup_norm(PolyCoeffs(b2, point({1.0, -1.0})), 1e-8);
  CHECK(parab.value == doctest::Approx(0.25).epsilon(1e-7));
  CHECK(parab.argmax[0] == doctest::Approx(0.5).epsilon(1e-3));
}

TEST_CASE("sup norm dominates sampled values") {
  Rng rng(7, Rng::hash_tag("supnorm_soundness"));
  for (int d : {1, 2}) {
    auto basis = make_basis(d, 3);
    Vec v(basis->size());
    for (int i = 0; i < basis->size(); ++i) v[i] = rng.uniform(-1, 1);
    PolyCoeffs p(basis, v);
    double sup = poly_sup_norm(p, 1e-6).value;
    Vec x(d);
    for (int trial = 0; trial < 1000; ++trial) {
      for (int i = 0; i < d; ++i) x[i] = rng.uniform();
      CHECK(sup + 1e-6 >= std::abs(p(x)));
    }
  }
}

TEST_CASE("l1 norm of bounded polynomials stays below the guaranteed bound") {
  Rng rng(11, Rng::hash_tag("l1_bound"));
  for (int trial = 0; trial < 20; ++trial) {
    int d = 1 + trial % 2;
    int k = 1 + static_cast<int>(rng.uniform() * 4);
    auto basis = make_basis(d, k);
    Vec v(basis->size());
    for (int i = 0; i < basis->size(); ++i) v[i] = rng.uniform(-1, 1);
    PolyCoeffs p(basis, v);
    double sup = poly_sup_norm(p, 1e-8).value;
    if (sup == 0.0) continue;
    double B = 1.0;
    p.v *= B / sup;
    CHECK(p.v.cwiseAbs().sum() <= coeff_l1_bound(B, d, k));
  }
}
