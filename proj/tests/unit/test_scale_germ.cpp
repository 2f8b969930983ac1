#include <cmath>
#include <numbers>
#include <random>
#include <string>

#include "doctest.h"
#include "fracsurf/errors.hpp"
#include "fracsurf/germ.hpp"
#include "fracsurf/partition.hpp"
#include "fracsurf/scale_field.hpp"
#include "oracles.hpp"

using namespace fracsurf;

namespace {
const Rect unit{0, 1, 0, 1};
const double pi = std::numbers::pi;
}  // namespace

TEST_CASE("constant scale field") {
  const ScaleField s = ScaleField::constant(-0.4);
  CHECK(s.sup_bound() == doctest::Approx(0.4));
  CHECK(s.lip_bound() == 0.0);
  CHECK(s(3, 7, 0.2, 0.9) == -0.4);
  CHECK(s.scaled(0.5)(1, 1, 0, 0) == doctest::Approx(-0.2));
  CHECK(s.scaled(0.5).sup_bound() == doctest::Approx(0.2));
}

TEST_CASE("sup >= 1 is refused with the documented message") {
  try {
    (void)ScaleField::constant(1.0);
    FAIL("expected DomainError");
  } catch (const DomainError& e) {
    CHECK(std::string(e.what()).find("scale field must satisfy sup < 1") != std::string::npos);
  }
  CHECK_THROWS_AS((void)ScaleField::constant(0.3).with_bounds(1.0, std::nullopt), DomainError);
  CHECK_THROWS_AS((void)ScaleField::constant(0.3).with_bounds(0.2, std::nullopt), DomainError);
  CHECK(ScaleField::constant(0.3).with_bounds(0.5, 2.0).sup_bound() == 0.5);
}

TEST_CASE("affine scale field takes its sup at a corner") {
  const ScaleField s = ScaleField::affine(0.1, 0.2, -0.3, {0, 1, 0, 2});
  CHECK(s(1, 1, 0.5, 0.5) == doctest::Approx(0.1 + 0.1 - 0.15));
  CHECK(s(4, 2, 0.5, 0.5) == s(1, 1, 0.5, 0.5));
  // corners: 0.1, 0.3, -0.5, -0.3
  CHECK(s.sup_bound() == doctest::Approx(0.5));
  CHECK(s.lip_bound() == doctest::Approx(std::hypot(0.2, 0.3)));
  CHECK_THROWS_AS((void)ScaleField::affine(0.5, 0.6, 0.0, unit), DomainError);
}

TEST_CASE("per-cell table, tail cells inherit the last row and column") {
  const ScaleField s = ScaleField::per_cell({{0.1, 0.2}, {0.3, -0.4}});
  CHECK(s(1, 1, 0, 0) == 0.1);
  CHECK(s(1, 2, 0, 0) == 0.2);
  CHECK(s(2, 1, 0, 0) == 0.3);
  CHECK(s(9, 9, 0, 0) == -0.4);
  CHECK(s(1, 9, 0, 0) == 0.2);
  CHECK(s.sup_bound() == doctest::Approx(0.4));
  CHECK_THROWS_AS((void)ScaleField::per_cell({{0.1}, {0.2, 0.3}}), DomainError);
}

TEST_CASE("polynomial and trig germs") {
  const Germ p = Germ::polynomial({{2.0, 2, 1}, {-1.0, 0, 0}}, unit);
  CHECK(p(0.5, 0.5) == doctest::Approx(2.0 * 0.25 * 0.5 - 1.0));
  const Germ t = Germ::trig_product(2.0, pi, 0.0, 2.0 * pi, 0.5);
  CHECK(t(0.25, 0.1) == doctest::Approx(2.0 * std::sin(pi * 0.25) * std::sin(2.0 * pi * 0.1 + 0.5)));

  // Empirical Lipschitz quotients stay below the advertised bounds.
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (const Germ* g : {&p, &t}) {
    for (int k = 0; k < 500; ++k) {
      const double x0 = u(rng), y0 = u(rng), x1 = u(rng), y1 = u(rng);
      const double d = std::hypot(x1 - x0, y1 - y0);
      if (d < 1e-9) continue;
      CHECK(std::abs((*g)(x1, y1) - (*g)(x0, y0)) <= g->lipschitz() * d + 1e-12);
    }
  }
}

TEST_CASE("tabulated germ reproduces its nodes and interpolates bilinearly") {
  std::vector<double> values{0, 1, 2, 3, 4, 5};  // 3 x 2
  const Germ g = Germ::tabulated({0, 2, 0, 1}, 3, 2, values);
  CHECK(g(0, 0) == 0.0);
  CHECK(g(2, 0) == 2.0);
  CHECK(g(1, 1) == 4.0);
  CHECK(g(0.5, 0.5) == doctest::Approx(0.25 * (0 + 1 + 3 + 4)));
  CHECK(g(2, 1) == 5.0);
}

TEST_CASE("knot-vanishing germ is zero at every knot, tail included") {
  const Partition part = make_partition({unit, AxisGenerator::geometric(0.5), AxisGenerator::geometric(0.6)});
  const Germ g = Germ::knot_vanishing(part, 1.5);
  for (std::size_t i = 0; i < 40; ++i) {
    const double xi = oracle::geometric_knot(0, 1, 0.5, i);
    const double yi = oracle::geometric_knot(0, 1, 0.6, i);
    CHECK(std::abs(g(xi, 0.3)) <= 1e-12);
    CHECK(std::abs(g(0.3, yi)) <= 1e-12);
  }
  CHECK(g(1.0, 0.3) == 0.0);
  CHECK(std::abs(g(0.25, 0.2)) > 0.1);

  std::mt19937_64 rng(9);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int k = 0; k < 2000; ++k) {
    const double x0 = u(rng), y0 = u(rng);
    const double x1 = std::min(1.0, x0 + 1e-4 * u(rng)), y1 = std::min(1.0, y0 + 1e-4 * u(rng));
    const double d = std::hypot(x1 - x0, y1 - y0);
    if (d < 1e-12) continue;
    CHECK(std::abs(g(x1, y1) - g(x0, y0)) <= g.lipschitz() * d + 1e-12);
  }
}

TEST_CASE("germ arithmetic") {
  const Germ a = Germ::constant(2.0);
  const Germ b = Germ::trig_product(1.0, pi, 0, pi, 0);
  CHECK((a + b)(0.5, 0.5) == doctest::Approx(3.0));
  CHECK((a - b)(0.5, 0.5) == doctest::Approx(1.0));
  CHECK((3.0 * b)(0.5, 0.5) == doctest::Approx(3.0));
  CHECK((3.0 * b).lipschitz() == doctest::Approx(3.0 * b.lipschitz()));
}

TEST_CASE("parameter maps agree with the germ at the corners") {
  const Rect dom{-1, 2, 0.5, 3};
  const Germ f = Germ::trig_product(1.3, 1.1, 0.2, 0.7, -0.4);
  for (const auto& m : {ParameterMap::identity(), ParameterMap::corner_bilinear(), ParameterMap::blend(0.25)}) {
    const Germ lf = m.apply(f, dom);
    for (double x : {dom.a, dom.b})
      for (double y : {dom.c, dom.d}) CHECK(lf(x, y) == doctest::Approx(f(x, y)).epsilon(1e-14));
    CHECK(m.is_linear());
  }
  const Germ b = ParameterMap::corner_bilinear().apply(f, dom);
  for (double x : {-0.5, 0.3, 1.7})
    for (double y : {0.6, 2.0})
      CHECK(b(x, y) == doctest::Approx(oracle::corner_bilinear([&](double s, double t) { return f(s, t); }, dom, x, y)));
  CHECK(ParameterMap::identity().apply(f, dom)(0.3, 1.0) == f(0.3, 1.0));
  CHECK_THROWS_AS((void)ParameterMap::blend(1.5), DomainError);
}

TEST_CASE("blend algebra: f - L_lambda f = (1 - lambda)(f - B f)") {
  const Germ f = Germ::trig_product(1.0, pi, 0, pi, 0);
  const Germ b = ParameterMap::corner_bilinear().apply(f, unit);
  for (double lambda : {0.0, 0.2, 0.8, 1.0}) {
    const Germ l = ParameterMap::blend(lambda).apply(f, unit);
    for (double x : {0.1, 0.5, 0.77})
      for (double y : {0.3, 0.9})
        CHECK(f(x, y) - l(x, y) == doctest::Approx((1 - lambda) * (f(x, y) - b(x, y))).epsilon(1e-14));
  }
}

TEST_CASE("corner bilinear map reproduces bilinear germs") {
  const Germ f = Germ::polynomial({{1.0, 0, 0}, {2.0, 1, 0}, {-3.0, 0, 1}, {0.5, 1, 1}}, unit);
  const Germ b = ParameterMap::corner_bilinear().apply(f, unit);
  for (double x : {0.0, 0.3, 1.0})
    for (double y : {0.0, 0.6, 1.0}) CHECK(b(x, y) == doctest::Approx(f(x, y)).epsilon(1e-14));
}
