#include <cmath>
#include <numbers>
#include <random>

#include "doctest.h"
#include "fracsurf/cifs.hpp"
#include "fracsurf/errors.hpp"
#include "oracles.hpp"

using namespace fracsurf;

namespace {

const double pi = std::numbers::pi;

CifsSystem demo(double r, ScaleField scale = ScaleField::constant(0.3)) {
  const Rect unit{0, 1, 0, 1};
  return CifsSystem::build(make_partition({unit, AxisGenerator::geometric(r), AxisGenerator::geometric(r)}),
                           std::move(scale), Germ::trig_product(1, pi, 0, pi, 0), ParameterMap::corner_bilinear());
}

}  // namespace

TEST_CASE("F_ij follows the defining formula") {
  const CifsSystem sys = demo(0.5);
  auto f = [](double x, double y) { return std::sin(pi * x) * std::sin(pi * y); };
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int k = 0; k < 200; ++k) {
    const std::size_t i = 1 + k % 12;
    const std::size_t j = 1 + (k / 12) % 12;
    const double x = u(rng), y = u(rng), z = sys.k_lo() + u(rng) * sys.k_diameter();
    // u_i by hand: odd cells keep orientation, even cells flip it.
    const double xl = oracle::geometric_knot(0, 1, 0.5, i - 1), xr = oracle::geometric_knot(0, 1, 0.5, i);
    const double yl = oracle::geometric_knot(0, 1, 0.5, j - 1), yr = oracle::geometric_knot(0, 1, 0.5, j);
    const double px = i % 2 ? xl + x * (xr - xl) : xr - x * (xr - xl);
    const double py = j % 2 ? yl + y * (yr - yl) : yr - y * (yr - yl);
    const double expected = 0.3 * z + f(px, py) - 0.3 * oracle::corner_bilinear(f, {0, 1, 0, 1}, x, y);
    CHECK(sys.eval_F(i, j, x, y, z) == doctest::Approx(expected).epsilon(1e-13));
    const Point3 w = sys.eval_W(i, j, {x, y, z});
    CHECK(w.x == doctest::Approx(px).epsilon(1e-14));
    CHECK(w.y == doctest::Approx(py).epsilon(1e-14));
  }
}

TEST_CASE("eval_F rejects points outside X") {
  const CifsSystem sys = demo(0.5);
  CHECK_THROWS_AS((void)sys.eval_F(1, 1, 1.5, 0.5, 0.0), DomainError);
  CHECK_THROWS_AS((void)sys.eval_F(1, 1, 0.5, 0.5, sys.k_hi() + 1.0), DomainError);
  CHECK_THROWS_AS((void)sys.eval_F(0, 1, 0.5, 0.5, 0.0), DomainError);
}

TEST_CASE("every W_ij maps X into X") {
  const CifsSystem sys = demo(0.6);
  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int k = 0; k < 5000; ++k) {
    const std::size_t i = 1 + k % 30, j = 1 + (k / 30) % 30;
    const Point3 p{u(rng), u(rng), sys.k_lo() + u(rng) * sys.k_diameter()};
    const Point3 q = sys.eval_W(i, j, p);
    CHECK(q.z >= sys.k_lo());
    CHECK(q.z <= sys.k_hi());
    CHECK(sys.domain().contains(q.x, q.y, 0.0));
  }
}

TEST_CASE("closed-form fixed points are fixed") {
  const CifsSystem sys = demo(0.6, ScaleField::affine(0.2, 0.1, -0.1, {0, 1, 0, 1}));
  for (std::size_t i : {1u, 2u, 5u})
    for (std::size_t j : {1u, 4u}) {
      const Point3 p = sys.fixed_point(i, j);
      const Point3 q = sys.eval_W(i, j, p);
      CHECK(q.x == doctest::Approx(p.x).epsilon(1e-14));
      CHECK(q.y == doctest::Approx(p.y).epsilon(1e-14));
      CHECK(q.z == doctest::Approx(p.z).epsilon(1e-13));
    }
}

TEST_CASE("matching conditions hold on every realized interior edge") {
  for (double r : {0.5, 0.6}) {
    const MatchingReport rep = demo(r).verify_matching(64, 1e-12);
    CHECK(rep.passed());
    CHECK(rep.max_discrepancy <= 1e-12);
    CHECK(rep.edges.size() == 2 * 11 * 12);
  }
  const MatchingReport affine = demo(0.5, ScaleField::affine(0.3, 0.2, -0.1, {0, 1, 0, 1})).verify_matching(64, 1e-12);
  CHECK(affine.passed());
}

TEST_CASE("hyperbolicity certificate") {
  CHECK_THROWS_AS((void)demo(0.5).hyperbolicity_certificate(), CertificateRefused);
  const CifsSystem sys = demo(0.6);
  const Certificate c = sys.hyperbolicity_certificate();
  CHECK(c.delta_sup == doctest::Approx(0.4));
  CHECK(c.delta_metric > 0.0);
  CHECK(c.contraction_ratio < 1.0);
  CHECK(c.delta_metric == doctest::Approx((1 - 2 * 0.4) / (2 * c.theta)));

  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  double worst = 0.0;
  for (int k = 0; k < 1000; ++k) {
    const std::size_t i = 1 + rng() % 12, j = 1 + rng() % 12;
    const Point3 p{u(rng), u(rng), sys.k_lo() + u(rng) * sys.k_diameter()};
    const Point3 q{u(rng), u(rng), sys.k_lo() + u(rng) * sys.k_diameter()};
    const double before = d_delta(p, q, c.delta_metric);
    const double after = d_delta(sys.eval_W(i, j, p), sys.eval_W(i, j, q), c.delta_metric);
    worst = std::max(worst, after / before);
  }
  CHECK(worst <= c.contraction_ratio + 1e-9);
}

TEST_CASE("K contains the germ and the mapped germ ranges") {
  const CifsSystem sys = demo(0.5);
  CHECK(sys.k_lo() <= sys.norms().f_min);
  CHECK(sys.k_hi() >= sys.norms().f_max);
  CHECK(sys.norms().f_max == doctest::Approx(1.0));
  CHECK(sys.norms().mapped_sup == doctest::Approx(0.0));
  CHECK(sys.norms().f_minus_mapped_sup == doctest::Approx(1.0));
}

TEST_CASE("with_germ keeps the partition and scale") {
  const CifsSystem sys = demo(0.6);
  const CifsSystem other = sys.with_germ(Germ::constant(2.0));
  CHECK(other.scale().sup_bound() == sys.scale().sup_bound());
  CHECK(other.partition().x().ratio() == 0.6);
  CHECK(other.eval_F(3, 2, 0.4, 0.4, 2.0) == doctest::Approx(2.0));
}
