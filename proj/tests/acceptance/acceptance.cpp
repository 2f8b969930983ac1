// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on failure.
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <exception>
#include <functional>
#include <numbers>
#include <random>
#include <string>
#include <vector>

#include "fracsurf/analysis.hpp"
#include "fracsurf/attractor.hpp"
#include "fracsurf/errors.hpp"

using namespace fracsurf;

namespace {

const double pi = std::numbers::pi;
const Rect unit{0, 1, 0, 1};

Partition geometric(double r) {
  return make_partition({unit, AxisGenerator::geometric(r), AxisGenerator::geometric(r)});
}

CifsSystem demo(double r = 0.5, double alpha = 0.3, ParameterMap map = ParameterMap::corner_bilinear()) {
  return CifsSystem::build(geometric(r), ScaleField::constant(alpha), Germ::trig_product(1, pi, 0, pi, 0), map);
}

double knot_error(const CifsSystem& sys, const FifGrid& g) {
  // knots that fall on the lattice, found by exact coordinate match
  double worst = 0.0;
  const auto& px = sys.partition().x();
  const auto& py = sys.partition().y();
  for (std::size_t i = 0; i <= px.truncation(); ++i)
    for (std::size_t j = 0; j <= py.truncation(); ++j) {
      const double x = px.knot(i), y = py.knot(j);
      const double fx = (x - g.xs.front()) / (g.xs.back() - g.xs.front()) * static_cast<double>(g.nx - 1);
      const double fy = (y - g.ys.front()) / (g.ys.back() - g.ys.front()) * static_cast<double>(g.ny - 1);
      const auto ix = static_cast<std::size_t>(std::lround(fx));
      const auto iy = static_cast<std::size_t>(std::lround(fy));
      if (g.xs[ix] != x || g.ys[iy] != y) continue;
      worst = std::max(worst, std::abs(g.value(ix, iy) - sys.germ()(x, y)));
    }
  return worst;
}

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* f, double a, double b = 0, double c = 0, double d = 0) {
  char buf[256];
  std::snprintf(buf, sizeof buf, f, a, b, c, d);
  return buf;
}

Outcome c1() {
  const auto t0 = std::chrono::steady_clock::now();
  const CifsSystem sys = demo();
  const FifGrid g = solve_fif(sys);
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  const double err = knot_error(sys, g);
  return {err <= 1e-8 && secs <= 60.0, fmt("max knot error %.3g (tol 1e-8), runtime %.2f s (limit 60)", err, secs)};
}

Outcome c2() {
  bool ok = true;
  double worst_excess = -1.0;
  std::string d;
  for (double alpha : {0.3, 0.5, 0.7}) {
    for (double r : {0.5, 0.6}) {
      const FifGrid g = solve_fif(demo(r, alpha));
      const auto& res = g.meta.residuals;
      for (std::size_t k = 1; k < res.size(); ++k) {
        if (res[k - 1] == 0.0) continue;
        const double ratio = res[k] / res[k - 1];
        worst_excess = std::max(worst_excess, ratio - alpha);
        ok = ok && ratio <= alpha + 0.02;
      }
      ok = ok && g.meta.iterations <= g.meta.apriori_bound;
      d += fmt("[r=%.1f a=%.1f it=%.0f bound=%.0f]", r, alpha, static_cast<double>(g.meta.iterations),
               static_cast<double>(g.meta.apriori_bound));
    }
  }
  return {ok, fmt("max ratio - alpha %.3g (limit 0.02) ", worst_excess) + d};
}

Outcome c3() {
  const Partition part = geometric(0.5);
  const auto corpus = default_germ_corpus(part);
  OperatorTemplate tmpl{part, ScaleField::constant(0.3), ParameterMap::identity(), {}, {}};
  const AuditSettings audit{513, 0.0, 1e-10};
  double worst = 0.0;
  bool ok = true;
  for (const auto& r : identity_law_check(tmpl, {corpus.begin(), corpus.begin() + 5}, audit, 1e-8)) {
    worst = std::max(worst, r.lhs);
    ok = ok && r.passed() && r.lhs <= 1e-8;
  }
  return {ok, fmt("5 germs, max ||f^a - f|| %.3g (tol 1e-8)", worst)};
}

Outcome c4() {
  bool ok = true;
  double min_margin = 1e300, min_raw = 1e300;
  for (double alpha : {0.1, 0.3, 0.5, 0.7}) {
    const CifsSystem sys = demo(0.5, alpha);
    const SolveSettings st;
    const FifGrid g = solve_fif(sys, st);
    const AuditSettings audit{513, grid_slack(sys, st), st.tol};
    for (const auto& r : verify_perturbation_bounds(sys, g, audit)) {
      min_margin = std::min(min_margin, r.slack() + r.audit_tol);
      min_raw = std::min(min_raw, r.slack());
      ok = ok && r.passed();
    }
  }
  return {ok, fmt("12 inequalities, min slack + 2(tol + grid slack) = %.3g (must be >= 0), raw min slack %.3g", min_margin, min_raw)};
}

Outcome c5() {
  const CifsSystem sys = demo();
  const SolveSettings st;
  const AuditSettings audit{513, grid_slack(sys, st), st.tol};
  const SweepTable a = convergence_suite(sys, SweepMode::ScaleToZero, 5, st, audit);
  const SweepTable b = convergence_suite(sys, SweepMode::MapToGerm, 5, st, audit);
  auto under = [&](const SweepTable& t) {
    for (const auto& row : t.rows)
      if (row.error > row.envelope + audit.audit_tol()) return false;
    return t.rows.size() == 5;
  };
  const bool ok = under(a) && under(b) && a.rows[4].error < a.rows[0].error && b.rows[4].error < b.rows[0].error;
  return {ok, fmt("alpha/n: e1 %.3g e5 %.3g; blend: e1 %.3g e5 %.3g", a.rows[0].error, a.rows[4].error,
                  b.rows[0].error, b.rows[4].error)};
}

Outcome c6() {
  double worst = 0.0;
  bool ok = true;
  for (double r : {0.5, 0.6}) {
    const MatchingReport rep = demo(r).verify_matching(64, 1e-12);
    worst = std::max(worst, rep.max_discrepancy);
    ok = ok && rep.passed() && !rep.edges.empty();
  }
  return {ok, fmt("max edge discrepancy %.3g (tol 1e-12), 64 samples per edge", worst)};
}

Outcome c7() {
  bool ok = true;
  std::string d;
  for (double r : {0.55, 0.6, 0.7}) {
    try {
      const Certificate c = demo(r).hyperbolicity_certificate();
      ok = ok && c.delta_sup <= 0.45 + 1e-15 && c.contraction_ratio < 1.0;
    } catch (const CertificateRefused&) {
      ok = false;
      d += fmt("r=%.2f refused; ", r);
    }
  }
  bool refused = false;
  try {
    (void)demo(0.5).hyperbolicity_certificate();
  } catch (const CertificateRefused&) {
    refused = true;
  }
  ok = ok && refused;

  const CifsSystem sys = demo(0.6);
  const Certificate c = sys.hyperbolicity_certificate();
  std::mt19937_64 rng(2024);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  double worst = 0.0;
  const std::size_t m = sys.partition().x().truncation();
  for (int k = 0; k < 1000; ++k) {
    const std::size_t i = 1 + rng() % m, j = 1 + rng() % m;
    const Point3 p{u(rng), u(rng), sys.k_lo() + u(rng) * sys.k_diameter()};
    const Point3 q{u(rng), u(rng), sys.k_lo() + u(rng) * sys.k_diameter()};
    const double ratio = d_delta(sys.eval_W(i, j, p), sys.eval_W(i, j, q), c.delta_metric) / d_delta(p, q, c.delta_metric);
    worst = std::max(worst, ratio);
  }
  ok = ok && worst <= c.contraction_ratio + 1e-9;
  return {ok, d + fmt("a_1=0.5 refused=%.0f; 1000 pairs max ratio %.6f vs certified %.6f", refused ? 1.0 : 0.0, worst,
                      c.contraction_ratio)};
}

Outcome c8() {
  const CifsSystem sys = demo(0.6);
  const FifGrid g = solve_fif(sys);
  AttractorBudget b;
  const ConvergenceReport rep =
      convergence_report(sys, {{2, 2}, {4, 4}, {8, 8}, {12, 12}}, AttractorMode::Deterministic, b, graph_cloud(g));
  double worst_directed = 0.0;
  for (const auto& row : rep.rows) worst_directed = std::max(worst_directed, row.directed_to_next);
  const double dh = rep.rows.back().distance_to_graph;

  b.points = 50000;
  const PointCloud3 c1 = partial_attractor(sys, 12, 12, AttractorMode::Chaos, b);
  const PointCloud3 c2 = partial_attractor(sys, 12, 12, AttractorMode::Chaos, b);
  bool same = c1.points.size() == c2.points.size();
  for (std::size_t k = 0; same && k < c1.points.size(); ++k)
    same = std::memcmp(&c1.points[k], &c2.points[k], sizeof(Point3)) == 0;

  const bool ok = rep.inclusions_hold && worst_directed <= rep.epsilon && dh <= 5.0 * rep.epsilon && same;
  return {ok, fmt("eps %.4g, max directed %.4g, d_H(A_12,12, G) %.4g (limit %.4g), chaos bit-exact ", rep.epsilon,
                  worst_directed, dh, 5.0 * rep.epsilon) +
                  (same ? "yes" : "no")};
}

Outcome c9() {
  const CifsSystem sys = demo(0.6);
  SolveSettings st;
  st.nx = st.ny = 65;
  const auto steps = graph_iteration_check(sys, initial_grid(sys, 65, 65), 4, 1.0 / 128, grid_slack(sys, st));
  bool ok = steps.size() == 4;
  std::string d;
  for (const auto& s : steps) {
    ok = ok && s.passed();
    d += fmt("[n=%.0f d=%.3g slack=%.3g]", static_cast<double>(s.n), s.hausdorff, s.slack);
  }
  return {ok, d};
}

Outcome c10() {
  const Partition part = geometric(0.5);
  const auto corpus = default_germ_corpus(part);
  OperatorTemplate tmpl{part, ScaleField::constant(0.3), ParameterMap::corner_bilinear(), {}, {}};
  const CifsSystem sys = CifsSystem::build(part, tmpl.scale, corpus[0], tmpl.map);
  const AuditSettings audit{513, grid_slack(sys, tmpl.settings), tmpl.settings.tol};
  bool ok = corpus.size() == 10;
  std::size_t checks = 0;
  double worst_linear = 0.0;
  for (const auto& r : operator_property_probe(tmpl, corpus, audit)) {
    if (r.diagnostic) continue;
    ++checks;
    ok = ok && r.passed();
    if (r.name.rfind("linearity", 0) == 0) worst_linear = std::max(worst_linear, r.lhs);
  }
  ok = ok && worst_linear <= audit.audit_tol();
  const InvariantReport inv = invariant_subspace_check(tmpl, Germ::knot_vanishing(part, 1.0), 1e-8);
  ok = ok && inv.passed();
  return {ok, fmt("%.0f probe checks, linearity defect %.3g (limit %.3g), invariant knots max %.3g (tol 1e-8)",
                  static_cast<double>(checks), worst_linear, audit.audit_tol(),
                  std::max(inv.max_knot_value, inv.corner_value))};
}

Outcome c11() {
  const CifsSystem sys = demo();
  const SolveSettings st;
  const FifGrid g = solve_fif(sys, st);
  const double slack = grid_slack(sys, st);
  const double bound = std::pow(sys.scale().sup_bound(), 40) * sys.k_diameter() + slack;
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  double worst = 0.0;
  for (int k = 0; k < 100; ++k) {
    const double x = u(rng), y = u(rng);
    worst = std::max(worst, std::abs(eval_fif_point(sys, x, y, 40).value - read_surface(sys, g, x, y)));
  }
  return {worst <= bound, fmt("100 points, max |point - grid| %.3g (limit %.3g)", worst, bound)};
}

}  // namespace

int main() {
  const std::vector<std::function<Outcome()>> criteria{c1, c2, c3, c4, c5, c6, c7, c8, c9, c10, c11};
  int failed = 0;
  for (std::size_t k = 0; k < criteria.size(); ++k) {
    Outcome o;
    try {
      o = criteria[k]();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    failed += !o.pass;
    std::printf("%s criterion %zu: %s\n", o.pass ? "PASS" : "FAIL", k + 1, o.detail.c_str());
    std::fflush(stdout);
  }
  return failed == 0 ? 0 : 1;
}
