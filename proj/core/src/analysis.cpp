#include "fracsurf/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <ostream>
#include <random>

#include "fracsurf/errors.hpp"

namespace fracsurf {

namespace {

std::vector<double> audit_axis(double lo, double hi, std::size_t n) {
  std::vector<double> xs(n);
  for (std::size_t k = 0; k < n; ++k) {
    const double t = static_cast<double>(k) / static_cast<double>(n - 1);
    xs[k] = (1.0 - t) * lo + t * hi;
  }
  xs.back() = hi;
  return xs;
}

std::string indexed(const std::string& stem, std::size_t k) { return stem + "[" + std::to_string(k) + "]"; }

std::string indexed(const std::string& stem, std::size_t k, std::size_t l) {
  return stem + "[" + std::to_string(k) + "," + std::to_string(l) + "]";
}

Germ::Fn surface(const FractalImage& img) {
  return [&img](double x, double y) { return read_surface(img.system, img.grid, x, y); };
}

}  // namespace

double sup_norm(const Rect& domain, std::size_t lattice, const Germ::Fn& h) {
  if (lattice < 2) throw DomainError("sup_norm: audit lattice must have at least 2 points per axis");
  const auto xs = audit_axis(domain.a, domain.b, lattice);
  const auto ys = audit_axis(domain.c, domain.d, lattice);
  double worst = 0.0;
  for (double y : ys)
    for (double x : xs) worst = std::max(worst, std::abs(h(x, y)));
  return worst;
}

std::vector<BoundReport> verify_perturbation_bounds(const CifsSystem& sys, const FifGrid& solved,
                                                    const AuditSettings& audit) {
  const Rect dom = sys.domain();
  const Germ& f = sys.germ();
  const Germ& lf = sys.mapped();
  const double s = sys.scale().sup_bound();
  const auto g = [&](double x, double y) { return read_surface(sys, solved, x, y); };

  const double g_minus_f = sup_norm(dom, audit.lattice, [&](double x, double y) { return g(x, y) - f(x, y); });
  const double g_minus_lf = sup_norm(dom, audit.lattice, [&](double x, double y) { return g(x, y) - lf(x, y); });
  const double f_minus_lf = sup_norm(dom, audit.lattice, [&](double x, double y) { return f(x, y) - lf(x, y); });

  const std::vector<std::pair<std::string, double>> context = {{"sup_alpha", s},
                                                               {"f_minus_mapped", f_minus_lf},
                                                               {"solver_tol", audit.solver_tol},
                                                               {"grid_slack", audit.grid_slack}};
  std::vector<BoundReport> out(3);
  out[0] = {"perturbation", g_minus_f, s * g_minus_lf, audit.audit_tol(), false, context};
  out[1] = {"distance_to_mapped", g_minus_lf, f_minus_lf / (1.0 - s), audit.audit_tol(), false, context};
  out[2] = {"distance_to_germ", g_minus_f, s / (1.0 - s) * f_minus_lf, audit.audit_tol(), false, context};
  return out;
}

bool SweepTable::passed() const noexcept {
  return std::all_of(rows.begin(), rows.end(), [](const SweepRow& r) { return r.passed; });
}

SweepTable convergence_suite(const CifsSystem& sys, SweepMode mode, std::size_t count, const SolveSettings& settings,
                             const AuditSettings& audit) {
  if (count < 1) throw DomainError("convergence suite: count must be >= 1");
  SweepTable table;
  table.mode = mode;
  const Rect dom = sys.domain();
  const Germ& f = sys.germ();
  for (std::size_t n = 1; n <= count; ++n) {
    const double inv = 1.0 / static_cast<double>(n);
    const CifsSystem sys_n = mode == SweepMode::ScaleToZero ? sys.with_scale(sys.scale().scaled(inv))
                                                            : sys.with_map(ParameterMap::blend(1.0 - inv));
    const FifGrid g = solve_fif(sys_n, settings);
    SweepRow row;
    row.n = n;
    row.sup_alpha = sys_n.scale().sup_bound();
    const Germ& lf = sys_n.mapped();
    row.f_minus_mapped = sup_norm(dom, audit.lattice, [&](double x, double y) { return f(x, y) - lf(x, y); });
    row.error = sup_norm(dom, audit.lattice,
                         [&](double x, double y) { return read_surface(sys_n, g, x, y) - f(x, y); });
    row.envelope = row.sup_alpha / (1.0 - row.sup_alpha) * row.f_minus_mapped;
    row.passed = row.error <= row.envelope + audit.audit_tol();
    table.rows.push_back(row);
  }
  table.envelope_decreasing = true;
  for (std::size_t k = 1; k < table.rows.size(); ++k)
    if (!(table.rows[k].envelope < table.rows[k - 1].envelope)) table.envelope_decreasing = false;
  table.improved = table.rows.size() > 1 && table.rows.back().error < table.rows.front().error;
  return table;
}

std::vector<Germ> default_germ_corpus(const Partition& partition, std::uint64_t seed) {
  const Rect dom = partition.domain();
  const double w = dom.width();
  const double h = dom.height();
  const double pi = std::numbers::pi;
  // Unit-square shapes carried onto the domain.
  auto unit = [dom, w, h](auto fn) {
    return [dom, w, h, fn](double x, double y) { return fn((x - dom.a) / w, (y - dom.c) / h); };
  };
  const double stretch = 1.0 / std::min(w, h);

  std::vector<Germ> corpus;
  corpus.push_back(Germ::trig_product(1.0, pi / w, -pi * dom.a / w, pi / h, -pi * dom.c / h));
  corpus.push_back(Germ::trig_product(0.5, 3.0 * pi / w, 0.3, 2.0 * pi / h, -0.7));
  corpus.push_back(Germ::polynomial({{1.0, 2, 1}, {-0.5, 1, 0}, {0.25, 0, 3}}, dom));
  corpus.push_back(Germ::polynomial({{2.0, 1, 1}, {-1.0, 1, 0}, {0.5, 0, 0}}, dom));
  corpus.push_back(Germ::constant(0.75));
  corpus.push_back(Germ("exp(x+y)", unit([](double u, double v) { return std::exp(u + v) - 1.0; }),
                        std::exp(2.0) * std::sqrt(2.0) * stretch));
  corpus.push_back(Germ("cos_ridge", unit([pi](double u, double v) { return std::cos(2.0 * pi * (u - v)); }),
                        2.0 * pi * std::sqrt(2.0) * stretch));
  {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> dist(-1.0, 1.0);
    std::vector<double> values(17 * 17);
    for (auto& v : values) v = dist(rng);
    corpus.push_back(Germ::tabulated(dom, 17, 17, std::move(values)));
  }
  corpus.push_back(Germ::sampled(corpus.front(), dom, 33, 33));
  corpus.push_back(Germ::knot_vanishing(partition, 1.0));
  return corpus;
}

std::vector<BoundReport> operator_property_probe(const OperatorTemplate& tmpl, const std::vector<Germ>& corpus,
                                                 const AuditSettings& audit, std::uint64_t seed) {
  if (corpus.size() < 2) throw DomainError("operator probe: corpus needs at least two germs");
  const Rect dom = tmpl.partition.domain();
  const double s = tmpl.scale.sup_bound();
  const double tol = audit.audit_tol();

  std::vector<FractalImage> images;
  images.reserve(corpus.size());
  for (const auto& germ : corpus) images.push_back(alpha_fractal_operator(tmpl, germ));

  std::vector<BoundReport> out;
  for (std::size_t k = 0; k < corpus.size(); ++k) {
    const auto fk = surface(images[k]);
    const double image_norm = sup_norm(dom, audit.lattice, fk);
    const double germ_norm = sup_norm(dom, audit.lattice, [&](double x, double y) { return corpus[k](x, y); });
    const double mapped_norm = sup_norm(dom, audit.lattice, [&](double x, double y) { return images[k].system.mapped()(x, y); });
    out.push_back({indexed("l_bound", k), image_norm, germ_norm / (1.0 - s) + s / (1.0 - s) * mapped_norm, tol, false,
                   {{"sup_alpha", s}, {"germ_norm", germ_norm}, {"mapped_norm", mapped_norm}}});
    if (germ_norm > 0.0)
      out.push_back({indexed("norm_ratio", k), image_norm / germ_norm, 0.0, 0.0, true, {{"sup_alpha", s}}});
  }

  struct PairNorms {
    std::size_t k, l;
    double image_diff, germ_diff, mapped_diff;
  };
  std::vector<PairNorms> pairs;
  double l_emp = 0.0;
  for (std::size_t k = 0; k < corpus.size(); ++k) {
    const std::size_t l = (k + 1) % corpus.size();
    const auto fk = surface(images[k]);
    const auto fl = surface(images[l]);
    const Germ& mk = images[k].system.mapped();
    const Germ& ml = images[l].system.mapped();
    PairNorms p{k, l, 0.0, 0.0, 0.0};
    p.image_diff = sup_norm(dom, audit.lattice, [&](double x, double y) { return fk(x, y) - fl(x, y); });
    p.germ_diff = sup_norm(dom, audit.lattice, [&](double x, double y) { return corpus[k](x, y) - corpus[l](x, y); });
    p.mapped_diff = sup_norm(dom, audit.lattice, [&](double x, double y) { return mk(x, y) - ml(x, y); });
    if (p.germ_diff > 0.0) l_emp = std::max(l_emp, p.mapped_diff / p.germ_diff);
    pairs.push_back(p);
  }

  for (const auto& p : pairs) {
    out.push_back({indexed("l_lipschitz", p.k, p.l), p.image_diff,
                   p.germ_diff / (1.0 - s) + s / (1.0 - s) * p.mapped_diff, tol, false,
                   {{"sup_alpha", s}, {"germ_diff", p.germ_diff}, {"mapped_diff", p.mapped_diff}}});
  }
  const double ratio_bound = (1.0 + s * l_emp) / (1.0 - s);
  for (const auto& p : pairs) {
    if (!(p.germ_diff > 0.0)) continue;
    out.push_back({indexed("lipschitz_ratio", p.k, p.l), p.image_diff / p.germ_diff, ratio_bound, tol, false,
                   {{"sup_alpha", s}, {"map_lipschitz_empirical", l_emp}}});
  }

  if (tmpl.map.is_linear()) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> coef(-2.0, 2.0);
    const std::size_t probes = std::min<std::size_t>(3, pairs.size());
    for (std::size_t q = 0; q < probes; ++q) {
      const auto& p = pairs[q];
      const double c1 = coef(rng);
      const double c2 = coef(rng);
      const FractalImage combo = alpha_fractal_operator(tmpl, c1 * corpus[p.k] + c2 * corpus[p.l]);
      const auto fk = surface(images[p.k]);
      const auto fl = surface(images[p.l]);
      const auto fc = surface(combo);
      const double defect = sup_norm(dom, audit.lattice, [&](double x, double y) {
        return fc(x, y) - c1 * fk(x, y) - c2 * fl(x, y);
      });
      out.push_back({indexed("linearity", p.k, p.l), defect, 0.0, tol, false, {{"c1", c1}, {"c2", c2}}});
    }
  }
  return out;
}

std::vector<BoundReport> identity_law_check(const OperatorTemplate& tmpl, const std::vector<Germ>& corpus,
                                            const AuditSettings& audit, double tol) {
  const Rect dom = tmpl.partition.domain();
  std::vector<BoundReport> out;
  for (std::size_t k = 0; k < corpus.size(); ++k) {
    const FractalImage img = alpha_fractal_operator(tmpl, corpus[k]);
    const auto g = surface(img);
    const double err = sup_norm(dom, audit.lattice, [&](double x, double y) { return g(x, y) - corpus[k](x, y); });
    out.push_back({indexed("identity_law", k), err, tol, 0.0, false, {{"sup_alpha", tmpl.scale.sup_bound()}}});
  }
  return out;
}

InvariantReport invariant_subspace_check(const OperatorTemplate& tmpl, const Germ& germ, double tol,
                                         std::size_t depth) {
  const FractalImage img = alpha_fractal_operator(tmpl, germ);
  const CifsSystem& sys = img.system;
  const Axis& ax = sys.partition().x();
  const Axis& ay = sys.partition().y();
  const auto limit = tmpl.settings.boundary_limit_index;

  std::vector<double> kx;
  std::vector<double> ky;
  for (std::size_t i = 0; i <= ax.truncation(); ++i) kx.push_back(ax.knot(i));
  for (std::size_t j = 0; j <= ay.truncation(); ++j) ky.push_back(ay.knot(j));
  kx.push_back(ax.hi());
  ky.push_back(ay.hi());

  InvariantReport rep;
  rep.tol = tol;
  rep.corner_value = std::abs(eval_fif_point(sys, ax.lo(), ay.lo(), depth, limit).value);
  for (double y : ky) {
    for (double x : kx) {
      rep.max_knot_value = std::max(rep.max_knot_value, std::abs(eval_fif_point(sys, x, y, depth, limit).value));
      ++rep.knots_checked;
    }
  }

  const FifGrid& g = img.grid;
  for (std::size_t iy = 0; iy < g.ny; ++iy) {
    if (std::find(ky.begin(), ky.end(), g.ys[iy]) == ky.end()) continue;
    for (std::size_t ix = 0; ix < g.nx; ++ix) {
      if (std::find(kx.begin(), kx.end(), g.xs[ix]) == kx.end()) continue;
      rep.max_lattice_knot = std::max(rep.max_lattice_knot, std::abs(g.value(ix, iy)));
    }
  }
  return rep;
}

void write_report(std::ostream& out, const std::vector<BoundReport>& reports) {
  std::size_t passed = 0;
  std::size_t diagnostics = 0;
  char line[512];
  for (const auto& r : reports) {
    const char* status = r.diagnostic ? "info" : (r.passed() ? "pass" : "fail");
    if (r.diagnostic)
      ++diagnostics;
    else if (r.passed())
      ++passed;
    std::snprintf(line, sizeof line, "%s %s %.17g %.17g %.17g\n", r.name.c_str(), status, r.lhs, r.rhs, r.slack());
    out << line;
  }
  const std::size_t checks = reports.size() - diagnostics;
  out << "\n# summary\n";
  out << "checks=" << checks << "\n";
  out << "passed=" << passed << "\n";
  out << "failed=" << checks - passed << "\n";
  out << "diagnostics=" << diagnostics << "\n";
}

}  // namespace fracsurf
