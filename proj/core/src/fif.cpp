#include "fracsurf/fif.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "detail/parallel.hpp"
#include "fracsurf/errors.hpp"

namespace fracsurf {

namespace {

std::vector<double> lattice(double lo, double hi, std::size_t n) {
  std::vector<double> out(n);
  for (std::size_t k = 0; k < n; ++k) {
    const double t = static_cast<double>(k) / static_cast<double>(n - 1);
    out[k] = (1.0 - t) * lo + t * hi;
  }
  return out;
}

// Bilinear stencil of a point on a uniform lattice: corner index k00 and
// in-cell weights. Exact (tx, ty in {0, 1}) when the point sits on the
// domain boundary.
struct Stencil {
  std::size_t k00 = 0;
  double tx = 0.0;
  double ty = 0.0;
};

Stencil make_stencil(const Rect& r, std::size_t nx, std::size_t ny, double x, double y) {
  const double gx = (x - r.a) / r.width() * static_cast<double>(nx - 1);
  const double gy = (y - r.c) / r.height() * static_cast<double>(ny - 1);
  const auto ix = std::min<std::size_t>(static_cast<std::size_t>(std::max(gx, 0.0)), nx - 2);
  const auto iy = std::min<std::size_t>(static_cast<std::size_t>(std::max(gy, 0.0)), ny - 2);
  return {iy * nx + ix, std::clamp(gx - static_cast<double>(ix), 0.0, 1.0),
          std::clamp(gy - static_cast<double>(iy), 0.0, 1.0)};
}

double gather(const std::vector<double>& d, std::size_t nx, const Stencil& s) {
  const double tx = s.tx;
  const double ty = s.ty;
  return (1.0 - tx) * (1.0 - ty) * d[s.k00] + tx * (1.0 - ty) * d[s.k00 + 1] +
         (1.0 - tx) * ty * d[s.k00 + nx] + tx * ty * d[s.k00 + nx + 1];
}

// One step of the self-referential equation at (x, y):
//   g(x,y) = f_value + alpha * [g(px,py) - L(f)(px,py)],
//   g(x,y) - L(f)(x,y) = base + alpha * [g(px,py) - L(f)(px,py)].
// Interior points use their own cell. On x = b (resp. y = d) the limit over
// the cell index is realized at the deepest index `limit_i` (resp.
// `limit_j`), with the germ evaluated at the limit point itself; (b, d) is
// terminal with value f(b, d).
struct Pullback {
  double f_value = 0.0;
  double base = 0.0;
  double alpha = 0.0;
  double px = 0.0;
  double py = 0.0;
  bool terminal = false;
};

struct LimitIndices {
  std::size_t i;
  std::size_t j;
};

LimitIndices limit_indices(const CifsSystem& sys, std::optional<std::size_t> requested) {
  const std::size_t m = sys.partition().x().truncation();
  const std::size_t n = sys.partition().y().truncation();
  if (requested && *requested == 0) throw DomainError("boundary_limit_index must be >= 1");
  return {requested ? std::min(*requested, m) : m, requested ? std::min(*requested, n) : n};
}

Pullback pull_back(const CifsSystem& sys, double x, double y, const LimitIndices& lim) {
  const Rect r = sys.domain();
  const auto ci = sys.partition().x().locate(x);
  const auto cj = sys.partition().y().locate(y);
  const double fv = sys.germ()(x, y);

  Pullback pb;
  pb.f_value = fv;
  pb.base = fv - sys.mapped()(x, y);
  if (!ci && !cj) {
    pb.terminal = true;
    return pb;
  }
  const std::size_t i = ci ? *ci : lim.i;
  const std::size_t j = cj ? *cj : lim.j;
  pb.px = ci ? sys.u(i).inverse(x) : sys.u(i).inverse(sys.partition().x().knot(i));
  pb.py = cj ? sys.v(j).inverse(y) : sys.v(j).inverse(sys.partition().y().knot(j));
  pb.alpha = sys.scale()(i, j, x, y);

  const double slack = 1e-9 * std::max(1.0, r.diagonal());
  if (!r.contains(pb.px, pb.py, slack)) {
    std::ostringstream os;
    os.precision(17);
    os << "pull-back of (" << x << "," << y << ") through cell (" << i << "," << j << ") left the domain: ("
       << pb.px << "," << pb.py << ")";
    throw InconsistencyError(os.str());
  }
  pb.px = std::clamp(pb.px, r.a, r.b);
  pb.py = std::clamp(pb.py, r.c, r.d);
  return pb;
}

// Per-lattice-point data of T, independent of the iterate.
struct TransferPlan {
  std::size_t nx = 0;
  std::size_t ny = 0;
  std::vector<double> f_value;
  std::vector<double> base;
  std::vector<double> alpha;
  std::vector<Stencil> stencil;

  void apply(const std::vector<double>& dev, std::vector<double>& out_values,
             std::vector<double>& out_dev) const {
    const std::size_t count = nx * ny;
    out_values.resize(count);
    out_dev.resize(count);
    for (std::size_t k = 0; k < count; ++k) {
      const double read = alpha[k] == 0.0 ? 0.0 : alpha[k] * gather(dev, nx, stencil[k]);
      out_values[k] = f_value[k] + read;
      out_dev[k] = base[k] + read;
    }
  }
};

TransferPlan make_plan(const CifsSystem& sys, const std::vector<double>& xs, const std::vector<double>& ys,
                       std::optional<std::size_t> limit, unsigned jobs) {
  const Rect r = sys.domain();
  const LimitIndices lim = limit_indices(sys, limit);
  TransferPlan plan;
  plan.nx = xs.size();
  plan.ny = ys.size();
  const std::size_t count = plan.nx * plan.ny;
  plan.f_value.resize(count);
  plan.base.resize(count);
  plan.alpha.resize(count);
  plan.stencil.resize(count);
  detail::parallel_for(count, jobs, [&](std::size_t k) {
    const double x = xs[k % plan.nx];
    const double y = ys[k / plan.nx];
    const Pullback pb = pull_back(sys, x, y, lim);
    plan.f_value[k] = pb.f_value;
    plan.base[k] = pb.base;
    plan.alpha[k] = pb.terminal ? 0.0 : pb.alpha;
    plan.stencil[k] = pb.terminal ? Stencil{} : make_stencil(r, plan.nx, plan.ny, pb.px, pb.py);
  });
  return plan;
}

void check_lattice(std::size_t nx, std::size_t ny) {
  if (nx < 2 || ny < 2) throw DomainError("lattice needs at least 2 points per axis");
}

}  // namespace

double FifGrid::read_deviation(double x, double y) const {
  const Rect r{xs.front(), xs.back(), ys.front(), ys.back()};
  return gather(deviation, nx, make_stencil(r, nx, ny, x, y));
}

FifGrid sample_grid(const CifsSystem& sys, std::size_t nx, std::size_t ny, const Germ::Fn& h) {
  check_lattice(nx, ny);
  const Rect r = sys.domain();
  FifGrid g;
  g.nx = nx;
  g.ny = ny;
  g.xs = lattice(r.a, r.b, nx);
  g.ys = lattice(r.c, r.d, ny);
  g.values.resize(nx * ny);
  g.deviation.resize(nx * ny);
  for (std::size_t iy = 0; iy < ny; ++iy) {
    for (std::size_t ix = 0; ix < nx; ++ix) {
      const double v = h(g.xs[ix], g.ys[iy]);
      g.values[iy * nx + ix] = v;
      g.deviation[iy * nx + ix] = v - sys.mapped()(g.xs[ix], g.ys[iy]);
    }
  }
  return g;
}

FifGrid initial_grid(const CifsSystem& sys, std::size_t nx, std::size_t ny) {
  FifGrid g = sample_grid(sys, nx, ny, [&](double x, double y) { return sys.mapped()(x, y); });
  std::fill(g.deviation.begin(), g.deviation.end(), 0.0);
  return g;
}

FifGrid apply_T(const CifsSystem& sys, const FifGrid& h, const SolveSettings& settings) {
  check_lattice(h.nx, h.ny);
  const TransferPlan plan = make_plan(sys, h.xs, h.ys, settings.boundary_limit_index, settings.jobs);
  std::vector<double> dev(h.values.size());
  for (std::size_t iy = 0; iy < h.ny; ++iy)
    for (std::size_t ix = 0; ix < h.nx; ++ix)
      dev[iy * h.nx + ix] = h.values[iy * h.nx + ix] - sys.mapped()(h.xs[ix], h.ys[iy]);

  FifGrid out;
  out.nx = h.nx;
  out.ny = h.ny;
  out.xs = h.xs;
  out.ys = h.ys;
  plan.apply(dev, out.values, out.deviation);
  out.meta.iterations = 1;
  return out;
}

FifGrid solve_fif(const CifsSystem& sys, const SolveSettings& settings) {
  if (!(settings.tol > 0.0)) throw DomainError("solve: tol must be positive");
  if (settings.max_iter < 1) throw DomainError("solve: max_iter must be >= 1");

  FifGrid grid = initial_grid(sys, settings.nx, settings.ny);
  const TransferPlan plan = make_plan(sys, grid.xs, grid.ys, settings.boundary_limit_index, settings.jobs);

  std::vector<double> dev = grid.deviation;
  std::vector<double> next_values;
  std::vector<double> next_dev;
  SolveMeta meta;
  meta.tol = settings.tol;
  bool converged = false;
  for (std::size_t it = 1; it <= settings.max_iter; ++it) {
    plan.apply(dev, next_values, next_dev);
    double residual = 0.0;
    for (std::size_t k = 0; k < dev.size(); ++k) residual = std::max(residual, std::abs(next_dev[k] - dev[k]));
    meta.residuals.push_back(residual);
    dev.swap(next_dev);
    grid.values.swap(next_values);
    if (residual <= settings.tol) {
      converged = true;
      break;
    }
  }
  grid.deviation = dev;

  meta.iterations = meta.residuals.size();
  meta.final_residual = meta.residuals.back();
  const double r1 = meta.residuals.front();
  if (meta.iterations >= 2 && r1 > 0.0) {
    meta.observed_ratio =
        std::pow(meta.final_residual / r1, 1.0 / static_cast<double>(meta.iterations - 1));
  }
  const double s = sys.scale().sup_bound();
  if (r1 <= settings.tol) {
    meta.apriori_bound = 1;
  } else if (s <= 0.0) {
    meta.apriori_bound = 2;
  } else {
    const double n = std::ceil(std::log(settings.tol * (1.0 - s) / r1) / std::log(s));
    meta.apriori_bound = static_cast<std::size_t>(std::max(1.0, n));
  }
  grid.meta = meta;

  if (!converged) {
    std::ostringstream os;
    os << "solve_fif: no convergence after " << settings.max_iter << " iterations (residual "
       << meta.final_residual << " > tol " << settings.tol << ")";
    throw ConvergenceError(os.str(), meta.residuals);
  }
  return grid;
}

double read_surface(const CifsSystem& sys, const FifGrid& grid, double x, double y) {
  return sys.mapped()(x, y) + grid.read_deviation(x, y);
}

PointValue eval_fif_point(const CifsSystem& sys, double x, double y, std::size_t depth,
                          std::optional<std::size_t> boundary_limit_index) {
  if (depth < 1) throw DomainError("eval_fif_point: depth must be >= 1");
  if (!sys.domain().contains(x, y)) throw DomainError("eval_fif_point: point outside the domain");
  const LimitIndices lim = limit_indices(sys, boundary_limit_index);

  const Pullback top = pull_back(sys, x, y, lim);
  PointValue out;
  out.error_bound = std::pow(sys.scale().sup_bound(), static_cast<double>(depth)) * sys.k_diameter();
  if (top.terminal) {
    out.value = top.f_value;
    out.error_bound = 0.0;
    return out;
  }

  // Deviation g - L(f) at the first pulled-back point, unrolled depth-1 more
  // levels with the innermost deviation seeded at zero.
  double deviation = 0.0;
  double weight = 1.0;
  double px = top.px;
  double py = top.py;
  for (std::size_t level = 1; level < depth; ++level) {
    const Pullback pb = pull_back(sys, px, py, lim);
    deviation += weight * pb.base;
    if (pb.terminal) break;
    weight *= pb.alpha;
    if (weight == 0.0) break;
    px = pb.px;
    py = pb.py;
  }
  out.value = top.f_value + top.alpha * deviation;
  return out;
}

double grid_slack(const CifsSystem& sys, const SolveSettings& settings) {
  const FifGrid coarse = solve_fif(sys, settings);
  SolveSettings fine_settings = settings;
  fine_settings.nx = 2 * settings.nx - 1;
  fine_settings.ny = 2 * settings.ny - 1;
  const FifGrid fine = solve_fif(sys, fine_settings);
  double worst = 0.0;
  for (std::size_t iy = 0; iy < fine.ny; ++iy)
    for (std::size_t ix = 0; ix < fine.nx; ++ix)
      worst = std::max(worst, std::abs(fine.value(ix, iy) - read_surface(sys, coarse, fine.xs[ix], fine.ys[iy])));
  return 2.0 * worst;
}

FractalImage alpha_fractal_operator(const OperatorTemplate& tmpl, const Germ& germ) {
  CifsSystem sys = CifsSystem::build(tmpl.partition, tmpl.scale, germ, tmpl.map, tmpl.options);
  FifGrid grid = solve_fif(sys, tmpl.settings);
  return {std::move(sys), std::move(grid)};
}

}  // namespace fracsurf
