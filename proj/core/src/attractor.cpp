#include "fracsurf/attractor.hpp"

#include <algorithm>
#include <cmath>
#include <optional>
#include <random>
#include <sstream>
#include <unordered_set>

#include "fracsurf/errors.hpp"

namespace fracsurf {

namespace {

// One key per voxel of edge `cell`, anchored at (a, c, K_lo). 21 bits per
// axis is ample for the resolutions used here.
class VoxelSet {
 public:
  VoxelSet(const CifsSystem& sys, double cell) : origin_{sys.domain().a, sys.domain().c, sys.k_lo()}, cell_(cell) {}

  bool insert(const Point3& p) {
    const auto kx = static_cast<std::uint64_t>(std::floor((p.x - origin_.x) / cell_)) & 0x1FFFFF;
    const auto ky = static_cast<std::uint64_t>(std::floor((p.y - origin_.y) / cell_)) & 0x1FFFFF;
    const auto kz = static_cast<std::uint64_t>(std::floor((p.z - origin_.z) / cell_)) & 0x1FFFFF;
    return keys_.insert((kx << 42) | (ky << 21) | kz).second;
  }

 private:
  Point3 origin_;
  double cell_;
  std::unordered_set<std::uint64_t> keys_;
};

struct MapTable {
  std::vector<AffineMap1D> u;
  std::vector<AffineMap1D> v;
};

MapTable realized_maps(const CifsSystem& sys, std::size_t m, std::size_t n) {
  MapTable t;
  for (std::size_t i = 1; i <= m; ++i) t.u.push_back(sys.u(i));
  for (std::size_t j = 1; j <= n; ++j) t.v.push_back(sys.v(j));
  return t;
}

inline Point3 apply_map(const CifsSystem& sys, const MapTable& maps, std::size_t i, std::size_t j, const Point3& p) {
  return {maps.u[i - 1](p.x), maps.v[j - 1](p.y), sys.F(i, j, p.x, p.y, p.z)};
}

void check_indices(const CifsSystem& sys, std::size_t m, std::size_t n) {
  if (m < 1 || n < 1 || m > sys.partition().x().truncation() || n > sys.partition().y().truncation()) {
    std::ostringstream os;
    os << "partial attractor: (m,n) = (" << m << "," << n << ") outside the realized range";
    throw DomainError(os.str());
  }
}

double half_cell_diagonal_3d(const FifGrid& g) {
  double worst = 0.0;
  for (std::size_t iy = 0; iy + 1 < g.ny; ++iy) {
    for (std::size_t ix = 0; ix + 1 < g.nx; ++ix) {
      const double z[4] = {g.value(ix, iy), g.value(ix + 1, iy), g.value(ix, iy + 1), g.value(ix + 1, iy + 1)};
      const double dz = *std::max_element(z, z + 4) - *std::min_element(z, z + 4);
      const double dx = g.xs[ix + 1] - g.xs[ix];
      const double dy = g.ys[iy + 1] - g.ys[iy];
      worst = std::max(worst, 0.5 * std::sqrt(dx * dx + dy * dy + dz * dz));
    }
  }
  return worst;
}

}  // namespace

PointCloud3 partial_attractor(const CifsSystem& sys, std::size_t m, std::size_t n, AttractorMode mode,
                              const AttractorBudget& budget) {
  check_indices(sys, m, n);
  // Random iteration and set iteration both rely on the maps contracting.
  (void)sys.hyperbolicity_certificate();
  const MapTable maps = realized_maps(sys, m, n);

  PointCloud3 cloud;
  if (mode == AttractorMode::Deterministic) {
    if (budget.resolution < 1) throw DomainError("partial attractor: resolution must be >= 1");
    const Rect r = sys.domain();
    const double cell = std::max(r.width(), r.height()) / static_cast<double>(budget.resolution);
    VoxelSet seen(sys, cell);
    const Point3 seed = sys.fixed_point(1, 1);
    seen.insert(seed);
    cloud.points.push_back(seed);
    std::vector<Point3> frontier{seed};
    std::size_t rounds = 0;
    while (!frontier.empty() && rounds < budget.max_rounds) {
      std::vector<Point3> next;
      for (const auto& p : frontier) {
        for (std::size_t i = 1; i <= m; ++i) {
          for (std::size_t j = 1; j <= n; ++j) {
            const Point3 q = apply_map(sys, maps, i, j, p);
            if (seen.insert(q)) {
              cloud.points.push_back(q);
              next.push_back(q);
            }
          }
        }
      }
      frontier.swap(next);
      ++rounds;
    }
    cloud.provenance = {PointCloud3::Source::Deterministic, 0, rounds, cell};
    cloud.resolution = std::max(cell * std::sqrt(3.0), max_nearest_neighbour_gap(cloud));
    return cloud;
  }

  if (budget.points < 1) throw DomainError("partial attractor: point budget must be >= 1");
  std::mt19937_64 rng(budget.seed);
  std::vector<double> weights;
  weights.reserve(m * n);
  for (std::size_t i = 1; i <= m; ++i)
    for (std::size_t j = 1; j <= n; ++j)
      weights.push_back(budget.weighting == MapWeighting::Area
                            ? sys.partition().x().contraction(i) * sys.partition().y().contraction(j)
                            : 1.0);
  std::discrete_distribution<std::size_t> pick(weights.begin(), weights.end());

  const Rect r = sys.domain();
  Point3 p{0.5 * (r.a + r.b), 0.5 * (r.c + r.d), 0.0};
  p.z = sys.mapped()(p.x, p.y);
  cloud.points.reserve(budget.points);
  const std::size_t total = budget.burn_in + budget.points;
  for (std::size_t step = 0; step < total; ++step) {
    const std::size_t k = pick(rng);
    p = apply_map(sys, maps, k / n + 1, k % n + 1, p);
    if (step >= budget.burn_in) cloud.points.push_back(p);
  }
  cloud.provenance = {PointCloud3::Source::Chaos, budget.seed, total, 0.0};
  cloud.resolution = max_nearest_neighbour_gap(cloud);
  return cloud;
}

PointCloud3 apply_hutchinson(const CifsSystem& sys, const PointCloud3& cloud, std::size_t m, std::size_t n,
                             double cell) {
  check_indices(sys, m, n);
  const MapTable maps = realized_maps(sys, m, n);
  PointCloud3 out;
  out.provenance = {PointCloud3::Source::GraphIteration, 0, cloud.provenance.iterations + 1, cell};
  std::optional<VoxelSet> seen;
  if (cell > 0.0) seen.emplace(sys, cell);
  for (const auto& p : cloud.points) {
    for (std::size_t i = 1; i <= m; ++i) {
      for (std::size_t j = 1; j <= n; ++j) {
        const Point3 q = apply_map(sys, maps, i, j, p);
        if (!seen || seen->insert(q)) out.points.push_back(q);
      }
    }
  }
  out.resolution = cell > 0.0 ? cell * std::sqrt(3.0) : 0.0;
  return out;
}

PointCloud3 graph_cloud(const FifGrid& grid) {
  PointCloud3 cloud;
  cloud.points.reserve(grid.nx * grid.ny);
  for (std::size_t iy = 0; iy < grid.ny; ++iy)
    for (std::size_t ix = 0; ix < grid.nx; ++ix) cloud.points.push_back({grid.xs[ix], grid.ys[iy], grid.value(ix, iy)});
  cloud.provenance = {PointCloud3::Source::Lattice, 0, grid.meta.iterations, 0.0};
  cloud.resolution = max_nearest_neighbour_gap(cloud);
  return cloud;
}

std::string ConvergenceReport::to_text() const {
  std::ostringstream os;
  os.precision(17);
  for (std::size_t k = 0; k < rows.size(); ++k) {
    const auto& r = rows[k];
    const std::string key = "partial[" + std::to_string(r.m) + "," + std::to_string(r.n) + "]";
    os << key << ".points=" << r.points << "\n";
    os << key << ".resolution=" << r.resolution << "\n";
    if (k + 1 < rows.size()) os << key << ".directed_to_next=" << r.directed_to_next << "\n";
    os << key << ".distance_to_graph=" << r.distance_to_graph << "\n";
    os << key << ".tail_bound=" << r.tail_bound << "\n";
  }
  os << "epsilon=" << epsilon << "\n";
  os << "inclusions_hold=" << (inclusions_hold ? "true" : "false") << "\n";
  os << "eventually_nonincreasing=" << (eventually_nonincreasing ? "true" : "false") << "\n";
  os << "terminal_within_tail=" << (terminal_within_tail ? "true" : "false") << "\n";
  os << "graph_factor=" << graph_factor << "\n";
  os << "terminal_near_graph=" << (terminal_near_graph ? "true" : "false") << "\n";
  return os.str();
}

ConvergenceReport convergence_report(const CifsSystem& sys,
                                     const std::vector<std::pair<std::size_t, std::size_t>>& schedule,
                                     AttractorMode mode, const AttractorBudget& budget, const PointCloud3& graph,
                                     std::vector<PointCloud3>* clouds_out) {
  if (schedule.empty()) throw DomainError("convergence report: empty schedule");
  for (std::size_t k = 1; k < schedule.size(); ++k) {
    if (schedule[k].first < schedule[k - 1].first || schedule[k].second < schedule[k - 1].second)
      throw DomainError("convergence report: schedule must be nondecreasing in both indices");
  }

  std::vector<PointCloud3> clouds;
  for (const auto& [m, n] : schedule) clouds.push_back(partial_attractor(sys, m, n, mode, budget));

  ConvergenceReport report;
  report.epsilon = graph.resolution;
  for (const auto& c : clouds) report.epsilon = std::max(report.epsilon, c.resolution);

  for (std::size_t k = 0; k < clouds.size(); ++k) {
    ConvergenceRow row;
    row.m = schedule[k].first;
    row.n = schedule[k].second;
    row.points = clouds[k].points.size();
    row.resolution = clouds[k].resolution;
    if (k + 1 < clouds.size()) row.directed_to_next = directed_hausdorff(clouds[k], clouds[k + 1]);
    row.distance_to_graph = hausdorff_distance(clouds[k], graph);

    // Graph points beyond the realized cells, measured against the graph
    // points inside them.
    const double xm = sys.partition().x().knot(row.m);
    const double yn = sys.partition().y().knot(row.n);
    std::vector<Point3> inside;
    std::vector<Point3> outside;
    for (const auto& p : graph.points) (p.x <= xm && p.y <= yn ? inside : outside).push_back(p);
    if (!outside.empty() && !inside.empty()) {
      const NearestNeighbourIndex index(inside);
      for (const auto& p : outside) row.tail_bound = std::max(row.tail_bound, index.nearest(p));
    }
    report.rows.push_back(row);
  }

  report.inclusions_hold = true;
  report.eventually_nonincreasing = true;
  for (std::size_t k = 0; k + 1 < report.rows.size(); ++k) {
    if (report.rows[k].directed_to_next > report.epsilon) report.inclusions_hold = false;
    if (report.rows[k + 1].distance_to_graph > report.rows[k].distance_to_graph + report.epsilon)
      report.eventually_nonincreasing = false;
  }
  const auto& last = report.rows.back();
  report.terminal_within_tail = last.distance_to_graph <= last.tail_bound + report.epsilon;
  report.terminal_near_graph = last.distance_to_graph <= report.graph_factor * report.epsilon;
  if (clouds_out) *clouds_out = std::move(clouds);
  return report;
}

std::vector<GraphIterationStep> graph_iteration_check(const CifsSystem& sys, const FifGrid& h0, std::size_t steps,
                                                      double cell, double grid_error) {
  const std::size_t m = sys.partition().x().truncation();
  const std::size_t n = sys.partition().y().truncation();
  const Rect r = sys.domain();
  const double coverage_gap = std::hypot(r.b - sys.partition().x().knot(m), r.d - sys.partition().y().knot(n));

  std::vector<GraphIterationStep> out;
  PointCloud3 cloud = graph_cloud(h0);
  FifGrid grid = h0;
  for (std::size_t step = 1; step <= steps; ++step) {
    cloud = apply_hutchinson(sys, cloud, m, n, cell);
    grid = apply_T(sys, grid);
    GraphIterationStep s;
    s.n = step;
    s.cloud_points = cloud.points.size();
    s.hausdorff = hausdorff_distance(cloud, graph_cloud(grid));
    s.slack = half_cell_diagonal_3d(grid) + cell * std::sqrt(3.0) + coverage_gap + grid_error;
    out.push_back(s);
  }
  return out;
}

}  // namespace fracsurf
