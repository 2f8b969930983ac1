#pragma once

#include <cstddef>
#include <cstdint>
#include <memory>
#include <string>
#include <utility>
#include <vector>

#include "fracsurf/cifs.hpp"
#include "fracsurf/fif.hpp"
#include "fracsurf/geometry.hpp"

namespace fracsurf {

/// Finite stand-in for a compact subset of X = [a,b] x [c,d] x K.
struct PointCloud3 {
  enum class Source { Chaos, Deterministic, Lattice, GraphIteration };

  struct Provenance {
    Source source = Source::Lattice;
    std::uint64_t seed = 0;
    std::size_t iterations = 0;
    double cell_size = 0.0;
  };

  std::vector<Point3> points;
  Provenance provenance;
  /// Method resolution: max(voxel diagonal, largest nearest-neighbour gap).
  double resolution = 0.0;
};

/// Static k-d tree over a point set for exact nearest-neighbour queries.
class NearestNeighbourIndex {
 public:
  explicit NearestNeighbourIndex(std::vector<Point3> points);
  ~NearestNeighbourIndex();
  NearestNeighbourIndex(NearestNeighbourIndex&&) noexcept;
  NearestNeighbourIndex& operator=(NearestNeighbourIndex&&) noexcept;

  /// Euclidean distance from q to the closest indexed point.
  double nearest(const Point3& q) const;
  /// Distance to the closest indexed point other than the one at `self`
  /// (index into the original point order).
  double nearest_excluding(const Point3& q, std::size_t self) const;
  std::size_t size() const noexcept;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

/// max_{a in A} min_{b in B} |a - b|.
double directed_hausdorff(const PointCloud3& from, const PointCloud3& to);
/// Hausdorff distance under the Euclidean metric (k-d tree accelerated).
double hausdorff_distance(const PointCloud3& a, const PointCloud3& b);
/// O(|A| |B|) scan; the reference for the accelerated routine.
double hausdorff_distance_brute(const PointCloud3& a, const PointCloud3& b);

/// Largest nearest-neighbour distance inside the cloud.
double max_nearest_neighbour_gap(const PointCloud3& cloud);

enum class AttractorMode { Chaos, Deterministic };
enum class MapWeighting { Uniform, Area };

struct AttractorBudget {
  /// Chaos: number of retained orbit points.
  std::size_t points = 200000;
  /// Deterministic: voxels per unit of the longer domain side.
  std::size_t resolution = 128;
  std::uint64_t seed = 20240229;
  MapWeighting weighting = MapWeighting::Uniform;
  std::size_t burn_in = 100;
  /// Deterministic: cap on breadth-first rounds.
  std::size_t max_rounds = 100000;
};

/// Attractor A_{m,n} of the partial IFS {W_ij : i <= m, j <= n}.
///
/// Chaos mode runs one random-iteration orbit with a fixed seed and drops
/// the first burn_in points. Deterministic mode starts at the fixed point of
/// W_11 and keeps applying every map to newly reached points, keeping one
/// exact representative per voxel, until no voxel is added.
///
/// Throws CertificateRefused when the system has no d_delta certificate.
PointCloud3 partial_attractor(const CifsSystem& sys, std::size_t m, std::size_t n, AttractorMode mode,
                              const AttractorBudget& budget);

/// Image of a cloud under every W_ij with i <= m, j <= n, thinned to one
/// point per voxel of edge `cell` (no thinning when cell <= 0).
PointCloud3 apply_hutchinson(const CifsSystem& sys, const PointCloud3& cloud, std::size_t m, std::size_t n,
                             double cell);

/// The lattice points (x, y, value) of a grid.
PointCloud3 graph_cloud(const FifGrid& grid);

struct ConvergenceRow {
  std::size_t m = 0;
  std::size_t n = 0;
  std::size_t points = 0;
  double resolution = 0.0;
  double directed_to_next = 0.0;  // h(A_{m,n} -> A_{m',n'}), 0 on the last row
  double distance_to_graph = 0.0; // d_H(A_{m,n}, G_lattice)
  double tail_bound = 0.0;        // how far the graph reaches beyond [a,x_m] x [c,y_n]
};

struct ConvergenceReport {
  std::vector<ConvergenceRow> rows;
  double epsilon = 0.0;  // largest resolution over the schedule
  bool inclusions_hold = false;       // every directed distance <= epsilon
  bool eventually_nonincreasing = false;
  bool terminal_within_tail = false;  // last distance <= tail bound + epsilon
  double graph_factor = 5.0;
  bool terminal_near_graph = false;   // last distance <= graph_factor * epsilon

  /// One `metric=value` line per quantity and verdict.
  std::string to_text() const;
};

/// Builds A_{m,n} for every schedule entry and compares consecutive clouds
/// and each cloud with `graph`. The clouds are handed back through `clouds`
/// when it is not null.
ConvergenceReport convergence_report(const CifsSystem& sys, const std::vector<std::pair<std::size_t, std::size_t>>& schedule,
                                     AttractorMode mode, const AttractorBudget& budget, const PointCloud3& graph,
                                     std::vector<PointCloud3>* clouds = nullptr);

struct GraphIterationStep {
  std::size_t n = 0;
  double hausdorff = 0.0;
  double slack = 0.0;
  std::size_t cloud_points = 0;
  bool passed() const noexcept { return hausdorff <= slack; }
};

/// Compares W^n(G(h_0)) (exact images of lattice points of h_0, thinned per
/// voxel of edge `cell`) with the lattice of T^n(h_0), n = 1..steps.
///
/// The slack for step n is the lattice's own geometric resolution (half the
/// largest 3-D cell diagonal of T^n(h_0)), plus the voxel diagonal of the
/// thinning, plus the gap between the realized maps' coverage and the
/// domain edge, plus the grid representation error `grid_error`.
std::vector<GraphIterationStep> graph_iteration_check(const CifsSystem& sys, const FifGrid& h0, std::size_t steps,
                                                      double cell, double grid_error);

}  // namespace fracsurf
