#pragma once

#include <cstddef>
#include <optional>
#include <vector>

#include "fracsurf/cifs.hpp"

namespace fracsurf {

struct SolveSettings {
  double tol = 1e-10;
  std::size_t max_iter = 200;
  std::size_t nx = 257;
  std::size_t ny = 257;
  /// Cell index used to realize the x = b and y = d limit rows; defaults to
  /// the truncation of the respective axis.
  std::optional<std::size_t> boundary_limit_index;
  unsigned jobs = 1;
};

struct SolveMeta {
  std::size_t iterations = 0;
  double final_residual = 0.0;
  double observed_ratio = 0.0;
  /// ceil(log(tol (1 - s) / r_1) / log s), s = ||alpha||_inf.
  std::size_t apriori_bound = 0;
  double tol = 0.0;
  std::vector<double> residuals;  // r_k = ||h_k - h_{k-1}||_inf, k = 1..iterations
};

/// A surface sampled on a uniform lattice over the domain (endpoints
/// included), row-major with y outer: value(ix, iy) = values[iy*nx + ix].
///
/// Alongside the values the grid carries the deviation h - L(f) at each
/// lattice point; reads between lattice points interpolate the deviation
/// bilinearly and add L(f) back exactly.
struct FifGrid {
  std::size_t nx = 0;
  std::size_t ny = 0;
  std::vector<double> xs;
  std::vector<double> ys;
  std::vector<double> values;
  std::vector<double> deviation;
  SolveMeta meta;

  double value(std::size_t ix, std::size_t iy) const { return values[iy * nx + ix]; }
  /// Bilinear read of the deviation grid at (x, y) inside the domain.
  double read_deviation(double x, double y) const;
};

/// Uniform lattice of L(f) samples: the initial iterate h_0. It satisfies the
/// four-corner condition by construction.
FifGrid initial_grid(const CifsSystem& sys, std::size_t nx, std::size_t ny);

/// Lattice of an arbitrary function (deviation taken against L(f)).
FifGrid sample_grid(const CifsSystem& sys, std::size_t nx, std::size_t ny, const Germ::Fn& h);

/// One application of the Read-Bajraktarevic operator T on the lattice:
/// each lattice point is located in its cell, pulled back through
/// (u_i^{-1}, v_j^{-1}), h is read there, and F_ij is applied. The x = b and
/// y = d rows use the deepest realized cell (or settings.boundary_limit_index).
FifGrid apply_T(const CifsSystem& sys, const FifGrid& h, const SolveSettings& settings = {});

/// Banach iteration of T from h_0 = L(f) until ||h_{k} - h_{k-1}|| <= tol.
/// Throws ConvergenceError carrying the residual history otherwise.
FifGrid solve_fif(const CifsSystem& sys, const SolveSettings& settings = {});

/// Value of the surface at an arbitrary point: L(f)(x,y) plus the bilinear
/// deviation read. Requires `grid` to be on the domain of `sys`.
double read_surface(const CifsSystem& sys, const FifGrid& grid, double x, double y);

struct PointValue {
  double value = 0.0;
  double error_bound = 0.0;  // ||alpha||^depth * diam(K)
};

/// Lattice-free evaluation by unrolling the self-referential equation
/// `depth` times with the innermost value seeded by L(f).
PointValue eval_fif_point(const CifsSystem& sys, double x, double y, std::size_t depth,
                          std::optional<std::size_t> boundary_limit_index = std::nullopt);

/// Estimate of the lattice representation error: twice the largest
/// difference between the solution at (nx, ny) and at the refined lattice
/// (2nx - 1, 2ny - 1), taken over the refined lattice points.
double grid_slack(const CifsSystem& sys, const SolveSettings& settings = {});

/// Fixed alpha, Delta and L; the germ varies.
struct OperatorTemplate {
  Partition partition;
  ScaleField scale;
  ParameterMap map;
  SystemOptions options;
  SolveSettings settings;
};

struct FractalImage {
  CifsSystem system;
  FifGrid grid;
};

/// f -> f^alpha_{Delta,L}: rebuilds the system for `germ` (recomputing L(f)
/// and K) and solves. Tabulated germs make this the operator on sampled
/// continuous functions.
FractalImage alpha_fractal_operator(const OperatorTemplate& tmpl, const Germ& germ);

}  // namespace fracsurf
