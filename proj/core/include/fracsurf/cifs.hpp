#pragma once

#include <cstddef>
#include <vector>

#include "fracsurf/geometry.hpp"
#include "fracsurf/germ.hpp"
#include "fracsurf/partition.hpp"
#include "fracsurf/scale_field.hpp"

namespace fracsurf {

struct SystemOptions {
  /// Points per axis of the lattice used to estimate sup norms and ranges.
  std::size_t audit_lattice = 512;
  /// Relative slack added to the vertical margin of K.
  double k_slack = 0.10;
};

/// Dense-grid estimates recorded when the system is assembled.
struct SystemNorms {
  double f_min = 0.0;
  double f_max = 0.0;
  double mapped_min = 0.0;
  double mapped_max = 0.0;
  double f_minus_mapped_sup = 0.0;  // ||f - L(f)||_inf
  double mapped_sup = 0.0;          // ||L(f)||_inf
  std::size_t audit_lattice = 0;
};

/// Evidence that every W_ij contracts in the metric d_delta.
struct Certificate {
  double delta_sup = 0.0;         // ||delta||_inf
  double theta = 0.0;             // Lipschitz constant of every F_ij in (x,y)
  double sup_alpha = 0.0;         // ||alpha||_inf
  double delta_metric = 0.0;      // inf_ij (1 - 2 delta_ij) / (2 theta)
  double contraction_ratio = 0.0; // max(sup_ij(delta_ij + delta_metric*theta), ||alpha||_inf)
};

struct EdgeCheck {
  char axis = 'x';          // 'x': edge {x_i} x J_j, 'y': edge I_i x {y_j}
  std::size_t knot = 0;     // shared knot index
  std::size_t cell = 0;     // index along the other axis
  double max_discrepancy = 0.0;
};

struct MatchingReport {
  std::vector<EdgeCheck> edges;
  double max_discrepancy = 0.0;
  /// The second condition read literally as F_ij(x,y*,z) = F_{i+1,j}(x,y*,z).
  /// Reported, never asserted.
  double literal_max_discrepancy = 0.0;
  std::size_t samples_per_edge = 0;
  double tol = 0.0;

  bool passed() const noexcept { return max_discrepancy <= tol; }
};

/// d_delta((x,y,z),(x',y',z')) = ||(x,y) - (x',y')|| + delta |z - z'|.
double d_delta(const Point3& p, const Point3& q, double delta) noexcept;

/// The countable IFS {X, W_ij} with W_ij(x,y,z) = (u_i(x), v_j(y), F_ij(x,y,z))
/// and F_ij(x,y,z) = alpha_ij(u_i x, v_j y) z + f(u_i x, v_j y)
///                   - alpha_ij(u_i x, v_j y) L(f)(x,y).
///
/// Immutable after build(); every evaluation is const and reentrant.
/// Cell indices beyond the truncation address the analytic tail cells.
class CifsSystem {
 public:
  static CifsSystem build(Partition partition, ScaleField scale, Germ germ, ParameterMap map,
                          const SystemOptions& options = {});

  /// Same partition, scale field, map and options with another germ.
  CifsSystem with_germ(Germ germ) const;
  CifsSystem with_scale(ScaleField scale) const;
  CifsSystem with_map(ParameterMap map) const;

  const Partition& partition() const noexcept { return partition_; }
  const ScaleField& scale() const noexcept { return scale_; }
  const Germ& germ() const noexcept { return germ_map_.germ; }
  const Germ& mapped() const noexcept { return germ_map_.mapped; }
  const ParameterMap& map() const noexcept { return germ_map_.map; }
  const SystemOptions& options() const noexcept { return options_; }
  Rect domain() const noexcept { return partition_.domain(); }

  double k_lo() const noexcept { return k_lo_; }
  double k_hi() const noexcept { return k_hi_; }
  double k_diameter() const noexcept { return k_hi_ - k_lo_; }
  const SystemNorms& norms() const noexcept { return norms_; }
  double theta() const noexcept { return theta_; }
  double delta_sup() const noexcept { return partition_.delta_sup(); }

  /// u_i and v_j for any index >= 1 (realized ones are cached).
  AffineMap1D u(std::size_t i) const;
  AffineMap1D v(std::size_t j) const;

  /// F_ij(x,y,z). Rejects (x,y) outside the domain and z outside K.
  double eval_F(std::size_t i, std::size_t j, double x, double y, double z) const;
  /// F_ij without the range checks; used by the solvers' inner loops.
  double F(std::size_t i, std::size_t j, double x, double y, double z) const;
  Point3 eval_W(std::size_t i, std::size_t j, const Point3& p) const;

  /// Closed-form fixed point of W_ij (affine solve per coordinate).
  Point3 fixed_point(std::size_t i, std::size_t j) const;

  MatchingReport verify_matching(std::size_t samples_per_edge, double tol) const;

  /// Throws CertificateRefused when ||delta||_inf >= 1/2.
  Certificate hyperbolicity_certificate() const;

 private:
  CifsSystem(Partition partition, ScaleField scale, GermAndMap germ_map, SystemOptions options);
  void assemble();

  Partition partition_;
  ScaleField scale_;
  GermAndMap germ_map_;
  SystemOptions options_;
  SystemNorms norms_;
  double k_lo_ = 0.0;
  double k_hi_ = 0.0;
  double theta_ = 0.0;
  std::vector<AffineMap1D> u_cache_;  // u_1 .. u_m
  std::vector<AffineMap1D> v_cache_;  // v_1 .. v_n
};

}  // namespace fracsurf
