#pragma once

#include <cstddef>
#include <optional>
#include <vector>

#include "fracsurf/geometry.hpp"

namespace fracsurf {

/// The double family of scale functions alpha_ij on the domain.
///
/// Three kinds are supported:
///  - Constant: alpha_ij(x,y) = value for every cell.
///  - Affine:   alpha_ij(x,y) = c0 + cx*x + cy*y, the same global function for
///              every cell (continuous across edges, so matching holds).
///  - PerCell:  alpha_ij constant on each cell, read from table[i-1][j-1];
///              cells beyond the table inherit the last row/column.
///
/// sup_bound() and lip_bound() are certified: computed exactly for the
/// kind, optionally loosened by user-supplied bounds that dominate them.
class ScaleField {
 public:
  enum class Kind { Constant, Affine, PerCell };

  static ScaleField constant(double value);
  static ScaleField affine(double c0, double cx, double cy, const Rect& domain);
  static ScaleField per_cell(std::vector<std::vector<double>> table);

  /// Replaces the computed bounds with user-supplied ones. A supplied bound
  /// below the computed value, or a sup bound >= 1, is rejected.
  ScaleField with_bounds(std::optional<double> sup_bound, std::optional<double> lip_bound) const;

  double operator()(std::size_t i, std::size_t j, double x, double y) const noexcept;

  Kind kind() const noexcept { return kind_; }
  double sup_bound() const noexcept { return sup_bound_; }
  double lip_bound() const noexcept { return lip_bound_; }

  /// Same kind and shape, every coefficient multiplied by `factor`.
  ScaleField scaled(double factor) const;

  const std::vector<double>& coefficients() const noexcept { return coeffs_; }
  const std::vector<std::vector<double>>& table() const noexcept { return table_; }

 private:
  ScaleField() = default;
  void validate() const;

  Kind kind_ = Kind::Constant;
  std::vector<double> coeffs_;               // Constant: {v}; Affine: {c0, cx, cy}
  std::vector<std::vector<double>> table_;   // PerCell
  Rect domain_;
  double sup_bound_ = 0.0;
  double lip_bound_ = 0.0;
};

}  // namespace fracsurf
