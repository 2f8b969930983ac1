#include "fracsurf/scale_field.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "fracsurf/errors.hpp"

namespace fracsurf {

namespace {

double affine_sup(double c0, double cx, double cy, const Rect& r) {
  // A linear function attains its extrema at the rectangle's corners.
  double best = 0.0;
  for (double x : {r.a, r.b})
    for (double y : {r.c, r.d}) best = std::max(best, std::abs(c0 + cx * x + cy * y));
  return best;
}

}  // namespace

ScaleField ScaleField::constant(double value) {
  ScaleField s;
  s.kind_ = Kind::Constant;
  s.coeffs_ = {value};
  s.sup_bound_ = std::abs(value);
  s.lip_bound_ = 0.0;
  s.validate();
  return s;
}

ScaleField ScaleField::affine(double c0, double cx, double cy, const Rect& domain) {
  ScaleField s;
  s.kind_ = Kind::Affine;
  s.coeffs_ = {c0, cx, cy};
  s.domain_ = domain;
  s.sup_bound_ = affine_sup(c0, cx, cy, domain);
  s.lip_bound_ = std::hypot(cx, cy);
  s.validate();
  return s;
}

ScaleField ScaleField::per_cell(std::vector<std::vector<double>> table) {
  if (table.empty() || table.front().empty()) throw DomainError("scale field: empty per-cell table");
  const std::size_t cols = table.front().size();
  ScaleField s;
  s.kind_ = Kind::PerCell;
  for (const auto& row : table) {
    if (row.size() != cols) throw DomainError("scale field: per-cell table rows differ in length");
    for (double v : row) s.sup_bound_ = std::max(s.sup_bound_, std::abs(v));
  }
  s.table_ = std::move(table);
  s.lip_bound_ = 0.0;
  s.validate();
  return s;
}

ScaleField ScaleField::with_bounds(std::optional<double> sup_bound,
                                   std::optional<double> lip_bound) const {
  ScaleField s = *this;
  if (sup_bound) {
    if (*sup_bound + 1e-15 < sup_bound_) {
      std::ostringstream os;
      os << "scale field: supplied sup_bound " << *sup_bound << " is below the field's sup "
         << sup_bound_;
      throw DomainError(os.str());
    }
    s.sup_bound_ = *sup_bound;
  }
  if (lip_bound) {
    if (*lip_bound + 1e-15 < lip_bound_ || !std::isfinite(*lip_bound)) {
      std::ostringstream os;
      os << "scale field: supplied lip_bound " << *lip_bound
         << " is below the field's Lipschitz constant " << lip_bound_;
      throw DomainError(os.str());
    }
    s.lip_bound_ = *lip_bound;
  }
  s.validate();
  return s;
}

void ScaleField::validate() const {
  if (!(sup_bound_ < 1.0)) throw DomainError("scale field must satisfy sup < 1");
  if (!std::isfinite(lip_bound_)) throw DomainError("scale field Lipschitz bound must be finite");
}

double ScaleField::operator()(std::size_t i, std::size_t j, double x, double y) const noexcept {
  switch (kind_) {
    case Kind::Constant:
      return coeffs_[0];
    case Kind::Affine:
      return coeffs_[0] + coeffs_[1] * x + coeffs_[2] * y;
    case Kind::PerCell: {
      const std::size_t r = std::min(i == 0 ? 0 : i - 1, table_.size() - 1);
      const std::size_t c = std::min(j == 0 ? 0 : j - 1, table_[r].size() - 1);
      return table_[r][c];
    }
  }
  return 0.0;
}

ScaleField ScaleField::scaled(double factor) const {
  ScaleField s = *this;
  for (double& c : s.coeffs_) c *= factor;
  for (auto& row : s.table_)
    for (double& v : row) v *= factor;
  s.sup_bound_ *= std::abs(factor);
  s.lip_bound_ *= std::abs(factor);
  s.validate();
  return s;
}

}  // namespace fracsurf
