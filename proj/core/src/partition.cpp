#include "fracsurf/partition.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <string>

#include "fracsurf/errors.hpp"

namespace fracsurf {

AffineMap1D::AffineMap1D(double lo, double hi, double image_of_lo, double image_of_hi)
    : lo_(lo), hi_(hi), image_lo_(image_of_lo), image_hi_(image_of_hi) {}

// Both directions interpolate between stored endpoints with weights (1-t, t),
// which reproduces the endpoints exactly at t = 0 and t = 1.
double AffineMap1D::operator()(double x) const noexcept {
  const double t = (x - lo_) / (hi_ - lo_);
  return (1.0 - t) * image_lo_ + t * image_hi_;
}

double AffineMap1D::inverse(double x) const noexcept {
  const double t = (x - image_lo_) / (image_hi_ - image_lo_);
  return (1.0 - t) * lo_ + t * hi_;
}

double AffineMap1D::scale() const noexcept { return (image_hi_ - image_lo_) / (hi_ - lo_); }

double AffineMap1D::offset() const noexcept { return image_lo_ - scale() * lo_; }

int s_parity(std::size_t i) {
  if (i == 0) throw DomainError("s_parity: index must be >= 1");
  return (i % 2 == 1) ? 0 : 1;
}

std::size_t tau(std::size_t i, End k) {
  const auto s = static_cast<std::size_t>(s_parity(i));
  return k == End::Zero ? i - 1 + s : i - s;
}

Axis Axis::make(double lo, double hi, const AxisGenerator& gen) {
  if (!(hi > lo)) throw DomainError("axis: upper endpoint must exceed lower endpoint");
  if (!(gen.ratio > 0.0 && gen.ratio < 1.0)) {
    std::ostringstream os;
    os << "axis: ratio must lie in (0,1), got " << gen.ratio;
    throw DomainError(os.str());
  }
  if (gen.truncation < 2) throw DomainError("axis: truncation must be >= 2");

  Axis axis;
  axis.lo_ = lo;
  axis.hi_ = hi;
  axis.ratio_ = gen.ratio;
  axis.truncation_ = gen.truncation;
  axis.generator_ = gen;

  if (gen.kind == AxisGenerator::Kind::Geometric) {
    axis.prefix_ = {lo};
    axis.generator_.prefix.clear();
    return axis;
  }

  const auto& p = gen.prefix;
  if (p.empty()) throw MonotonicityError(0, "axis: prefix must contain the lower endpoint");
  if (p.front() != lo) throw MonotonicityError(0, "axis: prefix must start at the lower endpoint");
  for (std::size_t i = 1; i < p.size(); ++i) {
    if (!(p[i] > p[i - 1])) {
      std::ostringstream os;
      os << "axis: prefix not strictly increasing at index " << i;
      throw MonotonicityError(i, os.str());
    }
    if (!(p[i] < hi)) {
      std::ostringstream os;
      os << "axis: prefix knot at index " << i << " reaches the upper endpoint";
      throw MonotonicityError(i, os.str());
    }
  }
  axis.prefix_ = p;
  return axis;
}

double Axis::knot(std::size_t i) const {
  if (i < prefix_.size()) return prefix_[i];
  const std::size_t k = prefix_.size() - 1;
  const double last = prefix_.back();
  return hi_ - (hi_ - last) * std::pow(ratio_, static_cast<double>(i - k));
}

double Axis::contraction(std::size_t i) const {
  if (i == 0) throw DomainError("axis: cell index must be >= 1");
  return (knot(i) - knot(i - 1)) / (hi_ - lo_);
}

double Axis::sup_contraction() const {
  // Tail cells shrink geometrically, so the first tail cell dominates them.
  double best = 0.0;
  for (std::size_t i = 1; i <= prefix_.size(); ++i) best = std::max(best, contraction(i));
  return best;
}

AffineMap1D Axis::map(std::size_t i) const {
  if (i == 0 || i > truncation_) {
    std::ostringstream os;
    os << "axis: map index " << i << " outside realized range 1.." << truncation_;
    throw DomainError(os.str());
  }
  return cell_map(i);
}

AffineMap1D Axis::cell_map(std::size_t i) const {
  if (i == 0) throw DomainError("axis: map index must be >= 1");
  const double at_lo = knot(tau(i, End::Zero));
  const double at_hi = knot(tau(i, End::Infinity));
  return AffineMap1D(lo_, hi_, at_lo, at_hi);
}

std::optional<std::size_t> Axis::locate(double x) const {
  if (!(x >= lo_ && x <= hi_)) {
    std::ostringstream os;
    os.precision(17);
    os << "axis: point " << x << " outside [" << lo_ << ", " << hi_ << "]";
    throw DomainError(os.str());
  }
  if (x == hi_) return std::nullopt;

  const std::size_t k = prefix_.size() - 1;
  if (k >= 1 && x <= prefix_.back()) {
    auto it = std::lower_bound(prefix_.begin(), prefix_.end(), x);
    auto i = static_cast<std::size_t>(it - prefix_.begin());
    return std::max<std::size_t>(i, 1);
  }

  const double t = (hi_ - x) / (hi_ - prefix_.back());
  double guess = std::ceil(std::log(t) / std::log(ratio_));
  if (!(guess >= 1.0)) guess = 1.0;
  std::size_t i = k + static_cast<std::size_t>(guess);
  while (i > k + 1 && x <= knot(i - 1)) --i;
  while (x > knot(i)) ++i;
  return i;
}

double Partition::delta(std::size_t i, std::size_t j) const {
  return std::max(x_.contraction(i), y_.contraction(j));
}

double Partition::delta_sup() const {
  return std::max(x_.sup_contraction(), y_.sup_contraction());
}

Partition make_partition(const PartitionDescriptor& desc) {
  const Rect& r = desc.domain;
  if (!(r.b > r.a) || !(r.d > r.c)) throw DomainError("partition: domain must satisfy b > a and d > c");
  return Partition(Axis::make(r.a, r.b, desc.x), Axis::make(r.c, r.d, desc.y));
}

}  // namespace fracsurf
