#pragma once

#include <cstddef>
#include <optional>
#include <utility>
#include <vector>

#include "fracsurf/geometry.hpp"

namespace fracsurf {

/// How one knot sequence is generated.
///
/// Both kinds are closed form: a finite prefix x_0 = lo < p_1 < ... < p_k
/// followed by the geometric tail x_i = hi - (hi - p_k) * ratio^(i - k).
/// The plain geometric kind is the case k = 0, i.e. x_i = hi - (hi - lo) r^i.
struct AxisGenerator {
  enum class Kind { Geometric, PrefixGeometric };

  Kind kind = Kind::Geometric;
  double ratio = 0.5;
  /// Only read for PrefixGeometric. Must start with the lower endpoint.
  std::vector<double> prefix;
  /// Highest realized knot index; cells 1..truncation are realized.
  std::size_t truncation = 12;

  static AxisGenerator geometric(double ratio, std::size_t truncation = 12) {
    return {Kind::Geometric, ratio, {}, truncation};
  }
  static AxisGenerator with_prefix(std::vector<double> prefix, double ratio,
                                   std::size_t truncation = 12) {
    return {Kind::PrefixGeometric, ratio, std::move(prefix), truncation};
  }
};

/// Affine bijection of [lo, hi] onto a knot cell.
///
/// Stored by endpoint images so that the endpoints map exactly in floating
/// point: map(lo) and map(hi) return the stored knots bit for bit, and
/// inverse() of either knot returns lo or hi bit for bit.
class AffineMap1D {
 public:
  AffineMap1D(double lo, double hi, double image_of_lo, double image_of_hi);

  double operator()(double x) const noexcept;
  double inverse(double x) const noexcept;

  double scale() const noexcept;
  double offset() const noexcept;
  int orientation() const noexcept { return image_hi_ >= image_lo_ ? 1 : -1; }

  double image_of_lo() const noexcept { return image_lo_; }
  double image_of_hi() const noexcept { return image_hi_; }

 private:
  double lo_;
  double hi_;
  double image_lo_;
  double image_hi_;
};

/// Parity of the alternating orientation sequence (0,1,0,1,...): 0 for odd
/// i, 1 for even i. Requires i >= 1.
int s_parity(std::size_t i);

/// Endpoint selector for tau: the lower end (x_0) or the limit (x_infinity).
enum class End { Zero, Infinity };

/// Index of the knot that u_i sends the given endpoint to:
/// tau(i, 0) = i - 1 + s_i and tau(i, inf) = i - s_i.
std::size_t tau(std::size_t i, End k);

/// One strictly increasing knot sequence lo = x_0 < x_1 < ... -> hi.
class Axis {
 public:
  static Axis make(double lo, double hi, const AxisGenerator& gen);

  double lo() const noexcept { return lo_; }
  double hi() const noexcept { return hi_; }
  double ratio() const noexcept { return ratio_; }
  std::size_t truncation() const noexcept { return truncation_; }
  const AxisGenerator& generator() const noexcept { return generator_; }

  /// x_i for any i >= 0 (the tail is evaluated analytically).
  double knot(std::size_t i) const;
  /// Contraction factor of u_i: (x_i - x_{i-1}) / (hi - lo).
  double contraction(std::size_t i) const;
  /// sup over all i >= 1 of contraction(i), including the unrealized tail.
  double sup_contraction() const;

  /// u_i for a realized index 1 <= i <= truncation.
  AffineMap1D map(std::size_t i) const;
  /// u_i for any i >= 1; tail cells beyond the truncation are exact.
  AffineMap1D cell_map(std::size_t i) const;

  /// Smallest i >= 1 with x in [x_{i-1}, x_i]; std::nullopt stands for the
  /// limit point hi. Interior knots resolve to the lower cell.
  std::optional<std::size_t> locate(double x) const;

 private:
  Axis() = default;

  double lo_ = 0.0;
  double hi_ = 1.0;
  double ratio_ = 0.5;
  std::size_t truncation_ = 12;
  std::vector<double> prefix_;  // x_0 .. x_k
  AxisGenerator generator_;
};

/// The countable partition of [a,b] x [c,d] together with the horizontal
/// maps u_i (x axis) and vertical maps v_j (y axis). Immutable.
class Partition {
 public:
  Partition(Axis x, Axis y) : x_(std::move(x)), y_(std::move(y)) {}

  const Axis& x() const noexcept { return x_; }
  const Axis& y() const noexcept { return y_; }
  Rect domain() const noexcept { return {x_.lo(), x_.hi(), y_.lo(), y_.hi()}; }

  AffineMap1D make_u(std::size_t i) const { return x_.map(i); }
  AffineMap1D make_v(std::size_t j) const { return y_.map(j); }

  /// delta_ij = max(a_i, b_j).
  double delta(std::size_t i, std::size_t j) const;
  /// ||delta||_inf = sup over all cells, tail included.
  double delta_sup() const;

 private:
  Axis x_;
  Axis y_;
};

struct PartitionDescriptor {
  Rect domain;
  AxisGenerator x;
  AxisGenerator y;
};

Partition make_partition(const PartitionDescriptor& desc);

}  // namespace fracsurf
