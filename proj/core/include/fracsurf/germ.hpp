#pragma once

#include <functional>
#include <string>
#include <vector>

#include "fracsurf/geometry.hpp"

namespace fracsurf {

class Partition;

/// Term c * x^px * y^py of a bivariate polynomial.
struct Monomial {
  double coef = 0.0;
  unsigned px = 0;
  unsigned py = 0;
};

/// A bivariate germ function together with an upper bound on its Lipschitz
/// constant (Euclidean norm on the plane).
class Germ {
 public:
  using Fn = std::function<double(double, double)>;

  Germ(std::string label, Fn fn, double lipschitz);

  static Germ constant(double value);
  /// Lipschitz bound from the coefficient sums over the domain.
  static Germ polynomial(std::vector<Monomial> terms, const Rect& domain);
  /// amplitude * sin(wx*x + phase_x) * sin(wy*y + phase_y).
  static Germ trig_product(double amplitude, double wx, double phase_x, double wy, double phase_y);
  /// Values on a uniform nx x ny lattice over `domain` (row-major, y outer),
  /// completed bilinearly in between.
  static Germ tabulated(const Rect& domain, std::size_t nx, std::size_t ny, std::vector<double> values);
  /// Samples `source` on a uniform lattice and returns its bilinear completion.
  static Germ sampled(const Germ& source, const Rect& domain, std::size_t nx, std::size_t ny);
  /// amplitude * psi_x(x) * psi_y(y), where psi vanishes at every knot of
  /// the partition (the whole countable sequence, not only realized knots)
  /// and at both endpoints.
  static Germ knot_vanishing(const Partition& partition, double amplitude);

  double operator()(double x, double y) const { return fn_(x, y); }
  double lipschitz() const noexcept { return lipschitz_; }
  const std::string& label() const noexcept { return label_; }

  friend Germ operator+(const Germ& f, const Germ& g);
  friend Germ operator-(const Germ& f, const Germ& g);
  friend Germ operator*(double c, const Germ& f);

 private:
  std::string label_;
  Fn fn_;
  double lipschitz_;
};

/// The parameter map L. Every catalog entry agrees with the germ at the four
/// corners of the domain and is linear in the germ.
class ParameterMap {
 public:
  enum class Kind { Identity, CornerBilinear, Blend };

  static ParameterMap identity() { return ParameterMap(Kind::Identity, 1.0); }
  static ParameterMap corner_bilinear() { return ParameterMap(Kind::CornerBilinear, 0.0); }
  /// lambda * f + (1 - lambda) * B(f), lambda in [0,1].
  static ParameterMap blend(double lambda);

  Germ apply(const Germ& f, const Rect& domain) const;

  Kind kind() const noexcept { return kind_; }
  double lambda() const noexcept { return lambda_; }
  bool is_linear() const noexcept { return true; }
  std::string name() const;

 private:
  ParameterMap(Kind kind, double lambda) : kind_(kind), lambda_(lambda) {}

  Kind kind_;
  double lambda_;
};

/// Germ f, its image L(f), and the map itself. Construction asserts the
/// four-corner agreement L(f)(x_k, y_l) = f(x_k, y_l) to 1e-12.
struct GermAndMap {
  GermAndMap(Germ germ, ParameterMap map, const Rect& domain);

  Germ germ;
  ParameterMap map;
  Germ mapped;
};

}  // namespace fracsurf
