#include "fracsurf/germ.hpp"

#include <algorithm>
#include <cmath>
#include <memory>
#include <numbers>
#include <sstream>

#include "fracsurf/errors.hpp"
#include "fracsurf/partition.hpp"

namespace fracsurf {

namespace {

double ipow(double base, unsigned e) {
  double r = 1.0;
  for (unsigned k = 0; k < e; ++k) r *= base;
  return r;
}

struct Table {
  Rect domain;
  std::size_t nx;
  std::size_t ny;
  std::vector<double> values;

  double operator()(double x, double y) const {
    const double gx = (x - domain.a) / domain.width() * static_cast<double>(nx - 1);
    const double gy = (y - domain.c) / domain.height() * static_cast<double>(ny - 1);
    const auto ix = std::min<std::size_t>(static_cast<std::size_t>(std::max(gx, 0.0)), nx - 2);
    const auto iy = std::min<std::size_t>(static_cast<std::size_t>(std::max(gy, 0.0)), ny - 2);
    const double tx = std::clamp(gx - static_cast<double>(ix), 0.0, 1.0);
    const double ty = std::clamp(gy - static_cast<double>(iy), 0.0, 1.0);
    const double v00 = values[iy * nx + ix];
    const double v10 = values[iy * nx + ix + 1];
    const double v01 = values[(iy + 1) * nx + ix];
    const double v11 = values[(iy + 1) * nx + ix + 1];
    return (1.0 - tx) * (1.0 - ty) * v00 + tx * (1.0 - ty) * v10 + (1.0 - tx) * ty * v01 +
           tx * ty * v11;
  }
};

// psi(x) = (hi - x)/(hi - lo) * sin(pi * u) up to sign, where u is the
// relative position of x inside its knot cell. Zero at every knot.
double knot_profile(const Axis& axis, double x) {
  const auto cell = axis.locate(std::clamp(x, axis.lo(), axis.hi()));
  if (!cell) return 0.0;
  const std::size_t i = *cell;
  const double left = axis.knot(i - 1);
  const double right = axis.knot(i);
  const double u = (x - left) / (right - left);
  const double w = std::min(u, 1.0 - u);
  const double sign = (i % 2 == 1) ? 1.0 : -1.0;
  const double envelope = (axis.hi() - x) / (axis.hi() - axis.lo());
  return sign * envelope * std::sin(std::numbers::pi * std::max(w, 0.0));
}

double knot_profile_lipschitz(const Axis& axis) {
  // |psi'| <= 1/(hi-lo) + pi * sup_i (hi - x_{i-1}) / ((hi-lo) * len_i); on
  // the geometric tail the ratio (hi - x_{i-1}) / len_i equals 1/(1-r).
  const double width = axis.hi() - axis.lo();
  double worst = 1.0 / (1.0 - axis.ratio());
  const std::size_t prefix = axis.generator().prefix.size();
  for (std::size_t i = 1; i <= std::max<std::size_t>(prefix, 1); ++i) {
    const double len = axis.knot(i) - axis.knot(i - 1);
    worst = std::max(worst, (axis.hi() - axis.knot(i - 1)) / len);
  }
  return 1.0 / width + std::numbers::pi * worst / width;
}

}  // namespace

Germ::Germ(std::string label, Fn fn, double lipschitz)
    : label_(std::move(label)), fn_(std::move(fn)), lipschitz_(lipschitz) {
  if (!fn_) throw DomainError("germ: empty function");
  if (!(lipschitz_ >= 0.0) || !std::isfinite(lipschitz_))
    throw DomainError("germ: Lipschitz estimate must be finite and non-negative");
}

Germ Germ::constant(double value) {
  std::ostringstream os;
  os << "constant(" << value << ")";
  return Germ(os.str(), [value](double, double) { return value; }, 0.0);
}

Germ Germ::polynomial(std::vector<Monomial> terms, const Rect& domain) {
  const double mx = std::max(std::abs(domain.a), std::abs(domain.b));
  const double my = std::max(std::abs(domain.c), std::abs(domain.d));
  double gx = 0.0;
  double gy = 0.0;
  for (const auto& t : terms) {
    if (t.px > 0) gx += std::abs(t.coef) * t.px * ipow(mx, t.px - 1) * ipow(my, t.py);
    if (t.py > 0) gy += std::abs(t.coef) * t.py * ipow(mx, t.px) * ipow(my, t.py - 1);
  }
  std::ostringstream os;
  os << "polynomial[" << terms.size() << "]";
  auto fn = [terms = std::move(terms)](double x, double y) {
    double s = 0.0;
    for (const auto& t : terms) s += t.coef * ipow(x, t.px) * ipow(y, t.py);
    return s;
  };
  return Germ(os.str(), std::move(fn), std::hypot(gx, gy));
}

Germ Germ::trig_product(double amplitude, double wx, double phase_x, double wy, double phase_y) {
  std::ostringstream os;
  os << "trig_product(" << amplitude << "," << wx << "," << wy << ")";
  auto fn = [=](double x, double y) {
    return amplitude * std::sin(wx * x + phase_x) * std::sin(wy * y + phase_y);
  };
  return Germ(os.str(), fn, std::abs(amplitude) * std::hypot(wx, wy));
}

Germ Germ::tabulated(const Rect& domain, std::size_t nx, std::size_t ny, std::vector<double> values) {
  if (nx < 2 || ny < 2) throw DomainError("germ: tabulated lattice needs at least 2x2 values");
  if (values.size() != nx * ny) throw DomainError("germ: tabulated value count does not match nx*ny");
  for (double v : values)
    if (!std::isfinite(v)) throw DomainError("germ: tabulated values must be finite");

  const double hx = domain.width() / static_cast<double>(nx - 1);
  const double hy = domain.height() / static_cast<double>(ny - 1);
  double gx = 0.0;
  double gy = 0.0;
  for (std::size_t iy = 0; iy < ny; ++iy)
    for (std::size_t ix = 0; ix + 1 < nx; ++ix)
      gx = std::max(gx, std::abs(values[iy * nx + ix + 1] - values[iy * nx + ix]) / hx);
  for (std::size_t iy = 0; iy + 1 < ny; ++iy)
    for (std::size_t ix = 0; ix < nx; ++ix)
      gy = std::max(gy, std::abs(values[(iy + 1) * nx + ix] - values[iy * nx + ix]) / hy);

  std::ostringstream os;
  os << "tabulated(" << nx << "x" << ny << ")";
  auto table = std::make_shared<const Table>(Table{domain, nx, ny, std::move(values)});
  return Germ(os.str(), [table](double x, double y) { return (*table)(x, y); }, std::hypot(gx, gy));
}

Germ Germ::sampled(const Germ& source, const Rect& domain, std::size_t nx, std::size_t ny) {
  if (nx < 2 || ny < 2) throw DomainError("germ: sampling lattice needs at least 2x2 points");
  std::vector<double> values(nx * ny);
  for (std::size_t iy = 0; iy < ny; ++iy) {
    const double ty = static_cast<double>(iy) / static_cast<double>(ny - 1);
    const double y = (1.0 - ty) * domain.c + ty * domain.d;
    for (std::size_t ix = 0; ix < nx; ++ix) {
      const double tx = static_cast<double>(ix) / static_cast<double>(nx - 1);
      values[iy * nx + ix] = source((1.0 - tx) * domain.a + tx * domain.b, y);
    }
  }
  return tabulated(domain, nx, ny, std::move(values));
}

Germ Germ::knot_vanishing(const Partition& partition, double amplitude) {
  auto axes = std::make_shared<const std::pair<Axis, Axis>>(partition.x(), partition.y());
  const double lx = knot_profile_lipschitz(axes->first);
  const double ly = knot_profile_lipschitz(axes->second);
  std::ostringstream os;
  os << "knot_vanishing(" << amplitude << ")";
  auto fn = [axes, amplitude](double x, double y) {
    return amplitude * knot_profile(axes->first, x) * knot_profile(axes->second, y);
  };
  return Germ(os.str(), fn, std::abs(amplitude) * std::hypot(lx, ly));
}

Germ operator+(const Germ& f, const Germ& g) {
  return Germ("(" + f.label_ + "+" + g.label_ + ")",
              [fa = f.fn_, ga = g.fn_](double x, double y) { return fa(x, y) + ga(x, y); },
              f.lipschitz_ + g.lipschitz_);
}

Germ operator-(const Germ& f, const Germ& g) {
  return Germ("(" + f.label_ + "-" + g.label_ + ")",
              [fa = f.fn_, ga = g.fn_](double x, double y) { return fa(x, y) - ga(x, y); },
              f.lipschitz_ + g.lipschitz_);
}

Germ operator*(double c, const Germ& f) {
  std::ostringstream os;
  os << c << "*" << f.label_;
  return Germ(os.str(), [c, fa = f.fn_](double x, double y) { return c * fa(x, y); },
              std::abs(c) * f.lipschitz_);
}

ParameterMap ParameterMap::blend(double lambda) {
  if (!(lambda >= 0.0 && lambda <= 1.0)) throw DomainError("parameter map: blend lambda must lie in [0,1]");
  return ParameterMap(Kind::Blend, lambda);
}

std::string ParameterMap::name() const {
  switch (kind_) {
    case Kind::Identity:
      return "identity";
    case Kind::CornerBilinear:
      return "corner_bilinear";
    case Kind::Blend: {
      std::ostringstream os;
      os << "blend(" << lambda_ << ")";
      return os.str();
    }
  }
  return "unknown";
}

Germ ParameterMap::apply(const Germ& f, const Rect& r) const {
  if (kind_ == Kind::Identity) return f;

  const double f00 = f(r.a, r.c);
  const double f10 = f(r.b, r.c);
  const double f01 = f(r.a, r.d);
  const double f11 = f(r.b, r.d);
  auto bilinear = [=](double x, double y) {
    const double t = (x - r.a) / r.width();
    const double u = (y - r.c) / r.height();
    return (1.0 - t) * (1.0 - u) * f00 + t * (1.0 - u) * f10 + (1.0 - t) * u * f01 + t * u * f11;
  };
  const double gx = std::max(std::abs(f10 - f00), std::abs(f11 - f01)) / r.width();
  const double gy = std::max(std::abs(f01 - f00), std::abs(f11 - f10)) / r.height();
  const double lip_b = std::hypot(gx, gy);

  if (kind_ == Kind::CornerBilinear) return Germ("B(" + f.label() + ")", bilinear, lip_b);

  const double lambda = lambda_;
  auto blended = [lambda, bilinear, f](double x, double y) {
    return lambda * f(x, y) + (1.0 - lambda) * bilinear(x, y);
  };
  return Germ(name() + "(" + f.label() + ")", blended,
              lambda * f.lipschitz() + (1.0 - lambda) * lip_b);
}

GermAndMap::GermAndMap(Germ g, ParameterMap m, const Rect& domain)
    : germ(std::move(g)), map(m), mapped(map.apply(germ, domain)) {
  for (double x : {domain.a, domain.b}) {
    for (double y : {domain.c, domain.d}) {
      const double fv = germ(x, y);
      const double lv = mapped(x, y);
      if (std::abs(fv - lv) > 1e-12 * std::max(1.0, std::abs(fv))) {
        std::ostringstream os;
        os.precision(17);
        os << "parameter map breaks corner agreement at (" << x << "," << y << "): f=" << fv
           << " L(f)=" << lv;
        throw InconsistencyError(os.str());
      }
    }
  }
}

}  // namespace fracsurf
