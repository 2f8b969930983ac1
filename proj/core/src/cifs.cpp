#include "fracsurf/cifs.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "fracsurf/errors.hpp"

namespace fracsurf {

double d_delta(const Point3& p, const Point3& q, double delta) noexcept {
  return std::hypot(p.x - q.x, p.y - q.y) + delta * std::abs(p.z - q.z);
}

CifsSystem::CifsSystem(Partition partition, ScaleField scale, GermAndMap germ_map,
                       SystemOptions options)
    : partition_(std::move(partition)),
      scale_(std::move(scale)),
      germ_map_(std::move(germ_map)),
      options_(options) {}

CifsSystem CifsSystem::build(Partition partition, ScaleField scale, Germ germ, ParameterMap map,
                             const SystemOptions& options) {
  if (options.audit_lattice < 2) throw DomainError("system: audit lattice needs at least 2 points per axis");
  if (!(options.k_slack >= 0.0)) throw DomainError("system: K slack must be non-negative");
  const Rect domain = partition.domain();
  CifsSystem sys(std::move(partition), std::move(scale), GermAndMap(std::move(germ), map, domain),
                 options);
  sys.assemble();
  return sys;
}

CifsSystem CifsSystem::with_germ(Germ germ) const {
  return build(partition_, scale_, std::move(germ), germ_map_.map, options_);
}

CifsSystem CifsSystem::with_scale(ScaleField scale) const {
  return build(partition_, std::move(scale), germ_map_.germ, germ_map_.map, options_);
}

CifsSystem CifsSystem::with_map(ParameterMap map) const {
  return build(partition_, scale_, germ_map_.germ, map, options_);
}

void CifsSystem::assemble() {
  const Rect r = domain();
  const Germ& f = germ_map_.germ;
  const Germ& lf = germ_map_.mapped;

  // Sup norms and ranges on the audit lattice.
  const std::size_t n = options_.audit_lattice;
  norms_ = {};
  norms_.audit_lattice = n;
  norms_.f_min = norms_.mapped_min = std::numeric_limits<double>::infinity();
  norms_.f_max = norms_.mapped_max = -std::numeric_limits<double>::infinity();
  for (std::size_t iy = 0; iy < n; ++iy) {
    const double ty = static_cast<double>(iy) / static_cast<double>(n - 1);
    const double y = (1.0 - ty) * r.c + ty * r.d;
    for (std::size_t ix = 0; ix < n; ++ix) {
      const double tx = static_cast<double>(ix) / static_cast<double>(n - 1);
      const double x = (1.0 - tx) * r.a + tx * r.b;
      const double fv = f(x, y);
      const double lv = lf(x, y);
      if (!std::isfinite(fv) || !std::isfinite(lv)) throw DomainError("system: germ is not finite on the domain");
      norms_.f_min = std::min(norms_.f_min, fv);
      norms_.f_max = std::max(norms_.f_max, fv);
      norms_.mapped_min = std::min(norms_.mapped_min, lv);
      norms_.mapped_max = std::max(norms_.mapped_max, lv);
      norms_.f_minus_mapped_sup = std::max(norms_.f_minus_mapped_sup, std::abs(fv - lv));
      norms_.mapped_sup = std::max(norms_.mapped_sup, std::abs(lv));
    }
  }

  // K must contain the ranges of f and L(f) with room for the perturbation
  // f - L(f) amplified by 1/(1-s), and must be mapped into itself by every
  // F_ij: for z in K, |F - f(P)| <= s (W + margin), so margin >= s W / (1 - s).
  const double s = scale_.sup_bound();
  const double lo = std::min(norms_.f_min, norms_.mapped_min);
  const double hi = std::max(norms_.f_max, norms_.mapped_max);
  const double spread = hi - lo;
  double margin = std::max(norms_.f_minus_mapped_sup / (1.0 - s), s * spread / (1.0 - s));
  margin *= 1.0 + options_.k_slack;
  margin = std::max(margin, 1e-9 * (1.0 + std::abs(lo) + std::abs(hi)));
  k_lo_ = lo - margin;
  k_hi_ = hi + margin;

  // Lipschitz constant of F_ij in (x,y) for fixed z in K, from the triangle
  // inequality on the defining formula.
  const double dsup = partition_.delta_sup();
  const double k_abs = std::max(std::abs(k_lo_), std::abs(k_hi_));
  theta_ = scale_.lip_bound() * dsup * (k_abs + norms_.mapped_sup) + f.lipschitz() * dsup +
           s * lf.lipschitz();

  u_cache_.clear();
  v_cache_.clear();
  for (std::size_t i = 1; i <= partition_.x().truncation(); ++i) u_cache_.push_back(partition_.x().cell_map(i));
  for (std::size_t j = 1; j <= partition_.y().truncation(); ++j) v_cache_.push_back(partition_.y().cell_map(j));
}

AffineMap1D CifsSystem::u(std::size_t i) const {
  if (i >= 1 && i <= u_cache_.size()) return u_cache_[i - 1];
  return partition_.x().cell_map(i);
}

AffineMap1D CifsSystem::v(std::size_t j) const {
  if (j >= 1 && j <= v_cache_.size()) return v_cache_[j - 1];
  return partition_.y().cell_map(j);
}

double CifsSystem::F(std::size_t i, std::size_t j, double x, double y, double z) const {
  const double px = u(i)(x);
  const double py = v(j)(y);
  const double a = scale_(i, j, px, py);
  return a * z + germ_map_.germ(px, py) - a * germ_map_.mapped(x, y);
}

double CifsSystem::eval_F(std::size_t i, std::size_t j, double x, double y, double z) const {
  if (i == 0 || j == 0) throw DomainError("eval_F: cell indices start at 1");
  if (!domain().contains(x, y, 1e-12)) throw DomainError("eval_F: (x,y) outside the domain");
  const double slack = 1e-9 * std::max(1.0, k_diameter());
  if (z < k_lo_ - slack || z > k_hi_ + slack) {
    std::ostringstream os;
    os.precision(17);
    os << "eval_F: z=" << z << " outside K=[" << k_lo_ << ", " << k_hi_ << "]";
    throw DomainError(os.str());
  }
  return F(i, j, x, y, z);
}

Point3 CifsSystem::eval_W(std::size_t i, std::size_t j, const Point3& p) const {
  const double z = eval_F(i, j, p.x, p.y, p.z);
  return {u(i)(p.x), v(j)(p.y), z};
}

Point3 CifsSystem::fixed_point(std::size_t i, std::size_t j) const {
  const AffineMap1D ui = u(i);
  const AffineMap1D vj = v(j);
  const double x = ui.offset() / (1.0 - ui.scale());
  const double y = vj.offset() / (1.0 - vj.scale());
  const double a = scale_(i, j, x, y);
  const double z = (germ_map_.germ(x, y) - a * germ_map_.mapped(x, y)) / (1.0 - a);
  return {x, y, z};
}

MatchingReport CifsSystem::verify_matching(std::size_t samples_per_edge, double tol) const {
  if (samples_per_edge < 2) throw DomainError("verify_matching: need at least 2 samples per edge");
  const Rect r = domain();
  const std::size_t m = partition_.x().truncation();
  const std::size_t n = partition_.y().truncation();
  const double golden = 0.6180339887498949;

  auto sample = [&](std::size_t k, double lo, double hi) {
    const double t = static_cast<double>(k) / static_cast<double>(samples_per_edge - 1);
    return (1.0 - t) * lo + t * hi;
  };
  auto sample_z = [&](std::size_t k) {
    const double frac = std::fmod((static_cast<double>(k) + 0.5) * golden, 1.0);
    return k_lo_ + frac * (k_hi_ - k_lo_);
  };

  MatchingReport report;
  report.samples_per_edge = samples_per_edge;
  report.tol = tol;

  for (std::size_t i = 1; i < m; ++i) {
    const double xs = u(i).inverse(partition_.x().knot(i));
    for (std::size_t j = 1; j <= n; ++j) {
      EdgeCheck edge{'x', i, j, 0.0};
      for (std::size_t k = 0; k < samples_per_edge; ++k) {
        const double y = sample(k, r.c, r.d);
        const double z = sample_z(k);
        edge.max_discrepancy = std::max(edge.max_discrepancy, std::abs(F(i, j, xs, y, z) - F(i + 1, j, xs, y, z)));
      }
      report.max_discrepancy = std::max(report.max_discrepancy, edge.max_discrepancy);
      report.edges.push_back(edge);
    }
  }

  for (std::size_t j = 1; j < n; ++j) {
    const double ys = v(j).inverse(partition_.y().knot(j));
    for (std::size_t i = 1; i <= m; ++i) {
      EdgeCheck edge{'y', j, i, 0.0};
      for (std::size_t k = 0; k < samples_per_edge; ++k) {
        const double x = sample(k, r.a, r.b);
        const double z = sample_z(k);
        edge.max_discrepancy = std::max(edge.max_discrepancy, std::abs(F(i, j, x, ys, z) - F(i, j + 1, x, ys, z)));
        if (i < m) {
          report.literal_max_discrepancy =
              std::max(report.literal_max_discrepancy, std::abs(F(i, j, x, ys, z) - F(i + 1, j, x, ys, z)));
        }
      }
      report.max_discrepancy = std::max(report.max_discrepancy, edge.max_discrepancy);
      report.edges.push_back(edge);
    }
  }
  return report;
}

Certificate CifsSystem::hyperbolicity_certificate() const {
  Certificate cert;
  cert.delta_sup = partition_.delta_sup();
  cert.theta = theta_;
  cert.sup_alpha = scale_.sup_bound();
  if (!(cert.delta_sup < 0.5)) {
    std::ostringstream os;
    os << "hyperbolicity certificate refused: ||delta||_inf = " << cert.delta_sup
       << " >= 1/2, so inf (1 - 2 delta_ij) / (2 theta) <= 0 and no d_delta metric makes every W_ij a contraction";
    throw CertificateRefused(os.str());
  }
  if (theta_ > 0.0) {
    cert.delta_metric = (1.0 - 2.0 * cert.delta_sup) / (2.0 * theta_);
  } else {
    // F_ij is constant in (x,y): any positive weight works.
    cert.delta_metric = 1.0;
  }
  cert.contraction_ratio = std::max(cert.delta_sup + cert.delta_metric * theta_, cert.sup_alpha);
  return cert;
}

}  // namespace fracsurf
