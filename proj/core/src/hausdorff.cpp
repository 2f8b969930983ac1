#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "fracsurf/attractor.hpp"
#include "fracsurf/errors.hpp"

namespace fracsurf {

namespace {

double coord(const Point3& p, int axis) { return axis == 0 ? p.x : (axis == 1 ? p.y : p.z); }

}  // namespace

// Implicit k-d tree: the median of every range [lo, hi) sits at (lo+hi)/2
// and splits along the axis of largest spread in that range.
struct NearestNeighbourIndex::Impl {
  std::vector<Point3> pts;
  std::vector<std::size_t> original;
  std::vector<int> split;

  void build(std::size_t lo, std::size_t hi) {
    if (hi - lo <= 1) return;
    double mins[3] = {std::numeric_limits<double>::infinity(), std::numeric_limits<double>::infinity(),
                      std::numeric_limits<double>::infinity()};
    double maxs[3] = {-mins[0], -mins[1], -mins[2]};
    for (std::size_t k = lo; k < hi; ++k) {
      for (int a = 0; a < 3; ++a) {
        mins[a] = std::min(mins[a], coord(pts[k], a));
        maxs[a] = std::max(maxs[a], coord(pts[k], a));
      }
    }
    int axis = 0;
    for (int a = 1; a < 3; ++a)
      if (maxs[a] - mins[a] > maxs[axis] - mins[axis]) axis = a;

    const std::size_t mid = lo + (hi - lo) / 2;
    std::vector<std::size_t> order(hi - lo);
    std::iota(order.begin(), order.end(), lo);
    std::nth_element(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(mid - lo), order.end(),
                     [&](std::size_t l, std::size_t r) { return coord(pts[l], axis) < coord(pts[r], axis); });
    std::vector<Point3> p2(hi - lo);
    std::vector<std::size_t> o2(hi - lo);
    for (std::size_t k = 0; k < order.size(); ++k) {
      p2[k] = pts[order[k]];
      o2[k] = original[order[k]];
    }
    std::copy(p2.begin(), p2.end(), pts.begin() + static_cast<std::ptrdiff_t>(lo));
    std::copy(o2.begin(), o2.end(), original.begin() + static_cast<std::ptrdiff_t>(lo));
    split[mid] = axis;
    build(lo, mid);
    build(mid + 1, hi);
  }

  void search(std::size_t lo, std::size_t hi, const Point3& q, std::size_t skip, double& best2) const {
    if (lo >= hi) return;
    const std::size_t mid = lo + (hi - lo) / 2;
    const Point3& p = pts[mid];
    if (original[mid] != skip) {
      const double dx = p.x - q.x;
      const double dy = p.y - q.y;
      const double dz = p.z - q.z;
      best2 = std::min(best2, dx * dx + dy * dy + dz * dz);
    }
    if (hi - lo == 1) return;
    const int axis = split[mid];
    const double diff = coord(q, axis) - coord(p, axis);
    if (diff < 0.0) {
      search(lo, mid, q, skip, best2);
      if (diff * diff < best2) search(mid + 1, hi, q, skip, best2);
    } else {
      search(mid + 1, hi, q, skip, best2);
      if (diff * diff < best2) search(lo, mid, q, skip, best2);
    }
  }
};

NearestNeighbourIndex::NearestNeighbourIndex(std::vector<Point3> points) : impl_(std::make_unique<Impl>()) {
  if (points.empty()) throw DomainError("nearest-neighbour index: empty point set");
  impl_->pts = std::move(points);
  impl_->original.resize(impl_->pts.size());
  std::iota(impl_->original.begin(), impl_->original.end(), std::size_t{0});
  impl_->split.assign(impl_->pts.size(), 0);
  impl_->build(0, impl_->pts.size());
}

NearestNeighbourIndex::~NearestNeighbourIndex() = default;
NearestNeighbourIndex::NearestNeighbourIndex(NearestNeighbourIndex&&) noexcept = default;
NearestNeighbourIndex& NearestNeighbourIndex::operator=(NearestNeighbourIndex&&) noexcept = default;

double NearestNeighbourIndex::nearest(const Point3& q) const {
  double best2 = std::numeric_limits<double>::infinity();
  impl_->search(0, impl_->pts.size(), q, std::numeric_limits<std::size_t>::max(), best2);
  return std::sqrt(best2);
}

double NearestNeighbourIndex::nearest_excluding(const Point3& q, std::size_t self) const {
  double best2 = std::numeric_limits<double>::infinity();
  impl_->search(0, impl_->pts.size(), q, self, best2);
  return std::sqrt(best2);
}

std::size_t NearestNeighbourIndex::size() const noexcept { return impl_->pts.size(); }

double directed_hausdorff(const PointCloud3& from, const PointCloud3& to) {
  if (from.points.empty() || to.points.empty()) throw DomainError("hausdorff: empty cloud");
  const NearestNeighbourIndex index(to.points);
  double worst = 0.0;
  for (const auto& p : from.points) worst = std::max(worst, index.nearest(p));
  return worst;
}

double hausdorff_distance(const PointCloud3& a, const PointCloud3& b) {
  return std::max(directed_hausdorff(a, b), directed_hausdorff(b, a));
}

double hausdorff_distance_brute(const PointCloud3& a, const PointCloud3& b) {
  if (a.points.empty() || b.points.empty()) throw DomainError("hausdorff: empty cloud");
  auto directed = [](const std::vector<Point3>& from, const std::vector<Point3>& to) {
    double worst = 0.0;
    for (const auto& p : from) {
      double best = std::numeric_limits<double>::infinity();
      for (const auto& q : to) best = std::min(best, distance(p, q));
      worst = std::max(worst, best);
    }
    return worst;
  };
  return std::max(directed(a.points, b.points), directed(b.points, a.points));
}

double max_nearest_neighbour_gap(const PointCloud3& cloud) {
  if (cloud.points.size() < 2) return 0.0;
  const NearestNeighbourIndex index(cloud.points);
  double worst = 0.0;
  for (std::size_t k = 0; k < cloud.points.size(); ++k)
    worst = std::max(worst, index.nearest_excluding(cloud.points[k], k));
  return worst;
}

}  // namespace fracsurf
