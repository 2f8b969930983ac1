#include "fracsurf/export.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ostream>

namespace fracsurf {

namespace {

void put_xyz(std::ostream& out, double x, double y, double z) {
  char line[96];
  std::snprintf(line, sizeof line, "%.17g,%.17g,%.17g\n", x, y, z);
  out << line;
}

}  // namespace

void write_grid_csv(std::ostream& out, const FifGrid& grid) {
  out << "x,y,z\n";
  for (std::size_t iy = 0; iy < grid.ny; ++iy)
    for (std::size_t ix = 0; ix < grid.nx; ++ix) put_xyz(out, grid.xs[ix], grid.ys[iy], grid.value(ix, iy));
}

void write_grid_pgm(std::ostream& out, const FifGrid& grid, double z_lo, double z_hi) {
  if (!(z_hi > z_lo)) throw DomainError("pgm export: empty value range");
  out << "P2\n" << grid.nx << " " << grid.ny << "\n65535\n";
  for (std::size_t iy = 0; iy < grid.ny; ++iy) {
    for (std::size_t ix = 0; ix < grid.nx; ++ix) {
      const double t = std::clamp((grid.value(ix, iy) - z_lo) / (z_hi - z_lo), 0.0, 1.0);
      out << static_cast<unsigned>(std::lround(t * 65535.0)) << (ix + 1 < grid.nx ? " " : "\n");
    }
  }
}

void write_cloud_csv(std::ostream& out, const PointCloud3& cloud) {
  out << "x,y,z\n";
  for (const auto& p : cloud.points) put_xyz(out, p.x, p.y, p.z);
}

void write_solve_log(std::ostream& out, const SolveMeta& meta) {
  char line[256];
  for (std::size_t k = 0; k < meta.residuals.size(); ++k) {
    std::snprintf(line, sizeof line, "%zu %.17g\n", k + 1, meta.residuals[k]);
    out << line;
  }
  std::snprintf(line, sizeof line,
                "iterations=%zu\nfinal_residual=%.17g\nobserved_ratio=%.17g\napriori_bound=%zu\ntol=%.17g\n",
                meta.iterations, meta.final_residual, meta.observed_ratio, meta.apriori_bound, meta.tol);
  out << line;
}

void write_text_file(const std::filesystem::path& path, const std::string& text) {
  write_file(path, [&](std::ostream& out) { out << text; });
}

}  // namespace fracsurf
