#pragma once

#include <filesystem>
#include <iosfwd>

#include "fracsurf/attractor.hpp"
#include "fracsurf/fif.hpp"

namespace fracsurf {

/// `x,y,z` header, then one row per lattice point, y outer, x inner.
void write_grid_csv(std::ostream& out, const FifGrid& grid);

/// Plain PGM (P2), maxval 65535, z mapped linearly from [z_lo, z_hi]. Rows
/// follow the lattice order: the first row is y = c.
void write_grid_pgm(std::ostream& out, const FifGrid& grid, double z_lo, double z_hi);

/// `x,y,z` header, one row per cloud point in stored order.
void write_cloud_csv(std::ostream& out, const PointCloud3& cloud);

/// `iteration residual` per line, then the solve summary as `key=value`.
void write_solve_log(std::ostream& out, const SolveMeta& meta);

/// Opens `path` for binary writing (LF line endings on every platform) and
/// hands the stream to `write`. Throws Error when the file cannot be written.
template <class Writer>
void write_file(const std::filesystem::path& path, Writer&& write);

void write_text_file(const std::filesystem::path& path, const std::string& text);

}  // namespace fracsurf

#include <fstream>

#include "fracsurf/errors.hpp"

template <class Writer>
void fracsurf::write_file(const std::filesystem::path& path, Writer&& write) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("cannot open " + path.string() + " for writing");
  write(out);
  out.flush();
  if (!out) throw Error("failed writing " + path.string());
}
