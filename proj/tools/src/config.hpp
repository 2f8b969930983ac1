#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "fracsurf/analysis.hpp"
#include "fracsurf/attractor.hpp"
#include "fracsurf/fif.hpp"

namespace fracsurf::cli {

/// Malformed or semantically invalid configuration. The message names the
/// offending key path (or line and column for parse errors).
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct AxisConfig {
  std::string kind = "geometric";  // geometric | prefix
  double ratio = 0.5;
  std::vector<double> prefix;
  std::size_t truncation = 12;
};

struct ScaleConfig {
  std::string kind = "constant";  // constant | affine | table
  double value = 0.3;
  std::vector<double> coeffs;                // c0, cx, cy
  std::vector<std::vector<double>> table;
  std::optional<double> sup_bound;
  std::optional<double> lip_bound;
};

struct GermConfig {
  std::string kind;  // trig_product | polynomial | tabulated | knot_vanishing | constant
  double amplitude = 1.0;
  double wx = 3.141592653589793;
  double phase_x = 0.0;
  double wy = 3.141592653589793;
  double phase_y = 0.0;
  double value = 0.0;
  std::vector<std::array<double, 3>> terms;  // coef, px, py
  std::size_t nx = 0;
  std::size_t ny = 0;
  std::vector<double> values;
};

struct MapConfig {
  std::string kind = "corner_bilinear";  // identity | corner_bilinear | blend
  double lambda = 0.5;
};

struct SolveConfig {
  std::size_t lattice = 257;
  double tol = 1e-10;
  std::size_t max_iter = 200;
  std::optional<std::size_t> boundary_limit_index;
};

struct AttractorConfig {
  std::string mode = "deterministic";  // deterministic | chaos
  std::size_t points = 200000;
  std::size_t resolution = 128;
  std::uint64_t seed = 20240229;
  std::string weighting = "uniform";  // uniform | area
  std::size_t burn_in = 100;
  std::vector<std::pair<std::size_t, std::size_t>> schedule{{2, 2}, {4, 4}, {8, 8}, {12, 12}};
  std::size_t graph_iterations = 4;
  std::size_t graph_lattice = 65;
  std::size_t graph_resolution = 128;
};

struct AuditConfig {
  std::size_t lattice = 513;
  std::size_t sweep = 5;
  std::size_t matching_samples = 64;
  double matching_tol = 1e-12;
  double knot_tol = 1e-8;
  std::uint64_t corpus_seed = 7;
  std::uint64_t probe_seed = 11;
};

struct OutputConfig {
  std::string directory = "out";
  std::vector<std::string> formats{"csv", "pgm"};
};

struct ToolkitConfig {
  Rect domain;
  AxisConfig x_partition;
  AxisConfig y_partition;
  ScaleConfig scale;
  GermConfig germ;
  MapConfig parameter_map;
  SolveConfig solve;
  AttractorConfig attractor;
  AuditConfig audit;
  OutputConfig output;
};

/// Parses JSON text; `overrides` are `dotted.key=value` strings applied to
/// the tree before validation (value read as JSON, else as a string).
ToolkitConfig parse_config(const std::string& text, const std::vector<std::string>& overrides = {});
ToolkitConfig load_config(const std::string& path, const std::vector<std::string>& overrides = {});

/// Every key with its effective value, pretty-printed JSON.
std::string effective_config_json(const ToolkitConfig& cfg);

Partition make_partition(const ToolkitConfig& cfg);
ScaleField make_scale(const ToolkitConfig& cfg);
Germ make_germ(const ToolkitConfig& cfg, const Partition& partition);
ParameterMap make_map(const ToolkitConfig& cfg);
SolveSettings make_solve_settings(const ToolkitConfig& cfg, unsigned jobs);
AttractorBudget make_budget(const ToolkitConfig& cfg);
AttractorMode make_mode(const ToolkitConfig& cfg);
SystemOptions make_system_options(const ToolkitConfig& cfg);

}  // namespace fracsurf::cli
