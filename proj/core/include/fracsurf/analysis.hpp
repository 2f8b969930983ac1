#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

#include "fracsurf/cifs.hpp"
#include "fracsurf/fif.hpp"

namespace fracsurf {

/// One inequality instance lhs <= rhs, measured on the audit lattice.
struct BoundReport {
  std::string name;
  double lhs = 0.0;
  double rhs = 0.0;
  double audit_tol = 0.0;
  /// Diagnostics only: never turn a report into a failure.
  bool diagnostic = false;
  std::vector<std::pair<std::string, double>> context;

  double slack() const noexcept { return rhs - lhs; }
  bool passed() const noexcept { return diagnostic || lhs <= rhs + audit_tol; }
};

/// How measurements are taken and how much numerical slack they get.
struct AuditSettings {
  std::size_t lattice = 513;
  /// Lattice representation error of the solved surfaces (see grid_slack).
  double grid_slack = 0.0;
  /// Solver tolerance of the surfaces being audited.
  double solver_tol = 1e-10;

  double audit_tol() const noexcept { return 2.0 * (solver_tol + grid_slack); }
};

/// max |h| over a uniform lattice x lattice grid on the rectangle (endpoints
/// included).
double sup_norm(const Rect& domain, std::size_t lattice, const Germ::Fn& h);

/// ||g - f|| <= s ||g - L(f)||, ||g - L(f)|| <= ||f - L(f)|| / (1 - s) and
/// ||g - f|| <= s / (1 - s) ||f - L(f)||, s = ||alpha||_inf.
std::vector<BoundReport> verify_perturbation_bounds(const CifsSystem& sys, const FifGrid& solved,
                                                    const AuditSettings& audit);

enum class SweepMode { ScaleToZero, MapToGerm };

struct SweepRow {
  std::size_t n = 0;
  double sup_alpha = 0.0;
  double f_minus_mapped = 0.0;  // ||f - L_n(f)||
  double error = 0.0;           // ||f_n - f||
  double envelope = 0.0;        // s_n / (1 - s_n) ||f - L_n(f)||
  bool passed = false;
};

struct SweepTable {
  SweepMode mode = SweepMode::ScaleToZero;
  std::vector<SweepRow> rows;
  bool envelope_decreasing = false;  // strictly, row to row
  bool improved = false;             // error at n = N below error at n = 1

  bool passed() const noexcept;
};

/// n = 1..count. ScaleToZero uses the system's scale field scaled by 1/n;
/// MapToGerm uses L_n = blend(1 - 1/n), starting from the corner-bilinear map.
SweepTable convergence_suite(const CifsSystem& sys, SweepMode mode, std::size_t count, const SolveSettings& settings,
                             const AuditSettings& audit);

/// Ten germs spanning the catalog (trig, polynomial, tabulated, sampled,
/// knot-vanishing, constant, custom), built on the partition's domain.
std::vector<Germ> default_germ_corpus(const Partition& partition, std::uint64_t seed = 7);

/// Norm and Lipschitz bounds of f -> f^alpha over the corpus, consecutive
/// members paired cyclically, plus a linearity probe on random combinations
/// when the template map is linear.
std::vector<BoundReport> operator_property_probe(const OperatorTemplate& tmpl, const std::vector<Germ>& corpus,
                                                 const AuditSettings& audit, std::uint64_t seed = 11);

/// ||f^alpha - f|| for each germ; meant for templates with L = identity.
std::vector<BoundReport> identity_law_check(const OperatorTemplate& tmpl, const std::vector<Germ>& corpus,
                                            const AuditSettings& audit, double tol);

struct InvariantReport {
  double corner_value = 0.0;       // |f^alpha(a,c)|
  double max_knot_value = 0.0;     // max over realized knots (point evaluation)
  double max_lattice_knot = 0.0;   // max over knots that are lattice points
  std::size_t knots_checked = 0;
  double tol = 0.0;

  bool passed() const noexcept {
    return corner_value <= tol && max_knot_value <= tol && max_lattice_knot <= tol;
  }
};

/// Solves for `germ` and reads f^alpha at (a,c) and at every realized knot
/// pair, both from the lattice and by depth-unrolled point evaluation.
InvariantReport invariant_subspace_check(const OperatorTemplate& tmpl, const Germ& germ, double tol,
                                         std::size_t depth = 40);

/// `check_name status lhs rhs slack` per report, then a summary block.
void write_report(std::ostream& out, const std::vector<BoundReport>& reports);

}  // namespace fracsurf
