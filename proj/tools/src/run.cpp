#include "run.hpp"

#include <cerrno>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <optional>
#include <ostream>
#include <sstream>
#include <utility>

#include "CLI11.hpp"
#include "config.hpp"
#include "fracsurf/analysis.hpp"
#include "fracsurf/attractor.hpp"
#include "fracsurf/errors.hpp"
#include "fracsurf/export.hpp"

namespace fracsurf::cli {

namespace fs = std::filesystem;

namespace {

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

struct Outcome {
  bool refused = false;
  bool not_converged = false;
  bool failed = false;

  int code() const {
    if (refused || not_converged) return kNotConverged;
    return failed ? kVerificationFailed : kOk;
  }
};

// Everything a subcommand needs, assembled once from the config.
struct Session {
  ToolkitConfig cfg;
  fs::path dir;
  unsigned jobs = 1;
  std::ostream& out;
  std::ostream& err;
  Partition partition;
  CifsSystem sys;
  SolveSettings settings;

  Session(ToolkitConfig c, unsigned j, std::ostream& o, std::ostream& e)
      : cfg(std::move(c)),
        dir(cfg.output.directory),
        jobs(j),
        out(o),
        err(e),
        partition(make_partition(cfg)),
        sys(CifsSystem::build(partition, make_scale(cfg), make_germ(cfg, partition), make_map(cfg),
                              make_system_options(cfg))),
        settings(make_solve_settings(cfg, jobs)) {}

  OperatorTemplate operator_template() const {
    return {partition, sys.scale(), sys.map(), sys.options(), settings};
  }

  bool wants(const std::string& format) const {
    for (const auto& f : cfg.output.formats)
      if (f == format) return true;
    return false;
  }
};

void write_history(const fs::path& path, const std::vector<double>& residuals, const std::string& note) {
  write_file(path, [&](std::ostream& o) {
    for (std::size_t k = 0; k < residuals.size(); ++k) o << (k + 1) << " " << fmt(residuals[k]) << "\n";
    o << note << "\n";
  });
}

// Solves and logs; nullopt after a non-convergence, which is also reported.
std::optional<FifGrid> solve_logged(Session& s, Outcome& outcome) {
  try {
    return solve_fif(s.sys, s.settings);
  } catch (const ConvergenceError& e) {
    write_history(s.dir / "solve.log", e.residual_history(), std::string("error=") + e.what());
    s.err << "solve did not converge: " << e.what() << "\n";
    outcome.not_converged = true;
    return std::nullopt;
  }
}

bool certify(Session& s, Outcome& outcome, const char* step) {
  try {
    const Certificate c = s.sys.hyperbolicity_certificate();
    s.out << step << ": certificate accepted, contraction ratio " << fmt(c.contraction_ratio) << "\n";
    return true;
  } catch (const CertificateRefused& e) {
    s.err << step << ": " << e.what() << "\n";
    outcome.refused = true;
    return false;
  }
}

void do_build(Session& s, Outcome& outcome) {
  if (s.cfg.attractor.mode == "chaos" && !certify(s, outcome, "build")) return;
  const auto grid = solve_logged(s, outcome);
  if (!grid) return;
  write_file(s.dir / "solve.log", [&](std::ostream& o) { write_solve_log(o, grid->meta); });
  if (s.wants("csv")) write_file(s.dir / "surface.csv", [&](std::ostream& o) { write_grid_csv(o, *grid); });
  if (s.wants("pgm"))
    write_file(s.dir / "surface.pgm", [&](std::ostream& o) { write_grid_pgm(o, *grid, s.sys.k_lo(), s.sys.k_hi()); });
  s.out << "build: " << grid->meta.iterations << " iterations, final residual " << fmt(grid->meta.final_residual)
        << "\n";
}

void do_attractor(Session& s, Outcome& outcome) {
  if (!certify(s, outcome, "attractor")) return;
  const auto grid = solve_logged(s, outcome);
  if (!grid) return;

  const Certificate cert = s.sys.hyperbolicity_certificate();
  std::vector<PointCloud3> clouds;
  const ConvergenceReport rep =
      convergence_report(s.sys, s.cfg.attractor.schedule, make_mode(s.cfg), make_budget(s.cfg), graph_cloud(*grid), &clouds);
  if (s.wants("csv")) {
    for (std::size_t k = 0; k < clouds.size(); ++k) {
      const auto& [m, n] = s.cfg.attractor.schedule[k];
      const std::string name = "attractor_" + std::to_string(m) + "_" + std::to_string(n) + ".csv";
      write_file(s.dir / name, [&](std::ostream& o) { write_cloud_csv(o, clouds[k]); });
    }
  }

  // W^n applied to the graph of h_0 against T^n(h_0) on a coarser lattice.
  SolveSettings coarse = s.settings;
  coarse.nx = coarse.ny = s.cfg.attractor.graph_lattice;
  const double grid_error = grid_slack(s.sys, coarse);
  const Rect r = s.sys.domain();
  const double cell = std::max(r.width(), r.height()) / static_cast<double>(s.cfg.attractor.graph_resolution);
  const auto steps = graph_iteration_check(s.sys, initial_grid(s.sys, coarse.nx, coarse.ny),
                                           s.cfg.attractor.graph_iterations, cell, grid_error);

  bool ok = rep.inclusions_hold && rep.terminal_near_graph;
  std::ostringstream text;
  text << "certificate.delta_sup=" << fmt(cert.delta_sup) << "\n";
  text << "certificate.theta=" << fmt(cert.theta) << "\n";
  text << "certificate.delta_metric=" << fmt(cert.delta_metric) << "\n";
  text << "certificate.contraction_ratio=" << fmt(cert.contraction_ratio) << "\n";
  text << rep.to_text();
  for (const auto& st : steps) {
    const std::string key = "graph_iteration[" + std::to_string(st.n) + "]";
    text << key << ".hausdorff=" << fmt(st.hausdorff) << "\n";
    text << key << ".slack=" << fmt(st.slack) << "\n";
    text << key << ".passed=" << (st.passed() ? "true" : "false") << "\n";
    ok = ok && st.passed();
  }
  text << "verdict=" << (ok ? "pass" : "fail") << "\n";
  write_text_file(s.dir / "attractor_report.txt", text.str());
  if (!ok) outcome.failed = true;
  s.out << "attractor: " << (ok ? "pass" : "FAIL") << ", epsilon " << fmt(rep.epsilon) << "\n";
}

BoundReport report(std::string name, double lhs, double rhs, double tol = 0.0) {
  BoundReport r;
  r.name = std::move(name);
  r.lhs = lhs;
  r.rhs = rhs;
  r.audit_tol = tol;
  return r;
}

void add_sweep(std::vector<BoundReport>& reports, const SweepTable& t, const std::string& stem, double tol) {
  for (const auto& row : t.rows)
    reports.push_back(report(stem + "[" + std::to_string(row.n) + "]", row.error, row.envelope, tol));
  if (t.rows.size() > 1) {
    BoundReport gain = report(stem + "_improves", t.rows.back().error, t.rows.front().error);
    reports.push_back(gain);
  }
}

void finish_report(Session& s, Outcome& outcome, const std::vector<BoundReport>& reports, const char* file,
                   const char* step) {
  write_file(s.dir / file, [&](std::ostream& o) { write_report(o, reports); });
  std::size_t failed = 0;
  for (const auto& r : reports)
    if (!r.passed()) ++failed;
  if (failed) outcome.failed = true;
  s.out << step << ": " << reports.size() << " checks, " << failed << " failed\n";
}

void do_verify(Session& s, Outcome& outcome) {
  const auto grid = solve_logged(s, outcome);
  if (!grid) return;
  const double slack = grid_slack(s.sys, s.settings);
  const AuditSettings audit{s.cfg.audit.lattice, slack, s.settings.tol};
  std::vector<BoundReport> reports;

  // Knots that are lattice points must carry the germ's values.
  const Axis& ax = s.partition.x();
  const Axis& ay = s.partition.y();
  auto is_knot = [](const Axis& a, double t) {
    if (t == a.hi()) return true;
    for (std::size_t i = 0; i <= a.truncation(); ++i)
      if (a.knot(i) == t) return true;
    return false;
  };
  double interp = 0.0;
  for (std::size_t iy = 0; iy < grid->ny; ++iy) {
    if (!is_knot(ay, grid->ys[iy])) continue;
    for (std::size_t ix = 0; ix < grid->nx; ++ix)
      if (is_knot(ax, grid->xs[ix]))
        interp = std::max(interp, std::abs(grid->value(ix, iy) - s.sys.germ()(grid->xs[ix], grid->ys[iy])));
  }
  reports.push_back(report("interpolation", interp, s.cfg.audit.knot_tol));

  double worst_ratio = 0.0;
  const auto& res = grid->meta.residuals;
  for (std::size_t k = 1; k < res.size(); ++k)
    if (res[k - 1] > 0.0) worst_ratio = std::max(worst_ratio, res[k] / res[k - 1]);
  reports.push_back(report("residual_ratio", worst_ratio, s.sys.scale().sup_bound() + 0.02));
  reports.push_back(report("iteration_bound", static_cast<double>(grid->meta.iterations),
                           static_cast<double>(grid->meta.apriori_bound)));

  const MatchingReport match = s.sys.verify_matching(s.cfg.audit.matching_samples, s.cfg.audit.matching_tol);
  reports.push_back(report("matching", match.max_discrepancy, match.tol));
  BoundReport literal = report("matching_literal", match.literal_max_discrepancy, 0.0);
  literal.diagnostic = true;
  reports.push_back(literal);

  for (auto& r : verify_perturbation_bounds(s.sys, *grid, audit)) reports.push_back(std::move(r));
  add_sweep(reports, convergence_suite(s.sys, SweepMode::ScaleToZero, s.cfg.audit.sweep, s.settings, audit),
            "sweep_scale", audit.audit_tol());
  add_sweep(reports, convergence_suite(s.sys, SweepMode::MapToGerm, s.cfg.audit.sweep, s.settings, audit),
            "sweep_map", audit.audit_tol());

  const InvariantReport inv =
      invariant_subspace_check(s.operator_template(), Germ::knot_vanishing(s.partition, 1.0), s.cfg.audit.knot_tol);
  reports.push_back(report("invariant_corner", inv.corner_value, inv.tol));
  reports.push_back(report("invariant_knots", std::max(inv.max_knot_value, inv.max_lattice_knot), inv.tol));

  BoundReport gs = report("grid_slack", slack, 0.0);
  gs.diagnostic = true;
  reports.push_back(gs);
  finish_report(s, outcome, reports, "verify_report.txt", "verify");
}

void do_operator(Session& s, Outcome& outcome) {
  const OperatorTemplate tmpl = s.operator_template();
  double slack = 0.0;
  try {
    slack = grid_slack(s.sys, s.settings);
  } catch (const ConvergenceError& e) {
    s.err << "operator: solve did not converge: " << e.what() << "\n";
    outcome.not_converged = true;
    return;
  }
  const AuditSettings audit{s.cfg.audit.lattice, slack, s.settings.tol};
  const auto corpus = default_germ_corpus(s.partition, s.cfg.audit.corpus_seed);
  auto reports = operator_property_probe(tmpl, corpus, audit, s.cfg.audit.probe_seed);
  if (s.sys.map().kind() == ParameterMap::Kind::Identity) {
    const std::vector<Germ> five(corpus.begin(), corpus.begin() + 5);
    for (auto& r : identity_law_check(tmpl, five, audit, s.cfg.audit.knot_tol)) reports.push_back(std::move(r));
  }
  finish_report(s, outcome, reports, "operator_report.txt", "operator");
}

std::optional<std::uint64_t> seed_from_env(std::ostream& err, bool& bad) {
  const char* env = std::getenv("FRACSURF_SEED");
  if (!env || !*env) return std::nullopt;
  errno = 0;
  char* end = nullptr;
  const unsigned long long v = std::strtoull(env, &end, 10);
  if (errno != 0 || *end != '\0' || env[0] == '-') {
    err << "config error: FRACSURF_SEED must be an unsigned integer\n";
    bad = true;
    return std::nullopt;
  }
  return static_cast<std::uint64_t>(v);
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Countable bivariate fractal interpolation toolkit", "fracsurf"};
  app.fallthrough();
  app.require_subcommand(1, 1);
  std::string config_path;
  std::vector<std::string> overrides;
  unsigned jobs = 1;
  app.add_option("--config", config_path, "Configuration file (JSON)")->required();
  app.add_option("--override", overrides, "key=value applied on top of the config (repeatable)");
  app.add_option("--jobs", jobs, "Worker threads")->check(CLI::PositiveNumber);
  const std::pair<const char*, const char*> commands[] = {
      {"build", "Solve for the surface and write it with the solve log"},
      {"attractor", "Partial attractors, Hausdorff convergence and graph iteration"},
      {"verify", "Interpolation, contraction, matching, bounds and sweeps"},
      {"operator", "Fractal operator probes over the germ corpus"},
      {"all", "build, verify, operator, then attractor"}};
  for (const auto& [name, help] : commands) app.add_subcommand(name, help)->fallthrough();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return kOk;
  } catch (const CLI::ParseError& e) {
    err << "usage error: " << e.what() << "\n";
    return kConfigError;
  }
  const std::string command = app.get_subcommands().front()->get_name();

  ToolkitConfig cfg;
  try {
    cfg = load_config(config_path, overrides);
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << "\n";
    return kConfigError;
  }
  bool bad_seed = false;
  if (const auto seed = seed_from_env(err, bad_seed)) cfg.attractor.seed = *seed;
  if (bad_seed) return kConfigError;

  try {
    fs::create_directories(cfg.output.directory);
    write_text_file(fs::path(cfg.output.directory) / "effective_config.json", effective_config_json(cfg));
  } catch (const std::exception& e) {
    err << "config error: output directory: " << e.what() << "\n";
    return kConfigError;
  }

  Outcome outcome;
  try {
    Session s(cfg, jobs, out, err);
    const bool all = command == "all";
    if (all || command == "build") do_build(s, outcome);
    if (all || command == "verify") do_verify(s, outcome);
    if (all || command == "operator") do_operator(s, outcome);
    if (all || command == "attractor") do_attractor(s, outcome);
  } catch (const ConvergenceError& e) {
    err << "solve did not converge: " << e.what() << "\n";
    return kNotConverged;
  } catch (const CertificateRefused& e) {
    err << e.what() << "\n";
    return kNotConverged;
  } catch (const fracsurf::Error& e) {
    err << "config error: " << e.what() << "\n";
    return kConfigError;
  }
  return outcome.code();
}

}  // namespace fracsurf::cli
