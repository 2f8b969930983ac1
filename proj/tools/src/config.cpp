#include "config.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include "fracsurf/errors.hpp"
#include "json.hpp"

namespace fracsurf::cli {

namespace {

using json = nlohmann::ordered_json;

std::string join(const std::string& path, const std::string& key) { return path.empty() ? key : path + "." + key; }

// A JSON object being read; remembers which keys were consumed so leftovers
// can be reported with their full path.
class Section {
 public:
  Section(const json& node, std::string path) : node_(node), path_(std::move(path)) {
    if (!node_.is_object()) throw ConfigError(where() + ": expected an object");
  }

  bool has(const std::string& key) const { return node_.contains(key); }

  std::string key_path(const std::string& key) const { return join(path_, key); }

  const json& raw(const std::string& key) {
    seen_.insert(key);
    return node_.at(key);
  }

  Section child(const std::string& key) { return Section(raw(key), key_path(key)); }

  template <class T>
  void read(const std::string& key, T& out) {
    if (!has(key)) return;
    const json& v = raw(key);
    try {
      if constexpr (std::is_same_v<T, double>) {
        if (!v.is_number()) throw ConfigError("");
        out = v.get<double>();
      } else if constexpr (std::is_same_v<T, std::size_t> || std::is_same_v<T, std::uint64_t>) {
        if (!v.is_number_unsigned()) throw ConfigError("");
        out = v.get<T>();
      } else if constexpr (std::is_same_v<T, std::string>) {
        if (!v.is_string()) throw ConfigError("");
        out = v.get<std::string>();
      } else {
        out = v.get<T>();
      }
    } catch (const std::exception&) {
      throw ConfigError(key_path(key) + ": wrong type");
    }
  }

  template <class T>
  void read(const std::string& key, std::optional<T>& out) {
    if (!has(key)) return;
    T value{};
    read(key, value);
    out = value;
  }

  void require(const std::string& key) const {
    if (!has(key)) throw ConfigError(key_path(key) + ": required key missing");
  }

  void finish() const {
    for (auto it = node_.begin(); it != node_.end(); ++it)
      if (!seen_.count(it.key())) throw ConfigError("unknown key: " + key_path(it.key()));
  }

 private:
  std::string where() const { return path_.empty() ? "config" : path_; }

  const json& node_;
  std::string path_;
  std::set<std::string> seen_;
};

void one_of(const std::string& path, const std::string& value, std::initializer_list<const char*> allowed) {
  for (const char* a : allowed)
    if (value == a) return;
  std::string list;
  for (const char* a : allowed) list += std::string(list.empty() ? "" : ", ") + a;
  throw ConfigError(path + ": '" + value + "' is not one of " + list);
}

void read_axis(Section s, AxisConfig& a) {
  s.read("kind", a.kind);
  one_of(s.key_path("kind"), a.kind, {"geometric", "prefix"});
  s.read("ratio", a.ratio);
  s.read("prefix", a.prefix);
  s.read("truncation", a.truncation);
  s.finish();
}

void read_scale(Section s, ScaleConfig& c) {
  s.read("kind", c.kind);
  one_of(s.key_path("kind"), c.kind, {"constant", "affine", "table"});
  s.read("value", c.value);
  s.read("coeffs", c.coeffs);
  s.read("table", c.table);
  s.read("sup_bound", c.sup_bound);
  s.read("lip_bound", c.lip_bound);
  if (c.kind == "affine" && c.coeffs.size() != 3) throw ConfigError(s.key_path("coeffs") + ": expected [c0, cx, cy]");
  if (c.kind == "table" && c.table.empty()) throw ConfigError(s.key_path("table") + ": expected a nonempty table");
  s.finish();
}

void read_germ(Section s, GermConfig& g) {
  s.require("kind");
  s.read("kind", g.kind);
  one_of(s.key_path("kind"), g.kind, {"trig_product", "polynomial", "tabulated", "knot_vanishing", "constant"});
  s.read("amplitude", g.amplitude);
  s.read("wx", g.wx);
  s.read("phase_x", g.phase_x);
  s.read("wy", g.wy);
  s.read("phase_y", g.phase_y);
  s.read("value", g.value);
  s.read("terms", g.terms);
  s.read("nx", g.nx);
  s.read("ny", g.ny);
  s.read("values", g.values);
  if (g.kind == "tabulated" && (g.nx < 2 || g.ny < 2 || g.values.size() != g.nx * g.ny))
    throw ConfigError(s.key_path("values") + ": expected nx*ny values with nx, ny >= 2");
  s.finish();
}

void read_schedule(const json& v, const std::string& path, AttractorConfig& a) {
  if (!v.is_array() || v.empty()) throw ConfigError(path + ": expected a list of [m, n] pairs");
  a.schedule.clear();
  for (const auto& e : v) {
    if (!e.is_array() || e.size() != 2 || !e[0].is_number_unsigned() || !e[1].is_number_unsigned())
      throw ConfigError(path + ": expected a list of [m, n] pairs");
    a.schedule.emplace_back(e[0].get<std::size_t>(), e[1].get<std::size_t>());
  }
}

std::pair<std::size_t, std::size_t> line_column(const std::string& text, std::size_t byte) {
  std::size_t line = 1;
  std::size_t col = 1;
  for (std::size_t k = 0; k + 1 < byte && k < text.size(); ++k) {
    if (text[k] == '\n') {
      ++line;
      col = 1;
    } else {
      ++col;
    }
  }
  return {line, col};
}

void apply_override(json& root, const std::string& spec) {
  const auto eq = spec.find('=');
  if (eq == std::string::npos || eq == 0) throw ConfigError("override '" + spec + "': expected key=value");
  const std::string key = spec.substr(0, eq);
  const std::string text = spec.substr(eq + 1);
  json value = json::parse(text, nullptr, false);
  if (value.is_discarded()) value = text;

  json* node = &root;
  std::size_t start = 0;
  while (true) {
    const auto dot = key.find('.', start);
    const std::string part = key.substr(start, dot == std::string::npos ? std::string::npos : dot - start);
    if (part.empty()) throw ConfigError("override '" + spec + "': empty key segment");
    if (dot == std::string::npos) {
      (*node)[part] = value;
      return;
    }
    if (!node->contains(part)) (*node)[part] = json::object();
    node = &(*node)[part];
    if (!node->is_object()) throw ConfigError("override '" + spec + "': " + key.substr(0, dot) + " is not an object");
    start = dot + 1;
  }
}

// Builds every library object once so semantic errors surface at load time,
// tagged with the section they came from.
void validate(const ToolkitConfig& cfg) {
  auto guard = [](const char* path, auto&& fn) {
    try {
      fn();
    } catch (const fracsurf::Error& e) {
      throw ConfigError(std::string(path) + ": " + e.what());
    }
  };
  std::optional<Partition> part;
  guard("x_partition/y_partition", [&] { part.emplace(make_partition(cfg)); });
  guard("scale", [&] { (void)make_scale(cfg); });
  guard("germ", [&] { (void)make_germ(cfg, *part); });
  guard("parameter_map", [&] { (void)make_map(cfg); });
  if (cfg.solve.lattice < 2) throw ConfigError("solve.lattice: must be >= 2");
  if (!(cfg.solve.tol > 0.0)) throw ConfigError("solve.tol: must be positive");
  if (cfg.solve.max_iter < 1) throw ConfigError("solve.max_iter: must be >= 1");
  if (cfg.solve.boundary_limit_index && *cfg.solve.boundary_limit_index < 1)
    throw ConfigError("solve.boundary_limit_index: must be >= 1");
  one_of("attractor.mode", cfg.attractor.mode, {"deterministic", "chaos"});
  one_of("attractor.weighting", cfg.attractor.weighting, {"uniform", "area"});
  for (const auto& [m, n] : cfg.attractor.schedule) {
    if (m < 1 || n < 1 || m > cfg.x_partition.truncation || n > cfg.y_partition.truncation)
      throw ConfigError("attractor.schedule: entries must lie within the truncation");
  }
  if (cfg.attractor.graph_lattice < 2) throw ConfigError("attractor.graph_lattice: must be >= 2");
  if (cfg.audit.lattice < 2) throw ConfigError("audit.lattice: must be >= 2");
  if (cfg.audit.sweep < 1) throw ConfigError("audit.sweep: must be >= 1");
  for (const auto& f : cfg.output.formats) one_of("output.formats", f, {"csv", "pgm"});
}

json axis_json(const AxisConfig& a) {
  json j;
  j["kind"] = a.kind;
  j["ratio"] = a.ratio;
  if (a.kind == "prefix") j["prefix"] = a.prefix;
  j["truncation"] = a.truncation;
  return j;
}

}  // namespace

ToolkitConfig parse_config(const std::string& text, const std::vector<std::string>& overrides) {
  json root;
  try {
    root = json::parse(text);
  } catch (const json::parse_error& e) {
    const auto [line, col] = line_column(text, e.byte);
    std::ostringstream os;
    os << "config parse error at line " << line << ", column " << col << ": " << e.what();
    throw ConfigError(os.str());
  }
  for (const auto& o : overrides) apply_override(root, o);

  ToolkitConfig cfg;
  Section top(root, "");
  top.require("domain");
  top.require("germ");
  {
    Section d = top.child("domain");
    for (const char* k : {"a", "b", "c", "d"}) d.require(k);
    d.read("a", cfg.domain.a);
    d.read("b", cfg.domain.b);
    d.read("c", cfg.domain.c);
    d.read("d", cfg.domain.d);
    d.finish();
  }
  if (top.has("x_partition")) read_axis(top.child("x_partition"), cfg.x_partition);
  if (top.has("y_partition")) read_axis(top.child("y_partition"), cfg.y_partition);
  if (top.has("scale")) read_scale(top.child("scale"), cfg.scale);
  read_germ(top.child("germ"), cfg.germ);
  if (top.has("parameter_map")) {
    Section s = top.child("parameter_map");
    s.read("kind", cfg.parameter_map.kind);
    one_of(s.key_path("kind"), cfg.parameter_map.kind, {"identity", "corner_bilinear", "blend"});
    s.read("lambda", cfg.parameter_map.lambda);
    s.finish();
  }
  if (top.has("solve")) {
    Section s = top.child("solve");
    s.read("lattice", cfg.solve.lattice);
    s.read("tol", cfg.solve.tol);
    s.read("max_iter", cfg.solve.max_iter);
    s.read("boundary_limit_index", cfg.solve.boundary_limit_index);
    s.finish();
  }
  if (top.has("attractor")) {
    Section s = top.child("attractor");
    auto& a = cfg.attractor;
    s.read("mode", a.mode);
    s.read("points", a.points);
    s.read("resolution", a.resolution);
    s.read("seed", a.seed);
    s.read("weighting", a.weighting);
    s.read("burn_in", a.burn_in);
    if (s.has("schedule")) read_schedule(s.raw("schedule"), s.key_path("schedule"), a);
    s.read("graph_iterations", a.graph_iterations);
    s.read("graph_lattice", a.graph_lattice);
    s.read("graph_resolution", a.graph_resolution);
    s.finish();
  }
  if (top.has("audit")) {
    Section s = top.child("audit");
    auto& a = cfg.audit;
    s.read("lattice", a.lattice);
    s.read("sweep", a.sweep);
    s.read("matching_samples", a.matching_samples);
    s.read("matching_tol", a.matching_tol);
    s.read("knot_tol", a.knot_tol);
    s.read("corpus_seed", a.corpus_seed);
    s.read("probe_seed", a.probe_seed);
    s.finish();
  }
  if (top.has("output")) {
    Section s = top.child("output");
    s.read("directory", cfg.output.directory);
    s.read("formats", cfg.output.formats);
    s.finish();
  }
  top.finish();
  validate(cfg);
  return cfg;
}

ToolkitConfig load_config(const std::string& path, const std::vector<std::string>& overrides) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot read config file " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str(), overrides);
}

std::string effective_config_json(const ToolkitConfig& cfg) {
  json j;
  j["domain"] = {{"a", cfg.domain.a}, {"b", cfg.domain.b}, {"c", cfg.domain.c}, {"d", cfg.domain.d}};
  j["x_partition"] = axis_json(cfg.x_partition);
  j["y_partition"] = axis_json(cfg.y_partition);

  json s;
  s["kind"] = cfg.scale.kind;
  if (cfg.scale.kind == "constant") s["value"] = cfg.scale.value;
  if (cfg.scale.kind == "affine") s["coeffs"] = cfg.scale.coeffs;
  if (cfg.scale.kind == "table") s["table"] = cfg.scale.table;
  if (cfg.scale.sup_bound) s["sup_bound"] = *cfg.scale.sup_bound;
  if (cfg.scale.lip_bound) s["lip_bound"] = *cfg.scale.lip_bound;
  j["scale"] = s;

  const auto& g = cfg.germ;
  json gj;
  gj["kind"] = g.kind;
  if (g.kind == "trig_product") {
    gj["amplitude"] = g.amplitude;
    gj["wx"] = g.wx;
    gj["phase_x"] = g.phase_x;
    gj["wy"] = g.wy;
    gj["phase_y"] = g.phase_y;
  } else if (g.kind == "polynomial") {
    gj["terms"] = g.terms;
  } else if (g.kind == "tabulated") {
    gj["nx"] = g.nx;
    gj["ny"] = g.ny;
    gj["values"] = g.values;
  } else if (g.kind == "knot_vanishing") {
    gj["amplitude"] = g.amplitude;
  } else {
    gj["value"] = g.value;
  }
  j["germ"] = gj;

  j["parameter_map"] = {{"kind", cfg.parameter_map.kind}};
  if (cfg.parameter_map.kind == "blend") j["parameter_map"]["lambda"] = cfg.parameter_map.lambda;

  j["solve"] = {{"lattice", cfg.solve.lattice}, {"tol", cfg.solve.tol}, {"max_iter", cfg.solve.max_iter}};
  if (cfg.solve.boundary_limit_index) j["solve"]["boundary_limit_index"] = *cfg.solve.boundary_limit_index;

  const auto& a = cfg.attractor;
  json sched = json::array();
  for (const auto& [m, n] : a.schedule) sched.push_back({m, n});
  j["attractor"] = {{"mode", a.mode},
                    {"points", a.points},
                    {"resolution", a.resolution},
                    {"seed", a.seed},
                    {"weighting", a.weighting},
                    {"burn_in", a.burn_in},
                    {"schedule", sched},
                    {"graph_iterations", a.graph_iterations},
                    {"graph_lattice", a.graph_lattice},
                    {"graph_resolution", a.graph_resolution}};
  const auto& au = cfg.audit;
  j["audit"] = {{"lattice", au.lattice},
                {"sweep", au.sweep},
                {"matching_samples", au.matching_samples},
                {"matching_tol", au.matching_tol},
                {"knot_tol", au.knot_tol},
                {"corpus_seed", au.corpus_seed},
                {"probe_seed", au.probe_seed}};
  j["output"] = {{"directory", cfg.output.directory}, {"formats", cfg.output.formats}};
  return j.dump(2) + "\n";
}

Partition make_partition(const ToolkitConfig& cfg) {
  auto gen = [](const AxisConfig& a) {
    return a.kind == "prefix" ? AxisGenerator::with_prefix(a.prefix, a.ratio, a.truncation)
                              : AxisGenerator::geometric(a.ratio, a.truncation);
  };
  return fracsurf::make_partition({cfg.domain, gen(cfg.x_partition), gen(cfg.y_partition)});
}

ScaleField make_scale(const ToolkitConfig& cfg) {
  const auto& s = cfg.scale;
  ScaleField field = s.kind == "affine"  ? ScaleField::affine(s.coeffs[0], s.coeffs[1], s.coeffs[2], cfg.domain)
                     : s.kind == "table" ? ScaleField::per_cell(s.table)
                                         : ScaleField::constant(s.value);
  if (s.sup_bound || s.lip_bound) field = field.with_bounds(s.sup_bound, s.lip_bound);
  return field;
}

Germ make_germ(const ToolkitConfig& cfg, const Partition& partition) {
  const auto& g = cfg.germ;
  if (g.kind == "trig_product") return Germ::trig_product(g.amplitude, g.wx, g.phase_x, g.wy, g.phase_y);
  if (g.kind == "polynomial") {
    std::vector<Monomial> terms;
    for (const auto& t : g.terms) {
      if (t[1] < 0 || t[2] < 0 || t[1] != static_cast<unsigned>(t[1]) || t[2] != static_cast<unsigned>(t[2]))
        throw DomainError("polynomial exponents must be nonnegative integers");
      terms.push_back({t[0], static_cast<unsigned>(t[1]), static_cast<unsigned>(t[2])});
    }
    return Germ::polynomial(std::move(terms), cfg.domain);
  }
  if (g.kind == "tabulated") return Germ::tabulated(cfg.domain, g.nx, g.ny, g.values);
  if (g.kind == "knot_vanishing") return Germ::knot_vanishing(partition, g.amplitude);
  return Germ::constant(g.value);
}

ParameterMap make_map(const ToolkitConfig& cfg) {
  if (cfg.parameter_map.kind == "identity") return ParameterMap::identity();
  if (cfg.parameter_map.kind == "blend") return ParameterMap::blend(cfg.parameter_map.lambda);
  return ParameterMap::corner_bilinear();
}

SolveSettings make_solve_settings(const ToolkitConfig& cfg, unsigned jobs) {
  SolveSettings s;
  s.tol = cfg.solve.tol;
  s.max_iter = cfg.solve.max_iter;
  s.nx = cfg.solve.lattice;
  s.ny = cfg.solve.lattice;
  s.boundary_limit_index = cfg.solve.boundary_limit_index;
  s.jobs = jobs;
  return s;
}

AttractorBudget make_budget(const ToolkitConfig& cfg) {
  AttractorBudget b;
  b.points = cfg.attractor.points;
  b.resolution = cfg.attractor.resolution;
  b.seed = cfg.attractor.seed;
  b.weighting = cfg.attractor.weighting == "area" ? MapWeighting::Area : MapWeighting::Uniform;
  b.burn_in = cfg.attractor.burn_in;
  return b;
}

AttractorMode make_mode(const ToolkitConfig& cfg) {
  return cfg.attractor.mode == "chaos" ? AttractorMode::Chaos : AttractorMode::Deterministic;
}

SystemOptions make_system_options(const ToolkitConfig& cfg) {
  SystemOptions o;
  o.audit_lattice = cfg.audit.lattice;
  return o;
}

}  // namespace fracsurf::cli
