#include <string>

#include "config.hpp"
#include "doctest.h"

using namespace fracsurf::cli;

namespace {

const std::string minimal = R"({
  "domain": {"a": 0, "b": 1, "c": 0, "d": 2},
  "germ": {"kind": "trig_product"}
})";

std::string error_of(const std::string& text, const std::vector<std::string>& overrides = {}) {
  try {
    (void)parse_config(text, overrides);
  } catch (const ConfigError& e) {
    return e.what();
  }
  return "";
}

}  // namespace

TEST_CASE("minimal config gets every default") {
  const ToolkitConfig c = parse_config(minimal);
  CHECK(c.domain.d == 2.0);
  CHECK(c.x_partition.kind == "geometric");
  CHECK(c.x_partition.ratio == 0.5);
  CHECK(c.x_partition.truncation == 12);
  CHECK(c.scale.kind == "constant");
  CHECK(c.scale.value == 0.3);
  CHECK(c.parameter_map.kind == "corner_bilinear");
  CHECK(c.solve.lattice == 257);
  CHECK(c.solve.tol == 1e-10);
  CHECK(c.solve.max_iter == 200);
  CHECK(c.attractor.mode == "deterministic");
  CHECK(c.attractor.schedule.size() == 4);
  CHECK(c.audit.lattice == 513);
  CHECK(c.output.formats == std::vector<std::string>{"csv", "pgm"});
}

TEST_CASE("domain and germ are required") {
  CHECK(error_of(R"({"domain": {"a": 0, "b": 1, "c": 0, "d": 1}})").find("germ") != std::string::npos);
  CHECK(error_of(R"({"germ": {"kind": "constant"}})").find("domain") != std::string::npos);
  CHECK(error_of(R"({"domain": {"a": 0, "b": 1, "c": 0}, "germ": {"kind": "constant"}})").find("domain.d") !=
        std::string::npos);
}

TEST_CASE("unknown keys are reported with their path") {
  const std::string text = R"({
    "domain": {"a": 0, "b": 1, "c": 0, "d": 1},
    "germ": {"kind": "trig_product"},
    "solve": {"tolerance": 1e-6}
  })";
  CHECK(error_of(text) == "unknown key: solve.tolerance");
  CHECK(error_of(minimal, {"attractor.sed=3"}) == "unknown key: attractor.sed");
  CHECK(error_of(minimal, {"colour=3"}) == "unknown key: colour");
}

TEST_CASE("sup bound of one is refused") {
  const std::string msg = error_of(minimal, {"scale.sup_bound=1.0"});
  CHECK(msg.find("scale field must satisfy sup < 1") != std::string::npos);
  CHECK(msg.rfind("scale", 0) == 0);
  CHECK(error_of(minimal, {"scale.value=1.2"}).find("sup < 1") != std::string::npos);
}

TEST_CASE("semantic errors") {
  CHECK(error_of(minimal, {"x_partition.ratio=1.5"}).find("x_partition") != std::string::npos);
  CHECK(error_of(minimal, {"solve.tol=-1"}).find("solve.tol") != std::string::npos);
  CHECK(error_of(minimal, {"solve.lattice=\"many\""}).find("solve.lattice: wrong type") != std::string::npos);
  CHECK(error_of(minimal, {"attractor.mode=spiral"}).find("attractor.mode") != std::string::npos);
  CHECK(error_of(minimal, {"attractor.schedule=[[2,2],[13,13]]"}).find("attractor.schedule") != std::string::npos);
  CHECK(error_of(minimal, {"output.formats=[\"png\"]"}).find("output.formats") != std::string::npos);
  CHECK(error_of(minimal, {"germ.kind=tabulated", "germ.nx=2", "germ.ny=2", "germ.values=[1,2,3]"})
            .find("germ.values") != std::string::npos);
  CHECK(error_of(minimal, {"bogus"}).find("expected key=value") != std::string::npos);
}

TEST_CASE("parse errors carry line and column") {
  const std::string msg = error_of("{\n  \"domain\": {\"a\": 0,,}\n}");
  CHECK(msg.find("line 2") != std::string::npos);
  CHECK(msg.find("column") != std::string::npos);
}

TEST_CASE("overrides show up in the effective config") {
  const ToolkitConfig c = parse_config(minimal, {"solve.tol=1e-6", "attractor.schedule=[[1,1],[3,2]]"});
  CHECK(c.solve.tol == 1e-6);
  const std::string echo = effective_config_json(c);
  CHECK(echo.find("\"tol\": 1e-06") != std::string::npos);
  CHECK(c.attractor.schedule[1] == std::pair<std::size_t, std::size_t>{3, 2});
}

TEST_CASE("effective config round-trips") {
  const std::vector<std::vector<std::string>> variants = {
      {},
      {"scale.kind=affine", "scale.coeffs=[0.2,0.1,-0.05]", "scale.lip_bound=1.0"},
      {"scale.kind=table", "scale.table=[[0.1,0.2],[0.3,0.4]]", "parameter_map.kind=blend",
       "parameter_map.lambda=0.25"},
      {"germ.kind=polynomial", "germ.terms=[[1,2,0],[0.5,0,1]]", "solve.boundary_limit_index=6"},
      {"germ.kind=knot_vanishing", "germ.amplitude=2", "x_partition.kind=prefix",
       "x_partition.prefix=[0,0.2,0.3]", "x_partition.ratio=0.7"},
      {"germ.kind=tabulated", "germ.nx=2", "germ.ny=2", "germ.values=[1,2,3,4]", "attractor.mode=chaos"},
  };
  for (const auto& v : variants) {
    const ToolkitConfig c = parse_config(minimal, v);
    const std::string echo = effective_config_json(c);
    const ToolkitConfig back = parse_config(echo);
    CHECK(effective_config_json(back) == echo);
  }
}

TEST_CASE("builders reflect the config") {
  const ToolkitConfig c = parse_config(minimal, {"x_partition.ratio=0.6", "scale.value=0.4", "attractor.seed=99"});
  const auto part = make_partition(c);
  CHECK(part.x().ratio() == 0.6);
  CHECK(part.y().ratio() == 0.5);
  CHECK(make_scale(c).sup_bound() == doctest::Approx(0.4));
  CHECK(make_budget(c).seed == 99);
  CHECK(make_solve_settings(c, 3).jobs == 3);
  CHECK(make_map(c).kind() == fracsurf::ParameterMap::Kind::CornerBilinear);
}
