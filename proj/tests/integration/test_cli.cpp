#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "config.hpp"
#include "doctest.h"
#include "run.hpp"

namespace fs = std::filesystem;
using namespace fracsurf::cli;

namespace {

std::string config(const char* name) { return std::string(FRACSURF_CONFIG_DIR) + "/" + name; }

fs::path scratch(const std::string& tag) {
  const fs::path p = fs::temp_directory_path() / ("fracsurf_cli_" + tag);
  fs::remove_all(p);
  return p;
}

int invoke(std::vector<std::string> args, std::string* err_text = nullptr) {
  args.insert(args.begin(), "fracsurf");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int code = run(static_cast<int>(argv.size()), argv.data(), out, err);
  if (err_text) *err_text = err.str();
  return code;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

std::size_t count_lines(const std::string& s) {
  std::size_t n = 0;
  for (char c : s) n += c == '\n';
  return n;
}

}  // namespace

TEST_CASE("build on the bundled demo writes a 257 x 257 surface") {
  const fs::path dir = scratch("build");
  REQUIRE(invoke({"build", "--config", config("demo.json"), "--override", "output.directory=" + dir.string()}) == 0);
  const std::string csv = slurp(dir / "surface.csv");
  CHECK(count_lines(csv) == 257 * 257 + 1);
  CHECK(csv.rfind("x,y,z\n", 0) == 0);
  CHECK(csv.find('\r') == std::string::npos);
  CHECK(slurp(dir / "surface.pgm").rfind("P2\n257 257\n65535\n", 0) == 0);
  CHECK(slurp(dir / "solve.log").find("iterations=") != std::string::npos);

  // The echo is a loadable config describing the same run.
  const ToolkitConfig echo = load_config((dir / "effective_config.json").string());
  CHECK(effective_config_json(echo) == slurp(dir / "effective_config.json"));
  CHECK(echo.output.directory == dir.string());
}

TEST_CASE("verify with the identity map passes every bound") {
  const fs::path dir = scratch("identity");
  REQUIRE(invoke({"verify", "--config", config("identity.json"), "--override", "output.directory=" + dir.string()}) ==
          0);
  const std::string report = slurp(dir / "verify_report.txt");
  CHECK(report.find(" fail ") == std::string::npos);
  CHECK(report.find("perturbation pass 0 ") != std::string::npos);
  CHECK(report.find("failed=0") != std::string::npos);
}

TEST_CASE("certificate refusal and non-convergence exit with 3") {
  std::string err;
  CHECK(invoke({"build", "--config", config("refused.json"), "--override",
                "output.directory=" + scratch("refused").string()},
               &err) == 3);
  CHECK(err.find("1/2") != std::string::npos);
  const fs::path dir = scratch("noconv");
  CHECK(invoke({"build", "--config", config("attractor.json"), "--override", "output.directory=" + dir.string(),
                "--override", "solve.max_iter=2"}) == 3);
  const std::string log = slurp(dir / "solve.log");
  CHECK(count_lines(log) == 3);
  CHECK(log.find("error=") != std::string::npos);
}

TEST_CASE("config and usage errors exit with 2") {
  std::string err;
  CHECK(invoke({"build", "--config", config("demo.json"), "--override", "solve.tolx=1"}, &err) == 2);
  CHECK(err.find("solve.tolx") != std::string::npos);
  CHECK(invoke({"build", "--config", "/nonexistent/config.json"}) == 2);
  CHECK(invoke({"build"}) == 2);
  CHECK(invoke({"--config", config("demo.json")}) == 2);
  CHECK(invoke({"build", "--config", config("demo.json"), "--override", "scale.sup_bound=1.0"}, &err) == 2);
  CHECK(err.find("scale field must satisfy sup < 1") != std::string::npos);
}

TEST_CASE("chaos outputs are byte-identical per seed") {
  const std::vector<std::string> common = {
      "--override", "attractor.mode=chaos",        "--override", "attractor.points=3000",
      "--override", "attractor.schedule=[[2,2],[4,4]]", "--override", "attractor.graph_iterations=1",
      "--override", "attractor.graph_lattice=9",   "--override", "attractor.graph_resolution=16",
      "--override", "solve.lattice=33",            "--override", "audit.lattice=65"};
  auto run_with_seed = [&](const char* seed, const std::string& tag) {
    ::setenv("FRACSURF_SEED", seed, 1);
    const fs::path dir = scratch(tag);
    std::vector<std::string> args = {"attractor", "--config", config("attractor.json"), "--override",
                                     "output.directory=" + dir.string()};
    args.insert(args.end(), common.begin(), common.end());
    const int code = invoke(args);
    ::unsetenv("FRACSURF_SEED");
    CHECK((code == 0 || code == 4));
    return dir;
  };
  const fs::path a = run_with_seed("5", "seed_a");
  const fs::path b = run_with_seed("5", "seed_b");
  const fs::path c = run_with_seed("6", "seed_c");
  CHECK(slurp(a / "attractor_4_4.csv") == slurp(b / "attractor_4_4.csv"));
  CHECK(slurp(a / "attractor_report.txt") == slurp(b / "attractor_report.txt"));
  CHECK(slurp(a / "attractor_4_4.csv") != slurp(c / "attractor_4_4.csv"));
  CHECK(slurp(a / "effective_config.json").find("\"seed\": 5") != std::string::npos);

  ::setenv("FRACSURF_SEED", "abc", 1);
  CHECK(invoke({"build", "--config", config("attractor.json"), "--override",
                "output.directory=" + scratch("badseed").string()}) == 2);
  ::unsetenv("FRACSURF_SEED");
}

TEST_CASE("operator probe on the demo") {
  const fs::path dir = scratch("operator");
  REQUIRE(invoke({"operator", "--config", config("demo.json"), "--override", "output.directory=" + dir.string(),
                  "--override", "solve.lattice=65", "--override", "audit.lattice=129"}) == 0);
  const std::string report = slurp(dir / "operator_report.txt");
  CHECK(report.find("linearity[0,1] pass") != std::string::npos);
  CHECK(report.find("failed=0") != std::string::npos);
}
