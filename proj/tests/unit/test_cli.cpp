#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "app/commands.hpp"
#include "boxanneal/errors.hpp"

using namespace boxanneal;
using namespace boxanneal::app;
namespace fs = std::filesystem;

namespace {

int run_cli(std::vector<std::string> args) {
  args.insert(args.begin(), "boxanneal");
  std::vector<char*> argv;
  for (auto& a : args) argv.push_back(a.data());
  return run(static_cast<int>(argv.size()), argv.data());
}

std::string slurp(const fs::path& p) {
  std::ifstream f(p, std::ios::binary);
  std::ostringstream s;
  s << f.rdbuf();
  return s.str();
}

fs::path scratch(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / ("boxanneal_cli_" + name);
  fs::remove_all(dir);
  return dir;
}

}  // namespace

TEST_CASE("number and grid parsing") {
  CHECK(parse_number("1e4.5", "k") == doctest::Approx(std::pow(10.0, 4.5)));
  CHECK(parse_number("2.5e-3", "k") == 0.0025);
  CHECK_THROWS_AS(parse_number("12abc", "k"), DomainError);
  CHECK(parse_int("400", "k") == 400);
  CHECK_THROWS_AS(parse_int("4.5", "k"), DomainError);
  CHECK(parse_bool("true", "k"));
  const auto g = parse_grid("log:0:6:121", "k");
  REQUIRE(g.size() == 121);
  CHECK(g[60] == doctest::Approx(1e3));
  CHECK(parse_grid("lin:1:2:3", "k")[1] == 1.5);
  CHECK(parse_grid("300, 1e3,3000", "k").size() == 3);
  CHECK_THROWS_AS(parse_grid("log:0:6", "k"), DomainError);
}

TEST_CASE("settings files, sections and precedence") {
  const Settings s = parse_settings("# comment\n[potential]\nmu = 12\na=0.2\n[basis]\nndim = 1000\nschedule.sf = 1e4.5\n");
  CHECK(s.at("potential.mu") == "12");
  CHECK(s.at("basis.ndim") == "1000");
  CHECK(s.at("schedule.sf") == "1e4.5");
  Settings base = default_settings();
  merge_settings(base, s);
  const ExperimentConfig c = build_config(base);
  CHECK(c.potential.mu == 12);
  CHECK(c.schedule.s_f == doctest::Approx(std::pow(10.0, 4.5)));
  CHECK_THROWS_AS(merge_settings(base, Settings{{"potential.nu", "3"}}), DomainError);
  CHECK_THROWS_AS(parse_settings("mu 12"), DomainError);
  CHECK_THROWS_AS(build_config(Settings{{"potential.mu", "6"}}), DomainError);
  CHECK_THROWS_AS(build_config(Settings{{"schedule.T", "100,50"}}), DomainError);
  CHECK_THROWS_AS(build_config(Settings{{"output.format", "xml"}}), DomainError);
}

TEST_CASE("bundled presets parse and validate") {
  int count = 0;
  for (const auto& entry : fs::directory_iterator(experiments_dir())) {
    if (entry.path().extension() != ".cfg") continue;
    Settings s = default_settings();
    merge_settings(s, read_settings(entry.path()));
    CHECK_NOTHROW(build_config(s));
    ++count;
  }
  CHECK(count >= 5);
}

TEST_CASE("exit codes: validation, numerical and I/O") {
  CHECK(run_cli({"potential", "--mu", "6"}) == kExitValidation);
  CHECK(run_cli({"oracle", "no_such_formula"}) == kExitValidation);
  CHECK(run_cli({"spectrum", "--set", "foo.bar=1"}) == kExitValidation);
  CHECK(run_cli({"oracle", "first_order", "--a", "0"}) == kExitValidation);
  CHECK(run_cli({"spectrum", "--config", "/nonexistent/x.cfg"}) == kExitIO);
  // a basis too small for s_f fails the guard: numerical failure
  const fs::path dir = scratch("numerical");
  CHECK(run_cli({"anneal", "--mu", "12", "--ndim", "30", "--T", "10", "--out", (dir / "a.csv").string()}) ==
        kExitNumerical);
  // the manifest is written even on failure
  const std::string m = slurp(dir / "manifest.jsonl");
  CHECK(m.find("\"exit_code\":3") != std::string::npos);
}

TEST_CASE("identical configs reproduce CSV bytes; manifests append") {
  const fs::path dir = scratch("repro");
  const std::vector<std::string> args{"spectrum", "--mu", "12", "--a", "0.2", "--ndim", "200", "--sgrid",
                                      "log:0:5:11", "--levels", "4"};
  auto with_out = [&](const std::string& name) {
    auto a = args;
    a.insert(a.end(), {"--out", (dir / name).string()});
    return a;
  };
  REQUIRE(run_cli(with_out("one.csv")) == kExitOk);
  REQUIRE(run_cli(with_out("two.csv")) == kExitOk);
  const std::string one = slurp(dir / "one.csv");
  CHECK(one == slurp(dir / "two.csv"));
  CHECK(one.rfind("s,E_0,E_1,E_2,E_3\n", 0) == 0);
  std::ifstream man(dir / "manifest.jsonl");
  std::vector<nlohmann::json> lines;
  for (std::string line; std::getline(man, line);) lines.push_back(nlohmann::json::parse(line));
  REQUIRE(lines.size() == 2);
  CHECK(lines[0]["config_hash"] != lines[1]["config_hash"]);  // output path differs
  CHECK(lines[0]["outputs"][0] == (dir / "one.csv").string());
  CHECK(lines[0]["params"]["potential.mu"] == "12");
  CHECK(lines[0]["status"] == "ok");
}

TEST_CASE("json output carries a schema; oracle records formula, inputs and value") {
  const fs::path dir = scratch("json");
  REQUIRE(run_cli({"oracle", "zero_point", "--mu", "12", "--s", "1e4", "--format", "json", "--out",
                   (dir / "o.json").string()}) == kExitOk);
  const auto j = nlohmann::json::parse(slurp(dir / "o.json"));
  CHECK(j["schema"] == "boxanneal.oracle/1");
  CHECK(j["formula"] == "zero_point");
  CHECK(j["inputs"]["mu"] == 12);
  CHECK(j["value"].get<double>() == doctest::Approx(12 * M_PI / (2 * std::sqrt(2e4))));
}

TEST_CASE("gaps emit features; plot scripts per style") {
  const fs::path dir = scratch("gaps");
  REQUIRE(run_cli({"gaps", "--mu", "12", "--a", "0.2", "--ndim", "300", "--sgrid", "log:4:5.5:31", "--levels", "3",
                   "--out", (dir / "g.csv").string(), "--plot"}) == kExitOk);
  const auto f = nlohmann::json::parse(slurp(dir / "g.features.json"));
  bool closure = false;
  for (const auto& x : f["features"])
    if (x["kind"] == "closure" && x["level"] == 2) closure = std::abs(std::log10(x["s_lo"].get<double>()) - 4.85) < 0.1;
  CHECK(closure);
  CHECK(fs::exists(dir / "g.plot.py"));
  CHECK(slurp(dir / "g.plot.py").find("loglog") != std::string::npos);
  CHECK_THROWS_AS(emit_plot_script(dir / "g.csv", "histogram", dir / "x.py"), DomainError);
  CHECK_THROWS_AS(emit_plot_script(dir / "missing.csv", "gaps", dir / "x.py"), std::ios_base::failure);
  emit_plot_script(dir / "g.csv", "residual", dir / "r.py", 1.40676);
  CHECK(slurp(dir / "r.py").find("GUIDE = 1.40676") != std::string::npos);
}

TEST_CASE("artifact builders") {
  Settings s = default_settings();
  merge_settings(s, Settings{{"potential.mu", "8"}, {"grid.points", "9"}});
  const ExperimentConfig c = build_config(s);
  const Artifact pot = potential_artifact(c);
  CHECK(pot.table.rows.size() == 9);
  CHECK(pot.records["minima"].size() == 5);

  merge_settings(s, Settings{{"variational.mgrid", "log:3.1:3.2:2"}});
  const Artifact var = variational_artifact(build_config(s));
  CHECK(var.table.columns == std::vector<std::string>{"m", "branch", "alpha", "x0", "energy"});
  CHECK(var.records["log10_transition_mass"].get<double>() == doctest::Approx(3.07).epsilon(0.01));
  CHECK(var.records["gap"].size() == 2);

  merge_settings(s, Settings{{"basis.ndim", "300"}, {"spectrum.s", "1e4"}, {"grid.points", "201"}});
  const Artifact den = density_artifact(build_config(s));
  double total = 0.0;
  for (const auto& row : den.table.rows) total += row[3].get<double>();
  CHECK(total / 200 == doctest::Approx(1.0).epsilon(0.02));
}
