#include <doctest.h>

#include "duality/cli.hpp"

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <regex>
#include <sstream>
#include <string>

using namespace duality::cli;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("duality_cli_test_" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream is(p, std::ios::binary);
  std::ostringstream os;
  os << is.rdbuf();
  return os.str();
}

int run(const std::string& args) {
  const std::string cmd = std::string(DUALITY_LAB_EXE) + " " + args + " >/dev/null 2>&1";
  const int raw = std::system(cmd.c_str());
  return WIFEXITED(raw) ? WEXITSTATUS(raw) : -1;
}

fs::path write_config(const fs::path& dir, const std::string& text) {
  const fs::path p = dir / "config.json";
  std::ofstream(p) << text;
  return p;
}

}  // namespace

TEST_SUITE("cli") {

TEST_CASE("float formatting uses 17 significant digits") {
  CHECK(format_double(0.1) == "0.10000000000000001");
  CHECK(format_double(1.0) == "1");
  CHECK(format_double(-2.5e-300) == "-2.5e-300");
  CHECK(format_double(1.0 / 3.0) == "0.33333333333333331");
  CHECK(format_double(std::nan("")) == "nan");
}

TEST_CASE("config resolution") {
  const auto c = resolve_config("run-mc", nlohmann::json::parse(R"({"n_paths": 500, "x0": 1})"));
  CHECK(c["n_paths"] == 500);
  CHECK(c["x0"].is_number_float());
  CHECK(c["theta"] == 0.5);
  CHECK(c["format"] == "csv");

  Overrides ov;
  ov.seed = 99;
  ov.format = "json";
  const auto o = resolve_config("run-mc", nlohmann::json::parse(R"({"seed": 3, "format": "csv"})"), ov);
  CHECK(o["seed"] == 99);
  CHECK(o["format"] == "json");

  CHECK_THROWS_AS(resolve_config("run-mc", nlohmann::json::parse(R"({"paths": 5})")), ConfigError);
  CHECK_THROWS_AS(resolve_config("run-mc", nlohmann::json::parse(R"({"n_paths": "5"})")), ConfigError);
  CHECK_THROWS_AS(resolve_config("run-mc", nlohmann::json::parse(R"({"n_paths": 5.5})")), ConfigError);
  CHECK_THROWS_AS(resolve_config("run-mc", nlohmann::json::parse(R"({"seed": -1})")), ConfigError);
  CHECK_THROWS_AS(resolve_config("run-mc", nlohmann::json::parse(R"({"format": "xml"})")), ConfigError);
  CHECK_THROWS_AS(resolve_config("check-exact", nlohmann::json::parse(R"({"command": "run-mc"})")),
                  ConfigError);
  CHECK_THROWS_AS(resolve_config("nope", nlohmann::json::object()), ConfigError);
  CHECK_THROWS_AS(resolve_config("run-mc", nlohmann::json::parse("[1]")), ConfigError);
}

TEST_CASE("invalid parameters surface as config errors") {
  auto c = resolve_config("check-exact", nlohmann::json::parse(R"({"moran_N": 0})"));
  CHECK_THROWS_AS(run_command("check-exact", c), ConfigError);
  c = resolve_config("run-mc", nlohmann::json::parse(R"({"n_paths": 10})"));
  CHECK_THROWS_AS(run_command("run-mc", c), ConfigError);
  c = resolve_config("run-mc", nlohmann::json::parse(R"({"experiment": "other"})"));
  CHECK_THROWS_AS(run_command("run-mc", c), ConfigError);
}

TEST_CASE("CSV rendering records the config ahead of the table") {
  Report r;
  r.command = "check-exact";
  r.config = resolve_config("check-exact", nlohmann::json::object());
  r.table.columns = {"a", "b", "pass"};
  r.table.rows.push_back({std::string("x,y"), 0.1, true});
  const std::string csv = render_csv(r);
  CHECK(csv.find("# tolerance=1e-10\n") != std::string::npos);
  CHECK(csv.find("a,b,pass\n\"x,y\",0.10000000000000001,true\n") != std::string::npos);
  const auto j = nlohmann::json::parse(render_json(r));
  CHECK(j["rows"][0]["a"] == "x,y");
  CHECK(j["config"]["moran_N"] == 8);
  CHECK(exit_status(r) == 0);
  r.all_pass = false;
  CHECK(exit_status(r) == 1);
  r.assertable = false;
  CHECK(exit_status(r) == 0);
}

TEST_CASE("end-to-end exit codes and outputs") {
  const fs::path dir = scratch("e2e");
  const fs::path cfg = write_config(dir, R"({"n_max": 4})");
  CHECK(run("check-pointwise --config " + cfg.string() + " --out " + (dir / "pw").string()) == 0);
  CHECK(fs::exists(dir / "pw" / "report.csv"));
  CHECK(fs::exists(dir / "pw" / "run.log"));
  // Timestamps belong in run.log only.
  const std::regex stamp(R"(\d{4}-\d{2}-\d{2}T\d{2}:\d{2})");
  CHECK_FALSE(std::regex_search(slurp(dir / "pw" / "report.csv"), stamp));
  CHECK(std::regex_search(slurp(dir / "pw" / "run.log"), stamp));

  const fs::path bad = write_config(dir, R"({"n_max": 4, "colour": 1})");
  CHECK(run("check-pointwise --config " + bad.string() + " --out " + (dir / "bad").string()) == 2);
  CHECK(run("check-pointwise --out " + (dir / "bad").string()) == 2);
  CHECK(run("check-pointwise --config " + (dir / "missing.json").string()) == 2);

  const fs::path ex = write_config(dir, "{}");
  CHECK(run("reproduce-examples --config " + ex.string() + " --out " + (dir / "ex").string() +
            " --format json") == 0);
  const auto j = nlohmann::json::parse(slurp(dir / "ex" / "report.json"));
  CHECK(j["rows"].size() == 4);
  CHECK(j["assertable"] == false);
}

TEST_CASE("failing checks exit 1") {
  const fs::path dir = scratch("fail");
  // A tolerance nothing can meet.
  const fs::path cfg = write_config(dir, R"({"tolerance": 1e-300, "N": 3})");
  CHECK(run("check-pointwise --config " + cfg.string() + " --out " + dir.string()) == 1);
}

TEST_CASE("Monte Carlo output is byte-identical across reruns") {
  const fs::path dir = scratch("det");
  const fs::path cfg = write_config(
      dir, R"({"experiment": "mc-vs-mc", "n_paths": 2000, "dt": 0.01, "out": ")" +
               (dir / "o").string() + R"("})");
  for (const char* fmt : {"csv", "json"}) {
    REQUIRE(run("run-mc --config " + cfg.string() + " --seed 5 --format " + fmt) == 0);
    const std::string name = std::string("report.") + fmt;
    const std::string first = slurp(dir / "o" / name);
    REQUIRE(run("run-mc --config " + cfg.string() + " --seed 5 --format " + fmt) == 0);
    CHECK(slurp(dir / "o" / name) == first);
    REQUIRE(run("run-mc --config " + cfg.string() + " --seed 6 --format " + fmt) == 0);
    CHECK(slurp(dir / "o" / name) != first);
  }
}

}  // TEST_SUITE
