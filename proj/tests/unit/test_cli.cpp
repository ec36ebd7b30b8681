#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <json.hpp>

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

fs::path scratch() {
  const fs::path dir = fs::temp_directory_path() / ("wolbachia_cli_" + std::to_string(::getpid()));
  fs::create_directories(dir);
  return dir;
}

int cli(const std::string& args) {
  const std::string cmd = std::string(WOLBACHIA_CLI_PATH) + " " + args + " >/dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

fs::path write(const fs::path& path, const json& j) {
  std::ofstream(path) << j.dump();
  return path;
}

std::string slurp(const fs::path& path) {
  std::ifstream in(path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

json sim_config(double h0, double x_max, double horizon) {
  return {{"params", {{"d1", 1}, {"d2", 1}, {"delta1", 1}, {"delta2", 1}, {"mu", 1}, {"h0", h0}}},
          {"b1", 2},
          {"b2", 1},
          {"grid", {{"n_u", 32}, {"n_v", 128}, {"x_max", x_max}}},
          {"run", {{"horizon", horizon}}}};
}

}  // namespace

TEST_CASE("simulate writes series and manifest") {
  const fs::path dir = scratch();
  const auto cfg = write(dir / "sim.json", sim_config(1.0, 6.0, 2.0));
  REQUIRE(cli("simulate --config " + cfg.string() + " --out " + (dir / "a").string()) == 0);
  const json manifest = json::parse(slurp(dir / "a" / "manifest.json"));
  CHECK(manifest.contains("scheme_version"));
  CHECK(manifest.contains("input_hash"));
  CHECK(manifest.contains("classification"));
  CHECK(manifest.contains("far_field_condition"));
  CHECK(slurp(dir / "a" / "series.csv").rfind("t,h,dhdt,sup_u,sup_v,mass_u\n", 0) == 0);
}

TEST_CASE("exit codes") {
  const fs::path dir = scratch();
  auto bad = sim_config(1.0, 6.0, 2.0);
  bad["params"]["d1"] = -1;
  CHECK(cli("simulate --config " + write(dir / "bad.json", bad).string() + " --out " + (dir / "b").string()) == 2);
  CHECK(cli("simulate --config " + (dir / "missing.json").string() + " --out " + (dir / "b").string()) == 2);
  CHECK(cli("simulate --out " + (dir / "b").string()) == 2);
  CHECK(cli("frobnicate --config x --out y") == 2);
  const auto trunc = write(dir / "trunc.json", sim_config(3.2, 4.0, 40.0));
  CHECK(cli("simulate --config " + trunc.string() + " --out " + (dir / "c").string()) == 3);
}

TEST_CASE("eigen, speed, threshold and ode subcommands") {
  const fs::path dir = scratch();
  const auto e = write(dir / "e.json", json{{"eigen", {{"d", 1}, {"h0", 1.5707963267948966}, {"b", 1}}}});
  REQUIRE(cli("eigen --config " + e.string() + " --out " + (dir / "e").string()) == 0);
  CHECK(std::abs(json::parse(slurp(dir / "e" / "eigen.json"))["lambda1"].get<double>()) < 1e-6);

  const auto s = write(dir / "s.json", json{{"speed", {{"d", 1}, {"a", 1}, {"delta", 1}, {"mu", 1}}}});
  REQUIRE(cli("speed --config " + s.string() + " --out " + (dir / "s").string()) == 0);
  const json sj = json::parse(slurp(dir / "s" / "speed.json"));
  for (const char* key : {"beta0", "uprime0", "mu", "a", "delta", "d", "residual"}) CHECK(sj.contains(key));
  CHECK(fs::exists(dir / "s" / "profile.csv"));

  auto t = sim_config(1.0, 6.0, 2.0);
  t["threshold"] = {{"kind", "h_star"}};
  REQUIRE(cli("threshold --config " + write(dir / "t.json", t).string() + " --out " + (dir / "t").string()) == 0);
  const json tj = json::parse(slurp(dir / "t" / "threshold.json"));
  CHECK(tj["value"].get<double>() == doctest::Approx(1.5707963267948966 * std::sqrt(0.5)).epsilon(1e-6));

  const auto o = write(dir / "o.json", json{{"ode",
                                             {{"system", "uv"}, {"b1", 2}, {"b2", 1}, {"delta1", 1}, {"delta2", 1},
                                              {"u0", 0.1}, {"v0", 0.9}, {"horizon", 5}, {"dt", 0.01}}}});
  REQUIRE(cli("ode --config " + o.string() + " --out " + (dir / "o").string()) == 0);
  CHECK(slurp(dir / "o" / "trajectory.csv").rfind("t,u,v\n", 0) == 0);
}

TEST_CASE("simulate output is byte-identical across runs") {
  const fs::path dir = scratch();
  const auto cfg = write(dir / "det.json", sim_config(1.2, 6.0, 2.0));
  REQUIRE(cli("simulate --config " + cfg.string() + " --out " + (dir / "d1").string()) == 0);
  REQUIRE(cli("simulate --config " + cfg.string() + " --out " + (dir / "d2").string()) == 0);
  CHECK(slurp(dir / "d1" / "series.csv") == slurp(dir / "d2" / "series.csv"));
}

TEST_CASE("sweep table is independent of parallelism") {
  const fs::path dir = scratch();
  const json spec = {{"axis", "params.h0"}, {"values", {1.4, 0.6, 1.0}}, {"base", sim_config(1.0, 6.0, 2.0)}};
  const auto path = write(dir / "sweep.json", spec);
  REQUIRE(cli("sweep --config " + path.string() + " --out " + (dir / "p1").string() + " --parallelism 1") == 0);
  REQUIRE(cli("sweep --config " + path.string() + " --out " + (dir / "p3").string() + " --parallelism 3") == 0);
  const std::string table = slurp(dir / "p1" / "sweep.csv");
  CHECK(table == slurp(dir / "p3" / "sweep.csv"));
  CHECK(table.rfind("axis_value,classification,h_final,measured_speed\n0.59999999999999998,", 0) == 0);
}
