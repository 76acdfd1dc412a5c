#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>
#include <sys/wait.h>

#include "warpcap/scenario.hpp"

using namespace warpcap;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

constexpr double kPi = 3.14159265358979323846;

const std::string kEuclid3 = "dim 3\nbase 1\nsegment power 1 1 0 inf\n";
const std::string kCusp =
    "dim 2\nbase 1\n"
    "segment linear 0.36787944117144233 0 1\n"
    "segment exponential 1 -1 1 inf\n";

struct TempDir {
  fs::path path;
  explicit TempDir(const std::string& name) {
    path = fs::temp_directory_path() / ("warpcap_scenario_" + name);
    fs::remove_all(path);
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
  fs::path file(const std::string& name) const { return path / name; }
};

void write_file(const fs::path& p, const std::string& text) {
  std::ofstream out(p, std::ios::binary);
  out << text;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  REQUIRE(in.good());
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

struct RunResult {
  int status = -1;
  std::string diag;
};

RunResult run(const fs::path& scenario, const RunOverrides& overrides = {}) {
  std::ostringstream diag;
  int status = run_scenario_file(scenario.string(), overrides, diag);
  return {status, diag.str()};
}

std::vector<std::string> lines_of(const std::string& text) {
  std::vector<std::string> lines;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) lines.push_back(line);
  return lines;
}

double field_at(const std::string& csv_line, int index) {
  std::istringstream in(csv_line);
  std::string cell;
  for (int i = 0; i <= index; ++i) REQUIRE(std::getline(in, cell, ','));
  return std::strtod(cell.c_str(), nullptr);
}

}  // namespace

TEST_CASE("capacity scenario emits the exact 8pi row") {
  TempDir dir("capacity");
  write_file(dir.file("euclid3.man"), kEuclid3);
  write_file(dir.file("caps.scn"),
             "command capacity\nmanifold euclid3.man\noutput caps.csv csv\n"
             "param p 2\nparam r1 1\nparam r2 2\n");

  auto result = run(dir.file("caps.scn"));
  CHECK(result.status == 0);
  CHECK(result.diag.empty());

  auto lines = lines_of(slurp(dir.file("caps.csv")));
  REQUIRE(lines.size() == 2);
  CHECK(lines[0] == "p,r1,r2,exact,surface_bound,volume_bound,tightness_volume");
  CHECK(field_at(lines[1], 0) == 2.0);
  CHECK(field_at(lines[1], 3) == doctest::Approx(8.0 * kPi).epsilon(1e-9));
  CHECK(field_at(lines[1], 4) == doctest::Approx(8.0 * kPi).epsilon(1e-9));
}

TEST_CASE("parabolicity scenario on the cusp reports parabolic") {
  TempDir dir("parabolic");
  write_file(dir.file("cusp.man"), kCusp);
  write_file(dir.file("p.scn"),
             "command parabolicity\nmanifold cusp.man\noutput verdict.json json\n"
             "param p 2\n");

  auto result = run(dir.file("p.scn"));
  CHECK(result.status == 0);
  json j = json::parse(slurp(dir.file("verdict.json")));
  CHECK(j["schema"] == 1);
  CHECK(j["verdict"] == "parabolic");
  CHECK(j["divergent_tail"]["kind"] == "exponential");
}

TEST_CASE("undetermined parabolicity is the inconclusive exit") {
  TempDir dir("undetermined");
  write_file(dir.file("tab.man"), "dim 3\nsegment tabulated 0:0.1 1:1 2:2 inf\n");
  write_file(dir.file("p.scn"),
             "command parabolicity\nmanifold tab.man\noutput verdict.json json\nparam p 2\n");

  auto result = run(dir.file("p.scn"));
  CHECK(result.status == 1);
  json j = json::parse(slurp(dir.file("verdict.json")));
  CHECK(j["verdict"] == "undetermined");
}

TEST_CASE("malformed manifold file yields exit 2 with a segment diagnostic") {
  TempDir dir("malformed");
  write_file(dir.file("bad.man"),
             "dim 3\nsegment linear 1 0 2\nsegment power 1 1 1 inf\n");
  write_file(dir.file("s.scn"),
             "command capacity\nmanifold bad.man\noutput caps.csv csv\n"
             "param p 2\nparam r1 1\nparam r2 2\n");

  auto result = run(dir.file("s.scn"));
  CHECK(result.status == 2);
  CHECK(result.diag.find("bad.man") != std::string::npos);
  CHECK(result.diag.find("overlaps segment 1") != std::string::npos);
  CHECK(result.diag.find("line 3") != std::string::npos);
  CHECK(!fs::exists(dir.file("caps.csv")));
}

TEST_CASE("missing, unknown, and unparseable keys are named") {
  TempDir dir("keys");
  write_file(dir.file("euclid3.man"), kEuclid3);

  write_file(dir.file("missing.scn"),
             "command capacity\nmanifold euclid3.man\noutput c.csv csv\n"
             "param p 2\nparam r1 1\n");
  auto missing = run(dir.file("missing.scn"));
  CHECK(missing.status == 2);
  CHECK(missing.diag.find("'r2'") != std::string::npos);

  write_file(dir.file("unknown.scn"),
             "command capacity\nmanifold euclid3.man\noutput c.csv csv\n"
             "param p 2\nparam r1 1\nparam r2 2\nparam bogus 7\n");
  auto unknown = run(dir.file("unknown.scn"));
  CHECK(unknown.status == 2);
  CHECK(unknown.diag.find("'bogus'") != std::string::npos);

  write_file(dir.file("badnum.scn"),
             "command capacity\nmanifold euclid3.man\noutput c.csv csv\n"
             "param p two\nparam r1 1\nparam r2 2\n");
  auto badnum = run(dir.file("badnum.scn"));
  CHECK(badnum.status == 2);
  CHECK(badnum.diag.find("'two'") != std::string::npos);

  write_file(dir.file("noseed.scn"),
             "command lindqvist\noutput cp.json json\n"
             "param p 2\nparam n 3\nparam samples 2000\n");
  auto noseed = run(dir.file("noseed.scn"));
  CHECK(noseed.status == 2);
  CHECK(noseed.diag.find("'seed'") != std::string::npos);
}

TEST_CASE("scenario grammar errors carry line numbers") {
  TempDir dir("grammar");
  write_file(dir.file("bad.scn"), "command capacity\nfrobnicate 3\n");
  auto bad = run(dir.file("bad.scn"));
  CHECK(bad.status == 2);
  CHECK(bad.diag.find("line 2") != std::string::npos);
  CHECK(bad.diag.find("frobnicate") != std::string::npos);

  write_file(dir.file("cmd.scn"), "command summon\noutput x.json json\n");
  auto cmd = run(dir.file("cmd.scn"));
  CHECK(cmd.status == 2);
  CHECK(cmd.diag.find("unknown command 'summon'") != std::string::npos);

  write_file(dir.file("fmt.scn"), "command analyze\nmanifold m\noutput x.yaml yaml\n");
  auto fmt = run(dir.file("fmt.scn"));
  CHECK(fmt.status == 2);
  CHECK(fmt.diag.find("csv") != std::string::npos);

  auto gone = run(dir.file("nonexistent.scn"));
  CHECK(gone.status == 2);
  CHECK(gone.diag.find("nonexistent.scn") != std::string::npos);
}

TEST_CASE("manifold-free commands reject a manifold line and vice versa") {
  TempDir dir("manifold_rules");
  write_file(dir.file("euclid3.man"), kEuclid3);

  write_file(dir.file("lind.scn"),
             "command lindqvist\nmanifold euclid3.man\noutput cp.json json\n"
             "param p 2\nparam n 3\nparam samples 2000\nparam seed 1\n");
  auto lind = run(dir.file("lind.scn"));
  CHECK(lind.status == 2);
  CHECK(lind.diag.find("does not read a manifold") != std::string::npos);

  write_file(dir.file("cap.scn"),
             "command capacity\noutput c.csv csv\nparam p 2\nparam r1 1\nparam r2 2\n");
  auto cap = run(dir.file("cap.scn"));
  CHECK(cap.status == 2);
  CHECK(cap.diag.find("requires a 'manifold") != std::string::npos);
}

TEST_CASE("lindqvist scenario pins C(2) = 1/2 and is byte-stable") {
  TempDir dir("lindqvist");
  write_file(dir.file("cp.scn"),
             "command lindqvist\noutput cp.json json\n"
             "param p 2\nparam n 3\nparam samples 2000\nparam seed 11\n");

  auto first = run(dir.file("cp.scn"));
  CHECK(first.status == 0);
  std::string text1 = slurp(dir.file("cp.json"));
  json j = json::parse(text1);
  CHECK(j["p"] == 2.0);
  CHECK(j["n"] == 3);
  CHECK(j["seed"] == 11);
  CHECK(j["sample_count"] == 2000);
  CHECK(j["estimated_Cp"].get<double>() == doctest::Approx(0.5).epsilon(1e-12));

  auto second = run(dir.file("cp.scn"));
  CHECK(second.status == 0);
  CHECK(slurp(dir.file("cp.json")) == text1);
}

TEST_CASE("capacity output is byte-identical across runs") {
  TempDir dir("determinism");
  write_file(dir.file("euclid3.man"), kEuclid3);
  write_file(dir.file("a.scn"),
             "command capacity\nmanifold euclid3.man\noutput a.csv csv\n"
             "param p 2.5\nparam r1 0.5\nparam r2 3\n");
  REQUIRE(run(dir.file("a.scn")).status == 0);
  std::string once = slurp(dir.file("a.csv"));
  REQUIRE(run(dir.file("a.scn")).status == 0);
  CHECK(slurp(dir.file("a.csv")) == once);
}

TEST_CASE("stokes scenarios certify the two canonical fields") {
  TempDir dir("stokes");
  write_file(dir.file("euclid3.man"), kEuclid3);

  // unit-mass bump: ball integrals -> 1, annulus-kernel ratios stay at 1
  write_file(dir.file("mass.scn"),
             "command stokes\nmanifold euclid3.man\noutput mass.json json\n"
             "param p 2\nparam kind annulus_kernel\nparam field bump 1 2 1\n"
             "param r_first 4\nparam r_factor 2\nparam r_count 5\n");
  auto mass = run(dir.file("mass.scn"));
  CHECK(mass.status == 0);
  json j = json::parse(slurp(dir.file("mass.json")));
  CHECK(j["conclusion"] == "nonzero");
  CHECK(j["residuals_ok"] == true);
  CHECK(j["inconsistent"] == false);
  CHECK(j["limit_value"].get<double>() == doctest::Approx(1.0).epsilon(1e-8));
  CHECK(j["condition"]["verdict"] == "violated");
  for (const auto& ratio : j["condition"]["ratios"])
    CHECK(ratio.get<double>() == doctest::Approx(1.0).epsilon(1e-6));

  // p-flux field: divergence-free, ball integrals identically 0
  write_file(dir.file("flux.scn"),
             "command stokes\nmanifold euclid3.man\noutput flux.csv csv\n"
             "param p 2\nparam kind annulus_kernel\nparam field unit_flux\n"
             "param r_first 4\nparam r_factor 2\nparam r_count 5\n");
  auto flux = run(dir.file("flux.scn"));
  CHECK(flux.status == 0);
  auto lines = lines_of(slurp(dir.file("flux.csv")));
  REQUIRE(lines.size() == 6);
  CHECK(lines[0] == "R,ball_integral,flux,condition_ratio");
  for (size_t i = 1; i < lines.size(); ++i) {
    CHECK(std::abs(field_at(lines[i], 1)) <= 1e-8);             // ball integral
    CHECK(field_at(lines[i], 2) == doctest::Approx(1.0).epsilon(1e-9));  // flux
  }
}

TEST_CASE("condition scenario verdicts map to exit 0") {
  TempDir dir("condition");
  write_file(dir.file("euclid3.man"), kEuclid3);

  // compactly supported density: ratios vanish beyond the support -> supported
  write_file(dir.file("supp.scn"),
             "command condition\nmanifold euclid3.man\noutput supp.json json\n"
             "param kind mass_average\nparam density bump 1 2\n"
             "param r_first 1\nparam r_factor 2\nparam r_count 6\n");
  auto supp = run(dir.file("supp.scn"));
  CHECK(supp.status == 0);
  json js = json::parse(slurp(dir.file("supp.json")));
  CHECK(js["verdict"] == "supported");
  CHECK(js["condition"] == "mass_average");

  // constant density: the averaged mass grows -> violated (still a clean verdict)
  write_file(dir.file("viol.scn"),
             "command condition\nmanifold euclid3.man\noutput viol.json json\n"
             "param kind mass_average\nparam density constant 1\n"
             "param r_first 1\nparam r_factor 2\nparam r_count 6\n");
  auto viol = run(dir.file("viol.scn"));
  CHECK(viol.status == 0);
  json jv = json::parse(slurp(dir.file("viol.json")));
  CHECK(jv["verdict"] == "violated");

  // mass_average must not take p
  write_file(dir.file("extra.scn"),
             "command condition\nmanifold euclid3.man\noutput e.json json\n"
             "param kind mass_average\nparam p 2\nparam density constant 1\n"
             "param r_first 1\nparam r_factor 2\nparam r_count 6\n");
  auto extra = run(dir.file("extra.scn"));
  CHECK(extra.status == 2);
  CHECK(extra.diag.find("does not take 'p'") != std::string::npos);
}

TEST_CASE("cutoff-sweep csv shows the optimal/ramp separation on the cusp") {
  TempDir dir("sweep");
  write_file(dir.file("cusp.man"), kCusp);
  write_file(dir.file("sweep.scn"),
             "command cutoff-sweep\nmanifold cusp.man\noutput sweep.csv csv\n"
             "param p 2\nparam r_start 5\nparam r_end 10\nparam count 6\n");

  auto result = run(dir.file("sweep.scn"));
  CHECK(result.status == 0);
  auto lines = lines_of(slurp(dir.file("sweep.csv")));
  REQUIRE(lines.size() == 7);
  CHECK(lines[0] == "r,phi_energy,xi_bound,ratio");
  CHECK(field_at(lines[1], 0) == 5.0);
  CHECK(field_at(lines[6], 0) == 10.0);
  for (size_t i = 2; i < lines.size(); ++i)
    CHECK(field_at(lines[i], 3) < field_at(lines[i - 1], 3));  // ratio decreases
}

TEST_CASE("sobolev-counterexample scenario confirms and tabulates") {
  TempDir dir("counterexample");
  write_file(dir.file("ce.scn"),
             "command sobolev-counterexample\noutput ce.json json\n"
             "param extent 60\nparam r_max 40\n");
  auto result = run(dir.file("ce.scn"));
  CHECK(result.status == 0);
  json j = json::parse(slurp(dir.file("ce.json")));
  CHECK(j["counterexample_confirmed"] == true);
  CHECK(j["spec"]["extent"] == 60.0);

  write_file(dir.file("ce_csv.scn"),
             "command sobolev-counterexample\noutput ce.csv csv\n"
             "param extent 60\nparam r_max 40\n");
  auto csv_result = run(dir.file("ce_csv.scn"));
  CHECK(csv_result.status == 0);
  auto lines = lines_of(slurp(dir.file("ce.csv")));
  REQUIRE(lines.size() >= 3);
  CHECK(lines[0] == "r,volume_ratio,lower_area_product");
  CHECK(field_at(lines[1], 0) == 3.0);  // first slow stretch opens at r = 3
  for (size_t i = 2; i < lines.size(); ++i) {
    CHECK(field_at(lines[i], 1) >= 1.0);  // V >= r^3 (gamma = 1)
    CHECK(field_at(lines[i], 2) > field_at(lines[i - 1], 2));
  }
}

TEST_CASE("analyze scenario summarizes the manifold") {
  TempDir dir("analyze");
  write_file(dir.file("cusp.man"), kCusp);
  write_file(dir.file("a.scn"), "command analyze\nmanifold cusp.man\noutput sum.json json\n");
  auto result = run(dir.file("a.scn"));
  CHECK(result.status == 0);
  json j = json::parse(slurp(dir.file("sum.json")));
  CHECK(j["dim"] == 2);
  CHECK(j["segment_count"] == 2);
  CHECK(j["tail"]["kind"] == "exponential");
}

TEST_CASE("relative outputs route through --out, then $WARPCAP_OUT, then the scenario dir") {
  TempDir dir("routing");
  TempDir flag_dir("routing_flag");
  TempDir env_dir("routing_env");
  write_file(dir.file("euclid3.man"), kEuclid3);
  write_file(dir.file("r.scn"),
             "command capacity\nmanifold euclid3.man\noutput sub/caps.csv csv\n"
             "param p 2\nparam r1 1\nparam r2 2\n");

  unsetenv("WARPCAP_OUT");
  REQUIRE(run(dir.file("r.scn")).status == 0);
  CHECK(fs::exists(dir.path / "sub" / "caps.csv"));

  setenv("WARPCAP_OUT", env_dir.path.c_str(), 1);
  REQUIRE(run(dir.file("r.scn")).status == 0);
  CHECK(fs::exists(env_dir.path / "sub" / "caps.csv"));

  RunOverrides with_flag;
  with_flag.out_dir = flag_dir.path.string();
  REQUIRE(run(dir.file("r.scn"), with_flag).status == 0);
  CHECK(fs::exists(flag_dir.path / "sub" / "caps.csv"));
  unsetenv("WARPCAP_OUT");

  // absolute output paths are used as-is
  write_file(dir.file("abs.scn"),
             "command capacity\nmanifold euclid3.man\noutput " +
                 (dir.path / "direct.csv").string() +
                 " csv\nparam p 2\nparam r1 1\nparam r2 2\n");
  RunOverrides elsewhere;
  elsewhere.out_dir = flag_dir.path.string();
  REQUIRE(run(dir.file("abs.scn"), elsewhere).status == 0);
  CHECK(fs::exists(dir.path / "direct.csv"));
}

TEST_CASE("tol override is validated and applied") {
  TempDir dir("tol");
  write_file(dir.file("euclid3.man"), kEuclid3);
  write_file(dir.file("c.scn"),
             "command capacity\nmanifold euclid3.man\noutput c.csv csv\n"
             "param p 2\nparam r1 1\nparam r2 2\n");

  RunOverrides bad;
  bad.tol = -1.0;
  auto rejected = run(dir.file("c.scn"), bad);
  CHECK(rejected.status == 2);
  CHECK(rejected.diag.find("--tol") != std::string::npos);

  RunOverrides loose;
  loose.tol = 1e-8;
  auto ok = run(dir.file("c.scn"), loose);
  CHECK(ok.status == 0);
  auto lines = lines_of(slurp(dir.file("c.csv")));
  CHECK(field_at(lines[1], 3) == doctest::Approx(8.0 * kPi).epsilon(1e-6));
}

TEST_CASE("cli binary honours the exit-code contract") {
  TempDir dir("cli");
  write_file(dir.file("euclid3.man"), kEuclid3);
  write_file(dir.file("caps.scn"),
             "command capacity\nmanifold euclid3.man\noutput caps.csv csv\n"
             "param p 2\nparam r1 1\nparam r2 2\n");
  write_file(dir.file("broken.man"), "dim 3\nsegment linear 1 0 2\nsegment power 1 1 1 inf\n");
  write_file(dir.file("broken.scn"),
             "command capacity\nmanifold broken.man\noutput x.csv csv\n"
             "param p 2\nparam r1 1\nparam r2 2\n");

  auto shell = [](const std::string& cmd) {
    int raw = std::system(cmd.c_str());
    REQUIRE(WIFEXITED(raw));
    return WEXITSTATUS(raw);
  };
  const std::string bin = WARPCAP_BIN;

  CHECK(shell(bin + " run " + dir.file("caps.scn").string() + " 2>/dev/null") == 0);
  CHECK(fs::exists(dir.file("caps.csv")));

  CHECK(shell(bin + " run " + dir.file("caps.scn").string() + " --tol 1e-10 2>/dev/null") == 0);

  TempDir out_dir("cli_out");
  CHECK(shell(bin + " run " + dir.file("caps.scn").string() + " --out " +
              out_dir.path.string() + " 2>/dev/null") == 0);
  CHECK(fs::exists(out_dir.path / "caps.csv"));

  CHECK(shell(bin + " run " + dir.file("broken.scn").string() + " 2>/dev/null") == 2);
  CHECK(shell(bin + " run " + dir.file("missing.scn").string() + " 2>/dev/null") == 2);
  CHECK(shell(bin + " 2>/dev/null") == 2);            // missing subcommand
  CHECK(shell(bin + " run 2>/dev/null") == 2);        // missing scenario argument
  CHECK(shell(bin + " --help >/dev/null 2>&1") == 0);
}
