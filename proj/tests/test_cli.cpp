#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN

#include <sys/wait.h>
#include <unistd.h>

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "biharm/cli/cli.hpp"
#include "biharm/errors.hpp"
#include "doctest.h"
#include "json.hpp"

using namespace biharm;

namespace {

cli::RunConfig bundle_config(const std::string& name, int points, std::uint64_t seed = 7) {
  cli::RunConfig cfg;
  cfg.run.points = points;
  cfg.run.seed = seed;
  cli::Target t;
  t.bundle = atlas::find_bundle(name);
  cfg.targets.push_back(std::move(t));
  return cfg;
}

std::size_t count_kind(const cli::RunReport& rep, const std::string& kind) {
  return static_cast<std::size_t>(
      std::count_if(rep.items.begin(), rep.items.end(),
                    [&](const cli::ReportItem& i) { return i.kind == kind; }));
}

const char* const kNonLckConfig = R"cfg(
run {
  points = 1
}
chart skew {
  coords = x1 x2 x3 x4 x5 x6
  lo = -1 -1 -1 -1 -1 -1
  hi = 1 1 1 1 1 1
  g 1 1 = exp(2*x3)
  g 2 2 = exp(2*x3)
  g 3 3 = 1
  g 4 4 = 1
  g 5 5 = 1
  g 6 6 = 1
  j = standard
}
target skew {
  chart = skew
  conditions = lck_A lck_B
}
)cfg";

int run_cmd(const std::string& cmd) {
  const int status = std::system(cmd.c_str());
  REQUIRE(status != -1);
  return WEXITSTATUS(status);
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream f(p, std::ios::binary);
  REQUIRE(f.good());
  std::ostringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

}  // namespace

TEST_CASE("run_verify meets expectations on a passing bundle") {
  const auto rep = cli::run_verify(bundle_config("flat_c2", 2));
  CHECK(rep.exit_code == 0);
  CHECK(rep.diagnostics.empty());
  // 13 conditions per point, plus bitension + holomorphy for each of 4 maps.
  CHECK(rep.items.size() == 13 * 2 + 4 * 2 * 2);
  for (const auto& item : rep.items) CHECK(item.verdict == "pass");
  CHECK(count_kind(rep, "condition") == 26);
  CHECK(count_kind(rep, "bitension") == 8);
  CHECK(count_kind(rep, "identity") == 8);
}

TEST_CASE("control bundle exits zero when its controls fail as expected") {
  const auto rep = cli::run_verify(bundle_config("conformal_c2_control", 2));
  CHECK(rep.exit_code == 0);
  CHECK(rep.diagnostics.empty());
  bool saw_fail = false;
  for (const auto& item : rep.items)
    if (item.id == "lck_B") {
      CHECK(item.verdict == "fail");
      saw_fail = true;
    }
  CHECK(saw_fail);
}

TEST_CASE("a tampered expectation turns into exit code 1") {
  auto cfg = bundle_config("conformal_c2_control", 1);
  for (auto& [id, e] : cfg.targets[0].bundle.expected)
    if (id == "lck_B") e = atlas::Expect::pass;
  const auto rep = cli::run_verify(cfg);
  CHECK(rep.exit_code == 1);
  REQUIRE(!rep.diagnostics.empty());
  CHECK(rep.diagnostics[0].find("lck_B") != std::string::npos);
}

TEST_CASE("precondition failures yield exit code 3 and precondition items") {
  const auto cfg = cli::parse_config(kNonLckConfig);
  const auto rep = cli::run_verify(cfg);
  CHECK(rep.exit_code == 3);
  REQUIRE(rep.items.size() == 2);
  for (const auto& item : rep.items) {
    CHECK(item.verdict == "precondition");
    CHECK(item.chart == "skew");
  }
  REQUIRE(!rep.diagnostics.empty());
  CHECK(rep.diagnostics[0].find("conformal-symplectic") != std::string::npos);
}

TEST_CASE("config parse errors carry line numbers") {
  CHECK_THROWS_WITH_AS(cli::parse_config("chart a {\n  coords x1\n}\n"),
                       doctest::Contains("line 2"), ConfigError);
  CHECK_THROWS_WITH_AS(cli::parse_config("target t {\n  chart = nowhere\n}\n"),
                       doctest::Contains("unknown chart"), ConfigError);
  CHECK_THROWS_WITH_AS(cli::parse_config("run {\n  points = 0\n}\n"),
                       doctest::Contains("at least 1"), ConfigError);
  CHECK_THROWS_WITH_AS(cli::parse_config("run {\nchart a {\n}\n}\n"),
                       doctest::Contains("nest"), ConfigError);
  CHECK_THROWS_WITH_AS(cli::parse_config("run {\n  points = 1\n"),
                       doctest::Contains("unterminated"), ConfigError);
  CHECK_THROWS_WITH_AS(cli::parse_config("bundle flat_c2 {\n  conditions = lck_A bogus\n}\n"),
                       doctest::Contains("unknown condition id"), ConfigError);
  CHECK_THROWS_AS(cli::parse_config("run {\n  points = 2\n}\n"), ConfigError);  // no targets
}

TEST_CASE("exported bundles parse back to the same target") {
  for (const char* name : {"flat_c1", "conformal_c2_control", "sasakian_cone", "inoue_n3"}) {
    CAPTURE(name);
    const atlas::ExampleBundle& builtin = atlas::find_bundle(name);
    const auto cfg = cli::parse_config(cli::export_example(name));
    REQUIRE(cfg.targets.size() == 1);
    const atlas::ExampleBundle& imported = cfg.targets[0].bundle;
    CHECK(imported.name == builtin.name);
    CHECK(imported.chart->chart.dim == builtin.chart->chart.dim);
    CHECK(imported.chart->chart.name == builtin.chart->chart.name);
    CHECK(imported.maps.size() == builtin.maps.size());
    CHECK(imported.submersions.size() == builtin.submersions.size());
    CHECK(imported.expected == builtin.expected);
    CHECK(imported.bitension == builtin.bitension);
    CHECK(imported.gamma.has_value() == builtin.gamma.has_value());

    // The imported target must reproduce the built-in verdicts item by item.
    cli::RunConfig direct = bundle_config(name, 1);
    cli::RunConfig loaded = cfg;
    loaded.run.points = 1;
    loaded.run.seed = direct.run.seed;
    const auto a = cli::run_verify(direct);
    const auto b = cli::run_verify(loaded);
    CHECK(a.exit_code == 0);
    CHECK(b.exit_code == 0);
    REQUIRE(a.items.size() == b.items.size());
    for (std::size_t i = 0; i < a.items.size(); ++i) {
      CHECK(a.items[i].id == b.items[i].id);
      CHECK(a.items[i].verdict == b.items[i].verdict);
      CHECK(a.items[i].residual ==
            doctest::Approx(b.items[i].residual).epsilon(1e-9).scale(a.items[i].scale));
    }
  }
}

TEST_CASE("json report is deterministic, well formed and schema complete") {
  const auto cfg = bundle_config("sasakian_cone", 2);
  const std::string j1 = cli::to_json(cli::run_verify(cfg));
  const std::string j2 = cli::to_json(cli::run_verify(cfg));
  CHECK(j1 == j2);

  const auto doc = nlohmann::json::parse(j1);
  CHECK(doc.at("run").at("seed") == 7);
  CHECK(doc.at("run").at("versions").contains("engine"));
  const auto& items = doc.at("items");
  REQUIRE(items.is_array());
  CHECK(items.size() == cli::run_verify(cfg).items.size());
  for (const auto& item : items) {
    for (const char* key : {"kind", "id", "chart", "point", "residual", "scale", "verdict",
                            "terms"})
      CHECK_MESSAGE(item.contains(key), "missing key ", key);
    if (item.at("kind") == "condition") CHECK(!item.contains("map"));
    if (item.at("kind") == "bitension") CHECK(item.contains("map"));
  }
}

TEST_CASE("csv summary has a header and one row per item") {
  const auto rep = cli::run_verify(bundle_config("flat_c2", 1));
  const std::string csv = cli::to_csv(rep);
  CHECK(csv.rfind("kind,id,chart,map,point,residual,scale,verdict\n", 0) == 0);
  CHECK(static_cast<std::size_t>(std::count(csv.begin(), csv.end(), '\n')) ==
        rep.items.size() + 1);
}

TEST_CASE("condition filters restrict the run") {
  auto cfg = bundle_config("flat_c2", 2);
  cfg.targets[0].conditions = {"lck_A"};
  const auto rep = cli::run_verify(cfg);
  CHECK(rep.exit_code == 0);
  CHECK(count_kind(rep, "condition") == 2);
  for (const auto& item : rep.items)
    if (item.kind == "condition") CHECK(item.id == "lck_A");
}

TEST_CASE("list_examples names every bundle in order") {
  const std::string table = cli::list_examples();
  std::size_t prev = 0;
  for (const auto& b : atlas::registry()) {
    const auto pos = table.find(b.name);
    REQUIRE(pos != std::string::npos);
    CHECK(pos >= prev);
    prev = pos;
  }
  CHECK(table.find("[control]") != std::string::npos);
}

TEST_CASE("explain covers every condition id and rejects unknown ones") {
  for (const auto& id : cli::condition_ids()) CHECK(!cli::explain(id).empty());
  CHECK(cli::explain("lck_A").find("J-invariant") != std::string::npos);
  CHECK(cli::explain("gck_B").find("grad gamma") != std::string::npos);
  CHECK(cli::explain("bitension").find("tau") != std::string::npos);
  CHECK_THROWS_WITH_AS(cli::explain("bogus"), doctest::Contains("theorem_real_A"), ConfigError);
}

TEST_CASE("binary honors the exit code contract") {
  const std::string bin = BIHARM_BIN;
  const auto dir = std::filesystem::temp_directory_path() /
                   ("biharm_cli_" + std::to_string(::getpid()));
  std::filesystem::create_directories(dir);
  const auto path = [&dir](const char* n) { return (dir / n).string(); };

  CHECK(run_cmd(bin + " list-examples > /dev/null") == 0);
  CHECK(run_cmd(bin + " explain subm_eigen > /dev/null") == 0);
  CHECK(run_cmd(bin + " explain no_such_id 2> /dev/null") == 2);
  CHECK(run_cmd(bin + " export-example no_such 2> /dev/null") == 2);
  CHECK(run_cmd(bin + " verify " + path("missing.cfg") + " 2> /dev/null") == 2);

  CHECK(run_cmd(bin + " export-example conformal_c2_control --out " + path("ctl.cfg")) == 0);
  CHECK(run_cmd(bin + " verify " + path("ctl.cfg") + " --points 2 --out " + path("r1.json") +
                " 2> /dev/null") == 0);
  CHECK(run_cmd(bin + " verify " + path("ctl.cfg") + " --points 2 --out " + path("r2.json") +
                " 2> /dev/null") == 0);
  CHECK(slurp(path("r1.json")) == slurp(path("r2.json")));

  CHECK(run_cmd(bin + " verify " + path("ctl.cfg") + " --format both 2> /dev/null") == 2);
  CHECK(run_cmd(bin + " verify " + path("ctl.cfg") + " --points 1 --format both --out " +
                path("rb") + " 2> /dev/null") == 0);
  CHECK(std::filesystem::exists(path("rb.json")));
  CHECK(std::filesystem::exists(path("rb.csv")));

  // Tampered expectation: the control passing lck_B would be a mismatch.
  std::string cfg = slurp(path("ctl.cfg"));
  const std::string wrong = "expect lck_B = pass";
  cfg.replace(cfg.find("expect lck_B = fail"), wrong.size(), wrong);
  std::ofstream(path("tampered.cfg")) << cfg;
  CHECK(run_cmd(bin + " verify " + path("tampered.cfg") + " --points 1 --out " +
                path("r3.json") + " 2> /dev/null") == 1);

  std::ofstream(path("nonlck.cfg")) << kNonLckConfig;
  CHECK(run_cmd(bin + " verify " + path("nonlck.cfg") + " --out " + path("r4.json") +
                " 2> /dev/null") == 3);

  std::filesystem::remove_all(dir);
}
