#include <doctest.h>

#include "hausdorff/cli.hpp"
#include "hausdorff/scenario.hpp"

#include <filesystem>
#include <fstream>
#include <sstream>

using namespace hausdorff;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / ("hausdorff_cli_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

struct Run {
  int code = 0;
  std::string out;
  std::string err;
  fs::path dir;
};

Run run(const std::string& name, const Json& config, std::vector<std::string> extra = {}) {
  Run r;
  r.dir = scratch(name);
  const fs::path file = r.dir / "config.json";
  std::ofstream(file) << config.dump(2);
  std::vector<std::string> args{"hausdorff-cli", file.string(), "--out", (r.dir / "out").string()};
  args.insert(args.end(), extra.begin(), extra.end());
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  r.code = run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
  r.out = out.str();
  r.err = err.str();
  return r;
}

Json read_json(const fs::path& path) {
  std::ifstream in(path);
  return Json::parse(in);
}

std::vector<std::vector<std::string>> read_csv(const fs::path& path) {
  std::ifstream in(path);
  std::vector<std::vector<std::string>> rows;
  std::string line;
  while (std::getline(in, line)) {
    std::vector<std::string> cells;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) cells.push_back(cell);
    rows.push_back(cells);
  }
  return rows;
}

Json strip_timing(Json report) {
  report.erase("timing");
  return report;
}

}  // namespace

TEST_CASE("sphere slice scenario with constant Phi") {
  const Json config{{"scenario", "sphere-slice"},
                    {"seed", 42},
                    {"backend", {{"kind", "sphere"}, {"n", 3}}},
                    {"kernel", {{"type", "slice"}}},
                    {"samples", {{"mc", 5000}, {"phi", 5000}}}};
  const Run r = run("slice", config);
  CHECK(r.code == kExitPass);
  const Json report = read_json(r.dir / "out" / "report.json");
  CHECK(report["pass"] == true);
  std::size_t zonal = 0;
  for (const Json& c : report["checks"]) {
    if (c["name"].get<std::string>().rfind("zonal:", 0) == 0) {
      ++zonal;
      CHECK(c["pass"] == true);
    }
  }
  CHECK(zonal == 3);
  const auto k = read_csv(r.dir / "out" / "k_records.csv");
  REQUIRE(k.size() == 101);
  CHECK(k[0][2] == "k_spectral");
  for (std::size_t i = 1; i < k.size(); ++i) CHECK(std::abs(std::stod(k[i][2]) - 1.0) <= 1e-10);
  CHECK(fs::exists(r.dir / "out" / "zonal.csv"));
  CHECK(fs::exists(r.dir / "out" / "bound_records.csv"));
}

TEST_CASE("remark2 scenario at x = 0.7") {
  const Json config{{"scenario", "remark2"},
                    {"seed", 4},
                    {"backend", {{"kind", "euclidean"}, {"n", 1}}},
                    {"parameters", {{"x", Json::array({Json::array({0.7})})}}}};
  const Run r = run("remark2", config);
  CHECK(r.code == kExitPass);
  const Json report = read_json(r.dir / "out" / "report.json");
  const Json& checks = report["checks"];
  REQUIRE(checks.size() == 3);
  CHECK(checks[0]["name"] == "vanishes");
  CHECK(checks[0]["residual"].get<double>() <= 1e-6);
  CHECK(checks[1]["name"] == "phi_norm_divergent:q=2");
  CHECK(checks[1]["pass"] == true);
  CHECK(checks[2]["pass"] == true);
  for (const Json& b : report["bounds"]) {
    CHECK(b["phi_norm"]["divergent"] == true);
    CHECK(b["bound"] == "inf");
  }
}

TEST_CASE("doubling profile table on R^3") {
  const Json config{{"scenario", "doubling-profile"}, {"seed", 1}, {"backend", {{"kind", "euclidean"}, {"n", 3}}}};
  const Run r = run("doubling", config);
  CHECK(r.code == kExitPass);
  const auto rows = read_csv(r.dir / "out" / "doubling_profile.csv");
  REQUIRE(rows.size() > 1);
  CHECK(rows[0][5] == "ratio");
  for (std::size_t i = 1; i < rows.size(); ++i) CHECK(std::stod(rows[i][5]) == 8.0);
}

TEST_CASE("config errors exit with code 2") {
  SUBCASE("missing seed") {
    const Run r = run("noseed", Json{{"scenario", "weil"}});
    CHECK(r.code == kExitConfigError);
    CHECK(r.err.find("seed") != std::string::npos);
  }
  SUBCASE("empty check list") {
    const Run r = run("nochecks", Json{{"scenario", "weil"}, {"seed", 1}, {"checks", Json::array()}});
    CHECK(r.code == kExitConfigError);
    CHECK(r.err.find("empty check list") != std::string::npos);
  }
  SUBCASE("unknown scenario, field, check and sample key") {
    CHECK(run("bad1", Json{{"scenario", "nope"}, {"seed", 1}}).code == kExitConfigError);
    CHECK(run("bad2", Json{{"scenario", "weil"}, {"seed", 1}, {"colour", 1}}).code == kExitConfigError);
    CHECK(run("bad3", Json{{"scenario", "weil"}, {"seed", 1}, {"checks", {"weil:nope"}}}).code == kExitConfigError);
    CHECK(run("bad4", Json{{"scenario", "weil"}, {"seed", 1}, {"samples", {{"pairs", 5}}}}).code == kExitConfigError);
    CHECK(run("bad5", Json{{"scenario", "weil"}, {"seed", 1}, {"samples", {{"mc", 0}}}}).code == kExitConfigError);
    CHECK(run("bad6", Json{{"scenario", "weil"}, {"seed", -3}}).code == kExitConfigError);
  }
  SUBCASE("inconsistent backend") {
    CHECK(run("bad7", Json{{"scenario", "weil"}, {"seed", 1}, {"backend", {{"kind", "euclidean"}, {"n", 2}}}}).code ==
          kExitConfigError);
    CHECK(run("bad8", Json{{"scenario", "bound-consistency"}, {"seed", 1}}).code == kExitConfigError);
    CHECK(run("bad9", Json{{"scenario", "remark2"},
                           {"seed", 1},
                           {"parameters", {{"x", Json::array({Json::array({0.0})})}}}})
              .code == kExitConfigError);
  }
  SUBCASE("not JSON") {
    const fs::path dir = scratch("notjson");
    std::ofstream(dir / "c.json") << "{scenario: weil";
    const std::string path = (dir / "c.json").string();
    const char* argv[] = {"hausdorff-cli", path.c_str()};
    std::ostringstream out, err;
    CHECK(run_cli(2, argv, out, err) == kExitConfigError);
  }
}

TEST_CASE("failing checks exit with code 1 and are named") {
  const Json config{{"scenario", "weil"},
                    {"seed", 2},
                    {"samples", {{"mc", 2000}}},
                    {"parameters", {{"z", 1e-9}}},
                    {"checks", {"weil:constant", "weil:trace"}}};
  const Run r = run("failing", config);
  CHECK(r.code == kExitCheckFailure);
  CHECK(r.err.find("weil:trace") != std::string::npos);
  CHECK(r.err.find("weil:constant") == std::string::npos);
  const Json report = read_json(r.dir / "out" / "report.json");
  REQUIRE(report["checks"].size() == 2);
  CHECK(report["failures"] == Json::array({"weil:trace"}));
}

TEST_CASE("non-finite kernel values exit with code 3") {
  const Json mixture{{"type", "indicator_mixture"},
                     {"components", {{{"weight", 1.7e308}, {"radius", 10.0}}, {{"weight", 1.7e308}, {"radius", 10.0}}}}};
  const Json config{{"scenario", "sphere-slice"},
                    {"seed", 1},
                    {"kernel", {{"type", "slice"}, {"phi", mixture}}},
                    {"checks", {"phi_norm_is_mass:q=2"}}};
  CHECK(run("numerical", config).code == kExitNumericalError);
}

TEST_CASE("config echo round-trips and runs are deterministic") {
  const Json config{{"scenario", "bound-consistency"},
                    {"seed", 12},
                    {"backend", {{"kind", "special_orthogonal"}, {"n", 3}}},
                    {"kernel", {{"type", "random_discrete"}, {"terms", 3}, {"weights", {0.5, -0.3, 0.2}}}},
                    {"atoms", {{"terms", 2}}},
                    {"q", {2, "inf"}},
                    {"samples", {{"functions", 4}, {"outer", 2000}}},
                    {"parameters", {{"norm", "spectral"}}}};
  const Run a = run("det_a", config);
  const Run b = run("det_b", config);
  CHECK(a.code == kExitPass);
  const Json ra = read_json(a.dir / "out" / "report.json");
  const Json rb = read_json(b.dir / "out" / "report.json");
  Json echo = ra["config"];
  echo.erase("output");
  CHECK(parse_config(ra["config"]) == parse_config(to_json(parse_config(ra["config"]))));
  Json expected = config;
  CHECK(echo == expected);
  Json sa = strip_timing(ra), sb = strip_timing(rb);
  sa["config"].erase("output");
  sb["config"].erase("output");
  CHECK(sa.dump() == sb.dump());

  std::ifstream ca(a.dir / "out" / "consistency.csv"), cb(b.dir / "out" / "consistency.csv");
  std::stringstream ta, tb;
  ta << ca.rdbuf();
  tb << cb.rdbuf();
  CHECK(ta.str() == tb.str());
  CHECK_FALSE(ta.str().empty());
}

TEST_CASE("overrides replace the seed and the main sample count") {
  const Json config{{"scenario", "weil"}, {"seed", 1}, {"samples", {{"mc", 500}}}, {"checks", {"weil:trace"}}};
  const Run r = run("override", config, {"--seed", "77", "--samples", "3000"});
  CHECK(r.code == kExitPass);
  const Json report = read_json(r.dir / "out" / "report.json");
  CHECK(report["config"]["seed"] == 77);
  CHECK(report["config"]["samples"]["mc"] == 3000);
  CHECK(run("override_bad", config, {"--samples", "0"}).code == kExitConfigError);
}

TEST_CASE("every planned check is reported exactly once") {
  for (const std::string& name : scenario_names()) {
    if (name == "bound-consistency") continue;
    ScenarioConfig c = parse_config(Json{{"scenario", name}, {"seed", 3}});
    CHECK_FALSE(available_checks(c).empty());
  }
  const ScenarioConfig c = parse_config(Json{{"scenario", "delsarte-line"},
                                             {"seed", 3},
                                             {"samples", {{"functions", 2}, {"triples", 3}}},
                                             {"q", {2}}});
  const RunReport report = run_scenario(c);
  const std::vector<std::string> planned = available_checks(c);
  REQUIRE(report.checks.size() == planned.size());
  for (std::size_t i = 0; i < planned.size(); ++i) CHECK(report.checks[i].name == planned[i]);
}
