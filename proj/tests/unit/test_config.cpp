#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include "config.hpp"
#include "experiments.hpp"

using namespace mslab;
namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

fs::path fresh_dir(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / ("mslab-unit-" + name);
  fs::remove_all(dir);
  return dir;
}

}  // namespace

TEST_SUITE("config") {
  TEST_CASE("parse_config defaults and overrides") {
    const Config c = parse_config(json::parse(R"({
      "grid": {"n": 2, "N": 16}, "scenario": {"name": "constant_field", "w0": 3}, "seed": 5,
      "experiments": [{"type": "weights-rh"}, {"type": "riesz-norms", "seed": 9, "grid": {"n": 2, "N": 32}}]})"));
    REQUIRE(c.experiments.size() == 2);
    CHECK(c.experiments[0].seed == 5);
    CHECK(c.experiments[0].grid.N == 16);
    CHECK(c.experiments[1].seed == 9);
    CHECK(c.experiments[1].grid.N == 32);
    CHECK(c.experiments[0].name != c.experiments[1].name);
    CHECK(c.experiments[0].scenario.field.w0 == 3.0);
  }

  TEST_CASE("invalid configurations are rejected before running") {
    CHECK_THROWS_AS(parse_config(json::parse(R"({"scenario": "no_such_scenario", "experiments": []})")), Error);
    CHECK_THROWS_AS(parse_config(json::parse(R"({"experiments": [{"type": "bogus"}]})")), Error);
    CHECK_THROWS_AS(parse_config(json::parse(R"({"grid": {"n": 2, "N": 24}, "experiments": []})")), Error);
    CHECK_THROWS_AS(parse_config(json::parse(R"({"scenario": {"name": "expression_field", "a": ["x1 +", "0"]}})")),
                    Error);
    CHECK_THROWS_AS(scenario_from_json(json("expression_field")), Error);
  }

  TEST_CASE("scenario json round trip") {
    for (const std::string& name : scenario_catalog()) {
      const Scenario s = name == "expression_field"
                             ? scenario_from_json(json{{"name", name}, {"a", {"-x2 * x1", "sin(2 * x1)"}}})
                             : scenario_from_json(json(name));
      CHECK(scenario_to_json(scenario_from_json(scenario_to_json(s))) == scenario_to_json(s));
    }
  }

  TEST_CASE("sha256") {
    CHECK(sha256_hex("abc") == "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
  }
}

TEST_SUITE("experiments") {
  TEST_CASE("empty experiment list writes only the manifest") {
    const fs::path dir = fresh_dir("empty");
    const RunResult r = run(parse_config(json::parse(R"({"experiments": []})")), dir.string());
    CHECK(r.exit_code == 0);
    std::size_t files = 0;
    for (const auto& entry : fs::directory_iterator(dir)) {
      ++files;
      CHECK(entry.path().filename() == "manifest.json");
    }
    CHECK(files == 1);
    CHECK(r.manifest.at("files").empty());
    fs::remove_all(dir);
  }

  TEST_CASE("riesz norm curve CSV and manifest") {
    const fs::path dir = fresh_dir("riesz");
    const Config c = parse_config(json::parse(R"({
      "grid": {"n": 2, "N": 16}, "scenario": {"name": "constant_field", "w0": 4}, "seed": 3,
      "experiments": [{"type": "riesz-norms", "name": "curve", "probes": 8, "p": [2, 4]}]})"));
    const RunResult r = run(c, dir.string());
    REQUIRE(r.exit_code == 0);
    std::istringstream csv(slurp(dir / "curve.csv"));
    std::string line;
    std::getline(csv, line);
    CHECK(line == "operator,p,N,lower_bound,probe_id,seed");
    std::set<std::pair<std::string, std::string>> keys;
    std::size_t rows = 0;
    while (std::getline(csv, line)) {
      ++rows;
      std::istringstream fields(line);
      std::string op, p;
      std::getline(fields, op, ',');
      std::getline(fields, p, ',');
      keys.insert({op, p});
    }
    CHECK(rows > 0);
    CHECK(rows == keys.size());
    std::set<std::string> ps;
    for (const auto& k : keys) ps.insert(k.second);
    CHECK(ps.size() == 2);

    const json doc = json::parse(slurp(dir / "curve.json"));
    for (const char* key : {"experiment", "grid", "scenario", "rows", "constants", "seed", "tool_version"})
      CHECK(doc.contains(key));

    for (const json& f : r.manifest.at("files"))
      CHECK(f.at("sha256") == sha256_hex(slurp(dir / f.at("path").get<std::string>())));
    CHECK(report_directory(dir.string()).at("mismatched_files").empty());

    // Corrupting a listed file breaks strict verification only.
    std::ofstream(dir / "curve.csv", std::ios::app) << "tampered\n";
    CHECK_THROWS_AS(report_directory(dir.string(), true), Error);
    CHECK(report_directory(dir.string(), false).at("mismatched_files").size() == 1);
    fs::remove_all(dir);
  }

  TEST_CASE("a failing experiment is recorded and the run continues") {
    const fs::path dir = fresh_dir("failing");
    const Config c = parse_config(json::parse(R"({
      "grid": {"n": 2, "N": 16}, "scenario": "free",
      "experiments": [{"type": "weights-m", "name": "needs-field"}, {"type": "build-operator", "name": "op"}]})"));
    const RunResult r = run(c, dir.string());
    CHECK(r.exit_code == 1);
    CHECK(!r.error.empty());
    const json& exps = r.manifest.at("experiments");
    REQUIRE(exps.size() == 2);
    CHECK(exps[0].at("status") == "error");
    CHECK(exps[1].at("status") == "ok");
    CHECK(r.manifest.at("status") == "failed");
    fs::remove_all(dir);
  }
}
