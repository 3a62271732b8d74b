#include "doctest.h"

#include <sys/wait.h>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "json.hpp"

namespace fs = std::filesystem;

namespace {

struct Outcome {
  int code = -1;
  std::string out;
};

Outcome run_cli(const std::string& args, const std::string& env = "") {
  const std::string cmd = env + " '" + std::string(WBST_CLI_PATH) + "' " + args + " 2>&1";
  Outcome o;
  FILE* pipe = popen(cmd.c_str(), "r");
  REQUIRE(pipe != nullptr);
  char buf[4096];
  while (std::fgets(buf, sizeof buf, pipe)) o.out += buf;
  const int status = pclose(pipe);
  o.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return o;
}

fs::path scratch(const std::string& name) {
  auto p = fs::temp_directory_path() / ("wbst_cli_test_" + name);
  fs::remove_all(p);
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

nlohmann::json manifest(const fs::path& dir) {
  return nlohmann::json::parse(slurp(dir / "manifest.json"));
}

void write_spec(const fs::path& path, const std::string& body) {
  fs::create_directories(path.parent_path());
  std::ofstream(path) << body;
}

const char* passing_spec = R"({
  "id": "cli-small", "model": "permutation", "n": 100,
  "k_rule": {"kind": "alpha_n", "value": 0.5}, "replicates": 2000, "seed": 3,
  "outputs": ["depth"],
  "claims": [{"name": "mean", "check": "mean", "statistic": "weighted_depth",
              "target": "exact_weighted_depth_mean", "tolerance": 0.05, "relative": true}]
})";

const char* failing_spec = R"({
  "id": "cli-fail", "model": "permutation", "n": 100,
  "k_rule": {"kind": "alpha_n", "value": 0.5}, "replicates": 500, "seed": 3,
  "claims": [{"name": "wrong", "check": "mean", "statistic": "depth",
              "target": 1000, "tolerance": 1}]
})";

}  // namespace

TEST_CASE("cli: usage errors exit with 2") {
  CHECK(run_cli("").code == 2);
  CHECK(run_cli("bogus").code == 2);
  CHECK(run_cli("oracle --n 9").code == 2);
  CHECK(run_cli("fixedpoint --tol 1").code == 2);
  CHECK(run_cli("simulate /nonexistent.json").code == 2);
  CHECK(run_cli("--help").code == 0);
  CHECK(run_cli("--version").code == 0);
}

TEST_CASE("cli: simulate writes results and a manifest") {
  const auto dir = scratch("simulate");
  const auto spec = dir / "spec.json";
  write_spec(spec, passing_spec);
  const auto out = dir / "out";
  const auto r = run_cli("simulate " + spec.string() + " --out " + out.string());
  INFO(r.out);
  CHECK(r.code == 0);
  CHECK(fs::exists(out / "results.csv"));
  CHECK(fs::exists(out / "results.jsonl"));
  const auto m = manifest(out);
  CHECK(m.at("status") == "passed");
  CHECK(m.at("seed") == 3);
  CHECK(m.at("command") == "simulate");
  CHECK(slurp(out / "results.csv").find("cli-small") != std::string::npos);
}

TEST_CASE("cli: seed precedence") {
  const auto dir = scratch("seed");
  const auto spec = dir / "spec.json";
  write_spec(spec, passing_spec);
  run_cli("simulate " + spec.string() + " --out " + (dir / "a").string(), "WBST_SEED=11");
  CHECK(manifest(dir / "a").at("seed") == 11);
  run_cli("simulate " + spec.string() + " --seed 12 --out " + (dir / "b").string(),
          "WBST_SEED=11");
  CHECK(manifest(dir / "b").at("seed") == 12);
  // Same seed, same numbers.
  run_cli("simulate " + spec.string() + " --seed 12 --threads 1 --out " + (dir / "c").string());
  CHECK(slurp(dir / "b" / "results.csv") == slurp(dir / "c" / "results.csv"));
}

TEST_CASE("cli: a failed claim exits with 1") {
  const auto dir = scratch("fail");
  const auto spec = dir / "spec.json";
  write_spec(spec, failing_spec);
  const auto r = run_cli("simulate " + spec.string() + " --out " + (dir / "out").string());
  CHECK(r.code == 1);
  CHECK(manifest(dir / "out").at("status") == "failed");
}

TEST_CASE("cli: invalid spec is a usage error") {
  const auto dir = scratch("invalid");
  const auto spec = dir / "spec.json";
  write_spec(spec, R"({"id": "x", "n": 10, "k_rule": "fixed", "replicates": 0})");
  CHECK(run_cli("simulate " + spec.string() + " --out " + (dir / "out").string()).code == 2);
}

TEST_CASE("cli: oracle") {
  const auto out = scratch("oracle");
  const auto r = run_cli("oracle --n 5 --out " + out.string());
  INFO(r.out);
  CHECK(r.code == 0);
  CHECK(fs::exists(out / "oracle_moments.csv"));
  CHECK(fs::exists(out / "oracle_events.csv"));
  CHECK(manifest(out).at("status") == "passed");
}

TEST_CASE("cli: fixedpoint") {
  const auto out = scratch("fixedpoint");
  const auto r = run_cli("fixedpoint --tol 1e-10 --out " + out.string());
  INFO(r.out);
  CHECK(r.code == 0);
  const auto j = nlohmann::json::parse(slurp(out / "constants.json"));
  CHECK(j.at("constants").size() == 10);
}

TEST_CASE("cli: silhouette tables, plots and density") {
  const auto out = scratch("silhouette");
  const auto r = run_cli("silhouette --depth 6 --replicates 2 --plot --density 0.3333333333 "
                         "--density-replicates 20000 --seed 4 --out " + out.string());
  INFO(r.out);
  CHECK(r.code == 0);
  CHECK(fs::exists(out / "xi_table.csv"));
  CHECK(fs::exists(out / "xi_table_0.svg"));
  CHECK(fs::exists(out / "xi_table_1.svg"));
  CHECK(fs::exists(out / "density.csv"));
  const auto m = manifest(out);
  CHECK(m.at("outputs").size() >= 5);
}
