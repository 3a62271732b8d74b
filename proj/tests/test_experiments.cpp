#include "doctest.h"

#include <cmath>
#include <sstream>
#include <string>

#include "json.hpp"
#include "wbst/errors.hpp"
#include "wbst/experiments.hpp"
#include "wbst/oracle.hpp"

using namespace wbst;

namespace {

const char* small_spec = R"({
  "id": "small",
  "model": "permutation",
  "n": [50, 200],
  "k_rule": {"kind": "alpha_n", "value": 0.5},
  "replicates": 3000,
  "seed": 7,
  "outputs": ["depth", "weighted_depth"],
  "claims": [
    {"name": "exact mean", "check": "mean", "statistic": "weighted_depth",
     "target": "exact_weighted_depth_mean", "tolerance": 0.03, "relative": true},
    {"name": "coincide", "check": "corr_min", "statistic": "depth_std",
     "with": "weighted_depth_std", "target": 0.5}
  ]
})";

}  // namespace

TEST_CASE("parse a single experiment") {
  const auto specs = parse_experiments(small_spec);
  REQUIRE(specs.size() == 1);
  const auto& s = specs[0];
  CHECK(s.id == "small");
  CHECK(s.n == std::vector<std::int64_t>{50, 200});
  CHECK(s.k_rule.kind == KRuleKind::alpha_n);
  CHECK(s.k_rule.value == 0.5);
  CHECK(s.claims.size() == 2);
  CHECK(s.claims[0].target_formula == "exact_weighted_depth_mean");
  CHECK(s.claims[0].relative);
  CHECK(s.sampler == Sampler::tree);
}

TEST_CASE("parse a list and reject duplicate ids") {
  const std::string two = R"({"spec_version": 1, "experiments": [
    {"id": "a", "n": 10, "k_rule": "last_inserted", "replicates": 5},
    {"id": "b", "n": 10, "k_rule": "whole_tree", "replicates": 5, "model": "iid"}]})";
  CHECK(parse_experiments(two).size() == 2);
  const std::string dup = R"({"experiments": [
    {"id": "a", "n": 10, "k_rule": "last_inserted", "replicates": 5},
    {"id": "a", "n": 10, "k_rule": "whole_tree", "replicates": 5}]})";
  CHECK_THROWS_AS(parse_experiments(dup), InvalidInput);
}

TEST_CASE("spec validation errors") {
  const auto bad = [](const std::string& text) {
    CHECK_THROWS_AS(parse_experiments(text), InvalidInput);
  };
  bad("{not json");
  bad(R"({"id": "x", "n": 10, "k_rule": "sideways", "replicates": 5})");
  bad(R"({"id": "x", "n": 10, "k_rule": "fixed", "replicates": 0})");
  bad(R"({"id": "x", "n": 0, "k_rule": "fixed", "replicates": 5})");
  bad(R"({"id": "x", "n": 10, "k_rule": "fixed", "replicates": 5, "model": "other"})");
  bad(R"({"id": "x", "n": 10, "k_rule": {"kind": "dyadic_path", "path": "01"}, "replicates": 5})");
  bad(R"({"id": "x", "n": 10, "k_rule": "whole_tree", "replicates": 5, "sampler": "records"})");
  bad(R"({"id": "x", "n": 10, "k_rule": "fixed", "replicates": 5, "outputs": ["bogus"]})");
  bad(R"({"id": "x", "n": 10, "k_rule": "fixed", "replicates": 5, "spec_version": 2})");
  bad(R"({"id": "x", "n": 10, "k_rule": "fixed", "replicates": 5,
          "claims": [{"name": "c", "check": "mean", "statistic": "depth", "target": "nope"}]})");
  bad(R"({"id": "x", "n": 10, "k_rule": "fixed", "replicates": 5,
          "claims": [{"name": "c", "check": "corr_min", "statistic": "depth"}]})");
  bad(R"({"n": 10, "k_rule": "fixed", "replicates": 5})");
  CHECK_THROWS_AS(load_experiments("/nonexistent/spec.json"), InvalidInput);
}

TEST_CASE("k rules round half up and clamp") {
  KRule r;
  r.kind = KRuleKind::alpha_n;
  r.value = 0.5;
  CHECK(resolve_k(r, 9).k == 5);
  CHECK(resolve_k(r, 10).k == 5);
  r.kind = KRuleKind::beta_sqrtlog;
  r.value = 0.0;
  const auto z = resolve_k(r, 1000);
  CHECK(z.k == 1);
  CHECK(z.clamped);
  r.value = 1.0;
  CHECK(resolve_k(r, 100000).k == std::llround(1e5 / std::sqrt(std::log(1e5))));
  r.kind = KRuleKind::fixed;
  r.value = 50;
  CHECK(resolve_k(r, 10).k == 10);
}

TEST_CASE("dyadic rule paths") {
  KRule r;
  r.kind = KRuleKind::dyadic_path;
  r.path = "1011";
  CHECK(rule_path(r).to_string() == "1011");
  r.path = "0.25";
  CHECK(rule_path(r).value() == 0.25);
  r.path = "abc";
  CHECK_THROWS_AS(rule_path(r), InvalidInput);
}

TEST_CASE("simulation is independent of the execution policy") {
  auto spec = parse_experiments(small_spec)[0];
  spec.replicates = 500;
  const auto a = simulate(spec, 200, Execution::serial);
  const auto b = simulate(spec, 200, Execution::parallel);
  CHECK(a == b);
  spec.sampler = Sampler::records;
  CHECK(simulate(spec, 200, Execution::serial) == simulate(spec, 200, Execution::parallel));
}

TEST_CASE("run produces claim and output rows") {
  const auto spec = parse_experiments(small_spec)[0];
  const auto res = run(spec);
  CHECK(res.claims.size() == 4);
  CHECK(res.outputs.size() == 4);
  for (const auto& c : res.claims) {
    INFO(c.claim << " n=" << c.n << " est " << c.estimate << " target " << c.target);
    CHECK(c.passed);
  }
  CHECK(res.all_passed());
}

TEST_CASE("records and tree samplers agree for label rules") {
  auto spec = parse_experiments(small_spec)[0];
  spec.replicates = 20000;
  const auto tree = simulate(spec, 300);
  spec.sampler = Sampler::records;
  const auto rec = simulate(spec, 300);
  for (const char* stat : {"depth", "weighted_depth"}) {
    StreamingMoments a, b;
    for (double v : tree.at(stat)) a.add(v);
    for (double v : rec.at(stat)) b.add(v);
    CHECK(std::abs(a.mean() - b.mean()) < 5.0 * std::hypot(a.standard_error(), b.standard_error()));
  }
}

TEST_CASE("whole-tree statistics match the exact mean for n = 8") {
  const auto exact = enumerate(8);
  ExperimentSpec spec;
  spec.id = "tree";
  spec.n = {8};
  spec.k_rule.kind = KRuleKind::whole_tree;
  spec.replicates = 40000;
  const auto cols = simulate(spec, 8);
  StreamingMoments p, w;
  for (double v : cols.at("path_length")) p.add(v);
  for (double v : cols.at("wiener")) w.add(v);
  CHECK(std::abs(p.mean() - to_double(exact.path_length.mean)) < 5.0 * p.standard_error());
  CHECK(std::abs(w.mean() - to_double(exact.wiener.mean)) < 5.0 * w.standard_error());
}

TEST_CASE("formula registry") {
  CHECK(has_formula("path_length_mean"));
  CHECK_FALSE(has_formula("nope"));
  CHECK_THROWS_AS(formula("nope", 1, 1), InvalidInput);
  // Exact E[P_3] = 8/3.
  CHECK(formula("path_length_mean", 3, 0) == doctest::Approx(8.0 / 3.0));
  CHECK(formula("exact_depth_mean", 3, 2) == doctest::Approx(1.0));
  CHECK(formula("exact_weighted_depth_mean", 3, 1) ==
        doctest::Approx(to_double(enumerate(3).weighted_depth[0].mean)));
  CHECK(formula("small_regime_variance", 100000, 0) == doctest::Approx(0.5));
}

TEST_CASE("last-inserted claims are evaluated") {
  const auto res = run_last_inserted({1000}, 2000, 3);
  CHECK(res.claims.size() == 5);
  bool found_mean = false;
  for (const auto& c : res.claims) {
    if (c.claim == "weighted-scaled-mean") found_mean = true;
  }
  CHECK(found_mean);
}

TEST_CASE("dfs comparison on small trees") {
  const auto cmp = run_dfs_comparison({100, 1000}, 300, 5, {0.25, 0.5});
  CHECK(cmp.rows.size() == 4);
  for (const auto& r : cmp.rows) CHECK(r.sandwich_violations == 0);
}

TEST_CASE("result serialisation") {
  ResultSet rs;
  ClaimResult c;
  c.experiment = "e,1";
  c.claim = "quote \"x\"";
  c.passed = true;
  rs.claims.push_back(c);
  const auto csv = results_csv(rs);
  CHECK(csv.find("\"e,1\"") != std::string::npos);
  CHECK(csv.find("\"quote \"\"x\"\"\"") != std::string::npos);
  CHECK(csv.find("\r\n") != std::string::npos);
  std::istringstream lines(results_jsonl(rs));
  std::string line;
  int count = 0;
  while (std::getline(lines, line)) {
    const auto j = nlohmann::json::parse(line);
    CHECK(j.at("experiment") == "e,1");
    ++count;
  }
  CHECK(count == 1);
}

TEST_CASE("shipped example spec is valid") {
  const auto specs = load_experiments(std::string(WBST_SOURCE_DIR) + "/specs/paper_claims.json");
  CHECK(specs.size() >= 4);
  CHECK(specs.front().id == "thm1-midpoint");
}
