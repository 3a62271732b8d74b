#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "wbst/parallel.hpp"
#include "wbst/statlab.hpp"
#include "wbst/tree.hpp"

namespace wbst {

inline constexpr int experiment_spec_version = 1;

enum class KRuleKind {
  fixed,          // k = value
  alpha_n,        // k = value * n
  beta_sqrtlog,   // k = value * n / sqrt(ln n)
  n_over_log,     // k = value * n / ln n
  last_inserted,  // the last inserted node
  dyadic_path,    // deepest node on the path x (i.i.d. model)
  pair,           // labels value * n and value2 * n (distances)
  whole_tree      // path lengths and Wiener indices of the whole tree
};

struct KRule {
  KRuleKind kind = KRuleKind::fixed;
  double value = 1.0;
  double value2 = 0.0;
  std::string path;  // dyadic_path: bits such as "1000", or a number in [0,1]
};

enum class Sampler { tree, records };

struct ClaimSpec {
  std::string name;
  // mean, variance, mean_ratio, corr_min, abs_corr_max, ks_law, ks_dickman,
  // range, abs_mean_max, ks_statistic_max
  std::string check;
  std::string statistic;
  std::string with;           // second statistic for correlation checks
  std::string law;            // ks_law: normal, uniform or arcsine
  std::string target_formula; // formula registry name; empty for a constant
  double target = 0.0;
  double tolerance = 0.0;
  bool relative = false;
  double lower = 0.0;  // range
  double upper = 0.0;
  double alpha = default_level;
};

struct ExperimentSpec {
  int spec_version = experiment_spec_version;
  std::string id;
  KeyModel model = KeyModel::permutation;
  std::vector<std::int64_t> n;
  KRule k_rule;
  std::size_t replicates = 1;
  std::uint64_t seed = 1;
  Sampler sampler = Sampler::tree;
  std::vector<std::string> outputs;
  std::vector<ClaimSpec> claims;
};

// Accepts one experiment object or {"spec_version": 1, "experiments": [...]}.
std::vector<ExperimentSpec> parse_experiments(const std::string& json_text);
std::vector<ExperimentSpec> load_experiments(const std::string& path);
void validate(const ExperimentSpec& spec);

// Path of a dyadic_path rule: a 0/1 string of length >= 2, or a number in [0,1].
DyadicPath rule_path(const KRule& rule);

struct ResolvedK {
  std::int64_t k = 0;
  std::int64_t k2 = 0;
  bool clamped = false;
};

// Rounds half-up and clamps into [1, n] (with a warning on std::clog).
ResolvedK resolve_k(const KRule& rule, std::int64_t n);

// Per-replicate statistics, one column per name, in replicate order.
using Columns = std::map<std::string, std::vector<double>>;

// Statistics available for each k-rule kind.
std::vector<std::string> statistic_names(KRuleKind kind);

// Simulates all replicates of one (spec, n). Replicate r draws from
// CounterRng(sample_seed(seed, n), r, stream); results do not depend on the
// execution policy or thread count.
Columns simulate(const ExperimentSpec& spec, std::int64_t n,
                 Execution exec = Execution::parallel);

std::uint64_t sample_seed(std::uint64_t seed, std::int64_t n);

// Named targets, evaluated at (n, k).
double formula(const std::string& name, std::int64_t n, std::int64_t k);
bool has_formula(const std::string& name);

struct ClaimResult {
  std::string experiment;
  std::string claim;
  std::string check;
  std::string statistic;
  std::int64_t n = 0;
  std::int64_t k = 0;
  std::size_t replicates = 0;
  double estimate = 0.0;
  double target = 0.0;
  double tolerance = 0.0;
  double standard_error = 0.0;
  bool passed = false;
  std::string detail;
};

struct OutputSummary {
  std::string experiment;
  std::string statistic;
  std::int64_t n = 0;
  std::int64_t k = 0;
  std::size_t replicates = 0;
  double mean = 0.0;
  double variance = 0.0;
  double standard_error = 0.0;
};

struct ResultSet {
  std::vector<ClaimResult> claims;
  std::vector<OutputSummary> outputs;
  bool all_passed() const;
  void append(const ResultSet& other);
};

ClaimResult evaluate_claim(const ClaimSpec& claim, const Columns& columns,
                           const ExperimentSpec& spec, std::int64_t n, std::int64_t k);

ResultSet run(const ExperimentSpec& spec, Execution exec = Execution::parallel);

// Depth and weighted depth of the last inserted node.
ResultSet run_last_inserted(const std::vector<std::int64_t>& n_values, std::size_t replicates,
                            std::uint64_t seed, Execution exec = Execution::parallel);

struct DfsRow {
  std::int64_t n = 0;
  std::int64_t k = 0;
  std::size_t replicates = 0;
  double depth_gap_sq = 0.0;      // mean of (D_k - D*_k)^2
  double weighted_gap_sq = 0.0;   // mean of (W_k - W*_k)^2
  double weighted_variance = 0.0; // sample variance of W_k
  double ratio = 0.0;             // weighted_gap_sq / weighted_variance
  std::size_t sandwich_violations = 0;
};

struct DfsComparison {
  std::vector<DfsRow> rows;
  ResultSet results;
};

// k-grid given as fractions of n; asserts the depth gap stays <= 10 and the
// weighted ratio decreases in n for each fraction.
DfsComparison run_dfs_comparison(const std::vector<std::int64_t>& n_values,
                                 std::size_t replicates, std::uint64_t seed,
                                 const std::vector<double>& k_fractions = {0.5},
                                 Execution exec = Execution::parallel);

inline constexpr double dfs_depth_gap_bound = 10.0;

std::string results_csv(const ResultSet& results);
std::string results_jsonl(const ResultSet& results);

const char* to_string(KRuleKind kind);
const char* to_string(Sampler sampler);

}  // namespace wbst
