#include "wbst/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iostream>
#include <numbers>
#include <set>
#include <sstream>

#include "json.hpp"
#include "wbst/aggregates.hpp"
#include "wbst/errors.hpp"
#include "wbst/limit_laws.hpp"
#include "wbst/records.hpp"
#include "wbst/silhouette.hpp"

namespace wbst {

using nlohmann::json;

const char* to_string(KRuleKind kind) {
  switch (kind) {
    case KRuleKind::fixed:
      return "fixed";
    case KRuleKind::alpha_n:
      return "alpha_n";
    case KRuleKind::beta_sqrtlog:
      return "beta_sqrtlog";
    case KRuleKind::n_over_log:
      return "n_over_log";
    case KRuleKind::last_inserted:
      return "last_inserted";
    case KRuleKind::dyadic_path:
      return "dyadic_path";
    case KRuleKind::pair:
      return "pair";
    case KRuleKind::whole_tree:
      return "whole_tree";
  }
  return "?";
}

const char* to_string(Sampler sampler) { return sampler == Sampler::tree ? "tree" : "records"; }

namespace {

KRuleKind k_rule_from_string(const std::string& s) {
  for (auto kind : {KRuleKind::fixed, KRuleKind::alpha_n, KRuleKind::beta_sqrtlog,
                    KRuleKind::n_over_log, KRuleKind::last_inserted, KRuleKind::dyadic_path,
                    KRuleKind::pair, KRuleKind::whole_tree}) {
    if (s == to_string(kind)) return kind;
  }
  throw InvalidInput("unknown k rule: " + s);
}

bool is_label_rule(KRuleKind kind) {
  return kind == KRuleKind::fixed || kind == KRuleKind::alpha_n ||
         kind == KRuleKind::beta_sqrtlog || kind == KRuleKind::n_over_log;
}

const std::set<std::string> known_checks = {
    "mean",     "variance",   "mean_ratio", "corr_min",     "abs_corr_max",
    "ks_law",   "ks_dickman", "range",      "abs_mean_max", "ks_statistic_max"};

template <class T>
T get_or(const json& j, const char* key, T fallback) {
  return j.contains(key) ? j.at(key).get<T>() : fallback;
}

ExperimentSpec parse_one(const json& j, int version) {
  ExperimentSpec s;
  s.spec_version = get_or<int>(j, "spec_version", version);
  s.id = j.at("id").get<std::string>();
  const auto model = get_or<std::string>(j, "model", "permutation");
  if (model == "permutation") {
    s.model = KeyModel::permutation;
  } else if (model == "iid") {
    s.model = KeyModel::iid;
  } else {
    throw InvalidInput("experiment " + s.id + ": unknown model " + model);
  }
  const auto& n = j.at("n");
  if (n.is_array()) {
    for (const auto& v : n) s.n.push_back(v.get<std::int64_t>());
  } else {
    s.n.push_back(n.get<std::int64_t>());
  }
  const auto& rule = j.at("k_rule");
  if (rule.is_string()) {
    s.k_rule.kind = k_rule_from_string(rule.get<std::string>());
  } else {
    s.k_rule.kind = k_rule_from_string(rule.at("kind").get<std::string>());
    s.k_rule.value = get_or<double>(rule, "value", 1.0);
    s.k_rule.value2 = get_or<double>(rule, "value2", 0.0);
    if (rule.contains("path")) {
      const auto& p = rule.at("path");
      s.k_rule.path = p.is_string() ? p.get<std::string>() : std::to_string(p.get<double>());
    }
  }
  s.replicates = j.at("replicates").get<std::size_t>();
  s.seed = get_or<std::uint64_t>(j, "seed", 1);
  const auto sampler = get_or<std::string>(j, "sampler", "tree");
  if (sampler == "tree") {
    s.sampler = Sampler::tree;
  } else if (sampler == "records") {
    s.sampler = Sampler::records;
  } else {
    throw InvalidInput("experiment " + s.id + ": unknown sampler " + sampler);
  }
  s.outputs = get_or<std::vector<std::string>>(j, "outputs", {});
  for (const auto& c : get_or<json>(j, "claims", json::array())) {
    ClaimSpec claim;
    claim.name = c.at("name").get<std::string>();
    claim.check = c.at("check").get<std::string>();
    claim.statistic = c.at("statistic").get<std::string>();
    claim.with = get_or<std::string>(c, "with", "");
    claim.law = get_or<std::string>(c, "law", "");
    if (c.contains("target")) {
      if (c.at("target").is_string()) {
        claim.target_formula = c.at("target").get<std::string>();
      } else {
        claim.target = c.at("target").get<double>();
      }
    }
    claim.tolerance = get_or<double>(c, "tolerance", 0.0);
    claim.relative = get_or<bool>(c, "relative", false);
    claim.lower = get_or<double>(c, "lower", 0.0);
    claim.upper = get_or<double>(c, "upper", 0.0);
    claim.alpha = get_or<double>(c, "alpha", default_level);
    s.claims.push_back(claim);
  }
  return s;
}

}  // namespace

DyadicPath rule_path(const KRule& rule) {
  const auto& p = rule.path;
  if (p.empty()) throw InvalidInput("dyadic_path rule needs a path");
  // "0" and "1" read as numbers; longer 0/1 strings as bit strings.
  if (p.size() > 1 && p.find_first_not_of("01") == std::string::npos) {
    return DyadicPath::from_bits(p);
  }
  try {
    return DyadicPath::from_value(std::stod(p));
  } catch (const std::logic_error&) {
    throw InvalidInput("dyadic_path rule: cannot read path " + p);
  }
}

std::vector<ExperimentSpec> parse_experiments(const std::string& json_text) {
  json doc;
  try {
    doc = json::parse(json_text);
  } catch (const json::exception& e) {
    throw InvalidInput(std::string("experiment spec is not valid JSON: ") + e.what());
  }
  std::vector<ExperimentSpec> out;
  try {
    const int version = get_or<int>(doc, "spec_version", experiment_spec_version);
    if (doc.contains("experiments")) {
      for (const auto& e : doc.at("experiments")) out.push_back(parse_one(e, version));
    } else {
      out.push_back(parse_one(doc, version));
    }
  } catch (const json::exception& e) {
    throw InvalidInput(std::string("experiment spec schema violation: ") + e.what());
  }
  std::set<std::string> ids;
  for (const auto& s : out) {
    validate(s);
    if (!ids.insert(s.id).second) throw InvalidInput("duplicate experiment id: " + s.id);
  }
  return out;
}

std::vector<ExperimentSpec> load_experiments(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InvalidInput("cannot read experiment spec: " + path);
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_experiments(buf.str());
}

void validate(const ExperimentSpec& s) {
  const std::string where = "experiment " + s.id + ": ";
  if (s.spec_version != experiment_spec_version) {
    throw InvalidInput(where + "unsupported spec_version " + std::to_string(s.spec_version));
  }
  if (s.id.empty()) throw InvalidInput("experiment id must be nonempty");
  if (s.n.empty()) throw InvalidInput(where + "needs at least one n");
  for (auto n : s.n) {
    if (n < 1) throw InvalidInput(where + "n must be >= 1");
  }
  if (s.replicates < 1) throw InvalidInput(where + "replicates must be >= 1");
  const auto kind = s.k_rule.kind;
  if (kind == KRuleKind::dyadic_path && s.model != KeyModel::iid) {
    throw InvalidInput(where + "dyadic_path rule needs the iid model");
  }
  if (s.sampler == Sampler::records) {
    const bool ok = (s.model == KeyModel::permutation &&
                     (is_label_rule(kind) || kind == KRuleKind::last_inserted)) ||
                    (s.model == KeyModel::iid && kind == KRuleKind::dyadic_path);
    if (!ok) throw InvalidInput(where + "records sampler does not support this rule/model");
  }
  if (kind == KRuleKind::dyadic_path) rule_path(s.k_rule);
  const auto names = statistic_names(kind);
  const auto known = [&](const std::string& name) {
    return std::find(names.begin(), names.end(), name) != names.end();
  };
  for (const auto& o : s.outputs) {
    if (!known(o)) throw InvalidInput(where + "unknown output statistic " + o);
  }
  for (const auto& c : s.claims) {
    if (!known_checks.count(c.check)) throw InvalidInput(where + "unknown check " + c.check);
    if (!known(c.statistic)) throw InvalidInput(where + "unknown statistic " + c.statistic);
    if ((c.check == "corr_min" || c.check == "abs_corr_max") && !known(c.with)) {
      throw InvalidInput(where + "correlation claim " + c.name + " needs a known 'with'");
    }
    if (!c.target_formula.empty() && !has_formula(c.target_formula)) {
      throw InvalidInput(where + "unknown target formula " + c.target_formula);
    }
    if (c.check == "ks_law") law_from_string(c.law);
  }
}

ResolvedK resolve_k(const KRule& rule, std::int64_t n) {
  const double dn = static_cast<double>(n);
  const double ln = std::log(std::max(dn, 2.0));
  const auto round_half_up = [](double x) { return static_cast<std::int64_t>(std::floor(x + 0.5)); };
  ResolvedK r;
  double raw = 0.0;
  switch (rule.kind) {
    case KRuleKind::fixed:
      raw = rule.value;
      break;
    case KRuleKind::alpha_n:
    case KRuleKind::pair:
      raw = rule.value * dn;
      break;
    case KRuleKind::beta_sqrtlog:
      raw = rule.value * dn / std::sqrt(ln);
      break;
    case KRuleKind::n_over_log:
      raw = rule.value * dn / ln;
      break;
    default:
      return r;
  }
  const auto clamp = [&](double x) {
    std::int64_t k = round_half_up(x);
    if (k < 1 || k > n) {
      std::clog << "warning: k rule " << to_string(rule.kind) << " gives " << k << " at n = " << n
                << "; clamped into [1, n]\n";
      r.clamped = true;
      k = std::clamp<std::int64_t>(k, 1, n);
    }
    return k;
  };
  r.k = clamp(raw);
  if (rule.kind == KRuleKind::pair) r.k2 = clamp(rule.value2 * dn);
  return r;
}

std::vector<std::string> statistic_names(KRuleKind kind) {
  switch (kind) {
    case KRuleKind::fixed:
    case KRuleKind::alpha_n:
    case KRuleKind::beta_sqrtlog:
    case KRuleKind::n_over_log:
      return {"depth",
              "weighted_depth",
              "weighted_depth_over_n",
              "depth_std",
              "weighted_depth_std",
              "small_excess",
              "excess_over_sqrtlog",
              "depth_centered",
              "weighted_depth_centered"};
    case KRuleKind::last_inserted:
      return {"last_depth",     "last_weighted_depth",   "last_depth_std",
              "last_weighted_scaled", "last_depth_over_2logn", "last_label_over_n"};
    case KRuleKind::dyadic_path:
      return {"silhouette_depth", "weighted_silhouette", "silhouette_depth_std",
              "weighted_silhouette_over_log"};
    case KRuleKind::pair:
      return {"depth_k",     "depth_l",          "distance",    "weighted_distance",
              "depth_k_std", "depth_l_std",      "distance_std", "weighted_distance_std"};
    case KRuleKind::whole_tree:
      return {"path_length", "wiener", "weighted_path_length", "weighted_wiener", "height",
              "weighted_height"};
  }
  return {};
}

std::uint64_t sample_seed(std::uint64_t seed, std::int64_t n) {
  return mix64(seed ^ mix64(static_cast<std::uint64_t>(n) + 0x9e3779b97f4a7c15ULL));
}

namespace {

double harmonic_number(std::int64_t m) {
  // Exact summation for moderate m, asymptotic series beyond.
  if (m <= 0) return 0.0;
  if (m < 100000) {
    double h = 0.0;
    for (std::int64_t j = m; j >= 1; --j) h += 1.0 / static_cast<double>(j);
    return h;
  }
  const double x = static_cast<double>(m);
  return std::log(x) + euler_gamma + 1.0 / (2.0 * x) - 1.0 / (12.0 * x * x) +
         1.0 / (120.0 * x * x * x * x);
}

double exact_weighted_depth_mean(std::int64_t n, std::int64_t k) {
  double s = 0.0;
  for (std::int64_t j = 1; j <= n; ++j) {
    s += static_cast<double>(j) / static_cast<double>(std::abs(k - j) + 1);
  }
  return s;
}

struct FormulaEntry {
  const char* name;
  double (*eval)(std::int64_t n, std::int64_t k);
};

constexpr double pi2 = std::numbers::pi * std::numbers::pi;

double dn(std::int64_t n) { return static_cast<double>(n); }

const FormulaEntry formulas[] = {
    {"exact_depth_mean",
     [](std::int64_t n, std::int64_t k) {
       return harmonic_number(k) + harmonic_number(n - k + 1) - 2.0;
     }},
    {"exact_weighted_depth_mean", exact_weighted_depth_mean},
    {"expansion_weighted_depth_mean",
     [](std::int64_t n, std::int64_t k) {
       return dn(k) * std::log(dn(k) * dn(n - k + 1)) + dn(n);
     }},
    {"expansion_weighted_depth_variance",
     [](std::int64_t n, std::int64_t k) {
       return dn(k) * dn(k) * std::log(dn(k) * dn(n - k + 1)) + dn(n) * dn(n) / 2.0;
     }},
    {"log_k_n_minus_k",
     [](std::int64_t n, std::int64_t k) { return std::log(dn(k) * dn(n - k + 1)); }},
    {"two_log_n", [](std::int64_t n, std::int64_t) { return 2.0 * std::log(dn(n)); }},
    {"log_n", [](std::int64_t n, std::int64_t) { return std::log(dn(n)); }},
    {"small_regime_variance",
     [](std::int64_t n, std::int64_t k) {
       const double beta = dn(k) * std::sqrt(std::log(dn(n))) / dn(n);
       return 0.5 + 2.0 * beta * beta;
     }},
    {"path_length_mean",
     [](std::int64_t n, std::int64_t) {
       return 2.0 * (dn(n) + 1.0) * harmonic_number(n) - 4.0 * dn(n);
     }},
    {"weighted_path_length_mean",
     [](std::int64_t n, std::int64_t) {
       return dn(n) * std::log(dn(n)) + (euler_gamma - 1.5) * dn(n);
     }},
    {"weighted_wiener_mean",
     [](std::int64_t n, std::int64_t) {
       return dn(n) * dn(n) * std::log(dn(n)) + (euler_gamma - 2.75) * dn(n) * dn(n);
     }},
    {"path_length_variance",
     [](std::int64_t n, std::int64_t) { return (21.0 - 2.0 * pi2) / 3.0 * dn(n) * dn(n); }},
    {"wiener_variance",
     [](std::int64_t n, std::int64_t) {
       return (20.0 - 2.0 * pi2) / 3.0 * std::pow(dn(n), 4);
     }},
    {"weighted_path_length_variance",
     [](std::int64_t n, std::int64_t) { return (65.0 - 6.0 * pi2) / 36.0 * dn(n) * dn(n); }},
    {"weighted_wiener_variance",
     [](std::int64_t n, std::int64_t) {
       return (2413.0 - 240.0 * pi2) / 1440.0 * std::pow(dn(n), 4);
     }},
    {"dickman_mean", [](std::int64_t, std::int64_t) { return 1.0; }},
    {"dickman_variance", [](std::int64_t, std::int64_t) { return 0.5; }},
};

}  // namespace

bool has_formula(const std::string& name) {
  return std::any_of(std::begin(formulas), std::end(formulas),
                     [&](const FormulaEntry& f) { return name == f.name; });
}

double formula(const std::string& name, std::int64_t n, std::int64_t k) {
  for (const auto& f : formulas) {
    if (name == f.name) return f.eval(n, k);
  }
  throw InvalidInput("unknown formula: " + name);
}

namespace {

using Row = std::vector<double>;

Columns to_columns(const std::vector<std::string>& names, const std::vector<Row>& rows) {
  Columns cols;
  for (std::size_t c = 0; c < names.size(); ++c) {
    auto& col = cols[names[c]];
    col.reserve(rows.size());
    for (const auto& r : rows) col.push_back(r[c]);
  }
  return cols;
}

LabelledTree permutation_tree(std::int64_t n, std::uint64_t seed, std::uint64_t r) {
  CounterRng rng(seed, r, streams::tree);
  const auto perm = random_permutation(static_cast<std::size_t>(n), rng);
  return build_from_permutation(perm);
}

Row label_row(std::int64_t n, std::int64_t k, double depth, double weighted, double mean_d,
              double mean_w) {
  const double dn_ = static_cast<double>(n);
  const double ln = std::log(std::max(dn_, 2.0));
  const double alpha = static_cast<double>(k) / dn_;
  const double kd = static_cast<double>(k) * depth;
  return {depth,
          weighted,
          weighted / dn_,
          (depth - 2.0 * ln) / std::sqrt(2.0 * ln),
          (weighted - 2.0 * alpha * dn_ * ln) / (alpha * dn_ * std::sqrt(2.0 * ln)),
          (weighted - kd) / dn_,
          (weighted - kd) / (dn_ * std::sqrt(ln)),
          depth - mean_d,
          (weighted - mean_w) / dn_};
}

}  // namespace

Columns simulate(const ExperimentSpec& spec, std::int64_t n, Execution exec) {
  validate(spec);
  const auto names = statistic_names(spec.k_rule.kind);
  const std::uint64_t seed = sample_seed(spec.seed, n);
  const double dn_ = static_cast<double>(n);
  const double ln = std::log(std::max(dn_, 2.0));
  const auto kind = spec.k_rule.kind;
  const auto resolved = resolve_k(spec.k_rule, n);
  const std::int64_t k = resolved.k;
  std::vector<Row> rows;

  if (is_label_rule(kind)) {
    const double mean_d = formula("exact_depth_mean", n, k);
    const double mean_w = formula("exact_weighted_depth_mean", n, k);
    rows = parallel_map<Row>(
        spec.replicates,
        [&](std::size_t r) {
          if (spec.sampler == Sampler::records) {
            CounterRng rng(seed, r, streams::path);
            const auto s = sample_label_path(n, k, rng);
            return label_row(n, k, static_cast<double>(s.depth), s.weighted_depth, mean_d, mean_w);
          }
          if (spec.model == KeyModel::permutation) {
            const auto tree = permutation_tree(n, seed, r);
            const auto obs = observe_node(tree, tree.node_of_rank(static_cast<std::size_t>(k)));
            return label_row(n, k, obs.depth, obs.weighted_depth, mean_d, mean_w);
          }
          // i.i.d. model: rank-k node, weighted depth scaled up by n.
          const auto tree = build_iid(static_cast<std::size_t>(n), seed, r);
          const auto obs = observe_node(tree, tree.node_of_rank(static_cast<std::size_t>(k)));
          return label_row(n, k, obs.depth, dn_ * obs.weighted_depth, mean_d, mean_w);
        },
        exec);
  } else if (kind == KRuleKind::last_inserted) {
    rows = parallel_map<Row>(
        spec.replicates,
        [&](std::size_t r) {
          double depth = 0.0, weighted = 0.0, label = 0.0;
          if (spec.sampler == Sampler::records) {
            CounterRng rng(seed, r, streams::path);
            const auto s = sample_last_inserted(n, rng);
            depth = static_cast<double>(s.depth);
            weighted = s.weighted_depth;
            label = static_cast<double>(s.label);
          } else if (spec.model == KeyModel::permutation) {
            const auto tree = permutation_tree(n, seed, r);
            const auto obs = last_inserted(tree);
            depth = obs.depth;
            weighted = obs.weighted_depth;
            label = obs.node_key.value;
          } else {
            const auto tree = build_iid(static_cast<std::size_t>(n), seed, r);
            const auto obs = last_inserted(tree);
            depth = obs.depth;
            weighted = dn_ * obs.weighted_depth;
            label = dn_ * obs.node_key.value;
          }
          return Row{depth,
                     weighted,
                     (depth - 2.0 * ln) / std::sqrt(2.0 * ln),
                     weighted / (2.0 * dn_ * ln),
                     depth / (2.0 * ln),
                     label / dn_};
        },
        exec);
  } else if (kind == KRuleKind::dyadic_path) {
    const DyadicPath x = rule_path(spec.k_rule);
    rows = parallel_map<Row>(
        spec.replicates,
        [&](std::size_t r) {
          double depth = 0.0, weighted = 0.0;
          if (spec.sampler == Sampler::records) {
            CounterRng rng(seed, r, streams::path);
            const auto s = sample_silhouette_path(n, x, rng);
            depth = static_cast<double>(s.depth);
            weighted = s.weighted_depth;
          } else {
            const auto tree = build_iid(static_cast<std::size_t>(n), seed, r);
            const auto obs = silhouette_depths(tree, x);
            depth = obs.depth;
            weighted = obs.weighted_depth;
          }
          return Row{depth, weighted, (depth - ln) / std::sqrt(ln), weighted / ln};
        },
        exec);
  } else if (kind == KRuleKind::pair) {
    const std::int64_t l = resolved.k2;
    const double s = static_cast<double>(k) / dn_;
    const double t = static_cast<double>(l) / dn_;
    rows = parallel_map<Row>(
        spec.replicates,
        [&](std::size_t r) {
          const auto tree = spec.model == KeyModel::permutation
                                ? permutation_tree(n, seed, r)
                                : build_iid(static_cast<std::size_t>(n), seed, r);
          const double scale = spec.model == KeyModel::permutation ? 1.0 : dn_;
          const auto vk = tree.node_of_rank(static_cast<std::size_t>(k));
          const auto vl = tree.node_of_rank(static_cast<std::size_t>(l));
          const auto ok = observe_node(tree, vk);
          const auto ol = observe_node(tree, vl);
          const auto dist = distance_and_weight(tree, tree.key(vk), tree.key(vl));
          const double wd = scale * dist.weight;
          return Row{static_cast<double>(ok.depth),
                     static_cast<double>(ol.depth),
                     static_cast<double>(dist.distance),
                     wd,
                     (ok.depth - 2.0 * ln) / std::sqrt(2.0 * ln),
                     (ol.depth - 2.0 * ln) / std::sqrt(2.0 * ln),
                     (dist.distance - 4.0 * ln) / std::sqrt(4.0 * ln),
                     (wd - 2.0 * (s + t) * dn_ * ln) / (dn_ * std::sqrt(2.0 * ln))};
        },
        exec);
  } else {
    rows = parallel_map<Row>(
        spec.replicates,
        [&](std::size_t r) {
          const auto tree = spec.model == KeyModel::permutation
                                ? permutation_tree(n, seed, r)
                                : build_iid(static_cast<std::size_t>(n), seed, r);
          const auto f = functionals_recursive(tree);
          return Row{to_double(f.p), to_double(f.w), f.wp, f.ww,
                     static_cast<double>(height(tree)), weighted_height(tree)};
        },
        exec);
  }
  return to_columns(names, rows);
}

bool ResultSet::all_passed() const {
  return std::all_of(claims.begin(), claims.end(), [](const ClaimResult& c) { return c.passed; });
}

void ResultSet::append(const ResultSet& other) {
  claims.insert(claims.end(), other.claims.begin(), other.claims.end());
  outputs.insert(outputs.end(), other.outputs.begin(), other.outputs.end());
}

ClaimResult evaluate_claim(const ClaimSpec& claim, const Columns& columns,
                           const ExperimentSpec& spec, std::int64_t n, std::int64_t k) {
  ClaimResult r;
  r.experiment = spec.id;
  r.claim = claim.name;
  r.check = claim.check;
  r.statistic = claim.statistic;
  r.n = n;
  r.k = k;
  const auto& x = columns.at(claim.statistic);
  r.replicates = x.size();
  r.target = claim.target_formula.empty() ? claim.target : formula(claim.target_formula, n, k);
  r.tolerance = claim.relative ? claim.tolerance * std::abs(r.target) : claim.tolerance;
  StreamingMoments m;
  for (double v : x) m.add(v);

  std::ostringstream detail;
  detail.precision(10);
  const auto& check = claim.check;
  if (check == "mean") {
    r.estimate = m.mean();
    r.standard_error = m.standard_error();
    r.passed = std::abs(r.estimate - r.target) <= r.tolerance;
  } else if (check == "variance") {
    r.estimate = m.variance();
    StreamingMoments sq;
    for (double v : x) sq.add((v - m.mean()) * (v - m.mean()));
    r.standard_error = sq.standard_error();
    r.passed = std::abs(r.estimate - r.target) <= r.tolerance;
  } else if (check == "mean_ratio") {
    r.estimate = m.mean() / r.target;
    r.standard_error = m.standard_error() / std::abs(r.target);
    r.tolerance = claim.tolerance;
    detail << "mean " << m.mean() << " target " << r.target;
    r.target = 1.0;
    r.passed = std::abs(r.estimate - 1.0) <= r.tolerance;
  } else if (check == "corr_min" || check == "abs_corr_max") {
    const auto& y = columns.at(claim.with);
    r.estimate = pearson_correlation(x, y);
    r.standard_error = (1.0 - r.estimate * r.estimate) / std::sqrt(static_cast<double>(x.size()));
    detail << "with " << claim.with;
    r.passed = check == "corr_min" ? r.estimate >= r.target : std::abs(r.estimate) <= r.target;
  } else if (check == "ks_law") {
    const ReferenceLaw law(law_from_string(claim.law));
    const auto t = ks_one_sample(x, [&](double v) { return law.cdf(v); }, claim.alpha);
    r.estimate = t.statistic;
    r.target = t.critical;
    detail << "law " << claim.law << " p " << t.p_value;
    r.passed = !t.reject;
  } else if (check == "ks_statistic_max") {
    const ReferenceLaw law(law_from_string(claim.law));
    const auto t = ks_one_sample(x, [&](double v) { return law.cdf(v); }, claim.alpha);
    r.estimate = t.statistic;
    detail << "law " << claim.law << " p " << t.p_value;
    r.passed = t.statistic <= r.target;
  } else if (check == "ks_dickman") {
    const auto reference = dickman_sample(x.size(), mix64(sample_seed(spec.seed, n) + 1));
    const auto t = ks_two_sample(x, reference, claim.alpha);
    r.estimate = t.statistic;
    r.target = t.critical;
    detail << "p " << t.p_value;
    r.passed = !t.reject;
  } else if (check == "range") {
    const auto [lo, hi] = std::minmax_element(x.begin(), x.end());
    r.estimate = *hi;
    r.target = claim.upper;
    detail << "min " << *lo << " max " << *hi << " band (" << claim.lower << ", " << claim.upper
           << ")";
    r.passed = *lo > claim.lower && *hi < claim.upper;
  } else if (check == "abs_mean_max") {
    StreamingMoments a;
    for (double v : x) a.add(std::abs(v));
    r.estimate = a.mean();
    r.standard_error = a.standard_error();
    r.passed = r.estimate <= r.target;
  } else {
    throw InvalidInput("unknown check " + check);
  }
  r.detail = detail.str();
  return r;
}

ResultSet run(const ExperimentSpec& spec, Execution exec) {
  validate(spec);
  ResultSet out;
  for (auto n : spec.n) {
    const auto columns = simulate(spec, n, exec);
    const auto k = resolve_k(spec.k_rule, n).k;
    for (const auto& name : spec.outputs) {
      StreamingMoments m;
      for (double v : columns.at(name)) m.add(v);
      out.outputs.push_back(
          {spec.id, name, n, k, m.count(), m.mean(), m.variance(), m.standard_error()});
    }
    for (const auto& claim : spec.claims) out.claims.push_back(evaluate_claim(claim, columns, spec, n, k));
  }
  return out;
}

ResultSet run_last_inserted(const std::vector<std::int64_t>& n_values, std::size_t replicates,
                            std::uint64_t seed, Execution exec) {
  ExperimentSpec spec;
  spec.id = "last-inserted";
  spec.n = n_values;
  spec.k_rule.kind = KRuleKind::last_inserted;
  spec.replicates = replicates;
  spec.seed = seed;
  spec.sampler = Sampler::records;
  spec.outputs = {"last_depth", "last_weighted_scaled"};
  auto claim = [](std::string name, std::string check, std::string stat) {
    ClaimSpec c;
    c.name = std::move(name);
    c.check = std::move(check);
    c.statistic = std::move(stat);
    return c;
  };
  auto mean_half = claim("weighted-scaled-mean", "mean", "last_weighted_scaled");
  mean_half.target = 0.5;
  mean_half.tolerance = 0.02;
  auto support = claim("weighted-scaled-support", "range", "last_weighted_scaled");
  support.lower = 0.0;
  support.upper = 1.2;
  auto depth = claim("depth-over-2logn", "mean", "last_depth_over_2logn");
  depth.target = 1.0;
  depth.tolerance = 0.1;
  depth.relative = true;
  auto ks = claim("weighted-scaled-uniform-band", "ks_statistic_max", "last_weighted_scaled");
  ks.law = "uniform";
  ks.target = 0.1;
  auto indep = claim("depth-weighted-independence", "abs_corr_max", "last_depth_std");
  indep.with = "last_weighted_scaled";
  indep.target = 0.05;
  spec.claims = {mean_half, support, depth, ks, indep};
  return run(spec, exec);
}

namespace {

struct DfsAccumulator {
  std::size_t count = 0;
  double depth_gap_sq = 0.0;
  double weighted_gap_sq = 0.0;
  StreamingMoments weighted;
  std::size_t violations = 0;

  void merge(const DfsAccumulator& o) {
    count += o.count;
    depth_gap_sq += o.depth_gap_sq;
    weighted_gap_sq += o.weighted_gap_sq;
    weighted.merge(o.weighted);
    violations += o.violations;
  }
};

}  // namespace

DfsComparison run_dfs_comparison(const std::vector<std::int64_t>& n_values,
                                 std::size_t replicates, std::uint64_t seed,
                                 const std::vector<double>& k_fractions, Execution exec) {
  DfsComparison out;
  for (auto n : n_values) {
    const std::uint64_t s = sample_seed(seed, n);
    std::vector<std::int64_t> ks;
    for (double f : k_fractions) {
      KRule rule;
      rule.kind = KRuleKind::alpha_n;
      rule.value = f;
      ks.push_back(resolve_k(rule, n).k);
    }
    std::vector<DfsAccumulator> init(ks.size());
    struct Accs {
      std::vector<DfsAccumulator> a;
      void merge(const Accs& o) {
        for (std::size_t i = 0; i < a.size(); ++i) a[i].merge(o.a[i]);
      }
    };
    const auto acc = block_accumulate(
        replicates, Accs{init},
        [&](Accs& acc_, std::size_t r) {
          const auto tree = permutation_tree(n, s, r);
          const auto ext = dfs_external(tree);
          const auto heights = extended_subtree_heights(tree);
          const auto max_keys = subtree_max_keys(tree);
          for (std::size_t i = 0; i < ks.size(); ++i) {
            const auto k = ks[i];
            const NodeId v = tree.node_of_rank(static_cast<std::size_t>(k));
            const auto obs = observe_node(tree, v);
            const auto& star = ext[static_cast<std::size_t>(k - 1)];
            const int h = heights[static_cast<std::size_t>(v)];
            const double m = max_keys[static_cast<std::size_t>(v)];
            auto& a = acc_.a[i];
            ++a.count;
            const double dg = star.depth - obs.depth;
            const double wg = star.weighted_depth - obs.weighted_depth;
            a.depth_gap_sq += dg * dg;
            a.weighted_gap_sq += wg * wg;
            a.weighted.add(obs.weighted_depth);
            const bool ok = obs.depth <= star.depth && star.depth <= obs.depth + h &&
                            obs.weighted_depth <= star.weighted_depth &&
                            star.weighted_depth <= obs.weighted_depth + m * h;
            if (!ok) ++a.violations;
          }
        },
        exec, 64);
    for (std::size_t i = 0; i < ks.size(); ++i) {
      const auto& a = acc.a[i];
      DfsRow row;
      row.n = n;
      row.k = ks[i];
      row.replicates = a.count;
      row.depth_gap_sq = a.depth_gap_sq / static_cast<double>(a.count);
      row.weighted_gap_sq = a.weighted_gap_sq / static_cast<double>(a.count);
      row.weighted_variance = a.weighted.variance();
      row.ratio = row.weighted_variance > 0.0 ? row.weighted_gap_sq / row.weighted_variance : 0.0;
      row.sandwich_violations = a.violations;
      out.rows.push_back(row);
    }
  }
  for (const auto& row : out.rows) {
    ClaimResult gap;
    gap.experiment = "dfs-comparison";
    gap.claim = "depth-gap-bounded";
    gap.check = "mean_max";
    gap.statistic = "depth_gap_sq";
    gap.n = row.n;
    gap.k = row.k;
    gap.replicates = row.replicates;
    gap.estimate = row.depth_gap_sq;
    gap.target = dfs_depth_gap_bound;
    gap.passed = row.depth_gap_sq <= dfs_depth_gap_bound;
    out.results.claims.push_back(gap);
    ClaimResult sandwich = gap;
    sandwich.claim = "sandwich";
    sandwich.check = "never_violated";
    sandwich.statistic = "violations";
    sandwich.estimate = static_cast<double>(row.sandwich_violations);
    sandwich.target = 0.0;
    sandwich.passed = row.sandwich_violations == 0;
    out.results.claims.push_back(sandwich);
  }
  // The weighted ratio must decrease along increasing n, per k fraction.
  for (std::size_t i = 0; i < k_fractions.size(); ++i) {
    std::vector<const DfsRow*> series;
    for (std::size_t j = i; j < out.rows.size(); j += k_fractions.size()) series.push_back(&out.rows[j]);
    std::sort(series.begin(), series.end(), [](auto* a, auto* b) { return a->n < b->n; });
    for (std::size_t j = 1; j < series.size(); ++j) {
      ClaimResult dec;
      dec.experiment = "dfs-comparison";
      dec.claim = "weighted-ratio-decreasing";
      dec.check = "decreasing";
      dec.statistic = "weighted_gap_ratio";
      dec.n = series[j]->n;
      dec.k = series[j]->k;
      dec.replicates = series[j]->replicates;
      dec.estimate = series[j]->ratio;
      dec.target = series[j - 1]->ratio;
      dec.passed = series[j]->ratio < series[j - 1]->ratio;
      std::ostringstream d;
      d << "previous n " << series[j - 1]->n;
      dec.detail = d.str();
      out.results.claims.push_back(dec);
    }
  }
  return out;
}

namespace {

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\r\n") == std::string::npos) return s;
  std::string q = "\"";
  for (char c : s) {
    if (c == '"') q += '"';
    q += c;
  }
  return q + "\"";
}

}  // namespace

std::string results_csv(const ResultSet& results) {
  std::ostringstream out;
  out.precision(17);
  out << "experiment,claim,check,statistic,n,k,replicates,estimate,target,tolerance,stderr,"
         "verdict,detail\r\n";
  for (const auto& c : results.claims) {
    out << csv_field(c.experiment) << ',' << csv_field(c.claim) << ',' << c.check << ','
        << c.statistic << ',' << c.n << ',' << c.k << ',' << c.replicates << ',' << c.estimate
        << ',' << c.target << ',' << c.tolerance << ',' << c.standard_error << ','
        << (c.passed ? "pass" : "fail") << ',' << csv_field(c.detail) << "\r\n";
  }
  return out.str();
}

std::string results_jsonl(const ResultSet& results) {
  std::ostringstream out;
  for (const auto& c : results.claims) {
    json j = {{"type", "claim"},       {"experiment", c.experiment}, {"claim", c.claim},
              {"check", c.check},      {"statistic", c.statistic},   {"n", c.n},
              {"k", c.k},              {"replicates", c.replicates}, {"estimate", c.estimate},
              {"target", c.target},    {"tolerance", c.tolerance},   {"stderr", c.standard_error},
              {"passed", c.passed},    {"detail", c.detail}};
    out << j.dump() << '\n';
  }
  for (const auto& o : results.outputs) {
    json j = {{"type", "output"},   {"experiment", o.experiment}, {"statistic", o.statistic},
              {"n", o.n},           {"k", o.k},                   {"replicates", o.replicates},
              {"mean", o.mean},     {"variance", o.variance},     {"stderr", o.standard_error}};
    out << j.dump() << '\n';
  }
  return out.str();
}

}  // namespace wbst
