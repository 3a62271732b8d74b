#include "wbst/records.hpp"

#include <cmath>
#include <random>

#include "wbst/errors.hpp"

namespace wbst {

namespace {

// Number of trials up to and including the first success, success prob m.
double geometric_trials(double m, CounterRng& rng) {
  if (m >= 1.0) return 1.0;
  return 1.0 + std::floor(std::log(rng.uniform()) / std::log1p(-m));
}

void walk_side(std::int64_t n, std::int64_t k, int direction, double start_time,
               CounterRng& rng, LabelPathSample& out) {
  double m = start_time;
  double pos = static_cast<double>(k);
  const double lo = 1.0;
  const double hi = static_cast<double>(n);
  for (;;) {
    pos += direction * geometric_trials(m, rng);
    if (pos < lo || pos > hi) return;
    m *= rng.uniform();
    ++out.depth;
    out.weighted_depth += pos;
  }
}

LabelPathSample sample_from(std::int64_t n, std::int64_t k, double time_of_k,
                            CounterRng& rng) {
  LabelPathSample s;
  s.label = k;
  s.weighted_depth = static_cast<double>(k);
  walk_side(n, k, -1, time_of_k, rng, s);
  walk_side(n, k, +1, time_of_k, rng, s);
  return s;
}

}  // namespace

LabelPathSample sample_label_path(std::int64_t n, std::int64_t k, CounterRng& rng) {
  if (n < 1 || k < 1 || k > n) throw InvalidInput("sample_label_path needs 1 <= k <= n");
  return sample_from(n, k, rng.uniform(), rng);
}

LabelPathSample sample_last_inserted(std::int64_t n, CounterRng& rng) {
  if (n < 1) throw InvalidInput("sample_last_inserted needs n >= 1");
  const auto k = static_cast<std::int64_t>(rng.below(static_cast<std::uint64_t>(n))) + 1;
  return sample_from(n, k, 1.0, rng);
}

SilhouettePathSample sample_silhouette_path(std::int64_t n, const DyadicPath& x,
                                            CounterRng& rng) {
  if (n < 1) throw InvalidInput("sample_silhouette_path needs n >= 1");
  SilhouettePathSample s;
  double a = 0.0;
  double b = 1.0;
  std::int64_t remaining = n;
  for (std::size_t level = 1;; ++level) {
    const double u = rng.uniform();
    const double key = a + u * (b - a);
    s.weighted_depth += key;
    const bool go_right = x.bit(level) != 0;
    const double fraction = go_right ? 1.0 - u : u;
    std::binomial_distribution<std::int64_t> split(remaining - 1, fraction);
    remaining = remaining > 1 ? split(rng) : 0;
    if (remaining == 0) break;
    (go_right ? a : b) = key;
    ++s.depth;
  }
  return s;
}

}  // namespace wbst
