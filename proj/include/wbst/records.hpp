#pragma once

#include <cstdint>

#include "wbst/dyadic_path.hpp"
#include "wbst/rng.hpp"

namespace wbst {

// Exact O(log n) samplers for single-path statistics, used when a Monte Carlo
// experiment needs one path per replicate and not the whole tree.
//
// Permutation model: label j is an ancestor of k iff j was inserted before
// every label strictly between j and k (and k itself). With i.i.d. uniform
// insertion times the ancestors on each side of k are the successive lower
// records of the times read outward from k; given the current record value m
// the gap to the next record is Geometric(m) and the new record is uniform on
// (0, m). Both sides start from the time of k and are conditionally
// independent given it.

struct LabelPathSample {
  std::int64_t label = 0;
  std::int64_t depth = 0;
  double weighted_depth = 0.0;
};

// Depth D_k(n) and weighted depth W_k(n) of label k, 1 <= k <= n.
LabelPathSample sample_label_path(std::int64_t n, std::int64_t k, CounterRng& rng);

// Depth and weighted depth of the last inserted node; its label is uniform on
// 1..n and it carries the largest insertion time.
LabelPathSample sample_last_inserted(std::int64_t n, CounterRng& rng);

struct SilhouettePathSample {
  std::int64_t depth = 0;       // B_n(x)
  double weighted_depth = 0.0;  // weighted depth of the deepest node on x
};

// i.i.d. model: follows path x while keys remain in the current interval.
// The first key to land in an interval is uniform on it and the number of
// the remaining m - 1 keys falling on the chosen side is binomial.
SilhouettePathSample sample_silhouette_path(std::int64_t n, const DyadicPath& x,
                                            CounterRng& rng);

}  // namespace wbst
