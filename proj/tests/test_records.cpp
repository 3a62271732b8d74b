#include "doctest.h"

#include <cmath>
#include <vector>

#include "wbst/errors.hpp"
#include "wbst/oracle.hpp"
#include "wbst/records.hpp"
#include "wbst/statlab.hpp"
#include "wbst/tree.hpp"

using namespace wbst;

TEST_CASE("label-path sampler matches exact moments for n = 7") {
  const auto exact = enumerate(7);
  const int reps = 100000;
  for (int k = 1; k <= 7; ++k) {
    StreamingMoments d, w;
    for (int r = 0; r < reps; ++r) {
      CounterRng rng(31, static_cast<std::uint64_t>(r), static_cast<std::uint64_t>(k));
      const auto s = sample_label_path(7, k, rng);
      d.add(static_cast<double>(s.depth));
      w.add(s.weighted_depth);
    }
    const auto& ed = exact.depth[static_cast<std::size_t>(k - 1)];
    const auto& ew = exact.weighted_depth[static_cast<std::size_t>(k - 1)];
    CHECK(std::abs(d.mean() - to_double(ed.mean)) < 5.0 * d.standard_error());
    CHECK(std::abs(w.mean() - to_double(ew.mean)) < 5.0 * w.standard_error());
    CHECK(d.variance() == doctest::Approx(to_double(ed.variance)).epsilon(0.03));
    CHECK(w.variance() == doctest::Approx(to_double(ew.variance)).epsilon(0.03));
  }
}

TEST_CASE("last-inserted sampler matches exact moments for n = 7") {
  const auto exact = enumerate(7);
  StreamingMoments d, w;
  for (int r = 0; r < 200000; ++r) {
    CounterRng rng(8, static_cast<std::uint64_t>(r));
    const auto s = sample_last_inserted(7, rng);
    d.add(static_cast<double>(s.depth));
    w.add(s.weighted_depth);
  }
  CHECK(std::abs(d.mean() - to_double(exact.last_depth.mean)) < 5.0 * d.standard_error());
  CHECK(std::abs(w.mean() - to_double(exact.last_weighted_depth.mean)) <
        5.0 * w.standard_error());
}

TEST_CASE("label-path sampler agrees in law with whole trees at n = 300") {
  const std::int64_t n = 300, k = 75;
  const int reps = 4000;
  std::vector<double> a, b;
  for (int r = 0; r < reps; ++r) {
    CounterRng rng(12, static_cast<std::uint64_t>(r), streams::path);
    a.push_back(sample_label_path(n, k, rng).weighted_depth);
    CounterRng trng(12, static_cast<std::uint64_t>(r), streams::tree);
    const auto tree = build_from_permutation(random_permutation(n, trng));
    b.push_back(depth_and_weight(tree, static_cast<double>(k)).weighted_depth);
  }
  CHECK_FALSE(ks_two_sample(a, b).reject);
}

TEST_CASE("silhouette-path sampler agrees in law with whole trees") {
  const std::int64_t n = 500;
  const auto x = DyadicPath::from_bits("0110");
  const int reps = 4000;
  std::vector<double> ad, bd, aw, bw;
  for (int r = 0; r < reps; ++r) {
    CounterRng rng(13, static_cast<std::uint64_t>(r), streams::path);
    const auto s = sample_silhouette_path(n, x, rng);
    ad.push_back(static_cast<double>(s.depth));
    aw.push_back(s.weighted_depth);
    const auto o = silhouette_depths(build_iid(n, 13, static_cast<std::uint64_t>(r)), x);
    bd.push_back(o.depth);
    bw.push_back(o.weighted_depth);
  }
  CHECK_FALSE(ks_two_sample(aw, bw).reject);
  StreamingMoments ma, mb;
  for (double v : ad) ma.add(v);
  for (double v : bd) mb.add(v);
  CHECK(std::abs(ma.mean() - mb.mean()) < 5.0 * std::hypot(ma.standard_error(), mb.standard_error()));
}

TEST_CASE("sampler preconditions") {
  CounterRng rng(1);
  CHECK_THROWS_AS(sample_label_path(5, 0, rng), InvalidInput);
  CHECK_THROWS_AS(sample_label_path(5, 6, rng), InvalidInput);
  CHECK_THROWS_AS(sample_last_inserted(0, rng), InvalidInput);
  CHECK(sample_label_path(1, 1, rng).depth == 0);
}
