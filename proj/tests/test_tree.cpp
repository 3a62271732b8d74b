#include "doctest.h"

#include <cmath>
#include <map>
#include <memory>
#include <vector>

#include "wbst/errors.hpp"
#include "wbst/rng.hpp"
#include "wbst/silhouette.hpp"
#include "wbst/tree.hpp"

using namespace wbst;

namespace {

// Pointer-based successive insertion, independent of the arena builders.
struct RefNode {
  double key;
  std::unique_ptr<RefNode> left, right;
};

struct RefTree {
  std::unique_ptr<RefNode> root;
  std::map<double, std::pair<int, double>> first_seen;  // key -> (depth, weighted depth)

  void insert(double key) {
    std::unique_ptr<RefNode>* slot = &root;
    int depth = 0;
    double weight = 0.0;
    while (*slot) {
      weight += (*slot)->key;
      slot = key <= (*slot)->key ? &(*slot)->left : &(*slot)->right;
      ++depth;
    }
    *slot = std::make_unique<RefNode>(RefNode{key, nullptr, nullptr});
    first_seen.emplace(key, std::make_pair(depth, weight + key));
  }
};

std::vector<double> permutation_keys(std::size_t n, std::uint64_t seed) {
  CounterRng rng(seed);
  const auto p = random_permutation(n, rng);
  return {p.begin(), p.end()};
}

}  // namespace

TEST_CASE("insertion and cartesian builders agree on shape") {
  for (std::uint64_t s = 0; s < 50; ++s) {
    const auto keys = iid_keys(300, s);
    const auto a = insert_keys(keys, KeyModel::iid);
    const auto b = cartesian_keys(keys, KeyModel::iid);
    CHECK(same_shape(a, b));
    CHECK(satisfies_bst_property(a));
    CHECK(satisfies_bst_property(b));
  }
}

TEST_CASE("builders agree with repeated keys, which go left") {
  const std::vector<double> keys = {3, 1, 3, 2, 3, 1, 5, 4, 5};
  const auto a = insert_keys(keys, KeyModel::permutation);
  const auto b = cartesian_keys(keys, KeyModel::permutation);
  CHECK(same_shape(a, b));
  CHECK(a.left(0) == 1);   // 1 <= 3
  CHECK(a.right(1) == 2);  // 3 > 1, under node 1
}

TEST_CASE("permutation builder matches successive insertion") {
  for (std::uint64_t s = 0; s < 20; ++s) {
    CounterRng rng(s);
    const auto perm = random_permutation(500, rng);
    const std::vector<double> keys(perm.begin(), perm.end());
    CHECK(same_shape(build_from_permutation(perm), insert_keys(keys, KeyModel::permutation)));
  }
}

TEST_CASE("depths and weighted depths match a pointer-based reference") {
  const auto keys = permutation_keys(400, 77);
  RefTree ref;
  for (double k : keys) ref.insert(k);
  const auto tree = insert_keys(keys, KeyModel::permutation);
  for (double k : keys) {
    const auto obs = depth_and_weight(tree, k);
    CHECK(obs.depth == ref.first_seen[k].first);
    CHECK(obs.weighted_depth == ref.first_seen[k].second);
  }
  const auto last = last_inserted(tree);
  CHECK(last.node_key.value == keys.back());
}

TEST_CASE("root has depth 0 and weighted depth equal to its key") {
  const std::vector<double> keys = {4, 2, 6, 1};
  const auto tree = insert_keys(keys, KeyModel::permutation);
  CHECK(depth_and_weight(tree, 4).depth == 0);
  CHECK(depth_and_weight(tree, 4).weighted_depth == 4);
  CHECK(depth_and_weight(tree, 1).depth == 2);
  CHECK(depth_and_weight(tree, 1).weighted_depth == 7);
  CHECK(height(tree) == 2);
  CHECK_THROWS_AS(depth_and_weight(tree, 3), NotFound);
}

TEST_CASE("distance and weighted distance by hand") {
  // 4 is the root; 2, 6 its children; 1, 3 under 2.
  const std::vector<double> keys = {4, 2, 6, 1, 3};
  const auto tree = insert_keys(keys, KeyModel::permutation);
  const auto d13 = distance_and_weight(tree, 1, 3);
  CHECK(d13.distance == 2);
  CHECK(d13.weight == 6);
  const auto d16 = distance_and_weight(tree, 1, 6);
  CHECK(d16.distance == 3);
  CHECK(d16.weight == 13);
  const auto d44 = distance_and_weight(tree, 4, 4);
  CHECK(d44.distance == 0);
  CHECK(d44.weight == 4);
}

TEST_CASE("silhouette follows the dyadic path to the deepest node") {
  const std::vector<double> keys = {0.5, 0.25, 0.75, 0.6};
  const auto tree = insert_keys(keys, KeyModel::iid);
  const auto right_left = silhouette_depths(tree, DyadicPath::from_bits("10"));
  CHECK(right_left.depth == 2);
  CHECK(right_left.weighted_depth == doctest::Approx(1.85));
  CHECK(silhouette_depths(tree, DyadicPath::ones()).depth == 1);
  CHECK(silhouette_depths(tree, DyadicPath::zeros()).depth == 1);
}

TEST_CASE("external nodes: n + 1 of them, depths one below their parent") {
  const auto keys = permutation_keys(200, 5);
  const auto tree = insert_keys(keys, KeyModel::permutation);
  const auto ext = dfs_external(tree);
  REQUIRE(ext.size() == 201);
  // Kraft equality for a full binary tree's leaves.
  double kraft = 0.0;
  for (const auto& e : ext) kraft += std::ldexp(1.0, -e.depth);
  CHECK(kraft == doctest::Approx(1.0));
  CHECK(ext.front().node_key.value == 1);
  CHECK(ext.back().node_key.value == 200);
}

TEST_CASE("extended heights and subtree maxima") {
  const std::vector<double> keys = {4, 2, 6, 1, 3};
  const auto tree = insert_keys(keys, KeyModel::permutation);
  const auto h = extended_subtree_heights(tree);
  CHECK(h[0] == 3);
  CHECK(h[1] == 2);
  CHECK(h[2] == 1);
  const auto m = subtree_max_keys(tree);
  CHECK(m[0] == 6);
  CHECK(m[1] == 3);
}

TEST_CASE("relabelling is affine on keys and leaves the shape alone") {
  const auto tree = build_iid(100, 3);
  const auto r = tree.relabelled(2.0, 1.0);
  CHECK(same_shape(tree, r));
  for (NodeId v = 0; v < 100; ++v) CHECK(r.key(v) == doctest::Approx(2.0 * tree.key(v) + 1.0));
}

TEST_CASE("coupling of the two models") {
  for (std::uint64_t r = 0; r < 200; ++r) {
    const auto rep = couple_models(300, 9, r);
    CHECK(rep.shapes_equal);
    CHECK(rep.holds());
  }
}

TEST_CASE("single-node coupling needs the extra path node") {
  const auto rep = couple_models(1, 4);
  CHECK(rep.height == 0);
  CHECK(rep.holds());
  CHECK_FALSE(rep.printed_holds());
}

TEST_CASE("iid builder is reproducible") {
  CHECK(iid_keys(50, 1, 2) == iid_keys(50, 1, 2));
  CHECK(iid_keys(50, 1, 2) != iid_keys(50, 1, 3));
}

TEST_CASE("invalid permutations are rejected") {
  const std::vector<std::int64_t> dup = {1, 2, 2};
  CHECK_THROWS_AS(build_from_permutation(dup), InvalidInput);
  const std::vector<std::int64_t> out = {1, 4, 2};
  CHECK_THROWS_AS(build_from_permutation(out), InvalidInput);
}

TEST_CASE("dyadic paths") {
  const auto p = DyadicPath::from_value(0.625);
  CHECK(p.to_string() == "101");
  CHECK(p.value() == 0.625);
  CHECK(p.mirrored().value() == doctest::Approx(0.375));
  CHECK(DyadicPath::ones().value() == 1.0);
  CHECK(DyadicPath::ones().mirrored().value() == 0.0);
  CHECK(DyadicPath::from_bits("0110").bit(3) == 1);
  CHECK(DyadicPath::from_bits("0110").bit(70) == 0);
  CHECK_THROWS_AS(DyadicPath::from_bits("012"), InvalidInput);
  CHECK_THROWS_AS(DyadicPath::from_value(1.5), InvalidInput);
}

TEST_CASE("weighted height of a chain") {
  const std::vector<double> keys = {0.9, 0.8, 0.7};
  const auto tree = insert_keys(keys, KeyModel::iid);
  CHECK(weighted_height(tree) == doctest::Approx(2.4));
}
