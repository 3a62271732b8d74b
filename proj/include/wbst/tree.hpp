#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "wbst/dyadic_path.hpp"

namespace wbst {

enum class KeyModel { permutation, iid };

const char* to_string(KeyModel model);

struct Key {
  KeyModel model = KeyModel::permutation;
  double value = 0.0;

  std::int64_t rank() const;
};

using NodeId = std::int32_t;
inline constexpr NodeId no_node = -1;

struct Node {
  double key = 0.0;
  NodeId left = no_node;
  NodeId right = no_node;
  NodeId parent = no_node;
  std::int32_t size = 1;
};

struct PathObservation {
  int depth = 0;
  double weighted_depth = 0.0;
  Key node_key;
  std::size_t n = 0;
};

struct DistanceObservation {
  int distance = 0;
  double weight = 0.0;
};

// Binary search tree stored as an arena indexed by insertion order: node i is
// the (i+1)-th inserted key, node 0 is the root, and every parent has a
// smaller index than its children. Immutable once built.
class LabelledTree {
 public:
  LabelledTree() = default;

  std::size_t size() const { return nodes_.size(); }
  bool empty() const { return nodes_.empty(); }
  KeyModel model() const { return model_; }

  NodeId root() const { return empty() ? no_node : 0; }
  const Node& node(NodeId v) const { return nodes_[static_cast<std::size_t>(v)]; }
  double key(NodeId v) const { return node(v).key; }
  Key key_of(NodeId v) const { return {model_, key(v)}; }
  NodeId left(NodeId v) const { return node(v).left; }
  NodeId right(NodeId v) const { return node(v).right; }
  NodeId parent(NodeId v) const { return node(v).parent; }
  std::int32_t subtree_size(NodeId v) const { return node(v).size; }
  std::size_t insertion_index(NodeId v) const { return static_cast<std::size_t>(v) + 1; }

  // Node ids in increasing key order (ties: later insertion first).
  std::span<const NodeId> in_order() const { return in_order_; }
  // rank is 1-based.
  NodeId node_of_rank(std::size_t rank) const { return in_order_[rank - 1]; }
  std::size_t rank_of(NodeId v) const { return rank_[static_cast<std::size_t>(v)]; }

  // First node met on the search path with this exact key, or no_node.
  NodeId find(double key) const;

  std::vector<int> depths() const;
  std::vector<double> weighted_depths() const;

  LabelledTree relabelled(double alpha, double beta) const;

  friend LabelledTree assemble(std::vector<Node> nodes, std::vector<NodeId> in_order,
                               KeyModel model);

 private:
  KeyModel model_ = KeyModel::permutation;
  std::vector<Node> nodes_;
  std::vector<NodeId> in_order_;
  std::vector<std::uint32_t> rank_;
};

// Builders. All produce the tree of successive insertion where a key goes
// left when it is <= the key it is compared with.

// Serial reference: literal successive insertion, O(n * depth).
LabelledTree insert_keys(std::span<const double> keys, KeyModel model);
// Same tree via sort + Cartesian-tree stack construction.
LabelledTree cartesian_keys(std::span<const double> keys, KeyModel model);
// perm must be a permutation of 1..n; O(n).
LabelledTree build_from_permutation(std::span<const std::int64_t> perm);
// Keys U_1..U_n drawn from CounterRng(seed, replicate, streams::tree). A draw
// with repeated keys is rejected with a warning and redrawn on a fresh stream.
LabelledTree build_iid(std::size_t n, std::uint64_t seed, std::uint64_t replicate = 0);
std::vector<double> iid_keys(std::size_t n, std::uint64_t seed, std::uint64_t replicate = 0);

bool same_shape(const LabelledTree& a, const LabelledTree& b);
bool satisfies_bst_property(const LabelledTree& tree);

// Queries.
PathObservation depth_and_weight(const LabelledTree& tree, double label);
PathObservation observe_node(const LabelledTree& tree, NodeId v);
PathObservation last_inserted(const LabelledTree& tree);
PathObservation silhouette_depths(const LabelledTree& tree, const DyadicPath& x);
DistanceObservation distance_and_weight(const LabelledTree& tree, double k, double l);
// External nodes v_1..v_{n+1} in left-to-right order. depth is the external
// node's depth, weighted_depth the sum of its internal ancestors' keys, and
// node_key the key of its parent.
std::vector<PathObservation> dfs_external(const LabelledTree& tree);
int height(const LabelledTree& tree);
// Height of each node's subtree counted with its external nodes, i.e.
// 1 + the largest relative depth of an internal descendant.
std::vector<int> extended_subtree_heights(const LabelledTree& tree);
// Largest key in each node's subtree.
std::vector<double> subtree_max_keys(const LabelledTree& tree);

struct CouplingReport {
  std::size_t n = 0;
  int height = 0;
  double max_discrepancy = 0.0;      // max_k |W_(k)(n) - W_k(n)/n|
  double max_key_deviation = 0.0;    // max_i |U_i - rank(U_i)/n|
  double printed_bound = 0.0;        // H_n * max_key_deviation
  double path_bound = 0.0;           // (H_n + 1) * max_key_deviation
  bool shapes_equal = false;
  bool holds() const { return shapes_equal && max_discrepancy <= path_bound; }
  bool printed_holds() const { return max_discrepancy <= printed_bound; }
};

CouplingReport couple_models(std::size_t n, std::uint64_t seed, std::uint64_t replicate = 0);
CouplingReport couple_models(const LabelledTree& iid_tree);

}  // namespace wbst
