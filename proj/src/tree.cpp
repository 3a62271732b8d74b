#include "wbst/tree.hpp"

#include <algorithm>
#include <cmath>
#include <iostream>
#include <numeric>
#include <string>

#include "wbst/errors.hpp"
#include "wbst/rng.hpp"

namespace wbst {

const char* to_string(KeyModel model) {
  return model == KeyModel::permutation ? "permutation" : "iid";
}

std::int64_t Key::rank() const {
  if (model != KeyModel::permutation) {
    throw InvalidInput("rank() requested for a real-valued key");
  }
  return static_cast<std::int64_t>(value);
}

// ---------------------------------------------------------------- DyadicPath

DyadicPath DyadicPath::ones() {
  DyadicPath p;
  p.ones_tail_ = true;
  return p;
}

DyadicPath DyadicPath::from_bits(std::string_view bits) {
  if (bits.size() > max_bits) throw InvalidInput("dyadic path longer than 64 bits");
  DyadicPath p;
  for (std::size_t i = 0; i < bits.size(); ++i) {
    if (bits[i] == '1') {
      p.bits_ |= std::uint64_t{1} << i;
    } else if (bits[i] != '0') {
      throw InvalidInput("dyadic path bits must be 0 or 1");
    }
  }
  p.length_ = bits.size();
  return p;
}

DyadicPath DyadicPath::from_value(double x) {
  if (!(x >= 0.0 && x <= 1.0)) throw InvalidInput("dyadic path value outside [0,1]");
  if (x == 1.0) return ones();
  DyadicPath p;
  double r = x;
  for (std::size_t i = 0; i < max_bits && r > 0.0; ++i) {
    r *= 2.0;
    if (r >= 1.0) {
      p.bits_ |= std::uint64_t{1} << i;
      r -= 1.0;
    }
    p.length_ = i + 1;
  }
  return p;
}

DyadicPath DyadicPath::mirrored() const {
  DyadicPath p;
  p.length_ = length_;
  p.bits_ = length_ == 0 ? 0 : (~bits_ & (length_ == 64 ? ~std::uint64_t{0}
                                                         : (std::uint64_t{1} << length_) - 1));
  p.ones_tail_ = !ones_tail_;
  return p;
}

int DyadicPath::bit(std::size_t i) const {
  if (i >= 1 && i <= length_) return static_cast<int>((bits_ >> (i - 1)) & 1U);
  return ones_tail_ ? 1 : 0;
}

double DyadicPath::value() const {
  double v = 0.0;
  double w = 0.5;
  for (std::size_t i = 1; i <= length_; ++i, w *= 0.5) {
    if (bit(i)) v += w;
  }
  if (ones_tail_) v += 2.0 * w;  // sum of the infinite ones tail
  return v;
}

std::string DyadicPath::to_string(std::size_t width) const {
  const std::size_t len = std::max(width, length_);
  std::string s;
  for (std::size_t i = 1; i <= len; ++i) s.push_back(bit(i) ? '1' : '0');
  if (ones_tail_) s += "(1)";
  return s;
}

// -------------------------------------------------------------- LabelledTree

namespace {

void fill_sizes(std::vector<Node>& nodes) {
  for (auto& v : nodes) v.size = 1;
  for (std::size_t i = nodes.size(); i-- > 1;) {
    nodes[static_cast<std::size_t>(nodes[i].parent)].size += nodes[i].size;
  }
}

std::vector<NodeId> in_order_walk(const std::vector<Node>& nodes) {
  std::vector<NodeId> order;
  order.reserve(nodes.size());
  std::vector<NodeId> stack;
  NodeId v = nodes.empty() ? no_node : 0;
  while (v != no_node || !stack.empty()) {
    while (v != no_node) {
      stack.push_back(v);
      v = nodes[static_cast<std::size_t>(v)].left;
    }
    v = stack.back();
    stack.pop_back();
    order.push_back(v);
    v = nodes[static_cast<std::size_t>(v)].right;
  }
  return order;
}

void check_size(std::size_t n) {
  if (n == 0) throw InvalidInput("tree size must be at least 1");
  if (n > static_cast<std::size_t>(INT32_MAX)) throw InvalidInput("tree too large");
}

// Cartesian tree over an in-order sequence with priority = node id.
std::vector<Node> cartesian_link(std::span<const double> keys, std::span<const NodeId> order) {
  std::vector<Node> nodes(keys.size());
  for (std::size_t i = 0; i < keys.size(); ++i) nodes[i].key = keys[i];
  std::vector<NodeId> spine;
  spine.reserve(64);
  for (NodeId v : order) {
    NodeId last = no_node;
    while (!spine.empty() && spine.back() > v) {
      last = spine.back();
      spine.pop_back();
    }
    auto& nv = nodes[static_cast<std::size_t>(v)];
    nv.left = last;
    if (last != no_node) nodes[static_cast<std::size_t>(last)].parent = v;
    if (!spine.empty()) {
      nodes[static_cast<std::size_t>(spine.back())].right = v;
      nv.parent = spine.back();
    }
    spine.push_back(v);
  }
  fill_sizes(nodes);
  return nodes;
}

}  // namespace

LabelledTree assemble(std::vector<Node> nodes, std::vector<NodeId> in_order, KeyModel model) {
  LabelledTree t;
  t.model_ = model;
  t.nodes_ = std::move(nodes);
  t.in_order_ = std::move(in_order);
  t.rank_.assign(t.nodes_.size(), 0);
  for (std::size_t r = 0; r < t.in_order_.size(); ++r) {
    t.rank_[static_cast<std::size_t>(t.in_order_[r])] = static_cast<std::uint32_t>(r + 1);
  }
  return t;
}

NodeId LabelledTree::find(double k) const {
  NodeId v = root();
  while (v != no_node) {
    const double y = key(v);
    if (k == y) return v;
    v = k < y ? left(v) : right(v);
  }
  return no_node;
}

std::vector<int> LabelledTree::depths() const {
  std::vector<int> d(size(), 0);
  for (std::size_t i = 1; i < size(); ++i) {
    d[i] = d[static_cast<std::size_t>(nodes_[i].parent)] + 1;
  }
  return d;
}

std::vector<double> LabelledTree::weighted_depths() const {
  std::vector<double> w(size(), 0.0);
  if (!empty()) w[0] = nodes_[0].key;
  for (std::size_t i = 1; i < size(); ++i) {
    w[i] = w[static_cast<std::size_t>(nodes_[i].parent)] + nodes_[i].key;
  }
  return w;
}

LabelledTree LabelledTree::relabelled(double alpha, double beta) const {
  if (!(alpha > 0.0)) throw InvalidInput("relabelling requires alpha > 0");
  LabelledTree t = *this;
  for (auto& v : t.nodes_) v.key = alpha * v.key + beta;
  t.model_ = KeyModel::iid;
  return t;
}

// ------------------------------------------------------------------ builders

LabelledTree insert_keys(std::span<const double> keys, KeyModel model) {
  check_size(keys.size());
  std::vector<Node> nodes(keys.size());
  nodes[0].key = keys[0];
  for (std::size_t i = 1; i < keys.size(); ++i) {
    const double x = keys[i];
    nodes[i].key = x;
    std::size_t v = 0;
    for (;;) {
      NodeId& child = x <= nodes[v].key ? nodes[v].left : nodes[v].right;
      if (child == no_node) {
        child = static_cast<NodeId>(i);
        nodes[i].parent = static_cast<NodeId>(v);
        break;
      }
      v = static_cast<std::size_t>(child);
    }
  }
  fill_sizes(nodes);
  auto order = in_order_walk(nodes);
  return assemble(std::move(nodes), std::move(order), model);
}

LabelledTree cartesian_keys(std::span<const double> keys, KeyModel model) {
  check_size(keys.size());
  std::vector<NodeId> order(keys.size());
  std::iota(order.begin(), order.end(), NodeId{0});
  // Equal keys: the later insertion sits to the left.
  std::sort(order.begin(), order.end(), [&](NodeId a, NodeId b) {
    const double ka = keys[static_cast<std::size_t>(a)];
    const double kb = keys[static_cast<std::size_t>(b)];
    return ka < kb || (ka == kb && a > b);
  });
  auto nodes = cartesian_link(keys, order);
  return assemble(std::move(nodes), std::move(order), model);
}

LabelledTree build_from_permutation(std::span<const std::int64_t> perm) {
  check_size(perm.size());
  const auto n = static_cast<std::int64_t>(perm.size());
  std::vector<NodeId> order(perm.size(), no_node);
  std::vector<double> keys(perm.size());
  for (std::size_t i = 0; i < perm.size(); ++i) {
    const std::int64_t r = perm[i];
    if (r < 1 || r > n) {
      throw InvalidInput("rank " + std::to_string(r) + " outside 1.." + std::to_string(n));
    }
    auto& slot = order[static_cast<std::size_t>(r - 1)];
    if (slot != no_node) throw InvalidInput("duplicate rank " + std::to_string(r));
    slot = static_cast<NodeId>(i);
    keys[i] = static_cast<double>(r);
  }
  auto nodes = cartesian_link(keys, order);
  return assemble(std::move(nodes), std::move(order), KeyModel::permutation);
}

std::vector<double> iid_keys(std::size_t n, std::uint64_t seed, std::uint64_t replicate) {
  check_size(n);
  for (std::uint64_t attempt = 0;; ++attempt) {
    CounterRng rng(seed, replicate, attempt == 0 ? streams::tree : streams::redraw + attempt);
    auto keys = uniform_sample(n, rng);
    std::vector<double> sorted = keys;
    std::sort(sorted.begin(), sorted.end());
    if (std::adjacent_find(sorted.begin(), sorted.end()) == sorted.end()) return keys;
    std::clog << "warning: rejected i.i.d. sample with repeated keys (seed " << seed
              << ", replicate " << replicate << ", attempt " << attempt << ")\n";
  }
}

LabelledTree build_iid(std::size_t n, std::uint64_t seed, std::uint64_t replicate) {
  const auto keys = iid_keys(n, seed, replicate);
  return cartesian_keys(keys, KeyModel::iid);
}

bool same_shape(const LabelledTree& a, const LabelledTree& b) {
  if (a.size() != b.size()) return false;
  for (NodeId v = 0; v < static_cast<NodeId>(a.size()); ++v) {
    if (a.left(v) != b.left(v) || a.right(v) != b.right(v)) return false;
  }
  return true;
}

bool satisfies_bst_property(const LabelledTree& tree) {
  auto order = tree.in_order();
  for (std::size_t i = 1; i < order.size(); ++i) {
    if (tree.key(order[i - 1]) > tree.key(order[i])) return false;
  }
  // in_order() is cached at build time; re-derive it from the links.
  std::vector<NodeId> walk;
  std::vector<NodeId> stack;
  NodeId v = tree.root();
  while (v != no_node || !stack.empty()) {
    while (v != no_node) {
      stack.push_back(v);
      v = tree.left(v);
    }
    v = stack.back();
    stack.pop_back();
    walk.push_back(v);
    v = tree.right(v);
  }
  if (!std::equal(walk.begin(), walk.end(), order.begin(), order.end())) return false;
  for (NodeId u = 0; u < static_cast<NodeId>(tree.size()); ++u) {
    std::int32_t s = 1;
    if (tree.left(u) != no_node) s += tree.subtree_size(tree.left(u));
    if (tree.right(u) != no_node) s += tree.subtree_size(tree.right(u));
    if (s != tree.subtree_size(u)) return false;
  }
  return true;
}

// ------------------------------------------------------------------- queries

PathObservation observe_node(const LabelledTree& tree, NodeId v) {
  PathObservation obs;
  obs.n = tree.size();
  obs.node_key = tree.key_of(v);
  for (NodeId u = v; u != no_node; u = tree.parent(u)) {
    obs.weighted_depth += tree.key(u);
    ++obs.depth;
  }
  --obs.depth;
  return obs;
}

PathObservation depth_and_weight(const LabelledTree& tree, double label) {
  const NodeId v = tree.find(label);
  if (v == no_node) throw NotFound("no node labelled " + std::to_string(label));
  return observe_node(tree, v);
}

PathObservation last_inserted(const LabelledTree& tree) {
  if (tree.empty()) throw InvalidInput("empty tree");
  return observe_node(tree, static_cast<NodeId>(tree.size() - 1));
}

PathObservation silhouette_depths(const LabelledTree& tree, const DyadicPath& x) {
  if (tree.empty()) throw InvalidInput("empty tree");
  PathObservation obs;
  obs.n = tree.size();
  NodeId v = tree.root();
  obs.weighted_depth = tree.key(v);
  for (std::size_t level = 1;; ++level) {
    const NodeId next = x.bit(level) ? tree.right(v) : tree.left(v);
    if (next == no_node) break;
    v = next;
    obs.weighted_depth += tree.key(v);
    ++obs.depth;
  }
  obs.node_key = tree.key_of(v);
  return obs;
}

DistanceObservation distance_and_weight(const LabelledTree& tree, double k, double l) {
  NodeId a = tree.find(k);
  NodeId b = tree.find(l);
  if (a == no_node) throw NotFound("no node labelled " + std::to_string(k));
  if (b == no_node) throw NotFound("no node labelled " + std::to_string(l));
  auto depth_of = [&](NodeId v) {
    int d = 0;
    for (; tree.parent(v) != no_node; v = tree.parent(v)) ++d;
    return d;
  };
  int da = depth_of(a);
  int db = depth_of(b);
  DistanceObservation out;
  while (da > db) {
    out.weight += tree.key(a);
    a = tree.parent(a);
    --da;
    ++out.distance;
  }
  while (db > da) {
    out.weight += tree.key(b);
    b = tree.parent(b);
    --db;
    ++out.distance;
  }
  while (a != b) {
    out.weight += tree.key(a) + tree.key(b);
    a = tree.parent(a);
    b = tree.parent(b);
    out.distance += 2;
  }
  out.weight += tree.key(a);  // common ancestor
  return out;
}

std::vector<PathObservation> dfs_external(const LabelledTree& tree) {
  if (tree.empty()) throw InvalidInput("empty tree");
  const auto depth = tree.depths();
  const auto weight = tree.weighted_depths();
  const std::size_t n = tree.size();
  std::vector<PathObservation> out(n + 1);
  for (std::size_t i = 0; i <= n; ++i) {
    // External i sits between ranks i and i+1: it is the empty left slot of
    // the successor or else the empty right slot of the predecessor.
    NodeId parent;
    if (i < n && tree.left(tree.node_of_rank(i + 1)) == no_node) {
      parent = tree.node_of_rank(i + 1);
    } else {
      parent = tree.node_of_rank(i);
    }
    const auto p = static_cast<std::size_t>(parent);
    out[i].depth = depth[p] + 1;
    out[i].weighted_depth = weight[p];
    out[i].node_key = tree.key_of(parent);
    out[i].n = n;
  }
  return out;
}

int height(const LabelledTree& tree) {
  if (tree.empty()) throw InvalidInput("empty tree");
  const auto d = tree.depths();
  return *std::max_element(d.begin(), d.end());
}

std::vector<int> extended_subtree_heights(const LabelledTree& tree) {
  std::vector<int> h(tree.size(), 1);
  for (std::size_t i = tree.size(); i-- > 1;) {
    auto& hp = h[static_cast<std::size_t>(tree.parent(static_cast<NodeId>(i)))];
    hp = std::max(hp, h[i] + 1);
  }
  return h;
}

std::vector<double> subtree_max_keys(const LabelledTree& tree) {
  std::vector<double> m(tree.size());
  for (std::size_t i = 0; i < tree.size(); ++i) m[i] = tree.key(static_cast<NodeId>(i));
  for (std::size_t i = tree.size(); i-- > 1;) {
    auto& mp = m[static_cast<std::size_t>(tree.parent(static_cast<NodeId>(i)))];
    mp = std::max(mp, m[i]);
  }
  return m;
}

CouplingReport couple_models(const LabelledTree& iid_tree) {
  const std::size_t n = iid_tree.size();
  std::vector<std::int64_t> ranks(n);
  for (std::size_t i = 0; i < n; ++i) {
    ranks[i] = static_cast<std::int64_t>(iid_tree.rank_of(static_cast<NodeId>(i)));
  }
  const LabelledTree perm_tree = build_from_permutation(ranks);

  CouplingReport rep;
  rep.n = n;
  rep.shapes_equal = same_shape(iid_tree, perm_tree);
  const double dn = static_cast<double>(n);
  std::vector<double> dev(n);
  for (std::size_t i = 0; i < n; ++i) {
    dev[i] = iid_tree.key(static_cast<NodeId>(i)) - static_cast<double>(ranks[i]) / dn;
    rep.max_key_deviation = std::max(rep.max_key_deviation, std::abs(dev[i]));
  }
  // Path sums of the per-node deviations give W_(k)(n) - W_k(n)/n for every k.
  std::vector<double> path_dev(n);
  std::vector<int> depth(n, 0);
  for (std::size_t i = 0; i < n; ++i) {
    const NodeId p = iid_tree.parent(static_cast<NodeId>(i));
    path_dev[i] = dev[i] + (p == no_node ? 0.0 : path_dev[static_cast<std::size_t>(p)]);
    depth[i] = p == no_node ? 0 : depth[static_cast<std::size_t>(p)] + 1;
    rep.max_discrepancy = std::max(rep.max_discrepancy, std::abs(path_dev[i]));
    rep.height = std::max(rep.height, depth[i]);
  }
  rep.printed_bound = rep.height * rep.max_key_deviation;
  rep.path_bound = (rep.height + 1) * rep.max_key_deviation;
  return rep;
}

CouplingReport couple_models(std::size_t n, std::uint64_t seed, std::uint64_t replicate) {
  return couple_models(build_iid(n, seed, replicate));
}

}  // namespace wbst
