#include "wbst/aggregates.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include "wbst/errors.hpp"

namespace wbst {

std::string to_string(Int128 v) {
  if (v == 0) return "0";
  const bool neg = v < 0;
  unsigned __int128 u = neg ? -static_cast<unsigned __int128>(v) : static_cast<unsigned __int128>(v);
  std::string s;
  while (u > 0) {
    s.push_back(static_cast<char>('0' + static_cast<int>(u % 10)));
    u /= 10;
  }
  if (neg) s.push_back('-');
  std::reverse(s.begin(), s.end());
  return s;
}

bool relative_close(double a, double b, double rel_tol) {
  const double scale = std::max({std::abs(a), std::abs(b), 1.0});
  return std::abs(a - b) <= rel_tol * scale;
}

TreeFunctionals functionals_recursive(const LabelledTree& tree) {
  const std::size_t n = tree.size();
  struct Acc {
    Int128 p = 0, w = 0;
    double wp = 0.0, ww = 0.0;
  };
  std::vector<Acc> acc(n);
  // Children have larger ids than their parent: a reverse sweep is post-order.
  for (std::size_t i = n; i-- > 0;) {
    const auto v = static_cast<NodeId>(i);
    const NodeId l = tree.left(v);
    const NodeId r = tree.right(v);
    const Acc a1 = l == no_node ? Acc{} : acc[static_cast<std::size_t>(l)];
    const Acc a2 = r == no_node ? Acc{} : acc[static_cast<std::size_t>(r)];
    const Int128 s1 = l == no_node ? 0 : tree.subtree_size(l);
    const Int128 s2 = r == no_node ? 0 : tree.subtree_size(r);
    const Int128 s = tree.subtree_size(v);
    const double x = tree.key(v);
    Acc& out = acc[i];
    out.p = a1.p + a2.p + s - 1;
    out.w = a1.w + a2.w + (s2 + 1) * a1.p + (s1 + 1) * a2.p + s + 2 * s1 * s2 - 1;
    out.wp = a1.wp + a2.wp + static_cast<double>(s) * x;
    out.ww = a1.ww + a2.ww + static_cast<double>(s2 + 1) * a1.wp +
             static_cast<double>(s1 + 1) * a2.wp + static_cast<double>(s + s1 * s2) * x;
  }
  TreeFunctionals f;
  f.n = n;
  if (n > 0) {
    f.p = acc[0].p;
    f.w = acc[0].w;
    f.wp = acc[0].wp;
    f.ww = acc[0].ww;
  }
  return f;
}

TreeFunctionals functionals_naive(const LabelledTree& tree) {
  const std::size_t n = tree.size();
  if (n > naive_size_limit) {
    throw InvalidInput("functionals_naive limited to n <= " + std::to_string(naive_size_limit));
  }
  TreeFunctionals f;
  f.n = n;
  // Root distances by walking each node up to the root.
  for (NodeId v = 0; v < static_cast<NodeId>(n); ++v) {
    for (NodeId u = v; u != no_node; u = tree.parent(u)) {
      f.wp += tree.key(u);
      if (u != v) f.p += 1;
    }
  }
  // Pairwise (weighted) distances by a traversal from every source node.
  std::vector<int> dist(n);
  std::vector<double> wdist(n);
  std::vector<NodeId> from(n);
  std::vector<NodeId> stack;
  double diagonal = 0.0;
  for (NodeId s = 0; s < static_cast<NodeId>(n); ++s) {
    const auto si = static_cast<std::size_t>(s);
    dist[si] = 0;
    wdist[si] = tree.key(s);
    from[si] = no_node;
    diagonal += tree.key(s);
    stack.assign(1, s);
    while (!stack.empty()) {
      const NodeId v = stack.back();
      stack.pop_back();
      const auto vi = static_cast<std::size_t>(v);
      for (NodeId u : {tree.left(v), tree.right(v), tree.parent(v)}) {
        if (u == no_node || u == from[vi]) continue;
        const auto ui = static_cast<std::size_t>(u);
        from[ui] = v;
        dist[ui] = dist[vi] + 1;
        wdist[ui] = wdist[vi] + tree.key(u);
        stack.push_back(u);
        if (u > s) {
          f.w += dist[ui];
          f.ww += wdist[ui];
        }
      }
    }
  }
  f.ww += diagonal;
  return f;
}

AffineRelabelReport affine_relabel_check(const LabelledTree& tree, double alpha, double beta,
                                         double rel_tol) {
  const auto base = functionals_recursive(tree);
  const auto moved = functionals_recursive(tree.relabelled(alpha, beta));
  const double n = static_cast<double>(tree.size());
  AffineRelabelReport r;
  r.alpha = alpha;
  r.beta = beta;
  r.wp_relabelled = moved.wp;
  r.wp_predicted = alpha * base.wp + (to_double(base.p) + n) * beta;
  r.ww_relabelled = moved.ww;
  r.ww_predicted = alpha * base.ww + (to_double(base.w) + n * (n + 1.0) / 2.0) * beta;
  r.holds = relative_close(r.wp_relabelled, r.wp_predicted, rel_tol) &&
            relative_close(r.ww_relabelled, r.ww_predicted, rel_tol);
  return r;
}

ReflectionReport reflection_check(const LabelledTree& iid_tree, double rel_tol) {
  const std::size_t n = iid_tree.size();
  std::vector<double> mirrored(n);
  for (std::size_t i = 0; i < n; ++i) mirrored[i] = 1.0 - iid_tree.key(static_cast<NodeId>(i));
  const LabelledTree reflected = cartesian_keys(mirrored, KeyModel::iid);

  ReflectionReport r;
  r.n = n;
  r.original = functionals_recursive(iid_tree);
  r.reflected = functionals_recursive(reflected);
  r.shapes_mirror = true;
  for (NodeId v = 0; v < static_cast<NodeId>(n); ++v) {
    if (iid_tree.left(v) != reflected.right(v) || iid_tree.right(v) != reflected.left(v)) {
      r.shapes_mirror = false;
      break;
    }
  }
  const double dn = static_cast<double>(n);
  const double wp_target = to_double(r.original.p) + dn;
  // Each of the n(n+1)/2 node pairs, the n diagonal pairs included, gains
  // one unit per node on its path under x -> 1 - x.
  const double ww_target = to_double(r.original.w) + dn * (dn + 1.0) / 2.0;
  r.wp_gap = std::abs(r.original.wp + r.reflected.wp - wp_target);
  r.ww_gap = std::abs(r.original.ww + r.reflected.ww - ww_target);
  r.holds = r.shapes_mirror && r.original.p == r.reflected.p && r.original.w == r.reflected.w &&
            r.wp_gap <= rel_tol * std::max(1.0, wp_target) &&
            r.ww_gap <= rel_tol * std::max(1.0, ww_target);
  return r;
}

ReflectionReport reflection_check(std::size_t n, std::uint64_t seed, std::uint64_t replicate,
                                  double rel_tol) {
  return reflection_check(build_iid(n, seed, replicate), rel_tol);
}

}  // namespace wbst
