#pragma once

#include <cstdint>
#include <string>

#include "wbst/tree.hpp"

namespace wbst {

using Int128 = __int128;

std::string to_string(Int128 v);
inline double to_double(Int128 v) { return static_cast<double>(v); }

inline constexpr double euler_gamma = 0.57721566490153286060651209008240243;

// Path length p, Wiener index w, weighted path length wp and weighted Wiener
// index ww of one tree. The weighted Wiener index counts each node once with
// itself (its own label) besides the unordered pairs of distinct nodes.
struct TreeFunctionals {
  Int128 p = 0;
  Int128 w = 0;
  double wp = 0.0;
  double ww = 0.0;
  std::size_t n = 0;
};

// One post-order pass over the subtree recursions
//   p  = p1 + p2 + |T| - 1
//   w  = w1 + w2 + (|T2|+1) p1 + (|T1|+1) p2 + |T| + 2|T1||T2| - 1
//   wp = wp1 + wp2 + |T| x
//   ww = ww1 + ww2 + (|T2|+1) wp1 + (|T1|+1) wp2 + (|T| + |T1||T2|) x
TreeFunctionals functionals_recursive(const LabelledTree& tree);

inline constexpr std::size_t naive_size_limit = 5000;

// All-pairs O(n^2) evaluation straight from the definitions.
TreeFunctionals functionals_naive(const LabelledTree& tree);

struct AffineRelabelReport {
  double alpha = 1.0;
  double beta = 0.0;
  double wp_relabelled = 0.0;  // measured on the relabelled tree
  double wp_predicted = 0.0;   // alpha wp + (p + n) beta
  double ww_relabelled = 0.0;
  double ww_predicted = 0.0;   // alpha ww + (w + n(n+1)/2) beta
  bool holds = false;
};

AffineRelabelReport affine_relabel_check(const LabelledTree& tree, double alpha, double beta,
                                         double rel_tol = 1e-9);

struct ReflectionReport {
  std::size_t n = 0;
  TreeFunctionals original;
  TreeFunctionals reflected;  // keys 1 - U_i
  double wp_gap = 0.0;        // |wp + wp* - (p + n)|
  double ww_gap = 0.0;        // |ww + ww* - (w + n(n+1)/2)|
  bool shapes_mirror = false;
  bool holds = false;
};

ReflectionReport reflection_check(const LabelledTree& iid_tree, double rel_tol = 1e-9);
ReflectionReport reflection_check(std::size_t n, std::uint64_t seed,
                                  std::uint64_t replicate = 0, double rel_tol = 1e-9);

bool relative_close(double a, double b, double rel_tol);

}  // namespace wbst
