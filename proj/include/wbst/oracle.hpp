#pragma once

#include <array>
#include <string>
#include <vector>

#include <boost/rational.hpp>

#include "wbst/aggregates.hpp"

namespace wbst {

using Rational = boost::rational<Int128>;

std::string to_string(const Rational& r);  // "p/q", or "p" when q == 1
double to_double(const Rational& r);

inline constexpr int oracle_max_n = 8;
inline constexpr int lemma1_max_n = 7;

struct ExactStat {
  Rational mean;
  Rational variance;
};

// Exact moments over all n! insertion orders of 1..n. Per-label vectors are
// indexed by k - 1; event tables by (j - 1) * n + (k - 1).
struct ExactMoments {
  int n = 0;
  Int128 permutations = 0;

  std::vector<ExactStat> depth;               // D_k(n)
  std::vector<ExactStat> weighted_depth;      // W_k(n)
  std::vector<ExactStat> depth_bar;           // sum_j 1{B_jk} - 1
  std::vector<ExactStat> weighted_depth_bar;  // sum_j j 1{B_jk}
  ExactStat path_length;                      // P_n
  ExactStat wiener;                           // W_n
  ExactStat weighted_path_length;
  ExactStat weighted_wiener;
  ExactStat last_depth;           // X_n
  ExactStat last_weighted_depth;  // weighted depth of the last inserted node

  std::vector<Int128> a_counts;  // #orders with k in the subtree of j
  std::vector<Int128> b_counts;
  // tail_counts[(k-1) * (n+1) + l] = #orders with T^>_k(n) >= l.
  std::vector<Int128> tail_counts;
  // joint_b[(k-1) << n | S] = #orders in which B_jk holds for every j in S
  // (bit j-1 of S).
  std::vector<Int128> joint_b;

  Rational prob_a(int j, int k) const;
  Rational prob_b(int j, int k) const;
  Rational prob_tail(int k, int l) const;
  Rational prob_joint_b(int k, unsigned subset) const;
};

// Heap's algorithm over the orders of the non-root labels, one root label per
// parallel task; integer tallies merged exactly. 1 <= n <= 8.
ExactMoments enumerate(int n);

struct OracleCheck {
  std::string name;
  int n = 0;
  std::size_t comparisons = 0;
  std::size_t failures = 0;
  std::string first_failure;
  bool passed() const { return failures == 0; }
};

// P(A_jk) = 1/(|k-j|+1) and P(B_jk) = 1/|k-j| for all j != k.
OracleCheck event_probability_check(const ExactMoments& m);
// Marginals plus P(intersection over S) = product over S, every k and S; n <= 7.
OracleCheck lemma1_check(const ExactMoments& m);
// E and Var of the barred weighted depth against the harmonic-number forms.
OracleCheck exact_moment_formula_check(const ExactMoments& m);
// P(T^>_k(n) >= l) = 1/(l+1), 0 <= l <= n-k.
OracleCheck subtree_tail_check(const ExactMoments& m);
// E[W_k] + E[W_{n+1-k}] = (n+1)(E[D_k]+1): the label-reflected problem has
// the same law, and reflection maps W_k to (n+1)(D_k+1) - W_k.
OracleCheck reflection_identity_check(const ExactMoments& m);

std::vector<OracleCheck> run_all_checks(const ExactMoments& m);

// Closed forms with H^(i)_{k,n} = H^(i)_{k-1} + H^(i)_{n-k}.
Rational harmonic(int m, int order);
Rational barred_weighted_depth_mean(int n, int k);
Rational barred_weighted_depth_variance(int n, int k);

std::string moments_csv(const ExactMoments& m);
std::string events_csv(const ExactMoments& m);

}  // namespace wbst
