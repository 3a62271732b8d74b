#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "wbst/dyadic_path.hpp"
#include "wbst/rng.hpp"
#include "wbst/statlab.hpp"
#include "wbst/tree.hpp"

namespace wbst {

inline constexpr int max_table_depth = 24;

// Keys of the complete binary tree of depth k (levels 0..k-1, 2^k - 1 nodes)
// under recursive interval splitting: the root key is uniform on (0,1) and a
// node with interval (a,b) gets a key uniform on (a,b). Stored in heap order
// (node h has children 2h and 2h+1, root h = 1).
class SilhouetteTable {
 public:
  SilhouetteTable(int depth, std::vector<double> heap_keys);

  int depth() const { return depth_; }
  std::size_t size() const { return keys_.size(); }
  // h is the 1-based heap index.
  double heap_key(std::size_t h) const { return keys_[h - 1]; }
  std::span<const double> heap_keys() const { return keys_; }

  // Key of the node x_1..x_level, 0 <= level < depth: Xi_level(x).
  double value_along(const DyadicPath& x, int level) const;
  // In-order keys; the l-th equals Xi(l / 2^k) exactly, l = 1..2^k - 1.
  std::vector<double> in_order() const;
  // Largest |Xi_j(x) - Xi_{j-1}(x)| over x, for j = 1..depth-1 (index j-1).
  std::vector<double> increment_sups() const;

 private:
  int depth_;
  std::vector<double> keys_;
};

// Table from CounterRng(seed, replicate, streams::silhouette), 1 <= k <= 24.
SilhouetteTable generate_table(int depth, std::uint64_t seed, std::uint64_t replicate = 0);

// Xi_0(x), ..., Xi_k(x) along the single path x, consuming one uniform per level.
std::vector<double> xi_along_path(const DyadicPath& x, int k, CounterRng& rng);
std::vector<double> xi_along_path(const DyadicPath& x, int k, std::uint64_t seed,
                                  std::uint64_t replicate = 0);
// The same walk driven by 1 - U_i; reflected(x) + plain(mirror of x) == 1.
std::vector<double> xi_along_path_reflected(const DyadicPath& x, int k, CounterRng& rng);

// Xi_k(x) only.
double xi_level(const DyadicPath& x, int k, CounterRng& rng);
// Xi_k(xi) at an independent uniform point xi, bits drawn on the fly.
double xi_at_uniform_point(int k, CounterRng& rng);

inline constexpr double increment_ratio = 0.81649658092772603273;  // sqrt(2/3)
inline constexpr int xi_level_cap = 120;

// Smallest k with 2 q^k < tol, capped at xi_level_cap.
int levels_for_tolerance(double tol);

struct XiLimit {
  double value = 0.0;
  int levels = 0;
  double bound = 0.0;  // 2 q^levels
  bool capped = false;
};

XiLimit xi_limit(const DyadicPath& x, double tol, CounterRng& rng);
XiLimit xi_limit(const DyadicPath& x, double tol, std::uint64_t seed,
                 std::uint64_t replicate = 0);

struct ResampleReport {
  double t = 0.0;
  TestReport test;
};

// Two-sample KS between direct draws of Xi(t) and draws of the right-hand
// side of the fixed-point equation for each t.
std::vector<ResampleReport> fixpoint_resample_check(std::span<const double> t_grid,
                                                    std::size_t replicates, std::uint64_t seed,
                                                    double tol = 1e-4,
                                                    double alpha = default_level);

inline constexpr double density_clip = 1e-12;

struct XiMarginalEstimate {
  double t = 0.0;
  std::vector<double> x;
  std::vector<double> density;
  std::vector<double> standard_error;
  std::size_t replicates = 0;
  std::size_t clipped = 0;  // draws of Xi(2t) raised to density_clip
  int levels = 0;
  // Trapezoidal integral over the grid with 0 and 1 appended.
  double integral() const;
};

// f_t(x) = E[1{Xi(2t) >= x} / Xi(2t)] for t <= 1/2, f_t(x) = f_{1-t}(1-x)
// for t > 1/2. Xi(2t) is truncated at the level where 2 q^k < tol.
XiMarginalEstimate estimate_density(double t, std::span<const double> x_grid,
                                    std::size_t replicates, std::uint64_t seed,
                                    double tol = 1e-4);

// Largest sum of keys along a root-to-external path.
double weighted_height(const LabelledTree& tree);

std::string table_csv(const SilhouetteTable& table);
std::string density_csv(const XiMarginalEstimate& estimate);
// Step plot of x -> Xi(x) with the diagonal dotted in.
std::string table_svg(const SilhouetteTable& table, int width = 640, int height = 640);

}  // namespace wbst
