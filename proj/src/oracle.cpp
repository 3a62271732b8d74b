#include "wbst/oracle.hpp"

#include <algorithm>
#include <bit>
#include <numeric>
#include <sstream>

#include "wbst/errors.hpp"

namespace wbst {

std::string to_string(const Rational& r) {
  if (r.denominator() == 1) return to_string(r.numerator());
  return to_string(r.numerator()) + "/" + to_string(r.denominator());
}

double to_double(const Rational& r) {
  return static_cast<double>(r.numerator()) / static_cast<double>(r.denominator());
}

namespace {

struct Sums {
  Int128 s1 = 0;
  Int128 s2 = 0;
  void add(Int128 x) {
    s1 += x;
    s2 += x * x;
  }
  void merge(const Sums& o) {
    s1 += o.s1;
    s2 += o.s2;
  }
  ExactStat stat(Int128 count) const {
    const Rational mean(s1, count);
    return {mean, Rational(s2, count) - mean * mean};
  }
};

struct Tally {
  int n = 0;
  Int128 count = 0;
  std::vector<Sums> depth, weighted, depth_bar, weighted_bar;
  Sums path, wiener, wpath, wwiener, last_d, last_w;
  std::vector<Int128> a, b, tail, joint_masks;

  explicit Tally(int n_)
      : n(n_),
        depth(n_),
        weighted(n_),
        depth_bar(n_),
        weighted_bar(n_),
        a(static_cast<std::size_t>(n_ * n_)),
        b(static_cast<std::size_t>(n_ * n_)),
        tail(static_cast<std::size_t>(n_ * (n_ + 1))),
        joint_masks(static_cast<std::size_t>(n_) << n_) {}

  void merge(const Tally& o) {
    count += o.count;
    for (int k = 0; k < n; ++k) {
      depth[k].merge(o.depth[k]);
      weighted[k].merge(o.weighted[k]);
      depth_bar[k].merge(o.depth_bar[k]);
      weighted_bar[k].merge(o.weighted_bar[k]);
    }
    path.merge(o.path);
    wiener.merge(o.wiener);
    wpath.merge(o.wpath);
    wwiener.merge(o.wwiener);
    last_d.merge(o.last_d);
    last_w.merge(o.last_w);
    for (std::size_t i = 0; i < a.size(); ++i) a[i] += o.a[i];
    for (std::size_t i = 0; i < b.size(); ++i) b[i] += o.b[i];
    for (std::size_t i = 0; i < tail.size(); ++i) tail[i] += o.tail[i];
    for (std::size_t i = 0; i < joint_masks.size(); ++i) joint_masks[i] += o.joint_masks[i];
  }

  // order[i] is the (i+1)-th inserted label.
  void observe(const std::array<int, oracle_max_n>& order) {
    ++count;
    // anc[k]: bit j-1 set iff j is an ancestor of k or k itself.
    std::array<unsigned, oracle_max_n + 2> anc{};
    std::array<int, oracle_max_n + 1> left{}, right{};
    const int root = order[0];
    anc[static_cast<std::size_t>(root)] = 1U << (root - 1);
    for (int i = 1; i < n; ++i) {
      const int key = order[static_cast<std::size_t>(i)];
      int v = root;
      for (;;) {
        int& child = key <= v ? left[static_cast<std::size_t>(v)] : right[static_cast<std::size_t>(v)];
        if (child == 0) {
          child = key;
          break;
        }
        v = child;
      }
      anc[static_cast<std::size_t>(key)] = anc[static_cast<std::size_t>(v)] | (1U << (key - 1));
    }
    const auto label_sum = [](unsigned mask) {
      Int128 s = 0;
      for (; mask != 0; mask &= mask - 1) s += std::countr_zero(mask) + 1;
      return s;
    };
    std::array<int, oracle_max_n + 1> d{};
    std::array<Int128, oracle_max_n + 1> w{};
    Int128 p = 0, wp = 0;
    for (int k = 1; k <= n; ++k) {
      const unsigned mk = anc[static_cast<std::size_t>(k)];
      d[static_cast<std::size_t>(k)] = std::popcount(mk) - 1;
      w[static_cast<std::size_t>(k)] = label_sum(mk);
      depth[k - 1].add(d[static_cast<std::size_t>(k)]);
      weighted[k - 1].add(w[static_cast<std::size_t>(k)]);
      p += d[static_cast<std::size_t>(k)];
      wp += w[static_cast<std::size_t>(k)];
      for (int j = 1; j <= n; ++j) {
        if (mk >> (j - 1) & 1U) ++a[static_cast<std::size_t>((j - 1) * n + (k - 1))];
      }
      // B_jk: A_{j,k-1} left of k, A_{j,k+1} right of k, sure at j = k.
      const unsigned below = (1U << (k - 1)) - 1;
      const unsigned above = ~((1U << k) - 1);
      unsigned mb = 1U << (k - 1);
      if (k > 1) mb |= anc[static_cast<std::size_t>(k - 1)] & below;
      if (k < n) mb |= anc[static_cast<std::size_t>(k + 1)] & above;
      mb &= (1U << n) - 1;
      depth_bar[k - 1].add(std::popcount(mb) - 1);
      weighted_bar[k - 1].add(label_sum(mb));
      for (int j = 1; j <= n; ++j) {
        if (mb >> (j - 1) & 1U) ++b[static_cast<std::size_t>((j - 1) * n + (k - 1))];
      }
      ++joint_masks[(static_cast<std::size_t>(k - 1) << n) | mb];
      // T^>_k >= l iff k + l lies in the subtree of k.
      for (int l = 0; l <= n - k; ++l) {
        if (anc[static_cast<std::size_t>(k + l)] >> (k - 1) & 1U) {
          ++tail[static_cast<std::size_t>((k - 1) * (n + 1) + l)];
        }
      }
    }
    Int128 wi = 0, wwi = 0;
    for (int i = 1; i <= n; ++i) {
      wwi += i;  // the node with itself
      for (int j = i + 1; j <= n; ++j) {
        const unsigned common = anc[static_cast<std::size_t>(i)] & anc[static_cast<std::size_t>(j)];
        // The deepest common ancestor has the largest ancestor set among them.
        int lca = 0;
        for (unsigned m = common; m != 0; m &= m - 1) {
          const int c = std::countr_zero(m) + 1;
          if (lca == 0 || d[static_cast<std::size_t>(c)] > d[static_cast<std::size_t>(lca)]) lca = c;
        }
        wi += d[static_cast<std::size_t>(i)] + d[static_cast<std::size_t>(j)] -
              2 * d[static_cast<std::size_t>(lca)];
        wwi += w[static_cast<std::size_t>(i)] + w[static_cast<std::size_t>(j)] -
               2 * w[static_cast<std::size_t>(lca)] + lca;
      }
    }
    path.add(p);
    wpath.add(wp);
    wiener.add(wi);
    wwiener.add(wwi);
    const int last = order[static_cast<std::size_t>(n - 1)];
    last_d.add(d[static_cast<std::size_t>(last)]);
    last_w.add(w[static_cast<std::size_t>(last)]);
  }
};

}  // namespace

Rational ExactMoments::prob_a(int j, int k) const {
  return Rational(a_counts[static_cast<std::size_t>((j - 1) * n + (k - 1))], permutations);
}

Rational ExactMoments::prob_b(int j, int k) const {
  return Rational(b_counts[static_cast<std::size_t>((j - 1) * n + (k - 1))], permutations);
}

Rational ExactMoments::prob_tail(int k, int l) const {
  return Rational(tail_counts[static_cast<std::size_t>((k - 1) * (n + 1) + l)], permutations);
}

Rational ExactMoments::prob_joint_b(int k, unsigned subset) const {
  return Rational(joint_b[(static_cast<std::size_t>(k - 1) << n) | subset], permutations);
}

ExactMoments enumerate(int n) {
  if (n < 1 || n > oracle_max_n) throw InvalidInput("oracle: n must be in [1,8]");
  std::vector<Tally> partial(static_cast<std::size_t>(n), Tally(n));
#pragma omp parallel for schedule(dynamic)
  for (int root = 1; root <= n; ++root) {
    Tally& t = partial[static_cast<std::size_t>(root - 1)];
    std::array<int, oracle_max_n> order{};
    order[0] = root;
    int fill = 1;
    for (int v = 1; v <= n; ++v) {
      if (v != root) order[static_cast<std::size_t>(fill++)] = v;
    }
    // Heap's algorithm (iterative) on order[1..n-1].
    const int m = n - 1;
    std::array<int, oracle_max_n> c{};
    t.observe(order);
    int i = 0;
    while (i < m) {
      if (c[static_cast<std::size_t>(i)] < i) {
        const int swap_with = (i % 2 == 0) ? 0 : c[static_cast<std::size_t>(i)];
        std::swap(order[static_cast<std::size_t>(1 + swap_with)],
                  order[static_cast<std::size_t>(1 + i)]);
        t.observe(order);
        ++c[static_cast<std::size_t>(i)];
        i = 0;
      } else {
        c[static_cast<std::size_t>(i)] = 0;
        ++i;
      }
    }
  }
  Tally total(n);
  for (const auto& p : partial) total.merge(p);

  ExactMoments m;
  m.n = n;
  m.permutations = total.count;
  for (int k = 0; k < n; ++k) {
    m.depth.push_back(total.depth[k].stat(total.count));
    m.weighted_depth.push_back(total.weighted[k].stat(total.count));
    m.depth_bar.push_back(total.depth_bar[k].stat(total.count));
    m.weighted_depth_bar.push_back(total.weighted_bar[k].stat(total.count));
  }
  m.path_length = total.path.stat(total.count);
  m.wiener = total.wiener.stat(total.count);
  m.weighted_path_length = total.wpath.stat(total.count);
  m.weighted_wiener = total.wwiener.stat(total.count);
  m.last_depth = total.last_d.stat(total.count);
  m.last_weighted_depth = total.last_w.stat(total.count);
  m.a_counts = std::move(total.a);
  m.b_counts = std::move(total.b);
  m.tail_counts = std::move(total.tail);
  // Superset sums turn exact-mask counts into "all of S hold" counts.
  m.joint_b = std::move(total.joint_masks);
  const std::size_t subsets = std::size_t{1} << n;
  for (int k = 0; k < n; ++k) {
    Int128* table = m.joint_b.data() + static_cast<std::size_t>(k) * subsets;
    for (int bit = 0; bit < n; ++bit) {
      for (std::size_t s = 0; s < subsets; ++s) {
        if (!(s >> bit & 1U)) table[s] += table[s | (std::size_t{1} << bit)];
      }
    }
  }
  return m;
}

namespace {

void record(OracleCheck& c, bool ok, const std::string& what) {
  ++c.comparisons;
  if (!ok) {
    if (c.failures == 0) c.first_failure = what;
    ++c.failures;
  }
}

std::string at(int j, int k) { return "(j=" + std::to_string(j) + ",k=" + std::to_string(k) + ")"; }

void check_marginals(const ExactMoments& m, OracleCheck& c) {
  for (int k = 1; k <= m.n; ++k) {
    for (int j = 1; j <= m.n; ++j) {
      if (j == k) {
        record(c, m.prob_a(j, k) == Rational(1), "P(A) " + at(j, k) + " = " + to_string(m.prob_a(j, k)));
        record(c, m.prob_b(j, k) == Rational(1), "P(B) " + at(j, k) + " = " + to_string(m.prob_b(j, k)));
        continue;
      }
      const int gap = std::abs(k - j);
      record(c, m.prob_a(j, k) == Rational(1, gap + 1),
             "P(A) " + at(j, k) + " = " + to_string(m.prob_a(j, k)));
      record(c, m.prob_b(j, k) == Rational(1, gap),
             "P(B) " + at(j, k) + " = " + to_string(m.prob_b(j, k)));
    }
  }
}

}  // namespace

OracleCheck event_probability_check(const ExactMoments& m) {
  OracleCheck c{"event_probabilities", m.n, 0, 0, {}};
  check_marginals(m, c);
  return c;
}

OracleCheck lemma1_check(const ExactMoments& m) {
  if (m.n > lemma1_max_n) throw InvalidInput("lemma1_check: n must be <= 7");
  OracleCheck c{"lemma1_independence", m.n, 0, 0, {}};
  check_marginals(m, c);
  const unsigned subsets = 1U << m.n;
  for (int k = 1; k <= m.n; ++k) {
    for (unsigned s = 1; s < subsets; ++s) {
      Rational product = 1;
      for (int j = 1; j <= m.n; ++j) {
        if (s >> (j - 1) & 1U) product *= m.prob_b(j, k);
      }
      record(c, m.prob_joint_b(k, s) == product,
             "k=" + std::to_string(k) + " S=" + std::to_string(s) + ": " +
                 to_string(m.prob_joint_b(k, s)) + " vs " + to_string(product));
    }
  }
  return c;
}

Rational harmonic(int m, int order) {
  Rational h = 0;
  for (int j = 1; j <= m; ++j) h += Rational(1, order == 1 ? j : j * j);
  return h;
}

Rational barred_weighted_depth_mean(int n, int k) {
  const Rational h1 = harmonic(k - 1, 1) + harmonic(n - k, 1);
  return Rational(k) * (h1 - 1) + n + 1;
}

Rational barred_weighted_depth_variance(int n, int k) {
  const Rational h1 = harmonic(k - 1, 1) + harmonic(n - k, 1);
  const Rational h2 = harmonic(k - 1, 2) + harmonic(n - k, 2);
  return Rational(k * k) * (h1 - h2 - 3) + Rational(n * n, 2) + k * n +
         Rational(2 * k) * (harmonic(k - 1, 1) - harmonic(n - k, 1)) - Rational(n, 2) + k + 1;
}

OracleCheck exact_moment_formula_check(const ExactMoments& m) {
  OracleCheck c{"barred_weighted_depth_moments", m.n, 0, 0, {}};
  for (int k = 1; k <= m.n; ++k) {
    const auto& s = m.weighted_depth_bar[static_cast<std::size_t>(k - 1)];
    const Rational e = barred_weighted_depth_mean(m.n, k);
    const Rational v = barred_weighted_depth_variance(m.n, k);
    record(c, s.mean == e, "E k=" + std::to_string(k) + ": " + to_string(s.mean) + " vs " + to_string(e));
    record(c, s.variance == v,
           "Var k=" + std::to_string(k) + ": " + to_string(s.variance) + " vs " + to_string(v));
  }
  return c;
}

OracleCheck subtree_tail_check(const ExactMoments& m) {
  OracleCheck c{"subtree_tail", m.n, 0, 0, {}};
  for (int k = 1; k <= m.n; ++k) {
    for (int l = 0; l <= m.n - k; ++l) {
      record(c, m.prob_tail(k, l) == Rational(1, l + 1),
             "k=" + std::to_string(k) + " l=" + std::to_string(l) + ": " +
                 to_string(m.prob_tail(k, l)));
    }
  }
  return c;
}

OracleCheck reflection_identity_check(const ExactMoments& m) {
  OracleCheck c{"reflection_identity", m.n, 0, 0, {}};
  for (int k = 1; k <= m.n; ++k) {
    const Rational lhs = m.weighted_depth[static_cast<std::size_t>(k - 1)].mean +
                         m.weighted_depth[static_cast<std::size_t>(m.n - k)].mean;
    const Rational rhs = Rational(m.n + 1) * (m.depth[static_cast<std::size_t>(k - 1)].mean + 1);
    record(c, lhs == rhs, "k=" + std::to_string(k) + ": " + to_string(lhs) + " vs " + to_string(rhs));
  }
  return c;
}

std::vector<OracleCheck> run_all_checks(const ExactMoments& m) {
  std::vector<OracleCheck> out{event_probability_check(m)};
  if (m.n <= lemma1_max_n) out.push_back(lemma1_check(m));
  out.push_back(exact_moment_formula_check(m));
  out.push_back(subtree_tail_check(m));
  out.push_back(reflection_identity_check(m));
  return out;
}

namespace {

void stat_rows(std::ostringstream& out, const char* name, int n, int k, const ExactStat& s) {
  out << name << ',' << n << ',' << k << ',' << to_string(s.mean) << ',' << to_double(s.mean)
      << ',' << to_string(s.variance) << ',' << to_double(s.variance) << "\r\n";
}

}  // namespace

std::string moments_csv(const ExactMoments& m) {
  std::ostringstream out;
  out.precision(17);
  out << "statistic,n,k,mean,mean_decimal,variance,variance_decimal\r\n";
  for (int k = 1; k <= m.n; ++k) {
    const auto i = static_cast<std::size_t>(k - 1);
    stat_rows(out, "depth", m.n, k, m.depth[i]);
    stat_rows(out, "weighted_depth", m.n, k, m.weighted_depth[i]);
    stat_rows(out, "depth_bar", m.n, k, m.depth_bar[i]);
    stat_rows(out, "weighted_depth_bar", m.n, k, m.weighted_depth_bar[i]);
  }
  stat_rows(out, "path_length", m.n, 0, m.path_length);
  stat_rows(out, "wiener_index", m.n, 0, m.wiener);
  stat_rows(out, "weighted_path_length", m.n, 0, m.weighted_path_length);
  stat_rows(out, "weighted_wiener_index", m.n, 0, m.weighted_wiener);
  stat_rows(out, "last_depth", m.n, 0, m.last_depth);
  stat_rows(out, "last_weighted_depth", m.n, 0, m.last_weighted_depth);
  return out.str();
}

std::string events_csv(const ExactMoments& m) {
  std::ostringstream out;
  out.precision(17);
  out << "n,j,k,p_a,p_a_decimal,p_b,p_b_decimal\r\n";
  for (int j = 1; j <= m.n; ++j) {
    for (int k = 1; k <= m.n; ++k) {
      out << m.n << ',' << j << ',' << k << ',' << to_string(m.prob_a(j, k)) << ','
          << to_double(m.prob_a(j, k)) << ',' << to_string(m.prob_b(j, k)) << ','
          << to_double(m.prob_b(j, k)) << "\r\n";
    }
  }
  return out.str();
}

}  // namespace wbst
