#include "wbst/silhouette.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "wbst/errors.hpp"
#include "wbst/parallel.hpp"

namespace wbst {

SilhouetteTable::SilhouetteTable(int depth, std::vector<double> heap_keys)
    : depth_(depth), keys_(std::move(heap_keys)) {
  if (depth < 1 || depth > max_table_depth) throw InvalidInput("table depth must be in [1,24]");
  if (keys_.size() != (std::size_t{1} << depth) - 1) {
    throw InvalidInput("table needs 2^depth - 1 keys");
  }
}

double SilhouetteTable::value_along(const DyadicPath& x, int level) const {
  if (level < 0 || level >= depth_) throw InvalidInput("value_along: level outside the table");
  std::size_t h = 1;
  for (int j = 1; j <= level; ++j) h = 2 * h + static_cast<std::size_t>(x.bit(j));
  return heap_key(h);
}

std::vector<double> SilhouetteTable::in_order() const {
  std::vector<double> out;
  out.reserve(keys_.size());
  // Iterative in-order walk over heap indices.
  std::vector<std::size_t> stack;
  std::size_t h = 1;
  while (h <= keys_.size() || !stack.empty()) {
    while (h <= keys_.size()) {
      stack.push_back(h);
      h *= 2;
    }
    h = stack.back();
    stack.pop_back();
    out.push_back(heap_key(h));
    h = 2 * h + 1;
  }
  return out;
}

std::vector<double> SilhouetteTable::increment_sups() const {
  std::vector<double> sups(static_cast<std::size_t>(depth_ - 1), 0.0);
  for (int j = 1; j < depth_; ++j) {
    double& s = sups[static_cast<std::size_t>(j - 1)];
    for (std::size_t h = std::size_t{1} << j; h < (std::size_t{1} << (j + 1)); ++h) {
      s = std::max(s, std::abs(heap_key(h) - heap_key(h / 2)));
    }
  }
  return sups;
}

namespace {

void fill_table(std::vector<double>& keys, const CounterRng& rng, std::size_t h, double a,
                double b) {
  if (h > keys.size()) return;
  const double key = a + rng.uniform_at(h - 1) * (b - a);
  keys[h - 1] = key;
  fill_table(keys, rng, 2 * h, a, key);
  fill_table(keys, rng, 2 * h + 1, key, b);
}

// One splitting step: the new key, uniform on (a, b), and the side x takes.
template <class Uniform, class Bit>
double walk(int k, Uniform&& uniform, Bit&& bit, std::vector<double>* trace) {
  double a = 0.0, b = 1.0;
  double key = a + uniform() * (b - a);
  if (trace) trace->push_back(key);
  for (int j = 1; j <= k; ++j) {
    if (bit(j)) {
      a = key;
    } else {
      b = key;
    }
    key = a + uniform() * (b - a);
    if (trace) trace->push_back(key);
  }
  return key;
}

}  // namespace

SilhouetteTable generate_table(int depth, std::uint64_t seed, std::uint64_t replicate) {
  if (depth < 1 || depth > max_table_depth) throw InvalidInput("table depth must be in [1,24]");
  std::vector<double> keys((std::size_t{1} << depth) - 1);
  const CounterRng rng(seed, replicate, streams::silhouette);
  fill_table(keys, rng, 1, 0.0, 1.0);
  return SilhouetteTable(depth, std::move(keys));
}

std::vector<double> xi_along_path(const DyadicPath& x, int k, CounterRng& rng) {
  if (k < 0) throw InvalidInput("xi_along_path: k must be nonnegative");
  std::vector<double> trace;
  trace.reserve(static_cast<std::size_t>(k) + 1);
  walk(k, [&] { return rng.uniform(); }, [&](int j) { return x.bit(static_cast<std::size_t>(j)); },
       &trace);
  return trace;
}

std::vector<double> xi_along_path(const DyadicPath& x, int k, std::uint64_t seed,
                                  std::uint64_t replicate) {
  CounterRng rng(seed, replicate, streams::path);
  return xi_along_path(x, k, rng);
}

std::vector<double> xi_along_path_reflected(const DyadicPath& x, int k, CounterRng& rng) {
  if (k < 0) throw InvalidInput("xi_along_path: k must be nonnegative");
  std::vector<double> trace;
  trace.reserve(static_cast<std::size_t>(k) + 1);
  walk(k, [&] { return 1.0 - rng.uniform(); },
       [&](int j) { return x.bit(static_cast<std::size_t>(j)); }, &trace);
  return trace;
}

double xi_level(const DyadicPath& x, int k, CounterRng& rng) {
  return walk(k, [&] { return rng.uniform(); },
              [&](int j) { return x.bit(static_cast<std::size_t>(j)); }, nullptr);
}

double xi_at_uniform_point(int k, CounterRng& rng) {
  // Bits come from a separate draw so that the key uniforms stay aligned.
  std::uint64_t bits = 0;
  int left = 0;
  return walk(
      k, [&] { return rng.uniform(); },
      [&](int) {
        if (left == 0) {
          bits = rng();
          left = 64;
        }
        const bool b = (bits & 1U) != 0;
        bits >>= 1;
        --left;
        return b;
      },
      nullptr);
}

int levels_for_tolerance(double tol) {
  if (!(tol > 0.0)) throw InvalidInput("tolerance must be positive");
  int k = 0;
  double bound = 2.0;
  while (bound >= tol && k < xi_level_cap) {
    ++k;
    bound *= increment_ratio;
  }
  return k;
}

XiLimit xi_limit(const DyadicPath& x, double tol, CounterRng& rng) {
  XiLimit out;
  out.levels = levels_for_tolerance(tol);
  out.bound = 2.0 * std::pow(increment_ratio, out.levels);
  out.capped = out.bound >= tol;
  out.value = xi_level(x, out.levels, rng);
  return out;
}

XiLimit xi_limit(const DyadicPath& x, double tol, std::uint64_t seed, std::uint64_t replicate) {
  CounterRng rng(seed, replicate, streams::path);
  return xi_limit(x, tol, rng);
}

std::vector<ResampleReport> fixpoint_resample_check(std::span<const double> t_grid,
                                                    std::size_t replicates, std::uint64_t seed,
                                                    double tol, double alpha) {
  const int k = levels_for_tolerance(tol);
  std::vector<ResampleReport> out;
  for (std::size_t g = 0; g < t_grid.size(); ++g) {
    const double t = t_grid[g];
    if (!(t > 0.0 && t < 1.0)) throw InvalidInput("fixpoint_resample_check: t must lie in (0,1)");
    const auto direct_path = DyadicPath::from_value(t);
    const auto inner_path = DyadicPath::from_value(t < 0.5 ? 2.0 * t : 2.0 * t - 1.0);
    const auto direct = parallel_map<double>(replicates, [&](std::size_t r) {
      CounterRng rng(seed, r, streams::path + 16 * g);
      return xi_level(direct_path, k, rng);
    });
    const auto rhs = parallel_map<double>(replicates, [&](std::size_t r) {
      CounterRng rng(seed, r, streams::resample + 16 * g);
      const double u = rng.uniform();
      const double inner = xi_level(inner_path, k, rng);
      return t < 0.5 ? u * inner : (1.0 - u) * inner + u;
    });
    out.push_back({t, ks_two_sample(direct, rhs, alpha)});
  }
  return out;
}

namespace {

struct DensityAccumulator {
  std::vector<StreamingMoments> points;
  std::size_t clipped = 0;

  void merge(const DensityAccumulator& other) {
    for (std::size_t i = 0; i < points.size(); ++i) points[i].merge(other.points[i]);
    clipped += other.clipped;
  }
};

}  // namespace

double XiMarginalEstimate::integral() const {
  // Endpoints are not estimated; extend the grid flat to 0 and 1.
  if (x.empty()) return 0.0;
  double sum = density.front() * x.front() + density.back() * (1.0 - x.back());
  for (std::size_t i = 1; i < x.size(); ++i) {
    sum += 0.5 * (density[i] + density[i - 1]) * (x[i] - x[i - 1]);
  }
  return sum;
}

XiMarginalEstimate estimate_density(double t, std::span<const double> x_grid,
                                    std::size_t replicates, std::uint64_t seed, double tol) {
  if (!(t > 0.0 && t < 1.0)) throw InvalidInput("estimate_density: t must lie in (0,1)");
  if (replicates == 0) throw InvalidInput("estimate_density: replicates must be positive");
  for (double x : x_grid) {
    if (!(x > 0.0 && x < 1.0)) throw InvalidInput("estimate_density: x must lie in (0,1)");
  }
  const bool mirrored = t > 0.5;
  const double s = mirrored ? 1.0 - t : t;
  std::vector<double> grid(x_grid.begin(), x_grid.end());
  if (mirrored) {
    for (double& x : grid) x = 1.0 - x;
  }
  const int k = levels_for_tolerance(tol);
  const auto path = DyadicPath::from_value(2.0 * s);

  DensityAccumulator init;
  init.points.resize(grid.size());
  const auto acc = block_accumulate(replicates, init, [&](DensityAccumulator& a, std::size_t r) {
    CounterRng rng(seed, r, streams::silhouette);
    double xi = xi_level(path, k, rng);
    if (xi < density_clip) {
      xi = density_clip;
      ++a.clipped;
    }
    for (std::size_t i = 0; i < grid.size(); ++i) {
      a.points[i].add(xi >= grid[i] ? 1.0 / xi : 0.0);
    }
  });

  XiMarginalEstimate est;
  est.t = t;
  est.x.assign(x_grid.begin(), x_grid.end());
  est.replicates = replicates;
  est.clipped = acc.clipped;
  est.levels = k;
  for (const auto& m : acc.points) {
    est.density.push_back(m.mean());
    est.standard_error.push_back(m.standard_error());
  }
  return est;
}

double weighted_height(const LabelledTree& tree) {
  if (tree.empty()) throw InvalidInput("weighted_height: empty tree");
  const auto w = tree.weighted_depths();
  return *std::max_element(w.begin(), w.end());
}

std::string table_csv(const SilhouetteTable& table) {
  std::ostringstream out;
  out.precision(17);
  out << "index,x,xi\r\n";
  const auto values = table.in_order();
  const double scale = std::ldexp(1.0, -table.depth());
  for (std::size_t l = 0; l < values.size(); ++l) {
    out << l + 1 << ',' << static_cast<double>(l + 1) * scale << ',' << values[l] << "\r\n";
  }
  return out.str();
}

std::string density_csv(const XiMarginalEstimate& e) {
  std::ostringstream out;
  out.precision(17);
  out << "t,x,estimate,stderr,replicates\r\n";
  for (std::size_t i = 0; i < e.x.size(); ++i) {
    out << e.t << ',' << e.x[i] << ',' << e.density[i] << ',' << e.standard_error[i] << ','
        << e.replicates << "\r\n";
  }
  return out.str();
}

std::string table_svg(const SilhouetteTable& table, int width, int height) {
  const auto values = table.in_order();
  const double step = static_cast<double>(width) / static_cast<double>(values.size() + 1);
  std::ostringstream out;
  out.precision(6);
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\""
      << height << "\" viewBox=\"0 0 " << width << ' ' << height << "\">\n";
  out << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  out << "<line x1=\"0\" y1=\"" << height << "\" x2=\"" << width
      << "\" y2=\"0\" stroke=\"gray\" stroke-dasharray=\"4 4\"/>\n";
  // One horizontal run per dyadic interval and one vertical jump per key.
  out << "<path fill=\"none\" stroke=\"black\" stroke-width=\"1\" d=\"M0 " << height;
  for (std::size_t l = 0; l < values.size(); ++l) {
    out << " H" << step * static_cast<double>(l + 1) << " V"
        << static_cast<double>(height) * (1.0 - values[l]);
  }
  out << " H" << width << "\"/>\n</svg>\n";
  return out.str();
}

}  // namespace wbst
