#include "doctest.h"

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "wbst/errors.hpp"
#include "wbst/limit_laws.hpp"
#include "wbst/silhouette.hpp"
#include "wbst/statlab.hpp"

using namespace wbst;

TEST_CASE("table keys nest inside their parent intervals") {
  const auto table = generate_table(8, 17);
  CHECK(table.size() == 255);
  const auto order = table.in_order();
  CHECK(std::is_sorted(order.begin(), order.end()));
  CHECK(order.front() > 0.0);
  CHECK(order.back() < 1.0);
  for (std::size_t h = 2; h <= table.size(); ++h) {
    const double parent = table.heap_key(h / 2);
    if (h % 2 == 0) {
      CHECK(table.heap_key(h) < parent);
    } else {
      CHECK(table.heap_key(h) > parent);
    }
  }
}

TEST_CASE("in-order keys are the values of Xi at dyadic points") {
  const int k = 7;
  const auto table = generate_table(k, 3);
  const auto order = table.in_order();
  for (std::size_t l = 1; l < (std::size_t{1} << k); ++l) {
    const auto x = DyadicPath::from_value(static_cast<double>(l) / std::ldexp(1.0, k));
    int tz = 0;
    while (((l >> tz) & 1U) == 0) ++tz;
    CHECK(table.value_along(x, k - tz - 1) == order[l - 1]);
  }
}

TEST_CASE("tables are reproducible and replicate-dependent") {
  CHECK(generate_table(6, 1, 2).in_order() == generate_table(6, 1, 2).in_order());
  CHECK(generate_table(6, 1, 2).in_order() != generate_table(6, 1, 3).in_order());
  CHECK_THROWS_AS(generate_table(0, 1), InvalidInput);
  CHECK_THROWS_AS(generate_table(max_table_depth + 1, 1), InvalidInput);
}

TEST_CASE("path walk has k + 1 levels and shrinking steps on average") {
  const auto x = DyadicPath::from_value(0.3);
  const auto trace = xi_along_path(x, 10, 5);
  CHECK(trace.size() == 11);
  StreamingMoments first, last;
  for (std::uint64_t r = 0; r < 20000; ++r) {
    const auto t = xi_along_path(x, 12, 5, r);
    first.add(std::abs(t[1] - t[0]));
    last.add(std::abs(t[12] - t[11]));
  }
  CHECK(last.mean() < first.mean());
  CHECK(last.mean() <= 2.0 * std::pow(increment_ratio, 12));
}

TEST_CASE("reflected walk mirrors the plain walk") {
  const auto x = DyadicPath::from_bits("011010");
  CounterRng a(4, 1), b(4, 1);
  const auto refl = xi_along_path_reflected(x, 15, a);
  const auto plain = xi_along_path(x.mirrored(), 15, b);
  for (std::size_t i = 0; i < refl.size(); ++i) CHECK(refl[i] + plain[i] == doctest::Approx(1.0));
}

TEST_CASE("first level is a uniform key") {
  std::vector<double> xs;
  for (std::uint64_t r = 0; r < 20000; ++r) {
    CounterRng rng(6, r);
    xs.push_back(xi_level(DyadicPath::zeros(), 0, rng));
  }
  CHECK_FALSE(ks_one_sample(xs, [](double v) { return v; }).reject);
}

TEST_CASE("levels for a tolerance") {
  CHECK(levels_for_tolerance(1e-4) == 49);
  CHECK(2.0 * std::pow(increment_ratio, 49) < 1e-4);
  CHECK(2.0 * std::pow(increment_ratio, 48) >= 1e-4);
  CHECK(levels_for_tolerance(1e-300) == xi_level_cap);
  CHECK_THROWS_AS(levels_for_tolerance(0.0), InvalidInput);
  const auto lim = xi_limit(DyadicPath::from_value(0.5), 1e-4, 1);
  CHECK(lim.levels == 49);
  CHECK_FALSE(lim.capped);
  CHECK(lim.value > 0.0);
  CHECK(lim.value < 1.0);
}

TEST_CASE("Xi at a uniform point is arcsine") {
  std::vector<double> xs;
  for (std::uint64_t r = 0; r < 20000; ++r) {
    CounterRng rng(7, r);
    xs.push_back(xi_at_uniform_point(40, rng));
  }
  CHECK_FALSE(ks_one_sample(xs, arcsine_cdf).reject);
}

TEST_CASE("fixed-point resampling is consistent") {
  const std::vector<double> t = {0.25, 0.6};
  for (const auto& rep : fixpoint_resample_check(t, 5000, 9)) CHECK_FALSE(rep.test.reject);
}

TEST_CASE("density estimate at t = 1/3") {
  const std::vector<double> grid = {0.1, 0.3, 0.5, 0.7, 0.9};
  const auto est = estimate_density(1.0 / 3.0, grid, 100000, 2);
  for (std::size_t i = 0; i < grid.size(); ++i) {
    CHECK(std::abs(est.density[i] - 2.0 * (1.0 - grid[i])) < 5.0 * est.standard_error[i] + 0.01);
  }
  CHECK_THROWS_AS(estimate_density(0.0, grid, 10, 1), InvalidInput);
}

TEST_CASE("density integrates to one") {
  const auto grid = linear_grid(0.01, 0.99, 99);
  const auto est = estimate_density(0.2, grid, 50000, 3);
  CHECK(est.integral() == doctest::Approx(1.0).epsilon(0.03));
  // Mirror symmetry for t > 1/2.
  const auto mirrored = estimate_density(0.8, grid, 50000, 3);
  for (std::size_t i = 0; i < grid.size(); ++i) {
    CHECK(mirrored.density[i] == doctest::Approx(est.density[grid.size() - 1 - i]).epsilon(1e-9));
  }
}

TEST_CASE("table renderings") {
  const auto table = generate_table(3, 1);
  const auto csv = table_csv(table);
  CHECK(csv.rfind("index,x,xi\r\n", 0) == 0);
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 8);
  const auto svg = table_svg(table);
  CHECK(svg.find("<svg") != std::string::npos);
  CHECK(svg.find("</svg>") != std::string::npos);
}
