#include "doctest.h"

#include <cmath>
#include <complex>
#include <numbers>
#include <vector>

#include <gsl/gsl_sf_bessel.h>
#include <gsl/gsl_sf_expint.h>

#include "wbst/errors.hpp"
#include "wbst/limit_laws.hpp"
#include "wbst/oracle.hpp"
#include "wbst/statlab.hpp"

using namespace wbst;

namespace {

// exp(Ci(l) - gamma - ln l + i Si(l)) for l > 0, conjugated for l < 0.
std::complex<double> dickman_charfn_gsl(double lambda) {
  if (lambda == 0.0) return 1.0;
  const double l = std::abs(lambda);
  const double re = gsl_sf_Ci(l) - euler_gamma - std::log(l);
  const double im = gsl_sf_Si(l);
  const auto v = std::exp(std::complex<double>(re, im));
  return lambda > 0 ? v : std::conj(v);
}

}  // namespace

TEST_CASE("Dickman characteristic function against sine and cosine integrals") {
  for (double lambda : {-100.0, -37.5, -10.0, -1.0, -0.01, 0.0, 0.3, 1.0, 2.5, 10.0, 64.0, 100.0}) {
    const auto a = dickman_charfn(lambda);
    const auto b = dickman_charfn_gsl(lambda);
    CHECK(std::abs(a - b) < 1e-10);
  }
  CHECK_THROWS_AS(dickman_charfn(101.0), InvalidInput);
}

TEST_CASE("Dickman sampler moments") {
  const auto xs = dickman_sample(200000, 3);
  StreamingMoments m;
  for (double v : xs) m.add(v);
  CHECK(std::abs(m.mean() - 1.0) < 5.0 * m.standard_error());
  CHECK(m.variance() == doctest::Approx(0.5).epsilon(0.03));
  CHECK(dickman_sample(10, 3) == std::vector<double>(xs.begin(), xs.begin() + 10));
}

TEST_CASE("Dickman sampler characteristic function") {
  const auto xs = dickman_sample(100000, 4);
  const auto grid = linear_grid(-10.0, 10.0, 41);
  CHECK(empirical_charfn_distance(xs, ReferenceLaw(LawKind::dickman), grid) < 0.02);
}

TEST_CASE("arcsine law") {
  CHECK(arcsine_cdf(0.5) == doctest::Approx(0.5));
  CHECK(arcsine_cdf(0.0) == 0.0);
  CHECK(arcsine_cdf(1.0) == 1.0);
  CHECK(arcsine_density(0.5) == doctest::Approx(2.0 / std::numbers::pi));
  CHECK_THROWS_AS(arcsine_density(0.0), DomainError);
  CHECK_FALSE(ks_one_sample(arcsine_sample(20000, 1), arcsine_cdf).reject);
  CHECK_FALSE(ks_one_sample(arcsine_fixed_point_sample(20000, 1), arcsine_cdf).reject);
}

TEST_CASE("arcsine characteristic function against the Bessel form") {
  const ReferenceLaw law(LawKind::arcsine);
  for (double lambda : {-7.0, -1.0, 0.0, 0.5, 3.0, 12.0}) {
    const auto expected = std::polar(1.0, lambda / 2.0) * gsl_sf_bessel_J0(std::abs(lambda) / 2.0);
    CHECK(std::abs(law.charfn(lambda) - expected) < 1e-12);
  }
  const auto xs = arcsine_sample(50000, 2);
  CHECK(empirical_charfn_distance(xs, law, linear_grid(-10.0, 10.0, 21)) < 0.03);
}

TEST_CASE("reference laws") {
  CHECK(ReferenceLaw(LawKind::normal).cdf(0.0) == doctest::Approx(0.5));
  CHECK(ReferenceLaw(LawKind::normal).cdf(1.959963984540054) == doctest::Approx(0.975));
  CHECK(ReferenceLaw(LawKind::uniform).cdf(0.25) == 0.25);
  CHECK(std::abs(ReferenceLaw(LawKind::normal).charfn(1.0) - std::exp(-0.5)) < 1e-14);
  CHECK_THROWS_AS(ReferenceLaw(LawKind::dickman).cdf(1.0), DomainError);
  CHECK(law_from_string("arcsine") == LawKind::arcsine);
  CHECK(std::string(to_string(LawKind::dickman)) == "dickman");
  CHECK_THROWS_AS(law_from_string("cauchy"), InvalidInput);
}

TEST_CASE("empirical characteristic function of a point mass") {
  const std::vector<double> xs(10, 2.0);
  const auto v = empirical_charfn(xs, 1.5);
  CHECK(v.real() == doctest::Approx(std::cos(3.0)));
  CHECK(v.imag() == doctest::Approx(std::sin(3.0)));
}

TEST_CASE("linear grid") {
  const auto g = linear_grid(-1.0, 1.0, 5);
  REQUIRE(g.size() == 5);
  CHECK(g.front() == -1.0);
  CHECK(g[2] == doctest::Approx(0.0));
  CHECK(g.back() == 1.0);
}
