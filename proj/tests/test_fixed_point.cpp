#include "doctest.h"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numbers>
#include <string>

#include <gsl/gsl_integration.h>

#include "json.hpp"
#include "wbst/errors.hpp"
#include "wbst/fixed_point.hpp"

using namespace wbst;

namespace {

// Independent adaptive quadrature with endpoint-singularity handling.
double gsl_integrate(const std::function<double(double)>& f) {
  gsl_integration_workspace* ws = gsl_integration_workspace_alloc(2000);
  gsl_function g;
  g.function = [](double x, void* p) { return (*static_cast<std::function<double(double)>*>(p))(x); };
  g.params = const_cast<std::function<double(double)>*>(&f);
  double result = 0.0, err = 0.0;
  gsl_integration_qags(&g, 0.0, 1.0, 1e-13, 1e-11, 2000, ws, &result, &err);
  gsl_integration_workspace_free(ws);
  return result;
}

// Interior points only; the integrands are bounded with integrable logs.
CoefficientFunctions coeffs(double u) {
  return eval_coefficients(std::clamp(u, 1e-300, 1.0 - 1e-16));
}

}  // namespace

TEST_CASE("coefficients at u = 1/2") {
  const auto cf = eval_coefficients(0.5);
  CHECK(cf.a1(0, 0) == 0.125);
  CHECK(cf.a2(3, 3) == 0.5);
  CHECK(cf.c(3) == doctest::Approx(1.0 - 2.0 * std::log(2.0)));
  CHECK_THROWS_AS(eval_coefficients(0.0), DomainError);
  CHECK_THROWS_AS(eval_coefficients(1.0), DomainError);
}

TEST_CASE("operator norms are the stretch factors") {
  for (double u : {0.1, 0.37, 0.5, 0.9}) {
    const auto cf = eval_coefficients(u);
    CHECK(spectral_radius(cf.a1) == doctest::Approx(u).epsilon(1e-12));
    CHECK(spectral_radius(cf.a2) == doctest::Approx(1.0 - u).epsilon(1e-12));
    CHECK(spectral_norm(cf.a1) >= spectral_radius(cf.a1) - 1e-12);
  }
}

TEST_CASE("contraction") {
  const auto r = contraction_check(199);
  CHECK(std::abs(r.numeric - 2.0 / 3.0) < 1e-10);
  CHECK(r.max_norm_gap < 1e-10);
  CHECK(r.gram_bound < 1.0);
  CHECK(r.gram_bound > r.numeric);
  CHECK(r.holds());
}

TEST_CASE("offset has mean zero") {
  const auto c = integrate_offset();
  for (int i = 0; i < z_dim; ++i) {
    CHECK(std::abs(c(i)) < 1e-10);
    CHECK(std::abs(gsl_integrate([i](double u) { return coeffs(u).c(i); })) < 1e-10);
  }
}

TEST_CASE("second moments satisfy the fixed-point identity under independent quadrature") {
  const auto sys = solve_second_moments();
  CHECK(sys.positive_definite);
  CHECK(sys.residual < 1e-12);
  for (int i = 0; i < z_dim; ++i) {
    for (int j = 0; j < z_dim; ++j) {
      const double rhs = gsl_integrate([&](double u) {
        const auto cf = coeffs(u);
        const Mat4 t = cf.a1 * sys.m * cf.a1.transpose() + cf.a2 * sys.m * cf.a2.transpose() +
                       cf.c * cf.c.transpose();
        return t(i, j);
      });
      CHECK(std::abs(rhs - sys.m(i, j)) < 1e-9);
    }
  }
}

TEST_CASE("limiting constants") {
  constexpr double pi2 = std::numbers::pi * std::numbers::pi;
  const auto sys = solve_second_moments();
  CHECK(std::abs(sys.m(3, 3) - (21.0 - 2.0 * pi2) / 3.0) < 1e-9);
  CHECK(std::abs(sys.m(1, 1) - (20.0 - 2.0 * pi2) / 3.0) < 1e-9);
  CHECK(std::abs(sys.m(2, 2) - (65.0 - 6.0 * pi2) / 36.0) < 1e-9);
  CHECK(std::abs(sys.m(0, 0) - (2413.0 - 240.0 * pi2) / 1440.0) < 1e-9);
  const auto rows = covariance_report(sys);
  REQUIRE(rows.size() == 10);
  for (const auto& r : rows) {
    INFO(r.name);
    CHECK(r.matches);
    CHECK(r.natural_power == r.printed_power);
  }
}

TEST_CASE("constant reports") {
  const auto sys = solve_second_moments();
  const auto rows = covariance_report(sys);
  const auto csv = constants_csv(rows);
  CHECK(csv.find("Cov(wp,ww)") != std::string::npos);
  const auto j = nlohmann::json::parse(
      constants_json(sys, rows, contraction_check(49), integrate_offset()));
  CHECK(j.contains("constants"));
}
