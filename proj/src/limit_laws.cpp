#include "wbst/limit_laws.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "wbst/errors.hpp"
#include "wbst/quadrature.hpp"

namespace wbst {

double dickman_draw(CounterRng& rng, double epsilon) {
  double sum = 0.0;
  double product = 1.0;
  do {
    product *= rng.uniform();
    sum += product;
  } while (product >= epsilon);
  return sum;
}

std::vector<double> dickman_sample(std::size_t count, std::uint64_t seed, double epsilon) {
  if (count == 0) throw InvalidInput("dickman_sample: count must be positive");
  std::vector<double> out(count);
#pragma omp parallel for schedule(static)
  for (std::size_t i = 0; i < count; ++i) {
    CounterRng rng(seed, i, streams::dickman);
    out[i] = dickman_draw(rng, epsilon);
  }
  return out;
}

std::complex<double> dickman_charfn(double lambda) {
  if (std::abs(lambda) > 100.0) throw InvalidInput("dickman_charfn: |lambda| must be <= 100");
  if (lambda == 0.0) return 1.0;
  const auto integrand = [lambda](double x) -> std::complex<double> {
    const double t = lambda * x;
    // (cos t - 1) / x written as -2 sin^2(t/2) / x to avoid cancellation.
    const double s = std::sin(0.5 * t);
    return {-2.0 * s * s / x, std::sin(t) / x};
  };
  return std::exp(integrate_complex(integrand, 0.0, 1.0, 1e-14));
}

double arcsine_cdf(double x) {
  if (!(x >= 0.0 && x <= 1.0)) throw DomainError("arcsine_cdf: x must lie in [0,1]");
  return 2.0 / std::numbers::pi * std::asin(std::sqrt(x));
}

double arcsine_density(double x) {
  if (!(x > 0.0 && x < 1.0)) throw DomainError("arcsine_density: x must lie in (0,1)");
  return 1.0 / (std::numbers::pi * std::sqrt(x * (1.0 - x)));
}

std::vector<double> arcsine_sample(std::size_t count, std::uint64_t seed) {
  std::vector<double> out(count);
#pragma omp parallel for schedule(static)
  for (std::size_t i = 0; i < count; ++i) {
    CounterRng rng(seed, i, streams::arcsine);
    const double s = std::sin(0.5 * std::numbers::pi * rng.uniform());
    out[i] = s * s;
  }
  return out;
}

std::vector<double> arcsine_fixed_point_sample(std::size_t count, std::uint64_t seed,
                                               int iterations) {
  std::vector<double> out(count);
#pragma omp parallel for schedule(static)
  for (std::size_t i = 0; i < count; ++i) {
    CounterRng rng(seed, i, streams::arcsine + 100);
    double y = 0.5;
    for (int it = 0; it < iterations; ++it) {
      const double u = rng.uniform();
      const bool a = (rng() >> 63) != 0;
      y = u * y + (a ? 1.0 - u : 0.0);
    }
    out[i] = y;
  }
  return out;
}

double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::numbers::sqrt2); }

double ReferenceLaw::cdf(double x) const {
  switch (kind_) {
    case LawKind::normal:
      return normal_cdf(x);
    case LawKind::uniform:
      return std::clamp(x, 0.0, 1.0);
    case LawKind::arcsine:
      return arcsine_cdf(std::clamp(x, 0.0, 1.0));
    case LawKind::dickman:
      break;
  }
  throw DomainError("ReferenceLaw: no closed-form CDF for the Dickman law");
}

std::complex<double> ReferenceLaw::charfn(double lambda) const {
  using namespace std::complex_literals;
  switch (kind_) {
    case LawKind::normal:
      return std::exp(-0.5 * lambda * lambda);
    case LawKind::uniform:
      if (std::abs(lambda) < 1e-8) return std::exp(0.5i * lambda);
      return (std::exp(1i * lambda) - 1.0) / (1i * lambda);
    case LawKind::arcsine:
      return std::exp(0.5i * lambda) * std::cyl_bessel_j(0.0, std::abs(0.5 * lambda));
    case LawKind::dickman:
      return dickman_charfn(lambda);
  }
  throw DomainError("ReferenceLaw: unknown kind");
}

const char* to_string(LawKind kind) {
  switch (kind) {
    case LawKind::normal:
      return "normal";
    case LawKind::arcsine:
      return "arcsine";
    case LawKind::uniform:
      return "uniform";
    case LawKind::dickman:
      return "dickman";
  }
  return "?";
}

LawKind law_from_string(const std::string& name) {
  if (name == "normal") return LawKind::normal;
  if (name == "arcsine") return LawKind::arcsine;
  if (name == "uniform") return LawKind::uniform;
  if (name == "dickman") return LawKind::dickman;
  throw InvalidInput("unknown reference law: " + name);
}

std::complex<double> empirical_charfn(std::span<const double> samples, double lambda) {
  if (samples.empty()) throw InvalidInput("empirical_charfn: empty sample");
  double re = 0.0, im = 0.0;
  for (double x : samples) {
    re += std::cos(lambda * x);
    im += std::sin(lambda * x);
  }
  const double n = static_cast<double>(samples.size());
  return {re / n, im / n};
}

double empirical_charfn_distance(std::span<const double> samples, const ReferenceLaw& law,
                                 std::span<const double> lambda_grid) {
  if (samples.empty() || lambda_grid.empty()) {
    throw InvalidInput("empirical_charfn_distance: empty sample or grid");
  }
  std::vector<std::complex<double>> reference(lambda_grid.size());
  for (std::size_t g = 0; g < lambda_grid.size(); ++g) reference[g] = law.charfn(lambda_grid[g]);
  std::vector<double> gaps(lambda_grid.size());
#pragma omp parallel for schedule(dynamic)
  for (std::size_t g = 0; g < lambda_grid.size(); ++g) {
    gaps[g] = std::abs(empirical_charfn(samples, lambda_grid[g]) - reference[g]);
  }
  double sup = 0.0;
  for (double g : gaps) sup = std::max(sup, g);
  return sup;
}

std::vector<double> linear_grid(double lo, double hi, std::size_t points) {
  if (points < 2) return {lo};
  std::vector<double> g(points);
  for (std::size_t i = 0; i < points; ++i) {
    g[i] = lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(points - 1);
  }
  return g;
}

}  // namespace wbst
