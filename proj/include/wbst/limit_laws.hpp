#pragma once

#include <complex>
#include <cstdint>
#include <span>
#include <vector>

#include "wbst/rng.hpp"

namespace wbst {

inline constexpr double dickman_epsilon = 1e-15;

// One Dickman variate: sum over j >= 1 of U_1 * ... * U_j, stopped once the
// running product drops below epsilon.
double dickman_draw(CounterRng& rng, double epsilon = dickman_epsilon);
// Sample i uses CounterRng(seed, i, streams::dickman).
std::vector<double> dickman_sample(std::size_t count, std::uint64_t seed,
                                   double epsilon = dickman_epsilon);

// exp(int_0^1 (e^{i lambda x} - 1) / x dx), |lambda| <= 100.
std::complex<double> dickman_charfn(double lambda);

double arcsine_cdf(double x);
double arcsine_density(double x);
// sin^2(pi U / 2), sample i from CounterRng(seed, i, streams::arcsine).
std::vector<double> arcsine_sample(std::size_t count, std::uint64_t seed);
// Iterates Y <- U Y + 1_A (1 - U), P(A) = 1/2, from Y = 1/2.
std::vector<double> arcsine_fixed_point_sample(std::size_t count, std::uint64_t seed,
                                               int iterations = 64);

double normal_cdf(double x);

enum class LawKind { normal, arcsine, uniform, dickman };

class ReferenceLaw {
 public:
  explicit ReferenceLaw(LawKind kind) : kind_(kind) {}

  LawKind kind() const { return kind_; }
  // Throws DomainError for the Dickman law, which has no closed-form CDF here.
  double cdf(double x) const;
  std::complex<double> charfn(double lambda) const;

 private:
  LawKind kind_;
};

const char* to_string(LawKind kind);
LawKind law_from_string(const std::string& name);

std::complex<double> empirical_charfn(std::span<const double> samples, double lambda);

// sup over the grid of |empirical charfn - reference charfn|.
double empirical_charfn_distance(std::span<const double> samples, const ReferenceLaw& law,
                                 std::span<const double> lambda_grid);

std::vector<double> linear_grid(double lo, double hi, std::size_t points);

}  // namespace wbst
