#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace wbst {

// Single-pass mean/variance (Welford), mergeable (Chan et al.).
class StreamingMoments {
 public:
  void add(double x) {
    ++count_;
    const double delta = x - mean_;
    mean_ += delta / static_cast<double>(count_);
    m2_ += delta * (x - mean_);
  }

  void merge(const StreamingMoments& other);

  std::size_t count() const { return count_; }
  double mean() const { return mean_; }
  double m2() const { return m2_; }
  // Sample variance, m2 / (count - 1); zero below two observations.
  double variance() const;
  double stddev() const;
  double standard_error() const;

 private:
  std::size_t count_ = 0;
  double mean_ = 0.0;
  double m2_ = 0.0;
};

// Mean vector and co-moment matrix of a d-dimensional stream.
class CovarianceAccumulator {
 public:
  explicit CovarianceAccumulator(std::size_t dim);

  void add(std::span<const double> x);
  void merge(const CovarianceAccumulator& other);

  std::size_t dim() const { return dim_; }
  std::size_t count() const { return count_; }
  double mean(std::size_t i) const { return mean_[i]; }
  double covariance(std::size_t i, std::size_t j) const;
  double correlation(std::size_t i, std::size_t j) const;

 private:
  std::size_t dim_;
  std::size_t count_ = 0;
  std::vector<double> mean_;
  std::vector<double> comoment_;  // dim x dim, row-major
};

struct TestReport {
  std::string name;
  double statistic = 0.0;
  double critical = 0.0;
  double p_value = 1.0;
  double alpha = 1e-3;
  std::size_t m = 0;  // first sample size
  std::size_t n = 0;  // second sample size (0 for one-sample tests)
  bool reject = false;
};

inline constexpr double default_level = 1e-3;

// c(alpha) = sqrt(-ln(alpha / 2) / 2); c(0.001) = 1.9495...
double ks_critical_coefficient(double alpha);
// Asymptotic Kolmogorov tail P(K > lambda).
double kolmogorov_tail(double lambda);

TestReport ks_one_sample(std::span<const double> samples,
                         const std::function<double(double)>& cdf,
                         double alpha = default_level);
TestReport ks_two_sample(std::span<const double> a, std::span<const double> b,
                         double alpha = default_level);

double pearson_correlation(std::span<const double> x, std::span<const double> y);

struct CovarianceEstimate {
  double value = 0.0;
  double standard_error = 0.0;
};

// Sample covariance with a delta-method standard error.
CovarianceEstimate sample_covariance(std::span<const double> x, std::span<const double> y);

struct ScalingFit {
  double slope = 0.0;
  double slope_stderr = 0.0;
  double intercept = 0.0;
  std::size_t points = 0;
};

// Least-squares slope of log(statistic) against log(n). Needs at least three
// distinct n spanning two decades and positive statistics.
ScalingFit scaling_regression(std::span<const std::pair<double, double>> n_and_statistic);

}  // namespace wbst
