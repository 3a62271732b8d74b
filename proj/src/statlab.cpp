#include "wbst/statlab.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "wbst/errors.hpp"

namespace wbst {

void StreamingMoments::merge(const StreamingMoments& other) {
  if (other.count_ == 0) return;
  if (count_ == 0) {
    *this = other;
    return;
  }
  const double na = static_cast<double>(count_);
  const double nb = static_cast<double>(other.count_);
  const double n = na + nb;
  const double delta = other.mean_ - mean_;
  mean_ += delta * nb / n;
  m2_ += other.m2_ + delta * delta * na * nb / n;
  count_ += other.count_;
}

double StreamingMoments::variance() const {
  return count_ < 2 ? 0.0 : m2_ / static_cast<double>(count_ - 1);
}

double StreamingMoments::stddev() const { return std::sqrt(variance()); }

double StreamingMoments::standard_error() const {
  return count_ == 0 ? 0.0 : stddev() / std::sqrt(static_cast<double>(count_));
}

CovarianceAccumulator::CovarianceAccumulator(std::size_t dim)
    : dim_(dim), mean_(dim, 0.0), comoment_(dim * dim, 0.0) {}

void CovarianceAccumulator::add(std::span<const double> x) {
  if (x.size() != dim_) throw InvalidInput("covariance accumulator: dimension mismatch");
  ++count_;
  const double n = static_cast<double>(count_);
  std::vector<double> before(dim_);
  for (std::size_t i = 0; i < dim_; ++i) {
    before[i] = x[i] - mean_[i];
    mean_[i] += before[i] / n;
  }
  for (std::size_t i = 0; i < dim_; ++i) {
    const double after_i = x[i] - mean_[i];
    for (std::size_t j = 0; j < dim_; ++j) comoment_[i * dim_ + j] += after_i * before[j];
  }
}

void CovarianceAccumulator::merge(const CovarianceAccumulator& other) {
  if (other.dim_ != dim_) throw InvalidInput("covariance accumulator: dimension mismatch");
  if (other.count_ == 0) return;
  if (count_ == 0) {
    *this = other;
    return;
  }
  const double na = static_cast<double>(count_);
  const double nb = static_cast<double>(other.count_);
  const double n = na + nb;
  std::vector<double> delta(dim_);
  for (std::size_t i = 0; i < dim_; ++i) delta[i] = other.mean_[i] - mean_[i];
  for (std::size_t i = 0; i < dim_; ++i) {
    for (std::size_t j = 0; j < dim_; ++j) {
      comoment_[i * dim_ + j] += other.comoment_[i * dim_ + j] + delta[i] * delta[j] * na * nb / n;
    }
  }
  for (std::size_t i = 0; i < dim_; ++i) mean_[i] += delta[i] * nb / n;
  count_ += other.count_;
}

double CovarianceAccumulator::covariance(std::size_t i, std::size_t j) const {
  if (count_ < 2) return 0.0;
  // Symmetrise: the update accumulates (after_i * before_j) which is
  // symmetric only up to rounding.
  return 0.5 * (comoment_[i * dim_ + j] + comoment_[j * dim_ + i]) /
         static_cast<double>(count_ - 1);
}

double CovarianceAccumulator::correlation(std::size_t i, std::size_t j) const {
  const double denom = std::sqrt(covariance(i, i) * covariance(j, j));
  return denom > 0.0 ? covariance(i, j) / denom : 0.0;
}

double ks_critical_coefficient(double alpha) {
  if (!(alpha > 0.0 && alpha < 1.0)) throw InvalidInput("KS level must be in (0,1)");
  return std::sqrt(-std::log(alpha / 2.0) / 2.0);
}

double kolmogorov_tail(double lambda) {
  if (lambda <= 0.0) return 1.0;
  if (lambda < 0.2) return 1.0;
  double sum = 0.0;
  for (int k = 1; k <= 100; ++k) {
    const double term = std::exp(-2.0 * k * k * lambda * lambda);
    sum += (k % 2 == 1 ? term : -term);
    if (term < 1e-18) break;
  }
  return std::clamp(2.0 * sum, 0.0, 1.0);
}

TestReport ks_one_sample(std::span<const double> samples,
                         const std::function<double(double)>& cdf, double alpha) {
  if (samples.empty()) throw InvalidInput("ks_one_sample: empty sample");
  std::vector<double> sorted(samples.begin(), samples.end());
  std::sort(sorted.begin(), sorted.end());
  const double n = static_cast<double>(sorted.size());
  double d = 0.0;
  for (std::size_t i = 0; i < sorted.size(); ++i) {
    const double f = cdf(sorted[i]);
    d = std::max({d, static_cast<double>(i + 1) / n - f, f - static_cast<double>(i) / n});
  }
  TestReport r;
  r.name = "ks_one_sample";
  r.statistic = d;
  r.alpha = alpha;
  r.m = sorted.size();
  r.critical = ks_critical_coefficient(alpha) / std::sqrt(n);
  r.p_value = kolmogorov_tail(std::sqrt(n) * d);
  r.reject = d > r.critical;
  return r;
}

TestReport ks_two_sample(std::span<const double> a, std::span<const double> b, double alpha) {
  if (a.empty() || b.empty()) throw InvalidInput("ks_two_sample: empty sample");
  std::vector<double> x(a.begin(), a.end());
  std::vector<double> y(b.begin(), b.end());
  std::sort(x.begin(), x.end());
  std::sort(y.begin(), y.end());
  const double m = static_cast<double>(x.size());
  const double n = static_cast<double>(y.size());
  std::size_t i = 0, j = 0;
  double d = 0.0;
  while (i < x.size() && j < y.size()) {
    const double v = std::min(x[i], y[j]);
    while (i < x.size() && x[i] == v) ++i;
    while (j < y.size() && y[j] == v) ++j;
    d = std::max(d, std::abs(static_cast<double>(i) / m - static_cast<double>(j) / n));
  }
  TestReport r;
  r.name = "ks_two_sample";
  r.statistic = d;
  r.alpha = alpha;
  r.m = x.size();
  r.n = y.size();
  const double scale = std::sqrt((m + n) / (m * n));
  r.critical = ks_critical_coefficient(alpha) * scale;
  r.p_value = kolmogorov_tail(d / scale);
  r.reject = d > r.critical;
  return r;
}

double pearson_correlation(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size() || x.size() < 2) throw InvalidInput("correlation needs paired data");
  CovarianceAccumulator acc(2);
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double v[2] = {x[i], y[i]};
    acc.add(v);
  }
  return acc.correlation(0, 1);
}

CovarianceEstimate sample_covariance(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size() || x.size() < 2) throw InvalidInput("covariance needs paired data");
  StreamingMoments mx, my;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx.add(x[i]);
    my.add(y[i]);
  }
  StreamingMoments prod;
  for (std::size_t i = 0; i < x.size(); ++i) prod.add((x[i] - mx.mean()) * (y[i] - my.mean()));
  const double n = static_cast<double>(x.size());
  return {prod.mean() * n / (n - 1.0), prod.standard_error()};
}

ScalingFit scaling_regression(std::span<const std::pair<double, double>> pts) {
  std::set<double> distinct;
  for (const auto& [n, s] : pts) {
    if (!(n > 0.0) || !(s > 0.0)) throw InvalidInput("scaling_regression needs positive data");
    distinct.insert(n);
  }
  if (distinct.size() < 3) throw InvalidInput("scaling_regression needs >= 3 distinct n");
  if (*distinct.rbegin() / *distinct.begin() < 100.0 * (1.0 - 1e-12)) {
    throw InvalidInput("scaling_regression needs n spanning two decades");
  }
  const double k = static_cast<double>(pts.size());
  double sx = 0, sy = 0;
  for (const auto& [n, s] : pts) {
    sx += std::log(n);
    sy += std::log(s);
  }
  const double mx = sx / k, my = sy / k;
  double sxx = 0, sxy = 0;
  for (const auto& [n, s] : pts) {
    sxx += (std::log(n) - mx) * (std::log(n) - mx);
    sxy += (std::log(n) - mx) * (std::log(s) - my);
  }
  ScalingFit fit;
  fit.points = pts.size();
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  double rss = 0;
  for (const auto& [n, s] : pts) {
    const double r = std::log(s) - fit.intercept - fit.slope * std::log(n);
    rss += r * r;
  }
  fit.slope_stderr = pts.size() > 2 ? std::sqrt(rss / (k - 2.0) / sxx) : 0.0;
  return fit;
}

}  // namespace wbst
