#pragma once

// Small statistics toolkit: running moments, one-sample Kolmogorov-Smirnov,
// chi-square goodness of fit.

#include <algorithm>
#include <cmath>
#include <functional>
#include <span>
#include <vector>

#include "anchormosaic/error.hpp"
#include "anchormosaic/specfun.hpp"

namespace anchormosaic::stats {

/// Welford accumulator.
struct RunningMoments {
  long long count = 0;
  double mean = 0.0;
  double m2 = 0.0;

  void add(double x) {
    ++count;
    const double d = x - mean;
    mean += d / static_cast<double>(count);
    m2 += d * (x - mean);
  }
  void merge(const RunningMoments& o) {
    if (o.count == 0) return;
    if (count == 0) {
      *this = o;
      return;
    }
    const double total = static_cast<double>(count + o.count);
    const double d = o.mean - mean;
    mean += d * static_cast<double>(o.count) / total;
    m2 += o.m2 + d * d * static_cast<double>(count) * static_cast<double>(o.count) / total;
    count += o.count;
  }
  double variance() const { return count > 1 ? m2 / static_cast<double>(count - 1) : 0.0; }
  /// Standard error of the mean.
  double standard_error() const { return count > 1 ? std::sqrt(variance() / static_cast<double>(count)) : 0.0; }
};

struct Estimate {
  double value = 0.0;
  double standard_error = 0.0;
  double lower() const { return value - 1.959963984540054 * standard_error; }
  double upper() const { return value + 1.959963984540054 * standard_error; }
  bool overlaps(const Estimate& o) const { return lower() <= o.upper() && o.lower() <= upper(); }
  bool covers(double x) const { return lower() <= x && x <= upper(); }
};

/// P(K > lambda) for the limiting Kolmogorov distribution.
inline double kolmogorov_survival(double lambda) {
  if (lambda <= 0.0) return 1.0;
  if (lambda < 0.2) return 1.0;  // the alternating series is 1 to double precision here
  double sum = 0.0;
  for (int j = 1; j <= 200; ++j) {
    const double term = std::exp(-2.0 * j * j * lambda * lambda);
    sum += (j % 2 == 1 ? 2.0 : -2.0) * term;
    if (term < 1e-18) break;
  }
  return std::clamp(sum, 0.0, 1.0);
}

struct KsResult {
  double statistic = 0.0;
  double p_value = 1.0;
  std::size_t samples = 0;
};

/// One-sample KS test of `values` against a continuous CDF, with the
/// Stephens small-sample correction of the asymptotic p-value.
inline KsResult ks_test(std::vector<double> values, const std::function<double(double)>& cdf) {
  if (values.empty()) throw DomainError("ks_test: empty sample");
  std::sort(values.begin(), values.end());
  const double n = static_cast<double>(values.size());
  double d = 0.0;
  for (std::size_t i = 0; i < values.size(); ++i) {
    const double f = cdf(values[i]);
    d = std::max({d, (i + 1) / n - f, f - i / n});
  }
  const double sn = std::sqrt(n);
  KsResult r;
  r.statistic = d;
  r.samples = values.size();
  r.p_value = kolmogorov_survival((sn + 0.12 + 0.11 / sn) * d);
  return r;
}

inline KsResult ks_test_uniform(std::vector<double> u) {
  return ks_test(std::move(u), [](double x) { return std::clamp(x, 0.0, 1.0); });
}

struct ChiSquareResult {
  double statistic = 0.0;
  int dof = 0;
  double p_value = 1.0;
};

/// Pearson chi-square of observed against expected counts; dof = bins - 1 - fitted.
inline ChiSquareResult chi_square_test(std::span<const double> observed, std::span<const double> expected, int fitted = 0) {
  if (observed.size() != expected.size() || observed.size() < 2) {
    throw DomainError("chi_square_test: need matching bins, at least two");
  }
  ChiSquareResult r;
  for (std::size_t i = 0; i < observed.size(); ++i) {
    if (!(expected[i] > 0.0)) throw DomainError("chi_square_test: expected counts must be positive");
    const double d = observed[i] - expected[i];
    r.statistic += d * d / expected[i];
  }
  r.dof = static_cast<int>(observed.size()) - 1 - fitted;
  if (r.dof < 1) throw DomainError("chi_square_test: no degrees of freedom left");
  r.p_value = specfun::regularized_upper_gamma(0.5 * r.dof, 0.5 * r.statistic);
  return r;
}

/// Pearson correlation coefficient.
inline double correlation(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size() || a.size() < 2) throw DomainError("correlation: need two equal-length samples");
  RunningMoments ma, mb;
  for (double x : a) ma.add(x);
  for (double x : b) mb.add(x);
  double c = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) c += (a[i] - ma.mean) * (b[i] - mb.mean);
  c /= static_cast<double>(a.size() - 1);
  return c / std::sqrt(ma.variance() * mb.variance());
}

}  // namespace anchormosaic::stats
