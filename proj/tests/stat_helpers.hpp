#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <vector>

namespace stat_helpers {

// Two-sided Kolmogorov-Smirnov distance between a sample and a CDF.
inline double ks_statistic(std::vector<double> sample,
                           const std::function<double(double)>& cdf) {
  std::sort(sample.begin(), sample.end());
  const double n = double(sample.size());
  double d = 0.0;
  for (std::size_t i = 0; i < sample.size(); ++i) {
    const double c = cdf(sample[i]);
    d = std::max(d, std::fabs(c - double(i + 1) / n));
    d = std::max(d, std::fabs(c - double(i) / n));
  }
  return d;
}

// Asymptotic KS critical value at the given level.
inline double ks_critical(std::size_t n, double alpha) {
  const double c = std::sqrt(-0.5 * std::log(alpha / 2.0));
  return c / std::sqrt(double(n));
}

inline double normal_cdf(double x, double mean, double sd) {
  return 0.5 * std::erfc(-(x - mean) / (sd * std::sqrt(2.0)));
}

inline double mean(const std::vector<double>& v) {
  double sum = 0.0;
  for (double x : v) sum += x;
  return sum / double(v.size());
}

inline double sample_sd(const std::vector<double>& v) {
  const double m = mean(v);
  double ss = 0.0;
  for (double x : v) ss += (x - m) * (x - m);
  return std::sqrt(ss / double(v.size() - 1));
}

}  // namespace stat_helpers
