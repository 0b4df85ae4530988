#pragma once

// Test-only reference computations. Nothing here calls into the code paths
// it is used to check.

#include <algorithm>
#include <array>
#include <boost/multiprecision/cpp_bin_float.hpp>
#include <cmath>
#include <numeric>
#include <vector>

#include "trendrev/model.hpp"

namespace trendrev::testing {

using HighPrecision = boost::multiprecision::cpp_bin_float_50;

/// Autocorrelation from the textbook closed form in 50-digit arithmetic.
inline HighPrecision autocorr_hp(double g_in, double kappa_in, double gamma_in, double u_in) {
  const HighPrecision g = g_in, kappa = kappa_in, gamma = gamma_in, u = u_in;
  const HighPrecision one = 1;
  const HighPrecision trend = (gamma * exp(-kappa * u) - kappa * exp(-gamma * u)) / (gamma - kappa);
  return exp(-kappa * u) / (one + g) + g / (one + g) * trend;
}

/// Stationary autocorrelation evaluated directly in double precision (no
/// cancellation tricks). Good enough away from small lags and gamma == kappa.
inline double autocorr_plain(const model::ProcessParams& p, double u) {
  if (p.g == 0.0) return std::exp(-p.kappa * u);
  const double trend = (p.gamma * std::exp(-p.kappa * u) - p.kappa * std::exp(-p.gamma * u)) / (p.gamma - p.kappa);
  return std::exp(-p.kappa * u) / (1.0 + p.g) + p.g / (1.0 + p.g) * trend;
}

/// Correlation of the causally de-trended returns
///   x = pi(0) - pi(-a) - (a/T)(pi(0) - pi(-L)),  y = pi(b) - pi(0) - (b/T)(pi(0) - pi(-L))
/// under the stationary model, where L is the actual look-back of the trend
/// window and T the divisor used for mu.
inline double detrended_correlation(const model::ProcessParams& p, double a, double b, double trend_divisor,
                                    double lookback) {
  const std::array<double, 4> times{-lookback, -a, 0.0, b};
  const std::array<double, 4> wx{a / trend_divisor, -1.0, 1.0 - a / trend_divisor, 0.0};
  const std::array<double, 4> wy{b / trend_divisor, 0.0, -1.0 - b / trend_divisor, 1.0};
  auto quad = [&](const std::array<double, 4>& l, const std::array<double, 4>& r) {
    double s = 0.0;
    for (std::size_t i = 0; i < 4; ++i) {
      for (std::size_t j = 0; j < 4; ++j) s += l[i] * r[j] * autocorr_plain(p, std::abs(times[i] - times[j]));
    }
    return s;
  };
  return quad(wx, wy) / std::sqrt(quad(wx, wx) * quad(wy, wy));
}

inline double mean(const std::vector<double>& v) {
  return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

/// Standard error of the mean of independent replicates.
inline double standard_error(const std::vector<double>& v) {
  const double m = mean(v);
  double ss = 0.0;
  for (double x : v) ss += (x - m) * (x - m);
  return std::sqrt(ss / static_cast<double>(v.size() - 1) / static_cast<double>(v.size()));
}

/// Asymptotic two-sample Kolmogorov-Smirnov p-value.
inline double ks_two_sample_pvalue(std::vector<double> a, std::vector<double> b) {
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  std::size_t i = 0, j = 0;
  double d = 0.0;
  while (i < a.size() && j < b.size()) {
    const double x = std::min(a[i], b[j]);
    while (i < a.size() && a[i] <= x) ++i;
    while (j < b.size() && b[j] <= x) ++j;
    d = std::max(d, std::abs(static_cast<double>(i) / a.size() - static_cast<double>(j) / b.size()));
  }
  const double n = static_cast<double>(a.size()) * b.size() / (a.size() + b.size());
  const double en = std::sqrt(n);
  const double lambda = (en + 0.12 + 0.11 / en) * d;
  double q = 0.0;
  for (int k = 1; k <= 100; ++k) {
    const double term = 2.0 * ((k % 2) ? 1.0 : -1.0) * std::exp(-2.0 * k * k * lambda * lambda);
    q += term;
    if (std::abs(term) < 1e-12) break;
  }
  return std::clamp(q, 0.0, 1.0);
}

}  // namespace trendrev::testing
