#pragma once

#include <array>
#include <cstddef>
#include <span>

namespace trendrev {

struct ReturnPair;

struct LinearFit {
  double intercept = 0.0;
  double slope = 0.0;
  /// Naive OLS standard error. Overlapping anchor windows make neighbouring
  /// pairs correlated, so this understates the true sampling error.
  double slope_stderr = 0.0;
  std::size_t n_kept = 0;
};

struct CubicFit {
  std::array<double, 4> coef{};    ///< c0 + c1 x + c2 x^2 + c3 x^3
  std::array<double, 4> stderrs{};  ///< naive OLS standard errors
  std::size_t n_kept = 0;
};

inline constexpr std::size_t kMinLinearPoints = 10;
inline constexpr std::size_t kMinCubicPoints = 20;

/// OLS of y on x with intercept after dropping |x| > cut or |y| > cut.
/// Throws insufficient_data below 10 kept points, degenerate_design if x is constant.
LinearFit fit_linear(std::span<const ReturnPair> pairs, double outlier_cut);
LinearFit fit_linear(std::span<const double> x, std::span<const double> y, double outlier_cut);

/// OLS of y on (1, x, x^2, x^3) after the same filter. Needs 20 kept points.
CubicFit fit_cubic(std::span<const ReturnPair> pairs, double outlier_cut);
CubicFit fit_cubic(std::span<const double> x, std::span<const double> y, double outlier_cut);

}  // namespace trendrev
