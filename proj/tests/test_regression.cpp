#include <gtest/gtest.h>

#include <cmath>
#include <random>
#include <vector>

#include "trendrev/empirics.hpp"
#include "trendrev/error.hpp"
#include "trendrev/regression.hpp"

namespace trendrev {
namespace {

ErrorKind kind_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.kind();
  }
  return ErrorKind::internal;
}

std::vector<double> grid(int n, double lo, double hi) {
  std::vector<double> x;
  for (int i = 0; i < n; ++i) x.push_back(lo + (hi - lo) * i / (n - 1));
  return x;
}

TEST(FitLinear, ExactLineHasZeroError) {
  const auto x = grid(50, -2, 2);
  std::vector<double> y;
  for (double v : x) y.push_back(0.5 * v);
  const auto fit = fit_linear(x, y, 4.0);
  EXPECT_NEAR(fit.slope, 0.5, 1e-14);
  EXPECT_NEAR(fit.intercept, 0.0, 1e-14);
  EXPECT_NEAR(fit.slope_stderr, 0.0, 1e-14);
  EXPECT_EQ(fit.n_kept, 50u);
}

TEST(FitLinear, OutlierIsRemoved) {
  auto x = grid(50, -2, 2);
  std::vector<double> y;
  for (double v : x) y.push_back(0.5 * v);
  x.push_back(10.0);
  y.push_back(-10.0);
  const auto fit = fit_linear(x, y, 4.0);
  EXPECT_NEAR(fit.slope, 0.5, 1e-14);
  EXPECT_EQ(fit.n_kept, 50u);
}

TEST(FitLinear, CutAppliesToEitherCoordinate) {
  auto x = grid(30, -1, 1);
  std::vector<double> y(x.size(), 0.0);
  x.push_back(0.0);
  y.push_back(4.5);
  x.push_back(-4.5);
  y.push_back(0.0);
  x.push_back(4.0);  // on the boundary: kept
  y.push_back(0.0);
  EXPECT_EQ(fit_linear(x, y, 4.0).n_kept, 31u);
}

TEST(FitLinear, MatchesTextbookFormulas) {
  std::mt19937_64 rng(7);
  std::normal_distribution<double> n;
  std::vector<double> x, y;
  for (int i = 0; i < 500; ++i) {
    x.push_back(n(rng));
    y.push_back(0.3 - 0.2 * x.back() + 0.5 * n(rng));
  }
  const auto fit = fit_linear(x, y, 100.0);

  // Normal equations in long double as the reference.
  long double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sx += x[i];
    sy += y[i];
    sxx += x[i] * static_cast<long double>(x[i]);
    sxy += x[i] * static_cast<long double>(y[i]);
  }
  const long double nn = x.size();
  const long double b = (nn * sxy - sx * sy) / (nn * sxx - sx * sx);
  const long double a = (sy - b * sx) / nn;
  long double ssr = 0;
  for (std::size_t i = 0; i < x.size(); ++i) ssr += (y[i] - a - b * x[i]) * (y[i] - a - b * x[i]);
  const long double se = std::sqrt(ssr / (nn - 2) / (sxx - sx * sx / nn));
  EXPECT_NEAR(fit.slope, static_cast<double>(b), 1e-13);
  EXPECT_NEAR(fit.intercept, static_cast<double>(a), 1e-13);
  EXPECT_NEAR(fit.slope_stderr, static_cast<double>(se), 1e-13);
}

TEST(FitLinear, RejectsTooFewPoints) {
  const auto x = grid(9, -1, 1);
  EXPECT_EQ(kind_of([&] { fit_linear(x, x, 4.0); }), ErrorKind::insufficient_data);
  EXPECT_NO_THROW(fit_linear(grid(10, -1, 1), grid(10, -1, 1), 4.0));
}

TEST(FitLinear, RejectsConstantRegressor) {
  const std::vector<double> x(20, 0.7), y = grid(20, -1, 1);
  EXPECT_EQ(kind_of([&] { fit_linear(x, y, 4.0); }), ErrorKind::degenerate_design);
}

TEST(FitLinear, RejectsBadArguments) {
  const auto x = grid(20, -1, 1);
  const auto y = grid(19, -1, 1);
  EXPECT_EQ(kind_of([&] { fit_linear(x, y, 4.0); }), ErrorKind::invalid_argument);
  EXPECT_EQ(kind_of([&] { fit_linear(x, x, 0.0); }), ErrorKind::invalid_argument);
}

TEST(FitLinear, AcceptsReturnPairs) {
  std::vector<ReturnPair> pairs;
  for (double v : grid(20, -1, 1)) pairs.push_back({v, 2.0 * v - 0.1, 0, {}});
  const auto fit = fit_linear(pairs, 4.0);
  EXPECT_NEAR(fit.slope, 2.0, 1e-13);
  EXPECT_NEAR(fit.intercept, -0.1, 1e-13);
}

TEST(FitCubic, RecoversExactPolynomial) {
  const auto x = grid(200, -3, 3);
  std::vector<double> y;
  for (double v : x) y.push_back(0.1 - 0.3 * v + 0.05 * v * v + 0.02 * v * v * v);
  const auto fit = fit_cubic(x, y, 4.0);
  EXPECT_NEAR(fit.coef[0], 0.1, 1e-10);
  EXPECT_NEAR(fit.coef[1], -0.3, 1e-10);
  EXPECT_NEAR(fit.coef[2], 0.05, 1e-10);
  EXPECT_NEAR(fit.coef[3], 0.02, 1e-10);
  for (double se : fit.stderrs) EXPECT_LT(se, 1e-10);
}

TEST(FitCubic, LinearTermMatchesLinearFitOnLinearData) {
  std::mt19937_64 rng(3);
  std::normal_distribution<double> n;
  std::vector<double> x, y;
  for (int i = 0; i < 2000; ++i) {
    x.push_back(n(rng));
    y.push_back(0.2 * x.back() + n(rng));
  }
  const auto lin = fit_linear(x, y, 4.0);
  const auto cub = fit_cubic(x, y, 4.0);
  EXPECT_LT(std::abs(cub.coef[1] - lin.slope), std::hypot(cub.stderrs[1], lin.slope_stderr));
  EXPECT_LT(std::abs(cub.coef[2]), 3.0 * cub.stderrs[2]);
}

TEST(FitCubic, StandardErrorsMatchNormalEquations) {
  std::mt19937_64 rng(5);
  std::normal_distribution<double> n;
  std::vector<double> x, y;
  for (int i = 0; i < 300; ++i) {
    x.push_back(n(rng));
    y.push_back(x.back() * x.back() + n(rng));
  }
  const auto fit = fit_cubic(x, y, 1e6);

  // Invert X^T X by Gauss-Jordan in long double.
  long double m[4][8] = {};
  for (double v : x) {
    const long double p[4] = {1.0L, v, static_cast<long double>(v) * v, static_cast<long double>(v) * v * v};
    for (int i = 0; i < 4; ++i)
      for (int j = 0; j < 4; ++j) m[i][j] += p[i] * p[j];
  }
  for (int i = 0; i < 4; ++i) m[i][4 + i] = 1.0L;
  for (int c = 0; c < 4; ++c) {
    const long double piv = m[c][c];
    for (int j = 0; j < 8; ++j) m[c][j] /= piv;
    for (int r = 0; r < 4; ++r) {
      if (r == c) continue;
      const long double f = m[r][c];
      for (int j = 0; j < 8; ++j) m[r][j] -= f * m[c][j];
    }
  }
  long double ssr = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double v = x[i];
    const double r = y[i] - (fit.coef[0] + fit.coef[1] * v + fit.coef[2] * v * v + fit.coef[3] * v * v * v);
    ssr += static_cast<long double>(r) * r;
  }
  const long double s2 = ssr / (x.size() - 4);
  for (int k = 0; k < 4; ++k) {
    EXPECT_NEAR(fit.stderrs[k], static_cast<double>(std::sqrt(s2 * m[k][4 + k])), 1e-10) << k;
  }
  EXPECT_NEAR(fit.coef[2], 1.0, 5.0 * fit.stderrs[2]);
}

TEST(FitCubic, RejectsTooFewPointsAndRankDeficiency) {
  const auto x = grid(19, -1, 1);
  EXPECT_EQ(kind_of([&] { fit_cubic(x, x, 4.0); }), ErrorKind::insufficient_data);
  std::vector<double> three;
  for (int i = 0; i < 30; ++i) three.push_back(static_cast<double>(i % 3));
  EXPECT_EQ(kind_of([&] { fit_cubic(three, three, 4.0); }), ErrorKind::degenerate_design);
}

}  // namespace
}  // namespace trendrev
