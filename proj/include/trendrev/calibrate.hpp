#pragma once

#include <optional>
#include <string>
#include <vector>

#include "trendrev/empirics.hpp"
#include "trendrev/model.hpp"

namespace trendrev::calibrate {

enum class WeightMode { inverse_variance, uniform };

std::string_view to_string(WeightMode m) noexcept;
WeightMode weight_mode_from_string(std::string_view s);

struct ParamBounds {
  double g_min = 0.0, g_max = 10.0;
  double kappa_min = 0.01, kappa_max = 52.0;   // per year
  double gamma_min = 0.01, gamma_max = 252.0;  // per year
};

struct CalibrationPoint {
  double tau_lt_years = 0.0;
  double slope = 0.0;
  double weight = 1.0;
};

struct CalibrationProblem {
  PredictabilityCurve curve;
  double ratio = 0.2;
  ParamBounds bounds;
  /// Extra start added to the fixed lattice; defaults to the futures preset.
  model::ProcessParams init = model::futures_preset();
  WeightMode weight_mode = WeightMode::inverse_variance;
};

struct Residual {
  double tau_lt_years = 0.0;
  double tau_gt_years = 0.0;
  double slope_empirical = 0.0;
  double slope_fitted = 0.0;
  double residual = 0.0;  ///< empirical - fitted
  double weight = 0.0;
};

struct CalibrationResult {
  model::ProcessParams params;  ///< sigma2 is carried over from init, it is not fitted
  double ratio = 0.2;
  double loss = 0.0;            ///< weighted sum of squared residuals
  int n_iter = 0;               ///< iterations of the selected start
  bool converged = false;
  int starts_converged = 0;
  std::vector<Residual> residuals;
};

/// Offset used when searching g on a log scale: the coordinate is log(g + offset).
inline constexpr double kGLogOffset = 1e-3;

/// The slope curve only sees 1 - C up to a constant factor, and that factor is
/// shared by (g, kappa, gamma) and (gamma (1 + g) / kappa - 1, gamma, kappa).
/// Returns the partner triple, or nullopt when its g would be negative.
std::optional<model::ProcessParams> rate_swap_twin(const model::ProcessParams& p);

/// Points from the non-empty entries of a curve, weighted per mode.
std::vector<CalibrationPoint> points_from_curve(const PredictabilityCurve& curve, WeightMode mode);

/// Weighted least squares fit of slope_theory over bounded (g, kappa, gamma).
/// Needs at least 4 points. Runs Nelder-Mead from 8 lattice starts plus `init`
/// and keeps the lowest loss (ties: smallest (g, kappa, gamma)). A fit with
/// kappa > gamma is replaced by its rate-swap twin when that twin is in bounds,
/// so mean reversion is always the slower of the two rates.
CalibrationResult calibrate_points(const std::vector<CalibrationPoint>& points, double ratio,
                                   const ParamBounds& bounds, const model::ProcessParams& init,
                                   unsigned threads = 0);

CalibrationResult calibrate(const CalibrationProblem& problem, unsigned threads = 0);

struct CalibrationReport {
  model::BandReport band;
  double price_factor = 0.0;                  ///< e^delta
  std::optional<double> zero_crossing_years;  ///< nullopt when the slope never changes sign
};

/// Chains black_band and slope_zero_crossing on a converged result.
CalibrationReport report(const CalibrationResult& result, double daily_vol);

std::string format_summary(const CalibrationResult& result, const CalibrationReport& report);

}  // namespace trendrev::calibrate
