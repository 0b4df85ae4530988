#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "trendrev/price_series.hpp"
#include "trendrev/regression.hpp"

namespace trendrev {

enum class Normalization { pooled, per_contract };

/**
 * Settings of the de-trended return measurement.
 *
 * Horizons in tau_lt_grid are native steps (trading days for daily series,
 * months for monthly). The future horizon is round(ratio * tau_lt), at least 1.
 */
struct DetrendConfig {
  double trend_window_years = 20.0;
  std::vector<int> tau_lt_grid;
  double ratio = 0.2;
  double outlier_cut = 4.0;
  bool min_history = true;
  Normalization normalization = Normalization::pooled;

  /// Grid 10..1280 trading days (daily) or 5..60 months (monthly), T = 20y, ratio 1/5, cut 4.
  static DetrendConfig defaults_for(Frequency f);
  static std::vector<int> default_grid(Frequency f);

  int future_horizon(int tau_lt) const;
  void validate(Frequency f) const;
};

struct ReturnPair {
  double x = 0.0;            ///< normalised de-trended past return
  double y = 0.0;            ///< normalised de-trended future return
  std::uint32_t series = 0;  ///< index of the source series in the pool
  Date t;                    ///< anchor date
};

/// Raw (unnormalised) de-trended returns around one anchor.
struct DetrendedReturns {
  double x = 0.0;
  double y = 0.0;
  double mu = 0.0;  ///< long-term trend used for both, per year
};

struct PairPool {
  int tau_lt = 0;
  int tau_gt = 0;
  std::vector<ReturnPair> pairs;
  double x_scale = 0.0;  ///< std of raw x (pooled normalisation)
  double y_scale = 0.0;
  /// True when a raw standard deviation vanished; affected pairs are emitted as zeros.
  bool degenerate = false;
};

/// Position of the observation used as p(t - T) for each anchor, or -1 when
/// no observation lies within tolerance (7 / 31 calendar days) at or
/// before t - T. Shared by every horizon.
std::vector<std::ptrdiff_t> trend_window_starts(const PriceSeries& series, double trend_window_years);

/// mu_t = (log p(t) - log p(t - T)) / T using the last observation at or before t
/// for p(t). nullopt when the window start is missing.
std::optional<double> long_trend(const PriceSeries& series, Date t, double trend_window_years);

/// De-trended returns for the anchor at observation `anchor`. nullopt when any of
/// p(t - T), p(t - tau_lt), p(t + tau_gt) is unavailable. Uses no observation
/// after anchor + tau_gt.
std::optional<DetrendedReturns> detrended_returns(const PriceSeries& series, std::size_t anchor,
                                                  const DetrendConfig& cfg, int tau_lt);

/// Every qualifying anchor of every series, normalised to unit variance.
PairPool build_pairs(std::span<const PriceSeries> pool, const DetrendConfig& cfg, int tau_lt);

struct CurveEntry {
  int tau_lt_native = 0;
  int tau_gt_native = 0;
  double tau_lt_years = 0.0;
  std::size_t n_raw = 0;
  std::size_t n_kept = 0;
  std::optional<LinearFit> linear;
  std::optional<CubicFit> cubic;
  std::string note;  ///< why a fit is missing

  bool empty() const noexcept { return !linear.has_value(); }
};

struct PredictabilityCurve {
  Frequency frequency = Frequency::daily;
  double ratio = 0.2;
  std::vector<CurveEntry> entries;

  bool all_empty() const noexcept;
  std::size_t non_empty() const noexcept;
};

/// build_pairs + fit_linear + fit_cubic for each grid horizon. Entries that
/// cannot be fitted are kept and marked empty. Grid points may be processed
/// concurrently; the result does not depend on `threads`.
PredictabilityCurve predictability_curve(std::span<const PriceSeries> pool, const DetrendConfig& cfg,
                                         unsigned threads = 0);

}  // namespace trendrev
