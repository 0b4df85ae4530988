#pragma once

#include <optional>

#include "trendrev/units.hpp"

namespace trendrev::model {

/**
 * Parameters of the de-trended log-price model
 *
 *   dpi/dt = -kappa * pi + eta,
 *   <eta(t') eta(t'')> = 2 sigma^2 kappa [delta(t'-t'') + (g/2)(gamma+kappa) exp(-gamma|t'-t''|)]
 *
 * Rates are per year. Use from_timescales() to build from native horizons.
 */
struct ProcessParams {
  double g = 0.0;       ///< trend strength, >= 0
  double kappa = 1.0;   ///< mean-reversion rate, 1/year
  double gamma = 1.0;   ///< trend decay rate, 1/year
  double sigma2 = 1.0;  ///< variance scale sigma^2

  /// Builds parameters from the mean-reversion time 1/kappa and trend time 1/gamma.
  static ProcessParams from_timescales(double g, Years mean_reversion_time, Years trend_time,
                                       double sigma2);

  /// Throws Error(invalid_argument) unless g >= 0 and kappa, gamma, sigma2 > 0 (all finite).
  void validate() const;

  /// Stationary variance sigma^2 (1 + g).
  double stationary_variance() const noexcept { return sigma2 * (1.0 + g); }
};

/// g = 0.22, 1/kappa = 16 years, 1/gamma = 33 trading days, sigma^2 = 0.2.
ProcessParams futures_preset();
/// g = 0.33, 1/kappa = 8 years, 1/gamma = 200 trading days, sigma^2 = 0.1.
ProcessParams spot_preset();

/// True when |gamma - kappa| is small enough that the closed forms are replaced
/// by their gamma -> kappa limits.
bool rates_degenerate(double kappa, double gamma) noexcept;

struct HorizonPair {
  double tau_lt = 0.0;  ///< past horizon, years
  double tau_gt = 0.0;  ///< future horizon, years
};

struct BandReport {
  double g = 0.0;
  double kappa = 0.0;
  double sigma2 = 0.0;     ///< inferred from daily_vol, not taken from the input params
  double delta = 0.0;      ///< sqrt(sigma2 (1 + g))
  double t_mr = 0.0;       ///< (delta / annual_vol)^2, years
  double daily_vol = 0.0;
};

/// Stationary autocorrelation C(u) of pi at lag u (years).
double autocorr(const ProcessParams& params, double u);

/// 1 - C(u), evaluated without cancellation at small lags.
double decorrelation(const ProcessParams& params, double u);

/// Stationary autocovariance sigma^2 (1 + g) C(u).
double covariance(const ProcessParams& params, double u);

/// Correlation between the future increment over tau_gt and the past increment
/// over tau_lt. Throws Error(horizon_too_small) when either 1 - C(tau) < 1e-14.
double slope_theory(const ProcessParams& params, HorizonPair h);

/// Past horizon (years) at which slope_theory(params, {tau, ratio * tau}) changes
/// sign, searched by bisection on [5 trading days, 20 years].
/// Throws Error(no_crossing) when the slope keeps one sign over the bracket.
double slope_zero_crossing(const ProcessParams& params, double ratio);

/// Same, returning nullopt instead of throwing when there is no crossing.
std::optional<double> try_slope_zero_crossing(const ProcessParams& params, double ratio);

/// Infers sigma^2 from the short-term volatility sqrt(2 kappa) sigma and derives
/// the band width and mean-reversion time. params.sigma2 is ignored.
BandReport black_band(const ProcessParams& params, double daily_vol);

/// (delta / annual_vol)^2.
double mean_reversion_time(double delta, double annual_vol);

}  // namespace trendrev::model
