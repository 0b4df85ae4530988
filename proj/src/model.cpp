#include "trendrev/model.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "trendrev/error.hpp"

namespace trendrev {

std::string_view to_string(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::invalid_argument: return "invalid_argument";
    case ErrorKind::data_format: return "data_format";
    case ErrorKind::insufficient_data: return "insufficient_data";
    case ErrorKind::horizon_too_small: return "horizon_too_small";
    case ErrorKind::no_crossing: return "no_crossing";
    case ErrorKind::degenerate_design: return "degenerate_design";
    case ErrorKind::no_convergence: return "no_convergence";
    case ErrorKind::internal: return "internal";
  }
  return "unknown";
}

std::string_view to_string(Frequency f) noexcept {
  return f == Frequency::daily ? "daily" : "monthly";
}

Frequency frequency_from_string(std::string_view s) {
  if (s == "daily") return Frequency::daily;
  if (s == "monthly") return Frequency::monthly;
  throw Error(ErrorKind::invalid_argument,
              "unknown frequency '" + std::string(s) + "' (expected daily|monthly)");
}

}  // namespace trendrev

namespace trendrev::model {

namespace {

constexpr double kDegenerateRelGap = 1e-8;
constexpr double kMinDecorrelation = 1e-14;

void check_lag(double u) {
  if (!(u >= 0.0) || !std::isfinite(u)) {
    throw Error(ErrorKind::invalid_argument, "lag must be finite and >= 0, got " + std::to_string(u));
  }
}

// h(u) = (gamma e^{-kappa u} - kappa e^{-gamma u}) / (gamma - kappa), symmetric in
// (kappa, gamma). With lo = min, gap = max - min it equals
// e^{-lo u} (1 - lo * expm1(-gap u) / gap), which never overflows.
double trend_kernel(double kappa, double gamma, double u) {
  const double lo = std::min(kappa, gamma);
  const double gap = std::max(kappa, gamma) - lo;
  if (rates_degenerate(kappa, gamma)) return std::exp(-lo * u) * (1.0 + lo * u);
  return std::exp(-lo * u) * (1.0 - lo * std::expm1(-gap * u) / gap);
}

// 1 - h(u).
double trend_kernel_complement(double kappa, double gamma, double u) {
  const double lo = std::min(kappa, gamma);
  const double gap = std::max(kappa, gamma) - lo;
  const double decay = std::exp(-lo * u);
  if (rates_degenerate(kappa, gamma)) return -std::expm1(-lo * u) - lo * u * decay;
  return -std::expm1(-lo * u) + decay * lo * std::expm1(-gap * u) / gap;
}

}  // namespace

ProcessParams ProcessParams::from_timescales(double g, Years mean_reversion_time, Years trend_time,
                                             double sigma2) {
  ProcessParams p{g, 1.0 / mean_reversion_time.value, 1.0 / trend_time.value, sigma2};
  p.validate();
  return p;
}

void ProcessParams::validate() const {
  auto fail = [](const std::string& what) { throw Error(ErrorKind::invalid_argument, what); };
  if (!std::isfinite(g) || g < 0.0) fail("g must be finite and >= 0, got " + std::to_string(g));
  if (!std::isfinite(kappa) || kappa <= 0.0) fail("kappa must be finite and > 0, got " + std::to_string(kappa));
  if (!std::isfinite(gamma) || gamma <= 0.0) fail("gamma must be finite and > 0, got " + std::to_string(gamma));
  if (!std::isfinite(sigma2) || sigma2 <= 0.0) fail("sigma2 must be finite and > 0, got " + std::to_string(sigma2));
}

ProcessParams futures_preset() {
  return ProcessParams::from_timescales(0.22, years(16.0), trading_days(33.0), 0.2);
}

ProcessParams spot_preset() {
  return ProcessParams::from_timescales(0.33, years(8.0), trading_days(200.0), 0.1);
}

bool rates_degenerate(double kappa, double gamma) noexcept {
  return std::abs(gamma - kappa) < kDegenerateRelGap * std::max(gamma, kappa);
}

double autocorr(const ProcessParams& params, double u) {
  params.validate();
  check_lag(u);
  const double h = trend_kernel(params.kappa, params.gamma, u);
  const double white = std::exp(-params.kappa * u);
  // C = white/(1+g) + g h/(1+g), written so that C(0) == 1 exactly.
  return h + (white - h) / (1.0 + params.g);
}

double decorrelation(const ProcessParams& params, double u) {
  params.validate();
  check_lag(u);
  const double white = -std::expm1(-params.kappa * u);
  const double trend = trend_kernel_complement(params.kappa, params.gamma, u);
  return (white + params.g * trend) / (1.0 + params.g);
}

double covariance(const ProcessParams& params, double u) {
  return params.stationary_variance() * autocorr(params, u);
}

double slope_theory(const ProcessParams& params, HorizonPair h) {
  if (!(h.tau_lt > 0.0) || !(h.tau_gt > 0.0) || !std::isfinite(h.tau_lt) ||
      !std::isfinite(h.tau_gt)) {
    throw Error(ErrorKind::invalid_argument, "horizons must be finite and > 0");
  }
  const double d_lt = decorrelation(params, h.tau_lt);
  const double d_gt = decorrelation(params, h.tau_gt);
  if (d_lt < kMinDecorrelation || d_gt < kMinDecorrelation) {
    throw Error(ErrorKind::horizon_too_small,
                "horizon too small: 1 - C(tau) below 1e-14 (tau_lt=" + std::to_string(h.tau_lt) +
                    ", tau_gt=" + std::to_string(h.tau_gt) + ")");
  }
  const double d_sum = decorrelation(params, h.tau_lt + h.tau_gt);
  // C(a) + C(b) - C(a+b) - 1 == D(a+b) - D(a) - D(b); kept symmetric in (a, b).
  return (d_sum - (d_lt + d_gt)) / (2.0 * std::sqrt(d_lt * d_gt));
}

std::optional<double> try_slope_zero_crossing(const ProcessParams& params, double ratio) {
  params.validate();
  if (!(ratio > 0.0) || !std::isfinite(ratio)) {
    throw Error(ErrorKind::invalid_argument, "ratio must be finite and > 0");
  }
  auto slope_at = [&](double tau) { return slope_theory(params, {tau, ratio * tau}); };
  double lo = trading_days(5.0).value;
  double hi = 20.0;
  double f_lo = slope_at(lo);
  const double f_hi = slope_at(hi);
  if (f_lo == 0.0) return lo;
  if (f_hi == 0.0) return hi;
  if ((f_lo > 0.0) == (f_hi > 0.0)) return std::nullopt;
  while (hi - lo > 1e-10 * lo) {
    const double mid = 0.5 * (lo + hi);
    const double f_mid = slope_at(mid);
    if (f_mid == 0.0) return mid;
    if ((f_mid > 0.0) == (f_lo > 0.0)) {
      lo = mid;
      f_lo = f_mid;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

double slope_zero_crossing(const ProcessParams& params, double ratio) {
  if (auto root = try_slope_zero_crossing(params, ratio)) return *root;
  throw Error(ErrorKind::no_crossing,
              "slope does not change sign on [5 trading days, 20 years]");
}

BandReport black_band(const ProcessParams& params, double daily_vol) {
  if (!(daily_vol > 0.0) || !std::isfinite(daily_vol)) {
    throw Error(ErrorKind::invalid_argument, "daily_vol must be finite and > 0");
  }
  ProcessParams inferred = params;
  inferred.sigma2 = 1.0;  // placeholder so validate() only checks g, kappa, gamma
  inferred.validate();

  BandReport r;
  r.g = params.g;
  r.kappa = params.kappa;
  r.daily_vol = daily_vol;
  r.sigma2 = daily_vol * daily_vol * kTradingDaysPerYear / (2.0 * params.kappa);
  r.delta = std::sqrt(r.sigma2 * (1.0 + params.g));
  r.t_mr = mean_reversion_time(r.delta, daily_vol * std::sqrt(kTradingDaysPerYear));
  return r;
}

double mean_reversion_time(double delta, double annual_vol) {
  if (!(annual_vol > 0.0) || !(delta >= 0.0)) {
    throw Error(ErrorKind::invalid_argument, "need delta >= 0 and annual_vol > 0");
  }
  const double ratio = delta / annual_vol;
  return ratio * ratio;
}

}  // namespace trendrev::model
