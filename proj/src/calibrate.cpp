#include "trendrev/calibrate.hpp"

#include <array>
#include <cmath>
#include <cstdio>
#include <limits>
#include <tuple>

#include "trendrev/error.hpp"
#include "trendrev/nelder_mead.hpp"
#include "trendrev/parallel.hpp"

namespace trendrev::calibrate {

namespace {

using Coords = std::array<double, 3>;

Coords to_coords(double g, double kappa, double gamma) {
  return {std::log(g + kGLogOffset), std::log(kappa), std::log(gamma)};
}

model::ProcessParams from_coords(std::span<const double> z, const ParamBounds& b, double sigma2) {
  model::ProcessParams p;
  p.g = std::clamp(std::exp(z[0]) - kGLogOffset, b.g_min, b.g_max);
  p.kappa = std::clamp(std::exp(z[1]), b.kappa_min, b.kappa_max);
  p.gamma = std::clamp(std::exp(z[2]), b.gamma_min, b.gamma_max);
  p.sigma2 = sigma2;
  return p;
}

void validate_bounds(const ParamBounds& b) {
  const bool ok = b.g_min >= 0.0 && b.g_min < b.g_max && b.kappa_min > 0.0 && b.kappa_min < b.kappa_max &&
                  b.gamma_min > 0.0 && b.gamma_min < b.gamma_max;
  if (!ok) throw Error(ErrorKind::invalid_argument, "invalid parameter bounds");
}

double weighted_loss(const std::vector<CalibrationPoint>& points, double ratio, const model::ProcessParams& p) {
  double loss = 0.0;
  for (const auto& pt : points) {
    double fitted;
    try {
      fitted = model::slope_theory(p, {pt.tau_lt_years, ratio * pt.tau_lt_years});
    } catch (const Error&) {
      return std::numeric_limits<double>::infinity();
    }
    const double r = pt.slope - fitted;
    loss += pt.weight * r * r;
  }
  return loss;
}

}  // namespace

std::optional<model::ProcessParams> rate_swap_twin(const model::ProcessParams& p) {
  const double g = (p.gamma * (1.0 + p.g) - p.kappa) / p.kappa;
  if (!(g >= 0.0) || !std::isfinite(g)) return std::nullopt;
  return model::ProcessParams{g, p.gamma, p.kappa, p.sigma2};
}

std::string_view to_string(WeightMode m) noexcept {
  return m == WeightMode::uniform ? "uniform" : "inverse_variance";
}

WeightMode weight_mode_from_string(std::string_view s) {
  if (s == "uniform") return WeightMode::uniform;
  if (s == "inverse_variance" || s == "stderr") return WeightMode::inverse_variance;
  throw Error(ErrorKind::invalid_argument, "unknown weight mode '" + std::string(s) + "'");
}

std::vector<CalibrationPoint> points_from_curve(const PredictabilityCurve& curve, WeightMode mode) {
  std::vector<CalibrationPoint> points;
  for (const auto& e : curve.entries) {
    if (e.empty()) continue;
    CalibrationPoint pt{e.tau_lt_years, e.linear->slope, 1.0};
    if (mode == WeightMode::inverse_variance) {
      const double se = e.linear->slope_stderr;
      if (!(se > 0.0) || !std::isfinite(se)) {
        throw Error(ErrorKind::invalid_argument,
                    "non-positive slope stderr at tau_lt=" + std::to_string(e.tau_lt_native) + "; use uniform weights");
      }
      pt.weight = 1.0 / (se * se);
    }
    points.push_back(pt);
  }
  return points;
}

CalibrationResult calibrate_points(const std::vector<CalibrationPoint>& points, double ratio,
                                   const ParamBounds& bounds, const model::ProcessParams& init, unsigned threads) {
  validate_bounds(bounds);
  init.validate();
  if (points.size() < 4) {
    throw Error(ErrorKind::insufficient_data,
                "calibration needs at least 4 curve points, got " + std::to_string(points.size()));
  }
  if (!(ratio > 0.0) || !std::isfinite(ratio)) throw Error(ErrorKind::invalid_argument, "ratio must be > 0");
  for (const auto& pt : points) {
    if (!(pt.tau_lt_years > 0.0) || !std::isfinite(pt.slope) || !(pt.weight >= 0.0) || !std::isfinite(pt.weight)) {
      throw Error(ErrorKind::invalid_argument, "invalid calibration point");
    }
  }

  const Coords lo = to_coords(bounds.g_min, bounds.kappa_min, bounds.gamma_min);
  const Coords hi = to_coords(bounds.g_max, bounds.kappa_max, bounds.gamma_max);
  const Box box{{lo.begin(), lo.end()}, {hi.begin(), hi.end()}};

  // 2x2x2 lattice at 1/4 and 3/4 of each log-range, then the supplied start.
  std::vector<std::vector<double>> starts;
  for (int corner = 0; corner < 8; ++corner) {
    std::vector<double> z(3);
    for (int i = 0; i < 3; ++i) {
      const double frac = (corner >> i & 1) ? 0.75 : 0.25;
      z[static_cast<std::size_t>(i)] = lo[static_cast<std::size_t>(i)] + frac * (hi[static_cast<std::size_t>(i)] - lo[static_cast<std::size_t>(i)]);
    }
    starts.push_back(std::move(z));
  }
  {
    const Coords z = to_coords(std::clamp(init.g, bounds.g_min, bounds.g_max),
                               std::clamp(init.kappa, bounds.kappa_min, bounds.kappa_max),
                               std::clamp(init.gamma, bounds.gamma_min, bounds.gamma_max));
    starts.emplace_back(z.begin(), z.end());
  }

  const Objective objective = [&](std::span<const double> z) {
    return weighted_loss(points, ratio, from_coords(z, bounds, init.sigma2));
  };

  std::vector<NelderMeadResult> runs(starts.size());
  parallel_for(starts.size(), threads, [&](std::size_t i) { runs[i] = nelder_mead(objective, starts[i], box); });

  auto key = [&](const NelderMeadResult& r) {
    const auto p = from_coords(r.x, bounds, init.sigma2);
    return std::make_tuple(r.value, p.g, p.kappa, p.gamma);
  };
  std::size_t best = 0;
  int converged = 0;
  for (std::size_t i = 0; i < runs.size(); ++i) {
    if (runs[i].converged) ++converged;
    if (key(runs[i]) < key(runs[best])) best = i;
  }

  CalibrationResult result;
  result.params = from_coords(runs[best].x, bounds, init.sigma2);
  if (result.params.kappa > result.params.gamma) {
    const auto twin = rate_swap_twin(result.params);
    if (twin && twin->g <= bounds.g_max && twin->g >= bounds.g_min && twin->kappa <= bounds.kappa_max &&
        twin->gamma >= bounds.gamma_min) {
      result.params = *twin;
    }
  }
  result.ratio = ratio;
  result.loss = weighted_loss(points, ratio, result.params);
  result.n_iter = runs[best].iterations;
  result.converged = converged > 0 && std::isfinite(result.loss);
  result.starts_converged = converged;
  for (const auto& pt : points) {
    Residual r;
    r.tau_lt_years = pt.tau_lt_years;
    r.tau_gt_years = ratio * pt.tau_lt_years;
    r.slope_empirical = pt.slope;
    r.weight = pt.weight;
    try {
      r.slope_fitted = model::slope_theory(result.params, {r.tau_lt_years, r.tau_gt_years});
    } catch (const Error&) {
      r.slope_fitted = std::numeric_limits<double>::quiet_NaN();
    }
    r.residual = r.slope_empirical - r.slope_fitted;
    result.residuals.push_back(r);
  }
  return result;
}

CalibrationResult calibrate(const CalibrationProblem& problem, unsigned threads) {
  return calibrate_points(points_from_curve(problem.curve, problem.weight_mode), problem.ratio, problem.bounds,
                          problem.init, threads);
}

CalibrationReport report(const CalibrationResult& result, double daily_vol) {
  if (!result.converged) throw Error(ErrorKind::no_convergence, "calibration did not converge");
  CalibrationReport r;
  r.band = model::black_band(result.params, daily_vol);
  r.price_factor = std::exp(r.band.delta);
  r.zero_crossing_years = model::try_slope_zero_crossing(result.params, result.ratio);
  return r;
}

std::string format_summary(const CalibrationResult& result, const CalibrationReport& rep) {
  const auto& p = result.params;
  char buf[1024];
  const std::string crossing =
      rep.zero_crossing_years
          ? std::to_string(*rep.zero_crossing_years) + " years (" +
                std::to_string(*rep.zero_crossing_years * kTradingDaysPerYear) + " trading days)"
          : std::string("none");
  std::snprintf(buf, sizeof buf,
                "g                   %.6g\n"
                "mean reversion      1/kappa = %.6g years\n"
                "trend time          1/gamma = %.6g years (%.6g trading days)\n"
                "daily volatility    %.6g\n"
                "inferred sigma^2    %.6g\n"
                "band width Delta    %.6g (price within a factor %.4g of value)\n"
                "mean-reversion time %.6g years\n"
                "slope sign change   %s\n",
                p.g, 1.0 / p.kappa, 1.0 / p.gamma, kTradingDaysPerYear / p.gamma, rep.band.daily_vol,
                rep.band.sigma2, rep.band.delta, rep.price_factor, rep.band.t_mr, crossing.c_str());
  return buf;
}

}  // namespace trendrev::calibrate
