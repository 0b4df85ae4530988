#include "trendrev/empirics.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "trendrev/error.hpp"
#include "trendrev/parallel.hpp"

namespace trendrev {

namespace {

constexpr double kDaysPerYear = 365.2425;
constexpr double kMinRawStd = 1e-12;

int window_tolerance_days(Frequency f) { return f == Frequency::daily ? 7 : 31; }

// Log prices and trend-window starts of one series, computed once per series.
struct PreparedSeries {
  const PriceSeries* series = nullptr;
  std::vector<double> log_price;
  std::vector<std::ptrdiff_t> window_start;
};

PreparedSeries prepare(const PriceSeries& s, double trend_window_years) {
  return {&s, s.log_prices(), trend_window_starts(s, trend_window_years)};
}

std::optional<DetrendedReturns> detrend_at(const PreparedSeries& p, std::size_t anchor, const DetrendConfig& cfg,
                                           int tau_lt, int tau_gt) {
  const auto& lp = p.log_price;
  const auto a = static_cast<std::size_t>(tau_lt);
  const auto b = static_cast<std::size_t>(tau_gt);
  if (anchor < a || anchor + b >= lp.size()) return std::nullopt;

  std::ptrdiff_t start = p.window_start[anchor];
  double window_years = cfg.trend_window_years;
  if (start < 0) {
    if (cfg.min_history || anchor == 0) return std::nullopt;
    // Exploratory mode: shrink T to the history available at the anchor.
    start = 0;
    const auto& obs = p.series->observations;
    window_years = static_cast<double>((obs[anchor].date - obs[0].date).count()) / kDaysPerYear;
    if (!(window_years > 0.0)) return std::nullopt;
  }

  const Frequency f = p.series->frequency;
  const double tau_lt_years = native_to_years(tau_lt, f);
  const double tau_gt_years = native_to_years(tau_gt, f);
  DetrendedReturns r;
  r.mu = (lp[anchor] - lp[static_cast<std::size_t>(start)]) / window_years;
  r.x = lp[anchor] - lp[anchor - a] - r.mu * tau_lt_years;
  r.y = lp[anchor + b] - lp[anchor] - r.mu * tau_gt_years;
  return r;
}

double population_std(std::span<const double> v) {
  if (v.empty()) return 0.0;
  double mean = 0.0;
  for (double x : v) mean += x;
  mean /= static_cast<double>(v.size());
  double ss = 0.0;
  for (double x : v) ss += (x - mean) * (x - mean);
  return std::sqrt(ss / static_cast<double>(v.size()));
}

void validate_pool(std::span<const PriceSeries> pool) {
  if (pool.empty()) throw Error(ErrorKind::invalid_argument, "empty series pool");
  for (const auto& s : pool) {
    if (s.frequency != pool.front().frequency) {
      throw Error(ErrorKind::invalid_argument, "pool mixes daily and monthly series (" + s.symbol + ")");
    }
  }
}

}  // namespace

std::vector<int> DetrendConfig::default_grid(Frequency f) {
  if (f == Frequency::daily) return {10, 20, 40, 80, 160, 320, 480, 640, 960, 1280};
  return {5, 10, 15, 20, 25, 30, 40, 50, 60};
}

DetrendConfig DetrendConfig::defaults_for(Frequency f) {
  DetrendConfig cfg;
  cfg.tau_lt_grid = default_grid(f);
  return cfg;
}

int DetrendConfig::future_horizon(int tau_lt) const {
  return std::max(1, static_cast<int>(std::lround(ratio * tau_lt)));
}

void DetrendConfig::validate(Frequency f) const {
  auto fail = [](const std::string& what) { throw Error(ErrorKind::invalid_argument, what); };
  if (!(ratio > 0.0) || ratio > 1.0) fail("ratio must lie in (0, 1]");
  if (!(outlier_cut > 0.0)) fail("outlier cut must be > 0");
  if (!(trend_window_years > 0.0) || !std::isfinite(trend_window_years)) fail("trend window must be > 0");
  if (tau_lt_grid.empty()) fail("empty tau_lt grid");
  int max_tau = 0;
  for (int tau : tau_lt_grid) {
    if (tau <= 0) fail("grid horizons must be positive");
    max_tau = std::max(max_tau, tau);
  }
  if (!(trend_window_years > native_to_years(max_tau, f) * (1.0 + ratio))) {
    fail("trend window must exceed max(tau_lt) * (1 + ratio)");
  }
}

std::vector<std::ptrdiff_t> trend_window_starts(const PriceSeries& series, double trend_window_years) {
  const auto& obs = series.observations;
  const auto tolerance = std::chrono::days{window_tolerance_days(series.frequency)};
  std::vector<std::ptrdiff_t> starts(obs.size(), -1);
  for (std::size_t i = 0; i < obs.size(); ++i) {
    const Date target = subtract_years(obs[i].date, trend_window_years);
    auto it = std::upper_bound(obs.begin(), obs.begin() + static_cast<std::ptrdiff_t>(i), target,
                               [](Date d, const Observation& o) { return d < o.date; });
    if (it == obs.begin()) continue;
    --it;
    if (it->date >= target - tolerance) starts[i] = it - obs.begin();
  }
  return starts;
}

std::optional<double> long_trend(const PriceSeries& series, Date t, double trend_window_years) {
  const auto& obs = series.observations;
  auto it = std::upper_bound(obs.begin(), obs.end(), t, [](Date d, const Observation& o) { return d < o.date; });
  if (it == obs.begin()) return std::nullopt;
  const auto anchor = static_cast<std::size_t>(it - obs.begin() - 1);
  const Date target = subtract_years(obs[anchor].date, trend_window_years);
  auto start = std::upper_bound(obs.begin(), obs.begin() + static_cast<std::ptrdiff_t>(anchor), target,
                                [](Date d, const Observation& o) { return d < o.date; });
  if (start == obs.begin()) return std::nullopt;
  --start;
  if (start->date < target - std::chrono::days{window_tolerance_days(series.frequency)}) return std::nullopt;
  return (std::log(obs[anchor].price) - std::log(start->price)) / trend_window_years;
}

std::optional<DetrendedReturns> detrended_returns(const PriceSeries& series, std::size_t anchor,
                                                  const DetrendConfig& cfg, int tau_lt) {
  // Only observations up to anchor + tau_gt are ever read.
  PriceSeries visible = series;
  const std::size_t last = std::min(series.size(), anchor + static_cast<std::size_t>(cfg.future_horizon(tau_lt)) + 1);
  visible.observations.resize(last);
  return detrend_at(prepare(visible, cfg.trend_window_years), anchor, cfg, tau_lt, cfg.future_horizon(tau_lt));
}

PairPool build_pairs(std::span<const PriceSeries> pool, const DetrendConfig& cfg, int tau_lt) {
  validate_pool(pool);
  cfg.validate(pool.front().frequency);
  if (tau_lt <= 0) throw Error(ErrorKind::invalid_argument, "tau_lt must be positive");

  PairPool out;
  out.tau_lt = tau_lt;
  out.tau_gt = cfg.future_horizon(tau_lt);

  std::vector<double> raw_x, raw_y;
  std::vector<std::size_t> group_begin;
  for (std::size_t s = 0; s < pool.size(); ++s) {
    group_begin.push_back(out.pairs.size());
    const PreparedSeries prepared = prepare(pool[s], cfg.trend_window_years);
    for (std::size_t anchor = 0; anchor < pool[s].size(); ++anchor) {
      auto r = detrend_at(prepared, anchor, cfg, tau_lt, out.tau_gt);
      if (!r) continue;
      raw_x.push_back(r->x);
      raw_y.push_back(r->y);
      out.pairs.push_back({0.0, 0.0, static_cast<std::uint32_t>(s), pool[s].observations[anchor].date});
    }
  }
  group_begin.push_back(out.pairs.size());
  if (out.pairs.empty()) return out;

  auto normalise = [&](std::size_t begin, std::size_t end, double& x_scale, double& y_scale) {
    const std::span<const double> xs(raw_x.data() + begin, end - begin);
    const std::span<const double> ys(raw_y.data() + begin, end - begin);
    x_scale = population_std(xs);
    y_scale = population_std(ys);
    const bool x_ok = x_scale >= kMinRawStd;
    const bool y_ok = y_scale >= kMinRawStd;
    if (!x_ok || !y_ok) out.degenerate = true;
    for (std::size_t i = begin; i < end; ++i) {
      out.pairs[i].x = x_ok ? raw_x[i] / x_scale : 0.0;
      out.pairs[i].y = y_ok ? raw_y[i] / y_scale : 0.0;
    }
  };

  if (cfg.normalization == Normalization::pooled) {
    normalise(0, out.pairs.size(), out.x_scale, out.y_scale);
  } else {
    for (std::size_t s = 0; s < pool.size(); ++s) {
      double xs = 0.0, ys = 0.0;
      if (group_begin[s + 1] > group_begin[s]) normalise(group_begin[s], group_begin[s + 1], xs, ys);
    }
    out.x_scale = out.y_scale = 1.0;
  }
  return out;
}

bool PredictabilityCurve::all_empty() const noexcept { return non_empty() == 0; }

std::size_t PredictabilityCurve::non_empty() const noexcept {
  return static_cast<std::size_t>(
      std::count_if(entries.begin(), entries.end(), [](const CurveEntry& e) { return !e.empty(); }));
}

PredictabilityCurve predictability_curve(std::span<const PriceSeries> pool, const DetrendConfig& cfg,
                                         unsigned threads) {
  validate_pool(pool);
  const Frequency f = pool.front().frequency;
  cfg.validate(f);

  PredictabilityCurve curve;
  curve.frequency = f;
  curve.ratio = cfg.ratio;
  curve.entries.resize(cfg.tau_lt_grid.size());

  parallel_for(cfg.tau_lt_grid.size(), threads, [&](std::size_t k) {
    CurveEntry& e = curve.entries[k];
    e.tau_lt_native = cfg.tau_lt_grid[k];
    e.tau_gt_native = cfg.future_horizon(e.tau_lt_native);
    e.tau_lt_years = native_to_years(e.tau_lt_native, f);

    const PairPool pairs = build_pairs(pool, cfg, e.tau_lt_native);
    e.n_raw = pairs.pairs.size();
    if (pairs.pairs.empty()) {
      e.note = "no qualifying anchor dates";
      return;
    }
    try {
      e.linear = fit_linear(pairs.pairs, cfg.outlier_cut);
      e.n_kept = e.linear->n_kept;
    } catch (const Error& err) {
      e.note = err.what();
      return;
    }
    try {
      e.cubic = fit_cubic(pairs.pairs, cfg.outlier_cut);
    } catch (const Error& err) {
      e.note = std::string("cubic: ") + err.what();
    }
  });
  return curve;
}

}  // namespace trendrev
