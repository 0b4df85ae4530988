#include "trendrev/sim.hpp"

#include <array>
#include <cmath>
#include <cstdio>
#include <random>

#include "trendrev/error.hpp"
#include "trendrev/parallel.hpp"
#include "trendrev/rng.hpp"

namespace trendrev::sim {

namespace {

struct Cholesky2 {
  double l11 = 0.0, l21 = 0.0, l22 = 0.0;
};

Cholesky2 cholesky(const Matrix2& m) {
  if (!(m.a11 > 0.0)) throw Error(ErrorKind::internal, "covariance not positive definite");
  Cholesky2 c;
  c.l11 = std::sqrt(m.a11);
  c.l21 = m.a21 / c.l11;
  // Rank-deficient when g == 0 (the trend component is identically zero).
  c.l22 = std::sqrt(std::max(m.a22 - c.l21 * c.l21, 0.0));
  return c;
}

// (e^{-kappa t} - e^{-gamma t}) / (gamma - kappa), the off-diagonal of exp(A t).
double cross_decay(double kappa, double gamma, double t) {
  const double lo = std::min(kappa, gamma);
  const double gap = std::max(kappa, gamma) - lo;
  if (model::rates_degenerate(kappa, gamma)) return t * std::exp(-lo * t);
  return std::exp(-lo * t) * (-std::expm1(-gap * t)) / gap;
}

std::uint64_t fnv1a(const std::string& text) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : text) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

}  // namespace

void SimConfig::validate() const {
  params.validate();
  if (!(dt > 0.0) || !std::isfinite(dt)) throw Error(ErrorKind::invalid_argument, "dt must be finite and > 0");
  if (n_steps < 1) throw Error(ErrorKind::invalid_argument, "n_steps must be >= 1");
}

std::string SimConfig::digest() const {
  char buf[256];
  std::snprintf(buf, sizeof buf, "g=%a;kappa=%a;gamma=%a;sigma2=%a;dt=%a;n=%zu;paths=%zu;seed=%llu;burn=%zu",
                params.g, params.kappa, params.gamma, params.sigma2, dt, n_steps, n_paths,
                static_cast<unsigned long long>(seed), burn_in);
  char hex[17];
  std::snprintf(hex, sizeof hex, "%016llx", static_cast<unsigned long long>(fnv1a(buf)));
  return hex;
}

Matrix2 stationary_covariance(const model::ProcessParams& p) {
  // m has autocovariance V e^{-gamma |u|} with V = sigma^2 kappa g (gamma + kappa).
  const double v = p.sigma2 * p.kappa * p.g * (p.gamma + p.kappa);
  const double cross = p.sigma2 * p.kappa * p.g;  // V / (kappa + gamma)
  return {p.stationary_variance(), cross, cross, v};
}

ExactTransition exact_transition(const model::ProcessParams& p, double dt) {
  p.validate();
  if (!(dt > 0.0)) throw Error(ErrorKind::invalid_argument, "dt must be > 0");
  const double e_k = std::exp(-p.kappa * dt);
  const double e_g = std::exp(-p.gamma * dt);
  const double phi = cross_decay(p.kappa, p.gamma, dt);
  const Matrix2 s = stationary_covariance(p);

  // Q = S - F S F^T with F = exp(A dt); the leading 1 - e^{-x} factors go
  // through expm1 so that Q keeps full relative precision for small dt.
  ExactTransition tr;
  tr.propagator = {e_k, phi, 0.0, e_g};
  const double q11 = -s.a11 * std::expm1(-2.0 * p.kappa * dt) - 2.0 * e_k * phi * s.a12 - phi * phi * s.a22;
  const double q12 = -s.a12 * std::expm1(-(p.kappa + p.gamma) * dt) - phi * e_g * s.a22;
  const double q22 = -s.a22 * std::expm1(-2.0 * p.gamma * dt);
  tr.covariance = {q11, q12, q12, q22};
  return tr;
}

std::vector<SimPath> simulate(const SimConfig& config, unsigned threads) {
  config.validate();
  const ExactTransition tr = exact_transition(config.params, config.dt);
  const Cholesky2 step_chol = cholesky(tr.covariance);
  const Cholesky2 init_chol = cholesky(stationary_covariance(config.params));
  const Matrix2& f = tr.propagator;
  const std::string meta = config.digest();

  std::vector<SimPath> paths(config.n_paths);
  parallel_for(config.n_paths, threads, [&](std::size_t index) {
    auto rng = make_substream(config.seed, index);
    std::normal_distribution<double> normal;

    const double z0 = normal(rng);
    const double z1 = normal(rng);
    double pi = init_chol.l11 * z0;
    double m = init_chol.l21 * z0 + init_chol.l22 * z1;

    auto advance = [&] {
      const double e0 = normal(rng);
      const double e1 = normal(rng);
      const double next_pi = f.a11 * pi + f.a12 * m + step_chol.l11 * e0;
      const double next_m = f.a22 * m + step_chol.l21 * e0 + step_chol.l22 * e1;
      pi = next_pi;
      m = next_m;
    };

    for (std::size_t k = 0; k < config.burn_in; ++k) advance();

    SimPath& out = paths[index];
    out.dt = config.dt;
    out.meta = meta;
    out.pi.resize(config.n_steps);
    for (std::size_t k = 0; k < config.n_steps; ++k) {
      if (k > 0) advance();
      if (!std::isfinite(pi)) throw Error(ErrorKind::internal, "non-finite state in simulation");
      out.pi[k] = pi;
    }
  });
  return paths;
}

PriceSeries to_price_series(const SimPath& path, Date start_date, Frequency frequency,
                            double base_drift, std::string symbol, AssetKind kind) {
  const double expected_dt = 1.0 / steps_per_year(frequency);
  if (std::abs(path.dt - expected_dt) > 1e-12 * expected_dt) {
    throw Error(ErrorKind::invalid_argument, "path dt " + std::to_string(path.dt) + " does not match " +
                                                 std::string(to_string(frequency)) + " frequency");
  }
  using namespace std::chrono;
  PriceSeries series;
  series.symbol = std::move(symbol);
  series.frequency = frequency;
  series.kind = kind;
  series.observations.reserve(path.pi.size());

  Date day = start_date;
  const year_month_day first{start_date};
  while (weekday{day}.iso_encoding() > 5) day += days{1};

  for (std::size_t k = 0; k < path.pi.size(); ++k) {
    const double t = static_cast<double>(k) * path.dt;
    Date stamp;
    if (frequency == Frequency::daily) {
      stamp = day;
      day += days{1};
      while (weekday{day}.iso_encoding() > 5) day += days{1};
    } else {
      year_month_day ymd = first + std::chrono::months{static_cast<int>(k)};
      if (!ymd.ok()) ymd = ymd.year() / ymd.month() / last;
      stamp = sys_days{ymd};
    }
    series.observations.push_back({stamp, std::exp(base_drift * t + path.pi[k])});
  }
  return series;
}

}  // namespace trendrev::sim
