#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "trendrev/model.hpp"
#include "trendrev/price_series.hpp"

namespace trendrev::sim {

struct SimConfig {
  model::ProcessParams params;
  double dt = 1.0 / kTradingDaysPerYear;  ///< years
  std::size_t n_steps = 0;
  std::size_t n_paths = 1;
  std::uint64_t seed = 0;
  std::size_t burn_in = 0;  ///< steps discarded after the stationary draw

  void validate() const;
  /// Hex digest of every field; identical configs give identical digests.
  std::string digest() const;
};

struct SimPath {
  std::vector<double> pi;  ///< de-trended log-price at t = k * dt, k = 0..n_steps-1
  double dt = 0.0;
  std::string meta;        ///< SimConfig::digest() of the generating config
};

/// Row-major 2x2 matrix acting on the state (pi, m).
struct Matrix2 {
  double a11 = 0.0, a12 = 0.0;
  double a21 = 0.0, a22 = 0.0;
};

/// One-step law of the state (pi, m), where m is the trending part of the noise:
///   state(t + dt) = propagator * state(t) + N(0, covariance).
struct ExactTransition {
  Matrix2 propagator;
  Matrix2 covariance;
};

/// Stationary covariance of (pi, m).
Matrix2 stationary_covariance(const model::ProcessParams& params);

ExactTransition exact_transition(const model::ProcessParams& params, double dt);

/// Draws n_paths independent paths. Path i uses substream i of config.seed, so
/// the result is identical for every thread count.
std::vector<SimPath> simulate(const SimConfig& config, unsigned threads = 0);

/// Wraps a path as prices with log p = base_drift * t + pi(t). Daily paths
/// (dt = 1/252) are stamped on consecutive weekdays, monthly paths (dt = 1/12)
/// on consecutive months. Throws Error(invalid_argument) on a dt mismatch.
PriceSeries to_price_series(const SimPath& path, Date start_date, Frequency frequency,
                            double base_drift, std::string symbol = "SIM",
                            AssetKind kind = AssetKind::future);

}  // namespace trendrev::sim
