#pragma once

#include <chrono>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "trendrev/units.hpp"

namespace trendrev {

using Date = std::chrono::sys_days;

/// Parses YYYY-MM-DD; throws Error(data_format) on anything else.
Date parse_iso_date(std::string_view text);
std::string format_iso_date(Date d);

/// Shifts a date by a (possibly fractional) number of years: whole years move
/// the calendar year (Feb 29 clamps to Feb 28), the remainder adds days.
Date subtract_years(Date d, double years);

enum class AssetKind { spot, future };

std::string_view to_string(AssetKind k) noexcept;
AssetKind asset_kind_from_string(std::string_view s);

struct Observation {
  Date date;
  double price = 0.0;
};

/// One instrument sampled at a fixed frequency. Dates strictly increase and
/// prices are strictly positive.
struct PriceSeries {
  std::string symbol;
  Frequency frequency = Frequency::daily;
  AssetKind kind = AssetKind::spot;
  std::vector<Observation> observations;

  std::size_t size() const noexcept { return observations.size(); }
  bool empty() const noexcept { return observations.empty(); }

  std::vector<double> log_prices() const;

  /// Checks ordering, positivity and that the median spacing matches frequency.
  void validate() const;
};

/// Frequency implied by the median calendar spacing: daily if <= 4 days.
Frequency detect_frequency(std::span<const Observation> observations);

}  // namespace trendrev
