#pragma once

#include <string_view>

namespace trendrev {

// Every time quantity inside the library is expressed in years. Native
// horizons (trading days, months) are converted here and nowhere else.
inline constexpr double kTradingDaysPerYear = 252.0;
inline constexpr double kMonthsPerYear = 12.0;

enum class Frequency { daily, monthly };

std::string_view to_string(Frequency f) noexcept;
Frequency frequency_from_string(std::string_view s);

/// Native observation steps per year for the given sampling frequency.
constexpr double steps_per_year(Frequency f) noexcept {
  return f == Frequency::daily ? kTradingDaysPerYear : kMonthsPerYear;
}

constexpr double native_to_years(double steps, Frequency f) noexcept {
  return steps / steps_per_year(f);
}

/// A span of time in years.
struct Years {
  double value = 0.0;
};

constexpr Years years(double y) noexcept { return Years{y}; }
constexpr Years trading_days(double d) noexcept { return Years{d / kTradingDaysPerYear}; }
constexpr Years months(double m) noexcept { return Years{m / kMonthsPerYear}; }

}  // namespace trendrev
