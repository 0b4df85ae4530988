#include "trendrev/price_series.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>

#include "trendrev/error.hpp"

namespace trendrev {

namespace {

int parse_fixed_int(std::string_view text, std::string_view whole) {
  int value = 0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc{} || ptr != text.data() + text.size()) {
    throw Error(ErrorKind::data_format, "malformed date '" + std::string(whole) + "'");
  }
  return value;
}

std::vector<int> spacings_in_days(std::span<const Observation> obs) {
  std::vector<int> gaps;
  gaps.reserve(obs.size());
  for (std::size_t i = 1; i < obs.size(); ++i) {
    gaps.push_back(static_cast<int>((obs[i].date - obs[i - 1].date).count()));
  }
  return gaps;
}

}  // namespace

Date parse_iso_date(std::string_view text) {
  if (text.size() != 10 || text[4] != '-' || text[7] != '-') {
    throw Error(ErrorKind::data_format, "malformed date '" + std::string(text) + "' (expected YYYY-MM-DD)");
  }
  using namespace std::chrono;
  const year_month_day ymd{year{parse_fixed_int(text.substr(0, 4), text)},
                           month{static_cast<unsigned>(parse_fixed_int(text.substr(5, 2), text))},
                           day{static_cast<unsigned>(parse_fixed_int(text.substr(8, 2), text))}};
  if (!ymd.ok()) throw Error(ErrorKind::data_format, "invalid date '" + std::string(text) + "'");
  return sys_days{ymd};
}

std::string format_iso_date(Date d) {
  using namespace std::chrono;
  const year_month_day ymd{d};
  char buf[16];
  std::snprintf(buf, sizeof buf, "%04d-%02u-%02u", static_cast<int>(ymd.year()),
                static_cast<unsigned>(ymd.month()), static_cast<unsigned>(ymd.day()));
  return buf;
}

Date subtract_years(Date d, double years_back) {
  using namespace std::chrono;
  const double whole = std::floor(years_back);
  const double frac = years_back - whole;
  year_month_day ymd{d};
  ymd -= std::chrono::years{static_cast<int>(whole)};
  if (!ymd.ok()) ymd = ymd.year() / ymd.month() / last;
  return sys_days{ymd} - days{static_cast<int>(std::lround(frac * 365.2425))};
}

std::string_view to_string(AssetKind k) noexcept { return k == AssetKind::spot ? "spot" : "future"; }

AssetKind asset_kind_from_string(std::string_view s) {
  if (s == "spot") return AssetKind::spot;
  if (s == "future") return AssetKind::future;
  throw Error(ErrorKind::invalid_argument, "unknown asset kind '" + std::string(s) + "' (expected spot|future)");
}

std::vector<double> PriceSeries::log_prices() const {
  std::vector<double> out;
  out.reserve(observations.size());
  for (const auto& o : observations) out.push_back(std::log(o.price));
  return out;
}

void PriceSeries::validate() const {
  for (std::size_t i = 0; i < observations.size(); ++i) {
    const auto& o = observations[i];
    if (!(o.price > 0.0) || !std::isfinite(o.price)) {
      throw Error(ErrorKind::data_format, symbol + ": non-positive price on " + format_iso_date(o.date));
    }
    if (i > 0 && !(observations[i - 1].date < o.date)) {
      throw Error(ErrorKind::data_format, symbol + ": dates not strictly increasing at " + format_iso_date(o.date));
    }
  }
  if (observations.size() >= 2 && detect_frequency(observations) != frequency) {
    throw Error(ErrorKind::data_format, symbol + ": median spacing inconsistent with " +
                                            std::string(to_string(frequency)) + " frequency");
  }
}

Frequency detect_frequency(std::span<const Observation> observations) {
  if (observations.size() < 2) {
    throw Error(ErrorKind::insufficient_data, "need at least two observations to detect frequency");
  }
  auto gaps = spacings_in_days(observations);
  auto mid = gaps.begin() + static_cast<std::ptrdiff_t>(gaps.size() / 2);
  std::nth_element(gaps.begin(), mid, gaps.end());
  return *mid <= 4 ? Frequency::daily : Frequency::monthly;
}

}  // namespace trendrev
