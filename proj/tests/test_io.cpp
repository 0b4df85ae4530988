#include <gtest/gtest.h>

#include <bit>
#include <cmath>
#include <limits>
#include <random>
#include <sstream>

#include "support/ensemble.hpp"
#include "trendrev/error.hpp"
#include "trendrev/io.hpp"

namespace trendrev::io {
namespace {

struct Failure {
  ErrorKind kind = ErrorKind::internal;
  std::string message;
};

Failure failure_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return {e.kind(), e.what()};
  }
  return {};
}

std::vector<PriceSeries> parse(const std::string& text, AssetKind kind = AssetKind::spot) {
  std::istringstream in(text);
  return read_price_csv(in, kind);
}

// ---- format_double --------------------------------------------------------

TEST(FormatDouble, RoundTripsExactly) {
  std::mt19937_64 rng(17);
  for (int i = 0; i < 20000; ++i) {
    const double v = std::bit_cast<double>(rng());
    if (!std::isfinite(v)) continue;
    EXPECT_EQ(std::bit_cast<std::uint64_t>(std::strtod(format_double(v).c_str(), nullptr)), std::bit_cast<std::uint64_t>(v))
        << format_double(v);
  }
  for (double v : {0.0, -0.0, 0.1, 1.0 / 3.0, 1e-310, std::numeric_limits<double>::max(),
                   std::numeric_limits<double>::denorm_min()}) {
    EXPECT_EQ(std::bit_cast<std::uint64_t>(std::strtod(format_double(v).c_str(), nullptr)), std::bit_cast<std::uint64_t>(v));
  }
}

TEST(FormatDouble, IsShortest) {
  EXPECT_EQ(format_double(0.1), "0.1");
  EXPECT_EQ(format_double(100.0), "100");
  EXPECT_EQ(format_double(0.2016), "0.2016");
  EXPECT_EQ(format_double(std::nan("")), "nan");
  EXPECT_EQ(format_double(-std::numeric_limits<double>::infinity()), "-inf");
}

// ---- price CSV ------------------------------------------------------------

TEST(ReadPriceCsv, TwoMonthlyRows) {
  const auto pool = parse("date,symbol,price\n2020-01-01,SPX,100\n2020-02-01,SPX,110\n");
  ASSERT_EQ(pool.size(), 1u);
  EXPECT_EQ(pool[0].symbol, "SPX");
  EXPECT_EQ(pool[0].frequency, Frequency::monthly);
  EXPECT_EQ(pool[0].size(), 2u);
  EXPECT_EQ(pool[0].observations[1].price, 110.0);
  EXPECT_EQ(pool[0].kind, AssetKind::spot);
}

TEST(ReadPriceCsv, ZeroPriceNamesTheLine) {
  const auto f = failure_of([] { parse("date,symbol,price\n2020-01-01,SPX,100\n2020-02-01,SPX,0\n"); });
  EXPECT_EQ(f.kind, ErrorKind::data_format);
  EXPECT_NE(f.message.find("line 3"), std::string::npos) << f.message;
}

TEST(ReadPriceCsv, GroupsSortsAndKeepsKind) {
  const auto pool = parse(
      "date,symbol,price\r\n"
      "2020-01-03,B,2\r\n"
      "2020-01-02,A,1\r\n"
      "\r\n"
      "2020-01-02,B,1\r\n"
      "2020-01-03, A ,1.5\r\n",
      AssetKind::future);
  ASSERT_EQ(pool.size(), 2u);
  EXPECT_EQ(pool[0].symbol, "B");
  EXPECT_EQ(pool[1].symbol, "A");
  EXPECT_EQ(format_iso_date(pool[0].observations[0].date), "2020-01-02");
  EXPECT_EQ(pool[0].observations[1].price, 2.0);
  EXPECT_EQ(pool[1].observations[1].price, 1.5);
  EXPECT_EQ(pool[0].frequency, Frequency::daily);
  EXPECT_EQ(pool[1].kind, AssetKind::future);
}

TEST(ReadPriceCsv, RejectsMalformedInput) {
  struct Case {
    const char* text;
    const char* needle;
  };
  const Case cases[] = {
      {"", "empty file"},
      {"date,price\n", "line 1"},
      {"date,symbol,price\n", "no data rows"},
      {"date,symbol,price\n2020-01-01,SPX\n", "line 2"},
      {"date,symbol,price\n2020-01-01,SPX,abc\n", "line 2"},
      {"date,symbol,price\n2020-01-01,SPX,1\n01/02/2020,SPX,1\n", "line 3"},
      {"date,symbol,price\n2020-01-01,SPX,1\n2020-01-01,SPX,2\n", "duplicate"},
      {"date,symbol,price\n2020-01-01,,1\n", "empty symbol"},
      {"date,symbol,price\n2020-01-01,SPX,-5\n", "line 2"},
      {"date,symbol,price\n2020-01-01,SPX,1\n2020-01-02,ONE,1\n2020-01-03,SPX,1\n", "ONE"},
  };
  for (const auto& c : cases) {
    const auto f = failure_of([&] { parse(c.text); });
    EXPECT_EQ(f.kind, ErrorKind::data_format) << c.text;
    EXPECT_NE(f.message.find(c.needle), std::string::npos) << c.text << " -> " << f.message;
  }
}

TEST(ReadPriceCsv, RejectsMixedFrequencySymbol) {
  std::string text = "date,symbol,price\n";
  // Monthly spacing with a burst of daily rows at the end.
  for (int m = 1; m <= 9; ++m) text += "2020-0" + std::to_string(m) + "-15,X,1\n";
  text += "2020-09-16,X,1\n2020-09-17,X,1\n";
  const auto f = failure_of([&] { parse(text); });
  EXPECT_EQ(f.kind, ErrorKind::data_format);
  EXPECT_NE(f.message.find("mixes daily and monthly"), std::string::npos) << f.message;
}

TEST(ReadPriceCsv, MissingFileIsDataError) {
  EXPECT_EQ(failure_of([] { read_price_csv(std::filesystem::path("/nonexistent/prices.csv")); }).kind,
            ErrorKind::data_format);
}

TEST(PriceCsv, SimulatedSeriesRoundTrip) {
  for (auto f : {Frequency::daily, Frequency::monthly}) {
    const auto pool = testing::simulate_pool(model::futures_preset(), 3, 4, 5, f);
    std::ostringstream out;
    write_price_csv(out, pool);
    const auto back = parse(out.str(), AssetKind::future);
    ASSERT_EQ(back.size(), pool.size());
    for (std::size_t i = 0; i < pool.size(); ++i) {
      EXPECT_EQ(back[i].symbol, pool[i].symbol);
      EXPECT_EQ(back[i].frequency, pool[i].frequency);
      EXPECT_EQ(back[i].kind, pool[i].kind);
      ASSERT_EQ(back[i].size(), pool[i].size());
      for (std::size_t k = 0; k < pool[i].size(); ++k) {
        EXPECT_EQ(back[i].observations[k].date, pool[i].observations[k].date);
        EXPECT_EQ(back[i].observations[k].price, pool[i].observations[k].price);
      }
    }
    std::ostringstream again;
    write_price_csv(again, back);
    EXPECT_EQ(again.str(), out.str());
  }
}

TEST(PathsCsv, WritesOneRowPerStep) {
  const std::vector<sim::SimPath> paths{{{0.5, -0.25}, 0.5, "m"}, {{1.0}, 0.5, "m"}};
  std::ostringstream out;
  write_paths_csv(out, paths);
  EXPECT_EQ(out.str(), "path_id,step,t_years,pi\n0,0,0,0.5\n0,1,0.5,-0.25\n1,0,0,1\n");
}

// ---- curve ----------------------------------------------------------------

PredictabilityCurve sample_curve() {
  // 22 years of data: short horizons have a few anchors, 190 months has none.
  const auto pool = testing::simulate_pool(model::spot_preset(), 3, 22, 21, Frequency::monthly);
  auto cfg = DetrendConfig::defaults_for(Frequency::monthly);
  cfg.tau_lt_grid.push_back(190);
  return predictability_curve(pool, cfg);
}

void expect_same_statistics(const PredictabilityCurve& a, const PredictabilityCurve& b) {
  EXPECT_EQ(a.frequency, b.frequency);
  EXPECT_EQ(a.ratio, b.ratio);
  ASSERT_EQ(a.entries.size(), b.entries.size());
  for (std::size_t k = 0; k < a.entries.size(); ++k) {
    const auto& x = a.entries[k];
    const auto& y = b.entries[k];
    EXPECT_EQ(x.tau_lt_native, y.tau_lt_native);
    EXPECT_EQ(x.tau_gt_native, y.tau_gt_native);
    EXPECT_EQ(x.tau_lt_years, y.tau_lt_years);
    EXPECT_EQ(x.n_raw, y.n_raw);
    EXPECT_EQ(x.n_kept, y.n_kept);
    ASSERT_EQ(x.empty(), y.empty());
    if (!x.empty()) {
      EXPECT_EQ(x.linear->slope, y.linear->slope);
      EXPECT_EQ(x.linear->slope_stderr, y.linear->slope_stderr);
    }
    ASSERT_EQ(x.cubic.has_value(), y.cubic.has_value());
    if (x.cubic) {
      EXPECT_EQ(x.cubic->coef, y.cubic->coef);
      EXPECT_EQ(x.cubic->stderrs, y.cubic->stderrs);
    }
  }
}

TEST(CurveCsv, RoundTripsStatistics) {
  const auto curve = sample_curve();
  ASSERT_TRUE(curve.entries.back().empty());
  std::ostringstream out;
  write_curve_csv(out, curve);
  std::istringstream in(out.str());
  const auto back = read_curve_csv(in, curve.ratio);
  expect_same_statistics(curve, back);
  std::ostringstream again;
  write_curve_csv(again, back);
  EXPECT_EQ(again.str(), out.str());
}

TEST(CurveCsv, EmptyEntryHasEmptyFields) {
  const auto curve = sample_curve();
  std::ostringstream out;
  write_curve_csv(out, curve);
  const std::string text = out.str();
  const std::string last = text.substr(text.rfind('\n', text.size() - 2) + 1);
  EXPECT_EQ(last, "190,15.833333333333334,0,0,,,,,,,,,,\n");
}

TEST(CurveCsv, RejectsBadHeader) {
  std::istringstream in("tau,slope\n");
  EXPECT_EQ(failure_of([&] { read_curve_csv(in, 0.2); }).kind, ErrorKind::data_format);
}

TEST(CurveJson, RoundTripsAndKeepsKeyOrder) {
  const auto curve = sample_curve();
  const Json j = curve_to_json(curve);
  const auto back = curve_from_json(Json::parse(j.dump()));
  expect_same_statistics(curve, back);
  EXPECT_EQ(curve_to_json(back).dump(), j.dump());
  const auto& first = j.at("entries").at(0);
  std::vector<std::string> keys;
  for (auto it = first.begin(); it != first.end(); ++it) keys.push_back(it.key());
  EXPECT_EQ(keys, (std::vector<std::string>{"tau_lt_native", "tau_lt_years", "tau_gt_native", "n_raw", "n_kept", "slope",
                                            "slope_se", "c0", "c1", "c2", "c3", "se0", "se1", "se2", "se3", "status",
                                            "note"}));
  EXPECT_EQ(j.at("entries").back().at("status"), "empty");
  EXPECT_TRUE(j.at("entries").back().at("slope").is_null());
}

TEST(CurveJson, MalformedIsDataError) {
  EXPECT_EQ(failure_of([] { curve_from_json(Json::parse(R"({"ratio": 0.2})")); }).kind, ErrorKind::data_format);
}

// ---- calibration and report ----------------------------------------------

TEST(CalibrationJson, RoundTrips) {
  calibrate::CalibrationResult r;
  r.params = {0.21, 0.07, 8.1, 0.2};
  r.ratio = 0.2;
  r.loss = 1.25e-5;
  r.n_iter = 321;
  r.converged = true;
  r.starts_converged = 9;
  r.residuals.push_back({0.04, 0.008, 0.012, 0.0115, 0.0005, 2.5e4});
  r.residuals.push_back({5.0, 1.0, -0.05, std::nan(""), std::nan(""), 1.0});
  const Json j = calibration_to_json(r, calibrate::WeightMode::uniform);
  EXPECT_EQ(j.at("weight_mode"), "uniform");
  EXPECT_DOUBLE_EQ(j.at("timescales").at("mean_reversion_years").get<double>(), 1.0 / 0.07);
  const auto back = calibration_from_json(Json::parse(j.dump()));
  EXPECT_EQ(back.params.g, r.params.g);
  EXPECT_EQ(back.params.kappa, r.params.kappa);
  EXPECT_EQ(back.params.gamma, r.params.gamma);
  EXPECT_EQ(back.params.sigma2, r.params.sigma2);
  EXPECT_EQ(back.loss, r.loss);
  EXPECT_EQ(back.n_iter, r.n_iter);
  EXPECT_EQ(back.converged, r.converged);
  ASSERT_EQ(back.residuals.size(), 2u);
  EXPECT_EQ(back.residuals[0].weight, 2.5e4);
  EXPECT_TRUE(std::isnan(back.residuals[1].slope_fitted));
  EXPECT_EQ(calibration_to_json(back, calibrate::WeightMode::uniform).dump(), j.dump());
}

TEST(CalibrationJson, InvalidParamsAreRejected) {
  const Json j = Json::parse(R"({"params": {"g": -1, "kappa": 1, "gamma": 1, "sigma2": 1}, "ratio": 0.2,
                                 "loss": 0, "n_iter": 1, "converged": true})");
  EXPECT_THROW(calibration_from_json(j), Error);
}

TEST(ReportJson, CarriesBandAndNullCrossing) {
  calibrate::CalibrationResult r;
  r.params = {0.0, 0.5, 3.0, 0.2};
  r.converged = true;
  const auto rep = calibrate::report(r, 0.01);
  const Json j = report_to_json(r, rep);
  EXPECT_TRUE(j.at("zero_crossing_years").is_null());
  EXPECT_EQ(j.at("delta").get<double>(), rep.band.delta);
  EXPECT_EQ(j.at("price_factor").get<double>(), rep.price_factor);
}

TEST(TextFiles, ReportMissingPaths) {
  EXPECT_EQ(failure_of([] { read_text_file("/nonexistent/x.txt"); }).kind, ErrorKind::data_format);
  EXPECT_EQ(failure_of([] { write_text_file("/nonexistent/dir/x.txt", "x"); }).kind, ErrorKind::data_format);
}

}  // namespace
}  // namespace trendrev::io
