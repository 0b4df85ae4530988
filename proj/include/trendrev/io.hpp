#pragma once

#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "json.hpp"
#include "trendrev/calibrate.hpp"
#include "trendrev/empirics.hpp"
#include "trendrev/sim.hpp"

namespace trendrev::io {

using Json = nlohmann::ordered_json;

/// Shortest decimal that parses back to the same double.
std::string format_double(double v);

/// Reads `date,symbol,price` rows. Rows are grouped by symbol in order of first
/// appearance and sorted by date; frequency is detected per symbol.
/// Errors (data_format) name the offending line.
std::vector<PriceSeries> read_price_csv(std::istream& in, AssetKind kind = AssetKind::spot);
std::vector<PriceSeries> read_price_csv(const std::filesystem::path& path, AssetKind kind = AssetKind::spot);
void write_price_csv(std::ostream& out, std::span<const PriceSeries> pool);

/// path_id,step,t_years,pi
void write_paths_csv(std::ostream& out, std::span<const sim::SimPath> paths);

/// One row per grid horizon: tau_lt_native,tau_lt_years,n_raw,n_kept,slope,slope_se,c0..c3,se0..se3.
/// Missing statistics are written as empty fields.
void write_curve_csv(std::ostream& out, const PredictabilityCurve& curve);
PredictabilityCurve read_curve_csv(std::istream& in, double ratio);

Json curve_to_json(const PredictabilityCurve& curve);
PredictabilityCurve curve_from_json(const Json& j);

Json calibration_to_json(const calibrate::CalibrationResult& result, calibrate::WeightMode mode);
calibrate::CalibrationResult calibration_from_json(const Json& j);

Json report_to_json(const calibrate::CalibrationResult& result, const calibrate::CalibrationReport& report);

/// Reads a whole file; throws Error(data_format) when it cannot be opened.
std::string read_text_file(const std::filesystem::path& path);
/// Truncates and writes; throws Error(data_format) on failure.
void write_text_file(const std::filesystem::path& path, const std::string& text);

}  // namespace trendrev::io
