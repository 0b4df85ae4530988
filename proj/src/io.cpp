#include "trendrev/io.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>

#include "trendrev/error.hpp"

namespace trendrev::io {

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

std::vector<std::string_view> split_csv(std::string_view line) {
  std::vector<std::string_view> fields;
  std::size_t begin = 0;
  for (;;) {
    const std::size_t comma = line.find(',', begin);
    fields.push_back(trim(line.substr(begin, comma == std::string_view::npos ? std::string_view::npos : comma - begin)));
    if (comma == std::string_view::npos) break;
    begin = comma + 1;
  }
  return fields;
}

[[noreturn]] void data_error(std::size_t line, const std::string& what) {
  throw Error(ErrorKind::data_format, "line " + std::to_string(line) + ": " + what);
}

double parse_double(std::string_view text, std::size_t line, std::string_view field) {
  double v = 0.0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (text.empty() || ec != std::errc{} || ptr != text.data() + text.size()) {
    data_error(line, "malformed " + std::string(field) + " '" + std::string(text) + "'");
  }
  return v;
}

long long parse_int(std::string_view text, std::size_t line, std::string_view field) {
  long long v = 0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (text.empty() || ec != std::errc{} || ptr != text.data() + text.size()) {
    data_error(line, "malformed " + std::string(field) + " '" + std::string(text) + "'");
  }
  return v;
}

// A symbol sampled at both daily and monthly spacing cannot be handled as one series.
void check_single_frequency(const PriceSeries& s) {
  std::size_t short_gaps = 0, long_gaps = 0;
  for (std::size_t i = 1; i < s.observations.size(); ++i) {
    const auto gap = (s.observations[i].date - s.observations[i - 1].date).count();
    if (gap <= 4) ++short_gaps;
    if (gap >= 25) ++long_gaps;
  }
  const std::size_t gaps = s.observations.size() - 1;
  const bool mixed = s.frequency == Frequency::monthly ? short_gaps > 0 : long_gaps * 20 > gaps;
  if (mixed) {
    throw Error(ErrorKind::data_format, "symbol " + s.symbol + " mixes daily and monthly spacing");
  }
}

Json optional_number(const std::optional<double>& v) {
  if (v && std::isfinite(*v)) return Json(*v);
  return Json(nullptr);
}

std::optional<double> number_or_null(const Json& j, const char* key) {
  if (!j.contains(key) || j.at(key).is_null()) return std::nullopt;
  return j.at(key).get<double>();
}

}  // namespace

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  if (ec != std::errc{}) throw Error(ErrorKind::internal, "float formatting failed");
  return {buf, ptr};
}

std::vector<PriceSeries> read_price_csv(std::istream& in, AssetKind kind) {
  std::string line;
  std::size_t line_no = 0;
  bool have_header = false;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    const auto fields = split_csv(line);
    if (fields.size() != 3 || fields[0] != "date" || fields[1] != "symbol" || fields[2] != "price") {
      data_error(line_no, "expected header 'date,symbol,price'");
    }
    have_header = true;
    break;
  }
  if (!have_header) throw Error(ErrorKind::data_format, "empty file");

  std::vector<PriceSeries> pool;
  std::map<std::string, std::size_t, std::less<>> index;
  std::vector<std::vector<std::size_t>> row_lines;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    const auto fields = split_csv(line);
    if (fields.size() != 3) data_error(line_no, "expected 3 fields, got " + std::to_string(fields.size()));
    if (fields[1].empty()) data_error(line_no, "empty symbol");
    Date date;
    try {
      date = parse_iso_date(fields[0]);
    } catch (const Error& e) {
      data_error(line_no, e.what());
    }
    const double price = parse_double(fields[2], line_no, "price");
    if (!(price > 0.0) || !std::isfinite(price)) data_error(line_no, "price must be positive and finite");

    auto it = index.find(fields[1]);
    if (it == index.end()) {
      it = index.emplace(std::string(fields[1]), pool.size()).first;
      PriceSeries s;
      s.symbol = std::string(fields[1]);
      s.kind = kind;
      pool.push_back(std::move(s));
      row_lines.emplace_back();
    }
    pool[it->second].observations.push_back({date, price});
    row_lines[it->second].push_back(line_no);
  }
  if (pool.empty()) throw Error(ErrorKind::data_format, "no data rows");

  for (std::size_t k = 0; k < pool.size(); ++k) {
    auto& s = pool[k];
    std::vector<std::size_t> order(s.observations.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return s.observations[a].date < s.observations[b].date; });
    std::vector<Observation> sorted;
    sorted.reserve(order.size());
    for (std::size_t i = 0; i < order.size(); ++i) {
      if (i > 0 && s.observations[order[i]].date == s.observations[order[i - 1]].date) {
        data_error(row_lines[k][order[i]], "duplicate (date, symbol) " + format_iso_date(s.observations[order[i]].date) +
                                               "," + s.symbol);
      }
      sorted.push_back(s.observations[order[i]]);
    }
    s.observations = std::move(sorted);
    if (s.observations.size() < 2) {
      throw Error(ErrorKind::data_format, "symbol " + s.symbol + " has fewer than two observations");
    }
    s.frequency = detect_frequency(s.observations);
    check_single_frequency(s);
    s.validate();
  }
  return pool;
}

std::vector<PriceSeries> read_price_csv(const std::filesystem::path& path, AssetKind kind) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::data_format, "cannot open " + path.string());
  return read_price_csv(in, kind);
}

void write_price_csv(std::ostream& out, std::span<const PriceSeries> pool) {
  out << "date,symbol,price\n";
  for (const auto& s : pool) {
    for (const auto& o : s.observations) out << format_iso_date(o.date) << ',' << s.symbol << ',' << format_double(o.price) << '\n';
  }
}

void write_paths_csv(std::ostream& out, std::span<const sim::SimPath> paths) {
  out << "path_id,step,t_years,pi\n";
  for (std::size_t p = 0; p < paths.size(); ++p) {
    for (std::size_t k = 0; k < paths[p].pi.size(); ++k) {
      out << p << ',' << k << ',' << format_double(static_cast<double>(k) * paths[p].dt) << ','
          << format_double(paths[p].pi[k]) << '\n';
    }
  }
}

void write_curve_csv(std::ostream& out, const PredictabilityCurve& curve) {
  out << "tau_lt_native,tau_lt_years,n_raw,n_kept,slope,slope_se,c0,c1,c2,c3,se0,se1,se2,se3\n";
  for (const auto& e : curve.entries) {
    out << e.tau_lt_native << ',' << format_double(e.tau_lt_years) << ',' << e.n_raw << ',' << e.n_kept << ',';
    if (e.linear) out << format_double(e.linear->slope) << ',' << format_double(e.linear->slope_stderr);
    else out << ',';
    for (int k = 0; k < 4; ++k) {
      out << ',';
      if (e.cubic) out << format_double(e.cubic->coef[static_cast<std::size_t>(k)]);
    }
    for (int k = 0; k < 4; ++k) {
      out << ',';
      if (e.cubic) out << format_double(e.cubic->stderrs[static_cast<std::size_t>(k)]);
    }
    out << '\n';
  }
}

PredictabilityCurve read_curve_csv(std::istream& in, double ratio) {
  std::string line;
  std::size_t line_no = 0;
  if (!std::getline(in, line)) throw Error(ErrorKind::data_format, "empty curve file");
  ++line_no;
  const auto header = split_csv(line);
  if (header.size() != 14 || header[0] != "tau_lt_native" || header[4] != "slope") {
    data_error(line_no, "unexpected curve header");
  }
  PredictabilityCurve curve;
  curve.ratio = ratio;
  bool frequency_known = false;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    const auto f = split_csv(line);
    if (f.size() != 14) data_error(line_no, "expected 14 fields");
    CurveEntry e;
    e.tau_lt_native = static_cast<int>(parse_int(f[0], line_no, "tau_lt_native"));
    e.tau_lt_years = parse_double(f[1], line_no, "tau_lt_years");
    e.n_raw = static_cast<std::size_t>(parse_int(f[2], line_no, "n_raw"));
    e.n_kept = static_cast<std::size_t>(parse_int(f[3], line_no, "n_kept"));
    if (!f[4].empty()) {
      LinearFit lin;
      lin.slope = parse_double(f[4], line_no, "slope");
      lin.slope_stderr = f[5].empty() ? 0.0 : parse_double(f[5], line_no, "slope_se");
      lin.n_kept = e.n_kept;
      e.linear = lin;
    }
    if (!f[6].empty()) {
      CubicFit cub;
      for (std::size_t k = 0; k < 4; ++k) {
        cub.coef[k] = parse_double(f[6 + k], line_no, "cubic coefficient");
        cub.stderrs[k] = parse_double(f[10 + k], line_no, "cubic stderr");
      }
      cub.n_kept = e.n_kept;
      e.cubic = cub;
    }
    if (!frequency_known && e.tau_lt_years > 0.0) {
      const double per_year = e.tau_lt_native / e.tau_lt_years;
      curve.frequency = std::abs(per_year - kMonthsPerYear) < 1e-6 ? Frequency::monthly : Frequency::daily;
      frequency_known = true;
    }
    e.tau_gt_native = std::max(1, static_cast<int>(std::lround(ratio * e.tau_lt_native)));
    curve.entries.push_back(std::move(e));
  }
  return curve;
}

Json curve_to_json(const PredictabilityCurve& curve) {
  Json j;
  j["frequency"] = std::string(to_string(curve.frequency));
  j["ratio"] = curve.ratio;
  Json rows = Json::array();
  for (const auto& e : curve.entries) {
    Json r;
    r["tau_lt_native"] = e.tau_lt_native;
    r["tau_lt_years"] = e.tau_lt_years;
    r["tau_gt_native"] = e.tau_gt_native;
    r["n_raw"] = e.n_raw;
    r["n_kept"] = e.n_kept;
    r["slope"] = optional_number(e.linear ? std::optional(e.linear->slope) : std::nullopt);
    r["slope_se"] = optional_number(e.linear ? std::optional(e.linear->slope_stderr) : std::nullopt);
    for (std::size_t k = 0; k < 4; ++k) {
      r["c" + std::to_string(k)] = optional_number(e.cubic ? std::optional(e.cubic->coef[k]) : std::nullopt);
    }
    for (std::size_t k = 0; k < 4; ++k) {
      r["se" + std::to_string(k)] = optional_number(e.cubic ? std::optional(e.cubic->stderrs[k]) : std::nullopt);
    }
    r["status"] = e.empty() ? "empty" : "ok";
    r["note"] = e.note;
    rows.push_back(std::move(r));
  }
  j["entries"] = std::move(rows);
  return j;
}

PredictabilityCurve curve_from_json(const Json& j) {
  try {
    PredictabilityCurve curve;
    curve.frequency = frequency_from_string(j.at("frequency").get<std::string>());
    curve.ratio = j.at("ratio").get<double>();
    for (const auto& r : j.at("entries")) {
      CurveEntry e;
      e.tau_lt_native = r.at("tau_lt_native").get<int>();
      e.tau_lt_years = r.at("tau_lt_years").get<double>();
      e.tau_gt_native = r.value("tau_gt_native", 0);
      e.n_raw = r.at("n_raw").get<std::size_t>();
      e.n_kept = r.at("n_kept").get<std::size_t>();
      e.note = r.value("note", std::string{});
      if (auto slope = number_or_null(r, "slope")) {
        e.linear = LinearFit{0.0, *slope, number_or_null(r, "slope_se").value_or(0.0), e.n_kept};
      }
      if (auto c0 = number_or_null(r, "c0")) {
        CubicFit cub;
        for (std::size_t k = 0; k < 4; ++k) {
          cub.coef[k] = number_or_null(r, ("c" + std::to_string(k)).c_str()).value_or(0.0);
          cub.stderrs[k] = number_or_null(r, ("se" + std::to_string(k)).c_str()).value_or(0.0);
        }
        cub.n_kept = e.n_kept;
        e.cubic = cub;
      }
      curve.entries.push_back(std::move(e));
    }
    return curve;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::data_format, std::string("malformed curve JSON: ") + e.what());
  }
}

Json calibration_to_json(const calibrate::CalibrationResult& result, calibrate::WeightMode mode) {
  Json j;
  j["params"] = {{"g", result.params.g},
                 {"kappa", result.params.kappa},
                 {"gamma", result.params.gamma},
                 {"sigma2", result.params.sigma2}};
  j["timescales"] = {{"mean_reversion_years", 1.0 / result.params.kappa},
                     {"trend_years", 1.0 / result.params.gamma},
                     {"trend_trading_days", kTradingDaysPerYear / result.params.gamma}};
  j["ratio"] = result.ratio;
  j["weight_mode"] = std::string(calibrate::to_string(mode));
  j["loss"] = result.loss;
  j["n_iter"] = result.n_iter;
  j["converged"] = result.converged;
  j["starts_converged"] = result.starts_converged;
  Json res = Json::array();
  for (const auto& r : result.residuals) {
    res.push_back({{"tau_lt_years", r.tau_lt_years},
                   {"tau_gt_years", r.tau_gt_years},
                   {"slope_empirical", r.slope_empirical},
                   {"slope_fitted", optional_number(r.slope_fitted)},
                   {"residual", optional_number(r.residual)},
                   {"weight", r.weight}});
  }
  j["residuals"] = std::move(res);
  return j;
}

calibrate::CalibrationResult calibration_from_json(const Json& j) {
  try {
    calibrate::CalibrationResult r;
    const auto& p = j.at("params");
    r.params = {p.at("g").get<double>(), p.at("kappa").get<double>(), p.at("gamma").get<double>(),
                p.at("sigma2").get<double>()};
    r.params.validate();
    r.ratio = j.at("ratio").get<double>();
    r.loss = j.at("loss").get<double>();
    r.n_iter = j.at("n_iter").get<int>();
    r.converged = j.at("converged").get<bool>();
    r.starts_converged = j.value("starts_converged", 0);
    for (const auto& row : j.value("residuals", Json::array())) {
      calibrate::Residual res;
      res.tau_lt_years = row.at("tau_lt_years").get<double>();
      res.tau_gt_years = row.at("tau_gt_years").get<double>();
      res.slope_empirical = row.at("slope_empirical").get<double>();
      res.slope_fitted = number_or_null(row, "slope_fitted").value_or(std::nan(""));
      res.residual = number_or_null(row, "residual").value_or(std::nan(""));
      res.weight = row.at("weight").get<double>();
      r.residuals.push_back(res);
    }
    return r;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::data_format, std::string("malformed calibration JSON: ") + e.what());
  }
}

Json report_to_json(const calibrate::CalibrationResult& result, const calibrate::CalibrationReport& rep) {
  Json j;
  j["g"] = result.params.g;
  j["kappa"] = result.params.kappa;
  j["gamma"] = result.params.gamma;
  j["daily_vol"] = rep.band.daily_vol;
  j["sigma2"] = rep.band.sigma2;
  j["delta"] = rep.band.delta;
  j["t_mr_years"] = rep.band.t_mr;
  j["price_factor"] = rep.price_factor;
  j["zero_crossing_years"] = optional_number(rep.zero_crossing_years);
  j["ratio"] = result.ratio;
  return j;
}

std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::data_format, "cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_text_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorKind::data_format, "cannot write " + path.string());
  out << text;
  if (!out) throw Error(ErrorKind::data_format, "write failed for " + path.string());
}

}  // namespace trendrev::io
