#include "trendrev/cli.hpp"

#include <algorithm>
#include <cmath>
#include <optional>
#include <ostream>
#include <sstream>

#include "CLI11.hpp"
#include "trendrev/calibrate.hpp"
#include "trendrev/empirics.hpp"
#include "trendrev/error.hpp"
#include "trendrev/io.hpp"
#include "trendrev/model.hpp"
#include "trendrev/sim.hpp"

namespace trendrev::cli {

namespace {

struct ParamFlags {
  std::string preset = "futures";
  std::optional<double> g, kappa, gamma, sigma2;
  std::optional<double> mean_reversion_years, trend_days;

  void attach(CLI::App& app) {
    app.add_option("--preset", preset, "Parameter set to start from")
        ->check(CLI::IsMember({"futures", "spot"}))
        ->capture_default_str();
    app.add_option("--g", g, "Trend strength g");
    auto* k = app.add_option("--kappa", kappa, "Mean-reversion rate (1/year)");
    auto* kt = app.add_option("--mean-reversion-years", mean_reversion_years, "1/kappa in years");
    auto* gm = app.add_option("--gamma", gamma, "Trend decay rate (1/year)");
    auto* gt = app.add_option("--trend-days", trend_days, "1/gamma in trading days");
    app.add_option("--sigma2", sigma2, "Variance scale sigma^2");
    k->excludes(kt);
    gm->excludes(gt);
  }

  model::ProcessParams resolve() const {
    model::ProcessParams p = preset == "spot" ? model::spot_preset() : model::futures_preset();
    if (g) p.g = *g;
    if (kappa) p.kappa = *kappa;
    if (mean_reversion_years) p.kappa = 1.0 / *mean_reversion_years;
    if (gamma) p.gamma = *gamma;
    if (trend_days) p.gamma = kTradingDaysPerYear / *trend_days;
    if (sigma2) p.sigma2 = *sigma2;
    p.validate();
    return p;
  }
};

std::vector<int> parse_grid(const std::string& text) {
  std::vector<int> grid;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      std::size_t used = 0;
      const int v = std::stoi(item, &used);
      if (used != item.size()) throw std::invalid_argument(item);
      grid.push_back(v);
    } catch (const std::exception&) {
      throw Error(ErrorKind::invalid_argument, "malformed grid entry '" + item + "'");
    }
  }
  if (grid.empty()) throw Error(ErrorKind::invalid_argument, "empty grid");
  return grid;
}

int exit_code_for(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::invalid_argument: return kUsageError;
    case ErrorKind::data_format:
    case ErrorKind::insufficient_data: return kDataError;
    default: return kNumericalError;
  }
}

std::string one_line(std::string s) {
  std::replace(s.begin(), s.end(), '\n', ' ');
  return s;
}

bool ends_with(const std::string& s, const std::string& suffix) {
  return s.size() >= suffix.size() && s.compare(s.size() - suffix.size(), suffix.size(), suffix) == 0;
}

std::string dump_json(const io::Json& j) { return j.dump(2) + "\n"; }

// Every option with a value, defaults included. Unset optional values and
// --write-config itself are left out so the file can be replayed as is.
std::string resolved_config(const CLI::App& app) {
  std::istringstream in(app.config_to_str(true, false));
  std::string text, line;
  while (std::getline(in, line)) {
    if (line.ends_with("=\"\"") || line.starts_with("write-config=")) continue;
    text += line + "\n";
  }
  return text;
}

struct Options {
  unsigned threads = 0;
  bool quiet = false;
  std::string write_config;

  // simulate
  ParamFlags sim_params;
  std::string sim_frequency = "daily";
  double sim_years = 30.0;
  std::size_t sim_paths = 200;
  std::uint64_t sim_seed = 1;
  std::size_t sim_burn_in = 0;
  double sim_drift = 0.05;
  std::string sim_start = "1950-01-02";
  std::string sim_symbol_prefix = "SIM";
  std::string sim_emit_csv;
  std::string sim_dump_paths;

  // curve
  std::string curve_input;
  std::string curve_kind = "spot";
  std::string curve_grid;
  double curve_ratio = 0.2;
  double curve_trend_window = 20.0;
  double curve_cut = 4.0;
  bool curve_no_min_history = false;
  std::string curve_normalization = "pooled";
  std::string curve_out_csv;
  std::string curve_out_json;

  // theory
  ParamFlags theory_params;
  std::string theory_frequency = "daily";
  std::string theory_grid;
  double theory_ratio = 0.2;
  std::string theory_out_csv;

  // calibrate
  std::string cal_curve;
  std::optional<double> cal_ratio;
  std::string cal_weights = "inverse_variance";
  std::string cal_init = "futures";
  std::string cal_out;

  // report
  std::string rep_calibration;
  ParamFlags rep_params;
  double rep_daily_vol = 0.01;
  std::string rep_out;
  std::string rep_summary;
};

int cmd_simulate(const Options& o, std::ostream& out) {
  const Frequency f = frequency_from_string(o.sim_frequency);
  sim::SimConfig cfg;
  cfg.params = o.sim_params.resolve();
  cfg.dt = 1.0 / steps_per_year(f);
  if (!(o.sim_years > 0.0)) throw Error(ErrorKind::invalid_argument, "--years must be > 0");
  cfg.n_steps = static_cast<std::size_t>(std::llround(o.sim_years * steps_per_year(f)));
  cfg.n_paths = o.sim_paths;
  cfg.seed = o.sim_seed;
  cfg.burn_in = o.sim_burn_in;
  Date start;
  try {
    start = parse_iso_date(o.sim_start);
  } catch (const Error& e) {
    throw Error(ErrorKind::invalid_argument, std::string("--start-date: ") + e.what());
  }

  const auto paths = sim::simulate(cfg, o.threads);
  std::vector<PriceSeries> pool;
  pool.reserve(paths.size());
  const int width = std::max<int>(4, static_cast<int>(std::to_string(paths.size()).size()));
  for (std::size_t i = 0; i < paths.size(); ++i) {
    std::string id = std::to_string(i);
    id.insert(0, static_cast<std::size_t>(width) - std::min<std::size_t>(id.size(), static_cast<std::size_t>(width)), '0');
    pool.push_back(sim::to_price_series(paths[i], start, f, o.sim_drift, o.sim_symbol_prefix + id, AssetKind::future));
  }
  std::ostringstream csv;
  io::write_price_csv(csv, pool);
  io::write_text_file(o.sim_emit_csv, csv.str());
  if (!o.sim_dump_paths.empty()) {
    std::ostringstream dump;
    io::write_paths_csv(dump, paths);
    io::write_text_file(o.sim_dump_paths, dump.str());
  }
  if (!o.quiet) out << "simulated " << paths.size() << " paths x " << cfg.n_steps << " steps (config " << cfg.digest() << ")\n";
  return kSuccess;
}

int cmd_curve(const Options& o, std::ostream& out, std::ostream& err) {
  if (o.curve_out_csv.empty() && o.curve_out_json.empty()) {
    throw Error(ErrorKind::invalid_argument, "curve needs --out-csv and/or --out-json");
  }
  const auto pool = io::read_price_csv(std::filesystem::path(o.curve_input), asset_kind_from_string(o.curve_kind));
  const Frequency f = pool.front().frequency;
  for (const auto& s : pool) {
    if (s.frequency != f) throw Error(ErrorKind::data_format, "input mixes daily and monthly symbols");
  }
  DetrendConfig cfg = DetrendConfig::defaults_for(f);
  if (!o.curve_grid.empty()) cfg.tau_lt_grid = parse_grid(o.curve_grid);
  cfg.ratio = o.curve_ratio;
  cfg.trend_window_years = o.curve_trend_window;
  cfg.outlier_cut = o.curve_cut;
  cfg.min_history = !o.curve_no_min_history;
  cfg.normalization = o.curve_normalization == "per_contract" ? Normalization::per_contract : Normalization::pooled;

  const auto curve = predictability_curve(pool, cfg, o.threads);
  for (const auto& e : curve.entries) {
    if (!e.note.empty() && !o.quiet) err << "warning: tau_lt=" << e.tau_lt_native << ": " << one_line(e.note) << "\n";
  }
  if (curve.all_empty() && !o.quiet) err << "warning: every grid entry is empty\n";

  if (!o.curve_out_csv.empty()) {
    std::ostringstream csv;
    io::write_curve_csv(csv, curve);
    io::write_text_file(o.curve_out_csv, csv.str());
  }
  if (!o.curve_out_json.empty()) io::write_text_file(o.curve_out_json, dump_json(io::curve_to_json(curve)));
  if (!o.quiet) out << "curve: " << curve.non_empty() << "/" << curve.entries.size() << " grid entries fitted\n";
  return kSuccess;
}

int cmd_theory(const Options& o, std::ostream& out, std::ostream& err) {
  const Frequency f = frequency_from_string(o.theory_frequency);
  const auto params = o.theory_params.resolve();
  const auto grid = o.theory_grid.empty() ? DetrendConfig::default_grid(f) : parse_grid(o.theory_grid);
  if (!(o.theory_ratio > 0.0)) throw Error(ErrorKind::invalid_argument, "--ratio must be > 0");

  std::ostringstream csv;
  csv << "tau_lt_native,tau_lt_years,tau_gt_years,slope,autocorr_tau_lt,autocorr_tau_gt\n";
  for (int tau : grid) {
    if (tau <= 0) throw Error(ErrorKind::invalid_argument, "grid horizons must be positive");
    const double a = native_to_years(tau, f);
    const double b = o.theory_ratio * a;
    csv << tau << ',' << io::format_double(a) << ',' << io::format_double(b) << ',';
    try {
      csv << io::format_double(model::slope_theory(params, {a, b}));
    } catch (const Error& e) {
      if (!o.quiet) err << "warning: tau_lt=" << tau << ": " << one_line(e.what()) << "\n";
    }
    csv << ',' << io::format_double(model::autocorr(params, a)) << ',' << io::format_double(model::autocorr(params, b))
        << '\n';
  }
  io::write_text_file(o.theory_out_csv, csv.str());
  if (!o.quiet) {
    if (auto root = model::try_slope_zero_crossing(params, o.theory_ratio)) {
      out << "slope changes sign at tau_lt = " << *root << " years\n";
    } else {
      out << "slope does not change sign\n";
    }
  }
  return kSuccess;
}

int cmd_calibrate(const Options& o, std::ostream& out, std::ostream& err) {
  calibrate::CalibrationProblem problem;
  if (ends_with(o.cal_curve, ".json")) {
    io::Json j;
    try {
      j = io::Json::parse(io::read_text_file(o.cal_curve));
    } catch (const nlohmann::json::exception& e) {
      throw Error(ErrorKind::data_format, std::string("malformed JSON: ") + e.what());
    }
    problem.curve = io::curve_from_json(j);
    problem.ratio = o.cal_ratio.value_or(problem.curve.ratio);
  } else {
    problem.ratio = o.cal_ratio.value_or(0.2);
    std::istringstream in(io::read_text_file(o.cal_curve));
    problem.curve = io::read_curve_csv(in, problem.ratio);
  }
  problem.weight_mode = calibrate::weight_mode_from_string(o.cal_weights);
  problem.init = o.cal_init == "spot" ? model::spot_preset() : model::futures_preset();

  const auto result = calibrate::calibrate(problem, o.threads);
  io::write_text_file(o.cal_out, dump_json(io::calibration_to_json(result, problem.weight_mode)));
  if (!result.converged) {
    err << "error: no_convergence: no multi-start converged; best-effort result written\n";
    return kNumericalError;
  }
  if (!o.quiet) {
    out << "fitted g=" << result.params.g << " 1/kappa=" << 1.0 / result.params.kappa
        << "y 1/gamma=" << kTradingDaysPerYear / result.params.gamma << "d loss=" << result.loss << "\n";
  }
  return kSuccess;
}

int cmd_report(const Options& o, std::ostream& out) {
  calibrate::CalibrationResult result;
  if (!o.rep_calibration.empty()) {
    io::Json j;
    try {
      j = io::Json::parse(io::read_text_file(o.rep_calibration));
    } catch (const nlohmann::json::exception& e) {
      throw Error(ErrorKind::data_format, std::string("malformed JSON: ") + e.what());
    }
    result = io::calibration_from_json(j);
  } else {
    result.params = o.rep_params.resolve();
    result.ratio = 0.2;
    result.converged = true;
  }
  const auto rep = calibrate::report(result, o.rep_daily_vol);
  if (!o.rep_out.empty()) io::write_text_file(o.rep_out, dump_json(io::report_to_json(result, rep)));
  const std::string summary = calibrate::format_summary(result, rep);
  if (!o.rep_summary.empty()) io::write_text_file(o.rep_summary, summary);
  if (!o.quiet) out << summary;
  return kSuccess;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  Options o;
  CLI::App app{"Trend and mean-reversion predictability toolkit", "trendrev"};
  app.require_subcommand(1);
  app.set_config("--config", "", "INI file with option values ([subcommand] sections)");
  app.add_option("--threads", o.threads, "Worker threads (0 = available parallelism)")->capture_default_str();
  app.add_flag("-q,--quiet", o.quiet, "Suppress summaries and warnings");
  app.add_option("--write-config", o.write_config, "Write the resolved configuration as INI");

  auto* simulate = app.add_subcommand("simulate", "Simulate de-trended log-prices and write a price CSV");
  o.sim_params.attach(*simulate);
  simulate->add_option("--frequency", o.sim_frequency)->check(CLI::IsMember({"daily", "monthly"}))->capture_default_str();
  simulate->add_option("--years", o.sim_years, "Recorded length per path")->capture_default_str();
  simulate->add_option("--paths", o.sim_paths)->capture_default_str();
  simulate->add_option("--seed", o.sim_seed)->capture_default_str();
  simulate->add_option("--burn-in", o.sim_burn_in, "Extra steps discarded before recording")->capture_default_str();
  simulate->add_option("--drift", o.sim_drift, "Deterministic log-price drift per year")->capture_default_str();
  simulate->add_option("--start-date", o.sim_start)->capture_default_str();
  simulate->add_option("--symbol-prefix", o.sim_symbol_prefix)->capture_default_str();
  simulate->add_option("--emit-csv", o.sim_emit_csv, "Output price CSV (date,symbol,price)")->required();
  simulate->add_option("--dump-paths", o.sim_dump_paths, "Optional CSV of raw paths (path_id,step,t_years,pi)");

  auto* curve = app.add_subcommand("curve", "Measure the predictability curve of a price CSV");
  curve->add_option("--input", o.curve_input, "Price CSV (date,symbol,price)")->required();
  curve->add_option("--kind", o.curve_kind)->check(CLI::IsMember({"spot", "future"}))->capture_default_str();
  curve->add_option("--grid", o.curve_grid, "Comma-separated past horizons in native steps");
  curve->add_option("--ratio", o.curve_ratio, "Future/past horizon ratio")->capture_default_str();
  curve->add_option("--trend-window", o.curve_trend_window, "Long-term trend window T in years")->capture_default_str();
  curve->add_option("--cut", o.curve_cut, "Outlier threshold on |x| and |y|")->capture_default_str();
  curve->add_flag("--no-min-history", o.curve_no_min_history, "Shrink T to the available history");
  curve->add_option("--normalization", o.curve_normalization)
      ->check(CLI::IsMember({"pooled", "per_contract"}))
      ->capture_default_str();
  curve->add_option("--out-csv", o.curve_out_csv);
  curve->add_option("--out-json", o.curve_out_json);

  auto* theory = app.add_subcommand("theory", "Write model slope and autocorrelation on a horizon grid");
  o.theory_params.attach(*theory);
  theory->add_option("--frequency", o.theory_frequency)->check(CLI::IsMember({"daily", "monthly"}))->capture_default_str();
  theory->add_option("--grid", o.theory_grid, "Comma-separated past horizons in native steps");
  theory->add_option("--ratio", o.theory_ratio)->capture_default_str();
  theory->add_option("--out-csv", o.theory_out_csv)->required();

  auto* cal = app.add_subcommand("calibrate", "Fit (g, kappa, gamma) to a predictability curve");
  cal->add_option("--curve", o.cal_curve, "Curve CSV or JSON")->required();
  cal->add_option("--ratio", o.cal_ratio, "Future/past horizon ratio (default: from JSON, else 0.2)");
  cal->add_option("--weights", o.cal_weights)->check(CLI::IsMember({"inverse_variance", "uniform"}))->capture_default_str();
  cal->add_option("--init", o.cal_init, "Extra start")->check(CLI::IsMember({"futures", "spot"}))->capture_default_str();
  cal->add_option("--out", o.cal_out, "CalibrationResult JSON")->required();

  auto* rep = app.add_subcommand("report", "Band width, mean-reversion time and slope sign change");
  auto* rep_cal = rep->add_option("--calibration", o.rep_calibration, "CalibrationResult JSON");
  o.rep_params.attach(*rep);
  rep->add_option("--daily-vol", o.rep_daily_vol)->capture_default_str();
  rep->add_option("--out", o.rep_out, "BandReport JSON");
  rep->add_option("--summary", o.rep_summary, "Text summary");
  for (const char* name : {"--g", "--kappa", "--gamma", "--mean-reversion-years", "--trend-days"}) {
    rep_cal->excludes(rep->get_option(name));
  }

  std::vector<std::string> reversed(args.rbegin(), args.rend() - (args.empty() ? 0 : 1));
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    err << "error: usage: " << one_line(e.what()) << "\n";
    return kUsageError;
  }

  try {
    if (!o.write_config.empty()) io::write_text_file(o.write_config, resolved_config(app));
    if (*simulate) return cmd_simulate(o, out);
    if (*curve) return cmd_curve(o, out, err);
    if (*theory) return cmd_theory(o, out, err);
    if (*cal) return cmd_calibrate(o, out, err);
    if (*rep) return cmd_report(o, out);
  } catch (const Error& e) {
    err << "error: " << to_string(e.kind()) << ": " << one_line(e.what()) << "\n";
    return exit_code_for(e.kind());
  } catch (const std::exception& e) {
    err << "error: internal: " << one_line(e.what()) << "\n";
    return kNumericalError;
  }
  return kUsageError;
}

}  // namespace trendrev::cli
