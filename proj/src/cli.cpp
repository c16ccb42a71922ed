#include "tbea/cli.hpp"

#include <openssl/evp.h>

#include <CLI11.hpp>
#include <chrono>
#include <cmath>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <json.hpp>
#include <memory>
#include <optional>
#include <sstream>

#include "tbea/cpm.hpp"
#include "tbea/eca.hpp"
#include "tbea/errors.hpp"
#include "tbea/ewma.hpp"
#include "tbea/series.hpp"
#include "tbea/sim.hpp"
#include "tbea/tbea.hpp"

namespace tbea::cli {

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;

namespace {

constexpr const char* kManifestName = "manifest.json";

std::string utc_now() {
  const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  std::ostringstream os;
  os << std::put_time(&tm, "%Y-%m-%dT%H:%M:%SZ");
  return os.str();
}

std::string sha256_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot read " + path.string());
  std::unique_ptr<EVP_MD_CTX, decltype(&EVP_MD_CTX_free)> ctx(EVP_MD_CTX_new(), EVP_MD_CTX_free);
  EVP_DigestInit_ex(ctx.get(), EVP_sha256(), nullptr);
  char buf[1 << 15];
  while (in.read(buf, sizeof buf) || in.gcount() > 0) {
    EVP_DigestUpdate(ctx.get(), buf, static_cast<std::size_t>(in.gcount()));
  }
  unsigned char md[EVP_MAX_MD_SIZE];
  unsigned len = 0;
  EVP_DigestFinal_ex(ctx.get(), md, &len);
  std::ostringstream os;
  for (unsigned i = 0; i < len; ++i) os << std::hex << std::setw(2) << std::setfill('0') << static_cast<int>(md[i]);
  return os.str();
}

std::string fmt(double v) {
  std::ostringstream os;
  os << std::setprecision(10) << v;
  return os.str();
}

json number_or_null(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

std::ofstream open_out(const fs::path& path) {
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot write " + path.string());
  return out;
}

/// Output files written by one command, recorded in its manifest.
class OutputSet {
 public:
  explicit OutputSet(fs::path dir) : dir_(std::move(dir)) {}

  std::ofstream csv(const std::string& name) {
    names_.push_back(name);
    auto out = open_out(dir_ / name);
    out << "# manifest=" << kManifestName << '\n';
    return out;
  }
  void write_json(const std::string& name, const json& j) {
    names_.push_back(name);
    open_out(dir_ / name) << j.dump(2) << '\n';
  }
  json listing() const {
    json files = json::array();
    for (const auto& n : names_) files.push_back({{"path", n}, {"sha256", sha256_file(dir_ / n)}});
    return files;
  }

 private:
  fs::path dir_;
  std::vector<std::string> names_;
};

json summary_json(const SummaryStats& s) {
  return {{"min", s.min},   {"first_quartile", s.first_quartile}, {"median", s.median},
          {"mean", s.mean}, {"third_quartile", s.third_quartile}, {"max", s.max},
          {"variance", s.variance}};
}

json events_json(const std::vector<EventRecord>& events) {
  json arr = json::array();
  for (const auto& e : events) {
    arr.push_back({{"ordinal", e.ordinal},
                   {"date", e.month.to_string()},
                   {"amplitude", e.amplitude},
                   {"gap_months", e.gap_months ? json(*e.gap_months) : json(nullptr)}});
  }
  return arr;
}

json phase1_json(const Phase1Estimates& e) {
  return {{"theta_T0", e.theta_t0},
          {"theta_X0", e.theta_x0},
          {"mu_T0", e.mu_t0},
          {"mu_X0", e.mu_x0},
          {"n_events", e.n_events},
          {"window_start", e.window.start.to_string()},
          {"window_end", e.window.end.to_string()}};
}

std::vector<ChartKind> resolve_detectors(const std::vector<std::string>& names) {
  std::vector<ChartKind> out;
  for (const auto& n : names) {
    const ChartKind k = parse_chart_kind(n);
    if (std::find(out.begin(), out.end(), k) == out.end()) out.push_back(k);
  }
  return out;
}

bool has(const std::vector<ChartKind>& v, ChartKind k) { return std::find(v.begin(), v.end(), k) != v.end(); }

// Options shared by the commands that need change-point threshold tables.
struct TableOptions {
  std::string mw_table;
  std::string ks_table;
  bool calibrate = false;
  double alpha = 0.0027;
  std::size_t burn_in = 20;
  std::size_t n_max = 500;
  std::size_t cal_reps = 20000;

  void add_to(CLI::App* app) {
    app->add_option("--mw-table", mw_table, "MW threshold table file");
    app->add_option("--ks-table", ks_table, "KS threshold table file (moments sidecar alongside)");
    app->add_flag("--calibrate", calibrate, "Calibrate missing threshold tables in-process");
    app->add_option("--alpha", alpha, "Per-observation false-alarm rate")->capture_default_str();
    app->add_option("--burn-in", burn_in, "Observations before change-point testing starts")->capture_default_str();
    app->add_option("--n-max", n_max, "Largest tabulated window size when calibrating")->capture_default_str();
    app->add_option("--cal-reps", cal_reps, "Calibration replications")->capture_default_str();
  }

  std::shared_ptr<const ThresholdTable> load(Detector d, std::uint64_t seed, std::ostream& err) const {
    const std::string& path = d == Detector::MW ? mw_table : ks_table;
    if (!path.empty()) {
      auto table = std::make_shared<const ThresholdTable>(read_table(path));
      if (table->detector != d) throw ConfigError(path + " is not a " + to_string(d) + " table");
      if (std::abs(table->alpha - alpha) > 1e-12 * alpha) {
        err << "note: " << path << " was calibrated at alpha=" << table->alpha << '\n';
      }
      return table;
    }
    if (!calibrate) {
      const std::string flag = d == Detector::MW ? "--mw-table" : "--ks-table";
      throw ConfigError("no " + to_string(d) + " threshold table: pass " + flag +
                        " <file> (see 'tbea calibrate') or add --calibrate");
    }
    CalibrationOptions o;
    o.alpha = alpha;
    o.burn_in = burn_in;
    o.n_max = n_max;
    o.replications = cal_reps;
    o.seed = derive_seed(seed, d == Detector::MW ? 101 : 102);
    return std::make_shared<const ThresholdTable>(calibrate_thresholds(d, o));
  }

  json describe() const {
    return {{"mw_table", mw_table}, {"ks_table", ks_table}, {"calibrate", calibrate}, {"alpha", alpha},
            {"burn_in", burn_in},   {"n_max", n_max},       {"cal_reps", cal_reps}};
  }
};

struct ChartOptions {
  double lambda = 0.07;
  double kappa = 2.515;
  double sigma = 0.125;
  double arl0 = 370.0;
  std::string ties = "minus";

  void add_to(CLI::App* app) {
    app->add_option("--lambda", lambda, "EWMA smoothing weight")->capture_default_str();
    app->add_option("--kappa", kappa, "EWMA limit multiplier K")->capture_default_str();
    app->add_option("--sigma", sigma, "Continuousify spread")->capture_default_str();
    app->add_option("--arl0", arl0, "Target in-control ARL")->capture_default_str();
    app->add_option("--ties", ties, "Sign of a tie with the median: minus|plus")->capture_default_str();
  }
  TieRule tie_rule() const {
    if (ties == "minus") return TieRule::Minus;
    if (ties == "plus") return TieRule::Plus;
    throw ConfigError("--ties must be 'minus' or 'plus'");
  }
  EwmaParams params() const { return EwmaParams(lambda, kappa, sigma); }
  json describe() const {
    return {{"lambda", lambda}, {"kappa", kappa}, {"sigma", sigma}, {"arl0", arl0}, {"ties", ties}};
  }
};

// ---------------------------------------------------------------------------

int cmd_describe(const std::string& input, const std::string& format, std::ostream& out) {
  const auto stats = describe(read_series(input));
  if (format == "csv") {
    out << "min,first_quartile,median,mean,third_quartile,max,variance\n"
        << fmt(stats.min) << ',' << fmt(stats.first_quartile) << ',' << fmt(stats.median) << ','
        << fmt(stats.mean) << ',' << fmt(stats.third_quartile) << ',' << fmt(stats.max) << ','
        << fmt(stats.variance) << '\n';
  } else {
    out << summary_json(stats).dump(2) << '\n';
  }
  return kOk;
}

struct PipelineOptions {
  std::string input;
  double threshold = -1.0;
  std::string phase1_start;
  std::string phase1_end;
  std::vector<std::string> detectors{"ewma", "mw", "ks"};
  std::uint64_t seed = 1;
  std::string out_dir;
  std::string restart = "change-point";
  double min_rise = 0.25;
  std::size_t eca_reps = 10000;
  int eca_max_delta = 5;
  ChartOptions chart;
  TableOptions tables;
};

int cmd_pipeline(const PipelineOptions& o, const std::vector<std::string>& args, std::ostream& out,
                 std::ostream& err) {
  const std::string started = utc_now();
  const auto detectors = resolve_detectors(o.detectors);
  const RestartPolicy restart = parse_restart_policy(o.restart);
  const EwmaParams params = o.chart.params();
  const TieRule ties = o.chart.tie_rule();

  const IndexSeries series = read_series(o.input);
  const MonthWindow window{YearMonth::parse(o.phase1_start), YearMonth::parse(o.phase1_end)};
  slice_window(series, window.start, window.end);  // range check
  const auto events = extract_events(series, o.threshold);
  const Phase1Estimates est = estimate_phase1(events, window);

  std::vector<EventRecord> monitored;
  for (const auto& e : gapped_events(events)) {
    if (e.month >= window.start) monitored.push_back(e);
  }
  if (monitored.empty()) throw DataError("no events to monitor after the Phase-1 start");

  std::shared_ptr<const ThresholdTable> mw, ks;
  if (has(detectors, ChartKind::MW)) mw = o.tables.load(Detector::MW, o.seed, err);
  if (has(detectors, ChartKind::KS)) ks = o.tables.load(Detector::KS, o.seed, err);

  fs::create_directories(o.out_dir);
  OutputSet files(o.out_dir);
  files.write_json("events.json", events_json(events));
  files.write_json("phase1.json", phase1_json(est));

  const auto z = ratio_stream(monitored, est);
  {
    auto zr = files.csv("zr.csv");
    zr << "event_date,z_r\n";
    for (std::size_t i = 0; i < z.size(); ++i) zr << monitored[i].month.to_string() << ',' << fmt(z[i]) << '\n';
  }

  json summary;
  std::optional<EwmaRunResult> ewma;
  if (has(detectors, ChartKind::EWMA)) {
    Rng rng = Rng::stream(o.seed, 0);
    ewma = run_chart(monitored, est, params, rng, ties, TurningPointOptions{o.min_rise});
    auto csv = files.csv("ewma.csv");
    csv << "event_date,z_star,ucl,signal\n";
    for (const auto& p : ewma->trajectory) {
      csv << p.month.to_string() << ',' << fmt(p.z_star) << ',' << fmt(ewma->ucl) << ',' << (p.signal ? 1 : 0) << '\n';
    }
    auto tp = files.csv("turning_points.csv");
    tp << "event_date\n";
    for (const auto& m : ewma->turning_points) tp << m.to_string() << '\n';
    summary["ewma_signals"] = ewma->signals.size();
    summary["ewma_turning_points"] = ewma->turning_points.size();
    summary["ewma_markov_arl0"] = markov_arl(params);
  }

  json detections_out = json::array();
  std::vector<int> change_months;
  for (const auto& [kind, table] : {std::pair{ChartKind::KS, ks}, std::pair{ChartKind::MW, mw}}) {
    if (!table) continue;
    const auto dets = monitor(z, *table, restart);
    for (const auto& d : dets) {
      const YearMonth tau_month = monitored[std::min(d.tau_hat, monitored.size() - 1)].month;
      detections_out.push_back({{"detector", to_string(d.detector)},
                                {"detection_index", d.detection_index},
                                {"detection_date", monitored[d.detection_index - 1].month.to_string()},
                                {"tau_hat", d.tau_hat},
                                {"tau_date", tau_month.to_string()},
                                {"statistic", d.statistic},
                                {"threshold", d.threshold},
                                {"threshold_extrapolated", d.threshold_extrapolated}});
      if (kind == ChartKind::KS || !ks) change_months.push_back(tau_month.index());
    }
    auto seg = files.csv("segments_" + std::string(kind == ChartKind::KS ? "ks" : "mw") + ".csv");
    seg << "first_date,last_date,first_index,last_index,mean\n";
    for (const auto& s : segment_means(z, dets)) {
      seg << monitored[s.first - 1].month.to_string() << ',' << monitored[s.last - 1].month.to_string() << ','
          << s.first << ',' << s.last << ',' << fmt(s.mean) << '\n';
    }
    summary[to_string(kind) + "_detections"] = dets.size();
  }
  files.write_json("detections.json", detections_out);

  if (ewma && !change_months.empty() && !ewma->turning_points.empty()) {
    EcaInput in;
    in.a_times = change_months;
    std::sort(in.a_times.begin(), in.a_times.end());
    in.a_times.erase(std::unique(in.a_times.begin(), in.a_times.end()), in.a_times.end());
    for (const auto& m : ewma->turning_points) in.b_times.push_back(m.index());
    in.span_start = monitored.front().month.index();
    in.span_end = monitored.back().month.index();
    const auto rows = eca_table(in, 0, o.eca_max_delta, o.eca_reps, derive_seed(o.seed, 7));
    auto csv = files.csv("eca.csv");
    csv << "delta_t,rp,p_value\n";
    for (const auto& r : rows) csv << r.delta_t << ',' << fmt(r.rp) << ',' << fmt(r.p_value) << '\n';
    summary["eca_rows"] = rows.size();
  } else {
    summary["eca_rows"] = 0;
    err << "note: ECA table skipped (needs EWMA turning points and change points)\n";
  }

  json manifest;
  manifest["command"] = "pipeline";
  manifest["arguments"] = json(std::vector<std::string>(args.begin() + 1, args.end()));
  manifest["config"] = {{"input", o.input},
                        {"threshold", o.threshold},
                        {"phase1_start", window.start.to_string()},
                        {"phase1_end", window.end.to_string()},
                        {"detectors", o.detectors},
                        {"restart", to_string(restart)},
                        {"turning_point_min_rise", o.min_rise},
                        {"eca_reps", o.eca_reps},
                        {"eca_max_delta", o.eca_max_delta},
                        {"chart", o.chart.describe()},
                        {"tables", o.tables.describe()}};
  manifest["inputs"] = json::array({{{"path", o.input}, {"sha256", sha256_file(o.input)}}});
  manifest["seed"] = o.seed;
  manifest["version"] = kVersion;
  manifest["outputs"] = files.listing();
  manifest["summary"] = summary;
  manifest["started"] = started;
  manifest["finished"] = utc_now();
  open_out(fs::path(o.out_dir) / kManifestName) << manifest.dump(2) << '\n';
  out << summary.dump(2) << '\n';
  return kOk;
}

struct SimulateOptions {
  double delta = 0.0;
  std::size_t reps = 10000;
  std::uint64_t seed = 1;
  std::vector<std::string> detectors{"ewma", "ks", "mw"};
  std::size_t phase1_length = 500;
  std::size_t monitor_length = 1000;
  double mu0 = 0.2082;
  double sigma0 = 0.9213;
  double threshold = -1.0;
  std::string restart;  // empty: per-mode defaults
  std::string format = "json";
  std::string out_path;
  unsigned workers = 0;
  ChartOptions chart;
  TableOptions tables;
};

int cmd_simulate(const SimulateOptions& o, std::ostream& out, std::ostream& err) {
  SimConfig c;
  c.phase1_length = o.phase1_length;
  c.monitor_length = o.monitor_length;
  c.mu0 = o.mu0;
  c.sigma0 = o.sigma0;
  c.delta = o.delta;
  c.event_threshold = o.threshold;
  c.replications = o.reps;
  c.seed = o.seed;
  c.detectors = resolve_detectors(o.detectors);
  c.ewma = o.chart.params();
  c.ties = o.chart.tie_rule();
  if (!o.restart.empty()) c.in_control_restart = c.out_of_control_restart = parse_restart_policy(o.restart);
  c.workers = o.workers;
  if (o.delta > 0.0) throw ConfigError("--delta must be 0 (in control) or negative");

  SimTables tables;
  if (has(c.detectors, ChartKind::MW)) tables.mw = o.tables.load(Detector::MW, o.seed, err);
  if (has(c.detectors, ChartKind::KS)) tables.ks = o.tables.load(Detector::KS, o.seed, err);
  const auto reports = o.delta == 0.0 ? simulate_in_control(c, tables) : simulate_out_of_control(c, tables);

  const json config = {{"delta", o.delta},
                       {"phase1_length", o.phase1_length},
                       {"monitor_length", o.monitor_length},
                       {"mu0", o.mu0},
                       {"sigma0", o.sigma0},
                       {"event_threshold", o.threshold},
                       {"in_control_restart", to_string(c.in_control_restart)},
                       {"out_of_control_restart", to_string(c.out_of_control_restart)},
                       {"chart", o.chart.describe()},
                       {"tables", o.tables.describe()}};
  std::ostringstream text;
  if (o.format == "csv") {
    text << "statistic";
    for (const auto& r : reports) text << ',' << to_string(r.detector);
    text << '\n';
    auto row = [&](const char* name, auto get) {
      text << name;
      for (const auto& r : reports) {
        const double v = get(r);
        text << ',' << (std::isfinite(v) ? fmt(v) : "");
      }
      text << '\n';
    };
    row("%missAL", [](const SimReport& r) { return r.miss_pct; });
    row("ARL1", [](const SimReport& r) { return r.arl1; });
    row("SD", [](const SimReport& r) { return r.sdrl; });
    row("alpha_hat", [](const SimReport& r) { return r.false_alarm_rate; });
  } else if (o.format == "json") {
    json arr = json::array();
    for (const auto& r : reports) {
      arr.push_back({{"detector", to_string(r.detector)},
                     {"miss_pct", r.miss_pct},
                     {"arl1", number_or_null(r.arl1)},
                     {"sdrl", number_or_null(r.sdrl)},
                     {"false_alarm_rate", number_or_null(r.false_alarm_rate)},
                     {"alarms", r.alarms},
                     {"events", r.events},
                     {"replications", r.replications_completed},
                     {"replications_redrawn", r.replications_redrawn},
                     {"seed", o.seed},
                     {"config", config}});
    }
    text << arr.dump(2) << '\n';
  } else {
    throw ConfigError("--format must be json or csv");
  }
  if (o.out_path.empty()) {
    out << text.str();
  } else {
    open_out(o.out_path) << text.str();
  }
  return kOk;
}

struct CalibrateOptions {
  std::string detector = "ks";
  double alpha = 0.0027;
  std::size_t burn_in = 20;
  std::size_t n_max = 500;
  std::size_t reps = 20000;
  std::size_t moment_reps = 0;
  std::uint64_t seed = 1;
  std::string out_path;
  std::size_t validate_reps = 0;
  unsigned workers = 0;
};

int cmd_calibrate(const CalibrateOptions& o, std::ostream& out) {
  CalibrationOptions c;
  c.alpha = o.alpha;
  c.burn_in = o.burn_in;
  c.n_max = o.n_max;
  c.replications = o.reps;
  c.moment_replications = o.moment_reps;
  c.seed = o.seed;
  c.workers = o.workers;
  const auto table = calibrate_thresholds(parse_detector(o.detector), c);
  write_table(o.out_path, table);
  json report = {{"detector", to_string(table.detector)},
                 {"alpha", table.alpha},
                 {"burn_in", table.burn_in},
                 {"n_max", table.n_max},
                 {"replications", table.replications},
                 {"seed", table.seed},
                 {"first_threshold", table.thresholds.front()},
                 {"last_threshold", table.thresholds.back()},
                 {"output", o.out_path}};
  if (o.validate_reps > 0) {
    const auto check = empirical_hazard(table, o.validate_reps, derive_seed(o.seed, 99), o.workers);
    std::size_t within = 0, at_risk = 0, hits = 0;
    for (std::size_t i = 0; i < check.at_risk.size(); ++i) {
      const double n = static_cast<double>(check.at_risk[i]);
      const double se = std::sqrt(table.alpha * (1.0 - table.alpha) / n);
      if (std::abs(static_cast<double>(check.exceedances[i]) / n - table.alpha) <= 2.0 * se) ++within;
      at_risk += check.at_risk[i];
      hits += check.exceedances[i];
    }
    report["validation"] = {{"replications", o.validate_reps},
                            {"pooled_hazard", static_cast<double>(hits) / static_cast<double>(at_risk)},
                            {"fraction_within_2se",
                             static_cast<double>(within) / static_cast<double>(check.at_risk.size())}};
  }
  out << report.dump(2) << '\n';
  return kOk;
}

int cmd_design(double arl0, double sigma, const std::vector<double>& grid, int m_states, std::ostream& out) {
  const auto d = design_params(arl0, sigma, grid, {}, m_states);
  out << json{{"lambda", d.lambda},
              {"kappa", d.kappa},
              {"sigma", sigma},
              {"ucl", ucl(d.lambda, d.kappa, sigma)},
              {"arl0", d.arl0},
              {"m_states", m_states}}
             .dump(2)
      << '\n';
  return kOk;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Distribution-free monitoring of threshold-crossing events (EWMA-TBEA and change-point charts)"};
  app.set_version_flag("--version", kVersion);
  app.require_subcommand(1);

  std::string describe_input, describe_format = "json";
  auto* describe_cmd = app.add_subcommand("describe", "Descriptive statistics of an index series");
  describe_cmd->add_option("--input", describe_input, "Monthly series CSV (date,value)")->required();
  describe_cmd->add_option("--format", describe_format, "json|csv")->capture_default_str();

  PipelineOptions pipe;
  auto* pipe_cmd = app.add_subcommand("pipeline", "Eventize, estimate Phase-1, run the charts and ECA");
  pipe_cmd->add_option("--input", pipe.input, "Monthly series CSV (date,value)")->required();
  pipe_cmd->add_option("--threshold", pipe.threshold, "Event threshold")->capture_default_str();
  pipe_cmd->add_option("--phase1-start", pipe.phase1_start, "First Phase-1 month (YYYY-MM)")->required();
  pipe_cmd->add_option("--phase1-end", pipe.phase1_end, "Last Phase-1 month (YYYY-MM)")->required();
  pipe_cmd->add_option("--detector", pipe.detectors, "ewma|mw|ks (repeatable)")->capture_default_str();
  pipe_cmd->add_option("--seed", pipe.seed, "Random seed")->capture_default_str();
  pipe_cmd->add_option("--out", pipe.out_dir, "Output directory")->required();
  pipe_cmd->add_option("--restart", pipe.restart, "Restart after a detection: change-point|detection")
      ->capture_default_str();
  pipe_cmd->add_option("--min-rise", pipe.min_rise, "Turning-point rise as a fraction of the UCL")
      ->capture_default_str();
  pipe_cmd->add_option("--eca-reps", pipe.eca_reps, "ECA surrogate replications")->capture_default_str();
  pipe_cmd->add_option("--eca-max-delta", pipe.eca_max_delta, "Largest ECA tolerance (months)")
      ->capture_default_str();
  pipe.chart.add_to(pipe_cmd);
  pipe.tables.add_to(pipe_cmd);

  SimulateOptions sim;
  auto* sim_cmd = app.add_subcommand("simulate", "In-control false-alarm or out-of-control run-length study");
  sim_cmd->add_option("--delta", sim.delta, "Standardized mean shift (0 = in control)")->capture_default_str();
  sim_cmd->add_option("--reps", sim.reps, "Replications")->capture_default_str();
  sim_cmd->add_option("--seed", sim.seed, "Random seed")->capture_default_str();
  sim_cmd->add_option("--detector", sim.detectors, "ewma|mw|ks (repeatable)")->capture_default_str();
  sim_cmd->add_option("--phase1-length", sim.phase1_length, "Phase-1 months")->capture_default_str();
  sim_cmd->add_option("--monitor-length", sim.monitor_length, "Monitored months")->capture_default_str();
  sim_cmd->add_option("--mu0", sim.mu0, "In-control index mean")->capture_default_str();
  sim_cmd->add_option("--sigma0", sim.sigma0, "Index standard deviation")->capture_default_str();
  sim_cmd->add_option("--threshold", sim.threshold, "Event threshold")->capture_default_str();
  sim_cmd->add_option("--restart", sim.restart,
                      "Restart after a detection: change-point|detection (default: detection in control, "
                      "change-point out of control)");
  sim_cmd->add_option("--format", sim.format, "json|csv")->capture_default_str();
  sim_cmd->add_option("--out", sim.out_path, "Write the report here instead of stdout");
  sim_cmd->add_option("--workers", sim.workers, "Worker threads (0 = all cores)")->capture_default_str();
  sim.chart.add_to(sim_cmd);
  sim.tables.add_to(sim_cmd);

  CalibrateOptions cal;
  auto* cal_cmd = app.add_subcommand("calibrate", "Monte Carlo threshold table for a change-point detector");
  cal_cmd->add_option("--detector", cal.detector, "mw|ks")->capture_default_str();
  cal_cmd->add_option("--alpha", cal.alpha, "Per-observation false-alarm rate")->capture_default_str();
  cal_cmd->add_option("--burn-in", cal.burn_in, "Observations before testing starts")->capture_default_str();
  cal_cmd->add_option("--n-max", cal.n_max, "Largest tabulated window size")->capture_default_str();
  cal_cmd->add_option("--reps", cal.reps, "Calibration replications")->capture_default_str();
  cal_cmd->add_option("--moment-reps", cal.moment_reps, "KS null-moment replications (0 = --reps)")
      ->capture_default_str();
  cal_cmd->add_option("--seed", cal.seed, "Random seed")->capture_default_str();
  cal_cmd->add_option("--out", cal.out_path, "Table file")->required();
  cal_cmd->add_option("--validate-reps", cal.validate_reps, "Fresh sequences for a hazard check (0 = skip)")
      ->capture_default_str();
  cal_cmd->add_option("--workers", cal.workers, "Worker threads (0 = all cores)")->capture_default_str();

  double design_arl0 = 370.0, design_sigma = 0.125;
  int design_states = 301;
  std::vector<double> design_grid{0.07};
  auto* design_cmd = app.add_subcommand("design", "Solve the EWMA limit multiplier for a target ARL0");
  design_cmd->add_option("--arl0", design_arl0, "Target in-control ARL")->capture_default_str();
  design_cmd->add_option("--sigma", design_sigma, "Continuousify spread")->capture_default_str();
  design_cmd->add_option("--lambda", design_grid, "Candidate lambda values")->capture_default_str();
  design_cmd->add_option("--states", design_states, "Markov chain states")->capture_default_str();

  std::vector<const char*> argv;
  argv.reserve(args.size());
  for (const auto& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return kOk;
  } catch (const CLI::CallForVersion&) {
    out << kVersion << '\n';
    return kOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << '\n';
    return kUsage;
  }

  try {
    if (*describe_cmd) return cmd_describe(describe_input, describe_format, out);
    if (*pipe_cmd) return cmd_pipeline(pipe, args, out, err);
    if (*sim_cmd) return cmd_simulate(sim, out, err);
    if (*cal_cmd) return cmd_calibrate(cal, out);
    if (*design_cmd) return cmd_design(design_arl0, design_sigma, design_grid, design_states, out);
  } catch (const DataError& e) {
    err << "data error: " << e.what() << '\n';
    return kData;
  } catch (const NumericError& e) {
    err << "numeric failure: " << e.what() << '\n';
    return kNumeric;
  } catch (const ConfigError& e) {
    err << "configuration error: " << e.what() << '\n';
    return kUsage;
  } catch (const std::filesystem::filesystem_error& e) {
    err << "configuration error: " << e.what() << '\n';
    return kUsage;
  }
  return kUsage;
}

}  // namespace tbea::cli
