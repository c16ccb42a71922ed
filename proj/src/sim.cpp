#include "tbea/sim.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <limits>
#include <optional>

#include "tbea/errors.hpp"
#include "tbea/parallel.hpp"
#include "tbea/rng.hpp"
#include "tbea/series.hpp"
#include "tbea/tbea.hpp"

namespace tbea {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
constexpr int kMaxRedraws = 10000;
const YearMonth kSyntheticStart{2000, 1};

struct Outcome {
  std::size_t alarms = 0;
  std::size_t events = 0;
  std::size_t run_length = 0;  // 0: no alarm
};

struct Replication {
  std::vector<EventRecord> events;  // gapped events only
  Phase1Estimates est;
  std::size_t first_monitored = 0;  // index into events
  std::size_t redraws = 0;
};

void validate(const SimConfig& c, const SimTables& tables) {
  if (c.phase1_length == 0 || c.monitor_length == 0) throw ConfigError("segment lengths must be positive");
  if (c.replications < 1) throw ConfigError("need at least one replication");
  if (!(c.sigma0 > 0.0)) throw ConfigError("sigma0 must be positive");
  if (c.detectors.empty()) throw ConfigError("no detectors configured");
  for (ChartKind k : c.detectors) {
    if (k == ChartKind::MW && (!tables.mw || tables.mw->detector != Detector::MW)) {
      throw ConfigError("MW simulation needs an MW threshold table");
    }
    if (k == ChartKind::KS && (!tables.ks || tables.ks->detector != Detector::KS)) {
      throw ConfigError("KS simulation needs a KS threshold table");
    }
  }
}

Replication draw(const SimConfig& c, double shifted_mean, Rng& rng) {
  const std::size_t total = c.phase1_length + c.monitor_length;
  std::vector<double> x(total);
  const MonthWindow phase1{kSyntheticStart, kSyntheticStart.plus_months(static_cast<int>(c.phase1_length) - 1)};
  Replication rep;
  for (int attempt = 0; attempt < kMaxRedraws; ++attempt) {
    for (std::size_t i = 0; i < total; ++i) {
      x[i] = rng.normal(i < c.phase1_length ? c.mu0 : shifted_mean, c.sigma0);
    }
    auto events = gapped_events(extract_events(IndexSeries::from_values(kSyntheticStart, x), c.event_threshold));
    try {
      rep.est = estimate_phase1(events, phase1);
    } catch (const DataError&) {
      ++rep.redraws;
      continue;
    }
    rep.events = std::move(events);
    rep.first_monitored = static_cast<std::size_t>(
        std::find_if(rep.events.begin(), rep.events.end(),
                     [&](const EventRecord& e) { return e.month > phase1.end; }) -
        rep.events.begin());
    return rep;
  }
  throw ConfigError("could not draw a Phase-1 segment with at least two events");
}

const ThresholdTable& table_for(ChartKind k, const SimTables& t) { return k == ChartKind::MW ? *t.mw : *t.ks; }

Outcome run_ewma(const SimConfig& c, const Replication& rep, std::size_t begin, Rng& rng, bool in_control) {
  EwmaChart chart(c.ewma, rep.est, c.ties);
  Outcome out;
  for (std::size_t i = begin; i < rep.events.size(); ++i) {
    const bool signal = chart.step(rep.events[i], rng).signal;
    if (in_control) {
      if (signal) {
        ++out.alarms;
        if (out.run_length == 0) out.run_length = i - begin + 1;
        chart.reset();
      }
    } else if (signal && i >= rep.first_monitored) {
      out.run_length = i - rep.first_monitored + 1;
      return out;
    }
  }
  return out;
}

Outcome run_cpm(const SimConfig& c, const ThresholdTable& table, const Replication& rep, std::size_t begin,
                bool in_control) {
  const auto z = ratio_stream(std::span<const EventRecord>(rep.events).subspan(begin), rep.est);
  ChangePointMonitor mon(table, in_control ? c.in_control_restart : c.out_of_control_restart);
  Outcome out;
  for (std::size_t i = 0; i < z.size(); ++i) {
    if (!mon.push(z[i])) continue;
    const std::size_t pos = begin + i;
    if (in_control) {
      ++out.alarms;
      if (out.run_length == 0) out.run_length = i + 1;
    } else if (pos >= rep.first_monitored) {
      out.run_length = pos - rep.first_monitored + 1;
      return out;
    }
  }
  return out;
}

std::vector<SimReport> simulate(const SimConfig& c, const SimTables& tables, bool in_control) {
  validate(c, tables);
  const double shifted = c.mu0 + c.delta * c.sigma0;
  const std::size_t nd = c.detectors.size();
  std::vector<Outcome> outcomes(c.replications * nd);
  std::vector<std::size_t> redraws(c.replications, 0);

  parallel_for(c.replications, c.workers, [&](std::size_t r) {
    const std::uint64_t rep_seed = derive_seed(c.seed, r);
    Rng data_rng = Rng::stream(rep_seed, 0);
    const Replication rep = draw(c, shifted, data_rng);
    redraws[r] = rep.redraws;
    const std::size_t begin = in_control ? rep.first_monitored : 0;
    for (std::size_t d = 0; d < nd; ++d) {
      Outcome o;
      if (c.detectors[d] == ChartKind::EWMA) {
        Rng chart_rng = Rng::stream(rep_seed, 1);
        o = run_ewma(c, rep, begin, chart_rng, in_control);
      } else {
        o = run_cpm(c, table_for(c.detectors[d], tables), rep, begin, in_control);
      }
      o.events = rep.events.size() - rep.first_monitored;
      outcomes[r * nd + d] = o;
    }
  });

  std::size_t total_redraws = 0;
  for (std::size_t v : redraws) total_redraws += v;
  std::vector<SimReport> reports;
  for (std::size_t d = 0; d < nd; ++d) {
    SimReport rep;
    rep.detector = c.detectors[d];
    rep.replications_completed = c.replications;
    rep.replications_redrawn = total_redraws;
    std::vector<double> lengths;
    std::size_t missed = 0;
    for (std::size_t r = 0; r < c.replications; ++r) {
      const Outcome& o = outcomes[r * nd + d];
      rep.alarms += o.alarms;
      rep.events += o.events;
      if (o.run_length == 0) {
        ++missed;
      } else {
        lengths.push_back(static_cast<double>(o.run_length));
      }
    }
    rep.miss_pct = 100.0 * static_cast<double>(missed) / static_cast<double>(c.replications);
    if (in_control) {
      rep.arl1 = kNaN;
      rep.sdrl = kNaN;
      rep.false_alarm_rate = rep.events > 0 ? static_cast<double>(rep.alarms) / static_cast<double>(rep.events) : kNaN;
    } else {
      rep.alarms = lengths.size();
      rep.false_alarm_rate = kNaN;
      rep.arl1 = lengths.empty() ? kNaN : mean(lengths);
      if (lengths.size() > 1) {
        double ss = 0.0;
        for (double v : lengths) ss += (v - rep.arl1) * (v - rep.arl1);
        rep.sdrl = std::sqrt(ss / static_cast<double>(lengths.size() - 1));
      } else {
        rep.sdrl = kNaN;
      }
    }
    reports.push_back(rep);
  }
  return reports;
}

}  // namespace

std::string to_string(ChartKind k) {
  switch (k) {
    case ChartKind::EWMA: return "EWMA";
    case ChartKind::MW: return "MW";
    case ChartKind::KS: return "KS";
  }
  return "?";
}

ChartKind parse_chart_kind(std::string_view name) {
  std::string s(name);
  std::transform(s.begin(), s.end(), s.begin(), [](unsigned char ch) { return std::tolower(ch); });
  if (s == "ewma") return ChartKind::EWMA;
  if (s == "mw") return ChartKind::MW;
  if (s == "ks") return ChartKind::KS;
  throw ConfigError("unknown detector '" + std::string(name) + "' (expected ewma, mw or ks)");
}

std::vector<SimReport> simulate_in_control(const SimConfig& config, const SimTables& tables) {
  if (config.delta != 0.0) throw ConfigError("in-control simulation requires delta = 0");
  return simulate(config, tables, true);
}

std::vector<SimReport> simulate_out_of_control(const SimConfig& config, const SimTables& tables) {
  if (!(config.delta < 0.0)) throw ConfigError("out-of-control simulation requires delta < 0");
  return simulate(config, tables, false);
}

}  // namespace tbea
