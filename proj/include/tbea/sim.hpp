#pragma once

#include <cstddef>
#include <cstdint>
#include <memory>
#include <string>
#include <string_view>
#include <vector>

#include "tbea/cpm.hpp"
#include "tbea/ewma.hpp"

namespace tbea {

enum class ChartKind { EWMA, MW, KS };

std::string to_string(ChartKind k);
ChartKind parse_chart_kind(std::string_view name);

struct SimConfig {
  std::size_t phase1_length = 500;
  std::size_t monitor_length = 1000;
  double mu0 = 0.2082;
  double sigma0 = 0.9213;
  double delta = 0.0;
  double event_threshold = -1.0;
  std::size_t replications = 10000;
  std::uint64_t seed = 1;
  std::vector<ChartKind> detectors{ChartKind::EWMA, ChartKind::KS, ChartKind::MW};
  EwmaParams ewma{0.07, 2.515, 0.125};
  TieRule ties = TieRule::Minus;
  // In control, a false alarm restarts the change-point window empty: keeping
  // the observations after a spurious change point pushes the alarm rate past
  // nominal. Out of control, alarms before the shift keep the post-change-point
  // observations so the shift stays inside the window.
  RestartPolicy in_control_restart = RestartPolicy::AfterDetection;
  RestartPolicy out_of_control_restart = RestartPolicy::AfterChangePoint;
  unsigned workers = 0;
};

/// Calibrated artifacts shared read-only by every replication.
struct SimTables {
  std::shared_ptr<const ThresholdTable> mw;
  std::shared_ptr<const ThresholdTable> ks;
};

struct SimReport {
  ChartKind detector = ChartKind::EWMA;
  double miss_pct = 0.0;           // replications without an alarm after the change
  double arl1 = 0.0;               // NaN in in-control mode or when nothing was detected
  double sdrl = 0.0;
  double false_alarm_rate = 0.0;   // alarms per monitored event; NaN out of control
  std::size_t alarms = 0;
  std::size_t events = 0;
  std::size_t replications_completed = 0;
  std::size_t replications_redrawn = 0;  // draws with too few Phase-1 events
};

/// Phase-1 segment, then `monitor_length` in-control months monitored from a
/// fresh start. False-alarm rate = alarms / monitored events.
std::vector<SimReport> simulate_in_control(const SimConfig& config, const SimTables& tables);

/// In-control Phase-1 segment followed by a mean shift of delta * sigma0.
/// Charts run over the whole event stream; the run length counts events from
/// the first event after the shift to the first alarm at or after it.
std::vector<SimReport> simulate_out_of_control(const SimConfig& config, const SimTables& tables);

}  // namespace tbea
