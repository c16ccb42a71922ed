#include "tbea/tbea.hpp"

#include "tbea/errors.hpp"

namespace tbea {

Phase1Estimates estimate_phase1(std::span<const EventRecord> events, MonthWindow window) {
  if (window.end < window.start) throw DataError("Phase-1 window end precedes its start");
  std::vector<double> gaps;
  std::vector<double> amplitudes;
  for (const auto& ev : events) {
    if (!ev.gap_months || !window.contains(ev.month)) continue;
    gaps.push_back(static_cast<double>(*ev.gap_months));
    amplitudes.push_back(ev.amplitude);
  }
  if (gaps.size() < 2) {
    throw DataError("Phase-1 window " + window.start.to_string() + ".." + window.end.to_string() +
                    " holds " + std::to_string(gaps.size()) + " usable events; at least 2 required");
  }
  Phase1Estimates est;
  est.theta_t0 = median(gaps);
  est.theta_x0 = median(amplitudes);
  est.mu_t0 = mean(gaps);
  est.mu_x0 = mean(amplitudes);
  est.n_events = gaps.size();
  est.window = window;
  return est;
}

TbeaPoint normalize(const EventRecord& event, const Phase1Estimates& est) {
  if (!event.gap_months) {
    throw DataError("event " + event.month.to_string() + " has no gap (first event of the stream)");
  }
  TbeaPoint p;
  p.t_norm = static_cast<double>(*event.gap_months) / est.mu_t0;
  p.x_norm = event.amplitude / est.mu_x0;
  p.z_r = p.x_norm / p.t_norm;
  return p;
}

AlternativeStats z_alternatives(const TbeaPoint& point) {
  return {point.x_norm - point.t_norm, point.x_norm + 1.0 / point.t_norm};
}

std::vector<EventRecord> gapped_events(std::span<const EventRecord> events) {
  std::vector<EventRecord> out;
  out.reserve(events.size());
  for (const auto& ev : events) {
    if (ev.gap_months) out.push_back(ev);
  }
  return out;
}

std::vector<double> ratio_stream(std::span<const EventRecord> events, const Phase1Estimates& est) {
  std::vector<double> z;
  z.reserve(events.size());
  for (const auto& ev : events) {
    if (ev.gap_months) z.push_back(normalize(ev, est).z_r);
  }
  return z;
}

}  // namespace tbea
