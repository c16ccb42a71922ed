#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "tbea/month.hpp"
#include "tbea/series.hpp"

namespace tbea {

/// In-control reference values estimated on a Phase-1 window.
struct Phase1Estimates {
  double theta_t0 = 0.0;  // median gap, months
  double theta_x0 = 0.0;  // median amplitude
  double mu_t0 = 0.0;     // mean gap, months
  double mu_x0 = 0.0;     // mean amplitude
  std::size_t n_events = 0;
  MonthWindow window;
};

/// Normalized gap and amplitude of one event, with the ratio statistic X'/T'.
struct TbeaPoint {
  double t_norm = 0.0;
  double x_norm = 0.0;
  double z_r = 0.0;
};

struct AlternativeStats {
  double z_d = 0.0;  // X' - T'
  double z_p = 0.0;  // X' + 1/T'
};

/// Medians and means of the gaps and amplitudes of events inside `window`.
/// An event enters the sample only if it has a gap, i.e. the very first event
/// of a stream never does. Its predecessor may lie before the window.
Phase1Estimates estimate_phase1(std::span<const EventRecord> events, MonthWindow window);

TbeaPoint normalize(const EventRecord& event, const Phase1Estimates& est);
AlternativeStats z_alternatives(const TbeaPoint& point);

/// Events that carry a gap, in order. These are the monitorable observations.
std::vector<EventRecord> gapped_events(std::span<const EventRecord> events);

/// Z_R for every gapped event.
std::vector<double> ratio_stream(std::span<const EventRecord> events, const Phase1Estimates& est);

}  // namespace tbea
