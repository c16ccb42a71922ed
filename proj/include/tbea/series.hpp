#pragma once

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "tbea/month.hpp"

namespace tbea {

struct IndexEntry {
  YearMonth month;
  double value = 0.0;
};

/// Monthly series of a standardized index. Construction enforces a strictly
/// consecutive calendar (no gaps, no duplicates) and finite values.
class IndexSeries {
 public:
  IndexSeries() = default;
  explicit IndexSeries(std::vector<IndexEntry> entries);

  /// Consecutive months starting at `first`.
  static IndexSeries from_values(YearMonth first, std::span<const double> values);

  const std::vector<IndexEntry>& entries() const { return entries_; }
  std::vector<double> values() const;
  std::size_t size() const { return entries_.size(); }
  bool empty() const { return entries_.empty(); }
  YearMonth first_month() const;
  YearMonth last_month() const;
  const IndexEntry& operator[](std::size_t i) const { return entries_[i]; }

 private:
  std::vector<IndexEntry> entries_;
};

struct SummaryStats {
  double min = 0.0;
  double first_quartile = 0.0;
  double median = 0.0;
  double mean = 0.0;
  double third_quartile = 0.0;
  double max = 0.0;
  double variance = 0.0;  // denominator n - 1; zero for a single value
};

/// One month at or below the event threshold.
struct EventRecord {
  std::size_t ordinal = 0;  // 1-based within the extracted stream
  YearMonth month;
  double amplitude = 0.0;         // |index value|
  std::optional<int> gap_months;  // absent for the first event of a stream
};

/// Linearly interpolated quantile of already sorted data (the "type 7" rule).
double quantile_sorted(std::span<const double> sorted, double p);
double median(std::vector<double> values);
double mean(std::span<const double> values);

IndexSeries parse_series(std::istream& in);
IndexSeries parse_series(std::string_view text);
IndexSeries read_series(const std::filesystem::path& path);

SummaryStats describe(std::span<const double> values);
SummaryStats describe(const IndexSeries& series);

std::vector<EventRecord> extract_events(const IndexSeries& series, double threshold = -1.0);

/// Inclusive sub-series [start, end].
IndexSeries slice_window(const IndexSeries& series, YearMonth start, YearMonth end);

}  // namespace tbea
