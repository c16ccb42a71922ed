#include "tbea/series.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <numeric>
#include <sstream>
#include <string>

#include "tbea/errors.hpp"

namespace tbea {

namespace {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n");
  return s.substr(first, last - first + 1);
}

[[noreturn]] void fail_line(std::size_t line, const std::string& what) {
  throw DataError("line " + std::to_string(line) + ": " + what);
}

void check_entries(const std::vector<IndexEntry>& entries) {
  for (std::size_t i = 0; i < entries.size(); ++i) {
    if (!std::isfinite(entries[i].value)) {
      throw DataError("non-finite value at " + entries[i].month.to_string());
    }
    if (i > 0) {
      const int step = months_between(entries[i - 1].month, entries[i].month);
      if (step <= 0) {
        throw DataError("month " + entries[i].month.to_string() + " does not follow " +
                        entries[i - 1].month.to_string());
      }
      if (step > 1) {
        throw DataError("calendar gap between " + entries[i - 1].month.to_string() + " and " +
                        entries[i].month.to_string());
      }
    }
  }
}

}  // namespace

IndexSeries::IndexSeries(std::vector<IndexEntry> entries) : entries_(std::move(entries)) {
  check_entries(entries_);
}

IndexSeries IndexSeries::from_values(YearMonth first, std::span<const double> values) {
  std::vector<IndexEntry> entries;
  entries.reserve(values.size());
  const int base = first.index();
  for (std::size_t i = 0; i < values.size(); ++i) {
    entries.push_back({YearMonth::from_index(base + static_cast<int>(i)), values[i]});
  }
  return IndexSeries(std::move(entries));
}

std::vector<double> IndexSeries::values() const {
  std::vector<double> out;
  out.reserve(entries_.size());
  for (const auto& e : entries_) out.push_back(e.value);
  return out;
}

YearMonth IndexSeries::first_month() const {
  if (entries_.empty()) throw DataError("empty series");
  return entries_.front().month;
}

YearMonth IndexSeries::last_month() const {
  if (entries_.empty()) throw DataError("empty series");
  return entries_.back().month;
}

double quantile_sorted(std::span<const double> sorted, double p) {
  if (sorted.empty()) throw DataError("quantile of empty sample");
  const double h = (static_cast<double>(sorted.size()) - 1.0) * p;
  const auto lo = static_cast<std::size_t>(std::floor(h));
  const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
  return sorted[lo] + (h - static_cast<double>(lo)) * (sorted[hi] - sorted[lo]);
}

double median(std::vector<double> values) {
  std::sort(values.begin(), values.end());
  return quantile_sorted(values, 0.5);
}

double mean(std::span<const double> values) {
  if (values.empty()) throw DataError("mean of empty sample");
  return std::accumulate(values.begin(), values.end(), 0.0) / static_cast<double>(values.size());
}

IndexSeries parse_series(std::istream& in) {
  std::vector<IndexEntry> entries;
  std::string raw;
  std::size_t line_no = 0;
  bool header_seen = false;
  while (std::getline(in, raw)) {
    ++line_no;
    std::string_view line = trim(raw);
    if (line_no == 1 && line.size() >= 3 && line.substr(0, 3) == "\xEF\xBB\xBF") {
      line = trim(line.substr(3));
    }
    if (line.empty() || line.front() == '#') continue;
    if (!header_seen) {
      if (line != "date,value") fail_line(line_no, "expected header 'date,value'");
      header_seen = true;
      continue;
    }
    const auto comma = line.find(',');
    if (comma == std::string_view::npos || line.find(',', comma + 1) != std::string_view::npos) {
      fail_line(line_no, "expected two fields 'YYYY-MM,<value>'");
    }
    IndexEntry entry;
    try {
      entry.month = YearMonth::parse(trim(line.substr(0, comma)));
    } catch (const DataError& e) {
      fail_line(line_no, e.what());
    }
    const std::string_view field = trim(line.substr(comma + 1));
    const char* end = field.data() + field.size();
    auto [ptr, ec] = std::from_chars(field.data(), end, entry.value);
    if (ec != std::errc{} || ptr != end) fail_line(line_no, "invalid value '" + std::string(field) + "'");
    if (!std::isfinite(entry.value)) fail_line(line_no, "non-finite value");
    if (!entries.empty()) {
      const int step = months_between(entries.back().month, entry.month);
      if (step <= 0) fail_line(line_no, "date " + entry.month.to_string() + " is not increasing");
      if (step > 1) {
        fail_line(line_no, "calendar gap: " + entries.back().month.to_string() + " followed by " +
                               entry.month.to_string());
      }
    }
    entries.push_back(entry);
  }
  if (!header_seen) throw DataError("missing header 'date,value'");
  return IndexSeries(std::move(entries));
}

IndexSeries parse_series(std::string_view text) {
  std::istringstream in{std::string(text)};
  return parse_series(in);
}

IndexSeries read_series(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open " + path.string());
  return parse_series(in);
}

SummaryStats describe(std::span<const double> values) {
  if (values.empty()) throw DataError("cannot describe an empty series");
  std::vector<double> sorted(values.begin(), values.end());
  std::sort(sorted.begin(), sorted.end());
  SummaryStats s;
  s.min = sorted.front();
  s.max = sorted.back();
  s.first_quartile = quantile_sorted(sorted, 0.25);
  s.median = quantile_sorted(sorted, 0.5);
  s.third_quartile = quantile_sorted(sorted, 0.75);
  s.mean = mean(values);
  if (values.size() > 1) {
    double ss = 0.0;
    for (double v : values) ss += (v - s.mean) * (v - s.mean);
    s.variance = ss / static_cast<double>(values.size() - 1);
  }
  return s;
}

SummaryStats describe(const IndexSeries& series) { return describe(series.values()); }

std::vector<EventRecord> extract_events(const IndexSeries& series, double threshold) {
  std::vector<EventRecord> events;
  std::optional<YearMonth> previous;
  for (const auto& entry : series.entries()) {
    if (entry.value > threshold) continue;
    EventRecord ev;
    ev.ordinal = events.size() + 1;
    ev.month = entry.month;
    ev.amplitude = std::abs(entry.value);
    if (previous) ev.gap_months = months_between(*previous, entry.month);
    previous = entry.month;
    events.push_back(ev);
  }
  return events;
}

IndexSeries slice_window(const IndexSeries& series, YearMonth start, YearMonth end) {
  if (series.empty()) throw DataError("cannot slice an empty series");
  if (end < start) throw DataError("window end " + end.to_string() + " precedes start " + start.to_string());
  if (start < series.first_month() || series.last_month() < end) {
    throw DataError("window " + start.to_string() + ".." + end.to_string() + " outside series range " +
                    series.first_month().to_string() + ".." + series.last_month().to_string());
  }
  const auto offset = static_cast<std::size_t>(months_between(series.first_month(), start));
  const auto count = static_cast<std::size_t>(months_between(start, end) + 1);
  const auto first = series.entries().begin() + static_cast<std::ptrdiff_t>(offset);
  return IndexSeries(std::vector<IndexEntry>(first, first + static_cast<std::ptrdiff_t>(count)));
}

}  // namespace tbea
