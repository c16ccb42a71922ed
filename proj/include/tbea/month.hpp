#pragma once

#include <compare>
#include <string>
#include <string_view>

namespace tbea {

/// A calendar month. Ordering and arithmetic go through a linear month index.
struct YearMonth {
  int year = 1970;
  int month = 1;  // 1..12

  /// Accepts "YYYY-MM" or "YYYY-MM-01". Any other day of month is rejected.
  static YearMonth parse(std::string_view text);
  static YearMonth from_index(int index);

  int index() const { return year * 12 + (month - 1); }
  YearMonth plus_months(int n) const { return from_index(index() + n); }
  std::string to_string() const;

  friend bool operator==(const YearMonth&, const YearMonth&) = default;
  friend auto operator<=>(const YearMonth& a, const YearMonth& b) {
    return a.index() <=> b.index();
  }
};

/// Signed number of months from `a` to `b`.
inline int months_between(const YearMonth& a, const YearMonth& b) {
  return b.index() - a.index();
}

/// Inclusive month range.
struct MonthWindow {
  YearMonth start;
  YearMonth end;

  bool contains(const YearMonth& m) const { return start <= m && m <= end; }
};

}  // namespace tbea
