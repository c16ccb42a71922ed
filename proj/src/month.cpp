#include "tbea/month.hpp"

#include <charconv>
#include <cstdio>

#include "tbea/errors.hpp"

namespace tbea {

namespace {

int parse_digits(std::string_view text, std::string_view whole) {
  int value = 0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc{} || ptr != text.data() + text.size()) {
    throw DataError("invalid year-month '" + std::string(whole) + "'");
  }
  return value;
}

}  // namespace

YearMonth YearMonth::parse(std::string_view text) {
  const std::string_view whole = text;
  if (text.size() != 7 && text.size() != 10) {
    throw DataError("invalid year-month '" + std::string(whole) + "' (expected YYYY-MM)");
  }
  if (text[4] != '-' || (text.size() == 10 && text[7] != '-')) {
    throw DataError("invalid year-month '" + std::string(whole) + "' (expected YYYY-MM)");
  }
  YearMonth ym;
  ym.year = parse_digits(text.substr(0, 4), whole);
  ym.month = parse_digits(text.substr(5, 2), whole);
  if (ym.month < 1 || ym.month > 12) {
    throw DataError("month out of range in '" + std::string(whole) + "'");
  }
  if (text.size() == 10 && parse_digits(text.substr(8, 2), whole) != 1) {
    throw DataError("sub-monthly date '" + std::string(whole) +
                    "' (monthly series must use YYYY-MM or the first of the month)");
  }
  return ym;
}

YearMonth YearMonth::from_index(int index) {
  YearMonth ym;
  ym.year = index >= 0 ? index / 12 : -((-index + 11) / 12);
  ym.month = index - ym.year * 12 + 1;
  return ym;
}

std::string YearMonth::to_string() const {
  char buf[16];
  std::snprintf(buf, sizeof buf, "%04d-%02d", year, month);
  return buf;
}

}  // namespace tbea
