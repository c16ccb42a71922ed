#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "tbea/errors.hpp"
#include "tbea/rng.hpp"
#include "tbea/series.hpp"

using namespace tbea;

TEST_CASE("month parsing and arithmetic") {
  CHECK(YearMonth::parse("1901-12") == YearMonth{1901, 12});
  CHECK(YearMonth::parse("1946-07-01") == YearMonth{1946, 7});
  CHECK_THROWS_AS(YearMonth::parse("1946-07-15"), DataError);
  CHECK_THROWS_AS(YearMonth::parse("1946-13"), DataError);
  CHECK_THROWS_AS(YearMonth::parse("July 1946"), DataError);
  CHECK(YearMonth{1901, 12}.plus_months(1) == YearMonth{1902, 1});
  CHECK(YearMonth{1902, 1}.plus_months(-1) == YearMonth{1901, 12});
  CHECK(months_between({1946, 7}, {1989, 7}) == 516);
  CHECK(YearMonth{2003, 8}.to_string() == "2003-08");
}

TEST_CASE("parse_series accepts the minimal input") {
  const auto s = parse_series("date,value\n1901-12,-0.30\n1902-01,0.10\n");
  REQUIRE(s.size() == 2);
  CHECK(s.first_month() == YearMonth{1901, 12});
  CHECK(s.last_month() == YearMonth{1902, 1});
  CHECK(s[0].value == doctest::Approx(-0.30));
}

TEST_CASE("parse_series skips comments, blank lines and a BOM") {
  const auto s = parse_series("\xEF\xBB\xBF# station: test\ndate,value\n# note\n2000-01,1\n\n2000-02,2\n");
  CHECK(s.size() == 2);
}

TEST_CASE("parse_series rejects malformed input with the offending line") {
  auto message = [](const std::string& text) {
    try {
      parse_series(text);
    } catch (const DataError& e) {
      return std::string(e.what());
    }
    return std::string();
  };
  CHECK(message("date,value\n1901-12,-0.30\n1902-02,0.10\n").find("line 3") != std::string::npos);
  CHECK(message("date,value\n1901-12,-0.30\n1901-12,0.10\n").find("line 3") != std::string::npos);
  CHECK(message("date,value\n1901-12,abc\n").find("line 2") != std::string::npos);
  CHECK(message("date,value\n1901-12,nan\n").find("line 2") != std::string::npos);
  CHECK(message("date,value\n1901-12\n").find("line 2") != std::string::npos);
  CHECK(message("date,value\n1901-12-15,1\n").find("line 2") != std::string::npos);
  CHECK_FALSE(message("1901-12,1\n").empty());
  CHECK_THROWS_AS(read_series("/nonexistent/series.csv"), DataError);
}

TEST_CASE("type-7 quantiles") {
  const std::vector<double> v{1, 2, 3, 4};
  CHECK(quantile_sorted(v, 0.25) == doctest::Approx(1.75));
  CHECK(quantile_sorted(v, 0.5) == doctest::Approx(2.5));
  CHECK(quantile_sorted(v, 0.75) == doctest::Approx(3.25));
  CHECK(quantile_sorted(v, 0.0) == 1);
  CHECK(quantile_sorted(v, 1.0) == 4);
  CHECK(median({3, 1, 2}) == 2);
}

TEST_CASE("describe") {
  const auto a = describe(std::vector<double>{1, 2, 3});
  CHECK(a.min == 1);
  CHECK(a.median == 2);
  CHECK(a.mean == doctest::Approx(2));
  CHECK(a.max == 3);
  CHECK(a.variance == doctest::Approx(1));

  const auto b = describe(std::vector<double>{5, 5, 5, 5});
  CHECK(b.variance == 0);
  CHECK(b.first_quartile == 5);
  CHECK(b.median == 5);
  CHECK(b.third_quartile == 5);

  CHECK_THROWS_AS(describe(std::vector<double>{}), DataError);
  CHECK_THROWS_AS(describe(IndexSeries{}), DataError);
}

TEST_CASE("describe orders its quantiles") {
  Rng rng(7);
  for (int rep = 0; rep < 100; ++rep) {
    std::vector<double> v(1 + rep);
    for (double& x : v) x = rng.normal();
    const auto s = describe(v);
    CHECK(s.min <= s.first_quartile);
    CHECK(s.first_quartile <= s.median);
    CHECK(s.median <= s.third_quartile);
    CHECK(s.third_quartile <= s.max);
    CHECK(s.variance >= 0);
  }
}

TEST_CASE("extract_events") {
  const std::vector<double> v{0.5, -1.2, -0.3, -1.0};
  const auto events = extract_events(IndexSeries::from_values({2000, 1}, v));
  REQUIRE(events.size() == 2);
  CHECK(events[0].ordinal == 1);
  CHECK(events[0].month == YearMonth{2000, 2});
  CHECK(events[0].amplitude == doctest::Approx(1.2));
  CHECK_FALSE(events[0].gap_months.has_value());
  CHECK(events[1].month == YearMonth{2000, 4});
  CHECK(events[1].amplitude == doctest::Approx(1.0));
  CHECK(events[1].gap_months == 2);

  CHECK(extract_events(IndexSeries::from_values({2000, 1}, std::vector<double>{0.0, -0.99, 3.0})).empty());
}

TEST_CASE("consecutive drought months are separate events") {
  const auto events = extract_events(IndexSeries::from_values({2000, 1}, std::vector<double>{-1.5, -1.1, -2.0}));
  REQUIRE(events.size() == 3);
  CHECK(events[1].gap_months == 1);
  CHECK(events[2].gap_months == 1);
}

TEST_CASE("event stream invariants on random series") {
  Rng rng(11);
  for (int rep = 0; rep < 200; ++rep) {
    std::vector<double> v(10 + rep);
    for (double& x : v) x = rng.normal(0.2, 0.9);
    const auto series = IndexSeries::from_values({1950, 3}, v);
    const auto events = extract_events(series);
    CHECK(events.size() == static_cast<std::size_t>(std::count_if(v.begin(), v.end(), [](double x) { return x <= -1.0; })));
    int gap_sum = 0;
    for (std::size_t i = 0; i < events.size(); ++i) {
      CHECK(events[i].ordinal == i + 1);
      CHECK(events[i].amplitude > 0);
      if (i == 0) continue;
      REQUIRE(events[i].gap_months.has_value());
      CHECK(*events[i].gap_months >= 1);
      CHECK(*events[i].gap_months == months_between(events[i - 1].month, events[i].month));
      gap_sum += *events[i].gap_months;
    }
    if (events.size() > 1) CHECK(gap_sum == months_between(events.front().month, events.back().month));
    const auto again = extract_events(series);
    CHECK(again.size() == events.size());
  }
}

TEST_CASE("slice_window") {
  std::vector<double> v(24);
  std::iota(v.begin(), v.end(), 0.0);
  const auto s = IndexSeries::from_values({2000, 1}, v);
  const auto all = slice_window(s, s.first_month(), s.last_month());
  CHECK(all.values() == s.values());
  const auto part = slice_window(s, {2000, 3}, {2000, 5});
  REQUIRE(part.size() == 3);
  CHECK(part[0].value == 2);
  CHECK(part[2].value == 4);
  CHECK_THROWS_AS(slice_window(s, {1999, 12}, {2000, 5}), DataError);
  CHECK_THROWS_AS(slice_window(s, {2000, 5}, {2000, 3}), DataError);
  CHECK_THROWS_AS(slice_window(s, {2000, 5}, {2002, 1}), DataError);
}
