#include <doctest.h>

#include <algorithm>
#include <numeric>
#include <set>

#include "tbea/eca.hpp"
#include "tbea/errors.hpp"
#include "tbea/rng.hpp"

using namespace tbea;

namespace {

// Direct double loop over all event pairs.
std::size_t brute_count(const EcaInput& in) {
  std::size_t c = 0;
  for (int a : in.a_times) {
    bool hit = false;
    for (int b : in.b_times) {
      const int lag = (a - in.tau) - b;
      hit = hit || (lag >= 0 && lag <= in.delta_t);
    }
    c += hit;
  }
  return c;
}

std::vector<int> random_set(Rng& rng, int count, int lo, int hi) {
  std::set<int> s;
  while (static_cast<int>(s.size()) < count) s.insert(rng.uniform_int(lo, hi));
  return {s.begin(), s.end()};
}

}  // namespace

TEST_CASE("precursor rate examples") {
  EcaInput in{{10, 20}, {9, 15}, 1, 0, 0, 30};
  const auto r = precursor_rate(in);
  CHECK(r.rp == 0.5);
  CHECK(r.coincident_count == 1);
  EcaInput self{{3, 8, 13}, {3, 8, 13}, 0, 0, 0, 20};
  CHECK(precursor_rate(self).rp == 1.0);
}

TEST_CASE("precursor rate matches the pairwise definition") {
  Rng rng(4);
  bool ok = true, monotone = true, shifted = true;
  for (int rep = 0; rep < 1000; ++rep) {
    EcaInput in;
    in.span_start = 0;
    in.span_end = 200;
    in.a_times = random_set(rng, rng.uniform_int(1, 10), 0, 200);
    in.b_times = random_set(rng, rng.uniform_int(1, 20), 0, 200);
    in.tau = rng.uniform_int(0, 3);
    double prev = -1.0;
    for (int d = 0; d <= 8; ++d) {
      in.delta_t = d;
      const auto r = precursor_rate(in);
      ok = ok && r.coincident_count == brute_count(in) &&
           r.rp == static_cast<double>(r.coincident_count) / static_cast<double>(in.a_times.size());
      ok = ok && r.rp >= 0.0 && r.rp <= 1.0;
      monotone = monotone && r.rp >= prev;
      prev = r.rp;
    }
    EcaInput moved = in;
    for (int& t : moved.a_times) t += 37;
    for (int& t : moved.b_times) t += 37;
    moved.span_start += 37;
    moved.span_end += 37;
    shifted = shifted && precursor_rate(moved).rp == precursor_rate(in).rp;
  }
  CHECK(ok);
  CHECK(monotone);
  CHECK(shifted);
}

TEST_CASE("input validation") {
  EcaInput empty_a{{}, {1, 2}, 1, 0, 0, 10};
  CHECK_THROWS_AS(precursor_rate(empty_a), DataError);
  EcaInput unsorted{{5, 3}, {1}, 1, 0, 0, 10};
  CHECK_THROWS_AS(precursor_rate(unsorted), DataError);
  EcaInput outside{{5, 30}, {1}, 1, 0, 0, 10};
  CHECK_THROWS_AS(precursor_rate(outside), DataError);
  EcaInput negative{{5}, {1}, -1, 0, 0, 10};
  CHECK_THROWS_AS(precursor_rate(negative), ConfigError);
  EcaInput narrow{{1}, {1}, 5, 0, 0, 4};
  CHECK_THROWS_AS(eca_significance(narrow, 1000, 1), DataError);
  EcaInput fine{{5}, {1}, 1, 0, 0, 10};
  CHECK_THROWS_AS(eca_significance(fine, 999, 1), ConfigError);
  CHECK_THROWS_AS(eca_table(empty_a, 0, 5, 1000, 1), DataError);
}

TEST_CASE("significance of a perfect coincidence on a long span") {
  EcaInput in{{100, 250, 400, 550}, {100, 250, 400, 550}, 0, 0, 0, 599};
  CHECK(eca_significance(in, 10000, 3) < 0.01);
}

TEST_CASE("a saturated B sequence cannot be significant") {
  EcaInput in;
  in.span_start = 0;
  in.span_end = 99;
  in.b_times.resize(100);
  std::iota(in.b_times.begin(), in.b_times.end(), 0);
  in.a_times = {10, 40, 70};
  CHECK(precursor_rate(in).rp == 1.0);
  CHECK(eca_significance(in, 1000, 2) == 1.0);
}

TEST_CASE("Monte Carlo p-value converges") {
  EcaInput in{{50, 120, 300, 410}, {48, 119, 200, 350, 405}, 2, 0, 0, 599};
  const double coarse = eca_significance(in, 10000, 11);
  const double fine = eca_significance(in, 100000, 12);
  CHECK(std::abs(coarse - fine) < 0.005);
  CHECK(eca_significance(in, 5000, 9, 1) == eca_significance(in, 5000, 9, 3));
}

TEST_CASE("table rows") {
  EcaInput in{{50, 120, 300, 410}, {48, 119, 200, 350, 405}, 0, 0, 0, 599};
  const auto rows = eca_table(in, 0, 5, 2000, 1);
  REQUIRE(rows.size() == 6);
  for (std::size_t i = 0; i < rows.size(); ++i) {
    CHECK(rows[i].delta_t == static_cast<int>(i));
    CHECK(rows[i].p_value > 0.0);
    CHECK(rows[i].p_value <= 1.0);
    if (i > 0) CHECK(rows[i].rp >= rows[i - 1].rp);
  }
  CHECK(rows[0].rp == 0.0);
  CHECK(rows[1].rp == 0.25);
  CHECK(rows[5].rp == 0.75);
  CHECK_THROWS_AS(eca_table(in, 3, 2, 2000, 1), ConfigError);
}
