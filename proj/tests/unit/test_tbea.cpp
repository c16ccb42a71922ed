#include <doctest.h>

#include <algorithm>

#include "tbea/errors.hpp"
#include "tbea/rng.hpp"
#include "tbea/tbea.hpp"

using namespace tbea;

namespace {

EventRecord event_at(YearMonth m, double x, std::optional<int> gap) {
  EventRecord e;
  e.month = m;
  e.amplitude = x;
  e.gap_months = gap;
  return e;
}

}  // namespace

TEST_CASE("estimate_phase1 on constant samples") {
  std::vector<EventRecord> ev{event_at({2000, 1}, 1.5, std::nullopt), event_at({2000, 3}, 1.5, 2),
                              event_at({2000, 5}, 1.5, 2), event_at({2000, 7}, 1.5, 2)};
  const auto est = estimate_phase1(ev, {{2000, 1}, {2000, 12}});
  CHECK(est.theta_t0 == 2);
  CHECK(est.theta_x0 == 1.5);
  CHECK(est.mu_t0 == 2);
  CHECK(est.mu_x0 == 1.5);
  CHECK(est.n_events == 3);
}

TEST_CASE("estimate_phase1 keeps the gap reaching back before the window") {
  std::vector<EventRecord> ev{event_at({1999, 6}, 2.0, std::nullopt), event_at({2000, 2}, 1.0, 8),
                              event_at({2000, 3}, 3.0, 1), event_at({2001, 1}, 9.0, 10)};
  const auto est = estimate_phase1(ev, {{2000, 1}, {2000, 12}});
  CHECK(est.n_events == 2);
  CHECK(est.mu_t0 == doctest::Approx(4.5));
  CHECK(est.theta_t0 == doctest::Approx(4.5));
  CHECK(est.mu_x0 == doctest::Approx(2.0));
}

TEST_CASE("estimate_phase1 needs two gapped events") {
  std::vector<EventRecord> ev{event_at({2000, 1}, 1.5, std::nullopt), event_at({2000, 3}, 1.5, 2)};
  CHECK_THROWS_AS(estimate_phase1(ev, {{2000, 1}, {2000, 12}}), DataError);
  CHECK_THROWS_AS(estimate_phase1({}, {{2000, 1}, {2000, 12}}), DataError);
}

TEST_CASE("estimate_phase1 ignores the order of its sample") {
  Rng rng(3);
  std::vector<EventRecord> ev;
  for (int i = 0; i < 30; ++i) ev.push_back(event_at({2000, 1}, 1.0 + rng.uniform(), 1 + rng.uniform_int(0, 9)));
  Phase1Estimates a{}, b{};
  a = estimate_phase1(ev, {{2000, 1}, {2000, 1}});
  std::shuffle(ev.begin(), ev.end(), rng.engine());
  b = estimate_phase1(ev, {{2000, 1}, {2000, 1}});
  CHECK(a.theta_t0 == b.theta_t0);
  CHECK(a.theta_x0 == b.theta_x0);
  CHECK(a.mu_t0 == doctest::Approx(b.mu_t0));
  CHECK(a.mu_x0 == doctest::Approx(b.mu_x0));
}

TEST_CASE("normalize and the alternative statistics") {
  Phase1Estimates est;
  est.mu_t0 = 10;
  est.mu_x0 = 1.25;
  const auto p = normalize(event_at({2000, 1}, 1.5, 5), est);
  CHECK(p.t_norm == doctest::Approx(0.5));
  CHECK(p.x_norm == doctest::Approx(1.2));
  CHECK(p.z_r == doctest::Approx(2.4));
  const auto alt = z_alternatives(p);
  CHECK(alt.z_d == doctest::Approx(0.7));
  CHECK(alt.z_p == doctest::Approx(3.2));

  const auto unit = normalize(event_at({2000, 1}, 1.25, 10), est);
  CHECK(unit.t_norm == doctest::Approx(1));
  CHECK(unit.x_norm == doctest::Approx(1));
  CHECK(unit.z_r == doctest::Approx(1));
  CHECK(z_alternatives(unit).z_d == doctest::Approx(0));
  CHECK(z_alternatives(unit).z_p == doctest::Approx(2));

  CHECK_THROWS_AS(normalize(event_at({2000, 1}, 1.5, std::nullopt), est), DataError);
}

TEST_CASE("rescaling gaps and their mean leaves the point unchanged") {
  Phase1Estimates est;
  est.mu_t0 = 7;
  est.mu_x0 = 1.3;
  Phase1Estimates scaled = est;
  scaled.mu_t0 = 21;
  for (int t = 1; t <= 12; ++t) {
    const auto a = normalize(event_at({2000, 1}, 1.7, t), est);
    const auto b = normalize(event_at({2000, 1}, 1.7, 3 * t), scaled);
    CHECK(a.t_norm == doctest::Approx(b.t_norm));
    CHECK(a.z_r == doctest::Approx(b.z_r));
  }
}

TEST_CASE("all three statistics increase in amplitude and decrease in gap") {
  const std::vector<double> grid{0.1, 0.25, 0.5, 1, 1.5, 2, 4};
  auto stats = [](double t, double x) {
    TbeaPoint p{t, x, x / t};
    const auto alt = z_alternatives(p);
    return std::array<double, 3>{p.z_r, alt.z_d, alt.z_p};
  };
  for (double t : grid) {
    for (std::size_t i = 0; i + 1 < grid.size(); ++i) {
      const auto lo = stats(t, grid[i]);
      const auto hi = stats(t, grid[i + 1]);
      for (int s = 0; s < 3; ++s) CHECK(hi[s] > lo[s]);
    }
  }
  for (double x : grid) {
    for (std::size_t i = 0; i + 1 < grid.size(); ++i) {
      const auto near = stats(grid[i], x);
      const auto far = stats(grid[i + 1], x);
      for (int s = 0; s < 3; ++s) CHECK(far[s] < near[s]);
    }
  }
}

TEST_CASE("ratio_stream covers gapped events only") {
  std::vector<EventRecord> ev{event_at({2000, 1}, 1.5, std::nullopt), event_at({2000, 3}, 1.5, 2),
                              event_at({2000, 4}, 3.0, 1)};
  Phase1Estimates est;
  est.mu_t0 = 2;
  est.mu_x0 = 1.5;
  CHECK(gapped_events(ev).size() == 2);
  const auto z = ratio_stream(gapped_events(ev), est);
  REQUIRE(z.size() == 2);
  CHECK(z[0] == doctest::Approx(1));
  CHECK(z[1] == doctest::Approx(4));
}
