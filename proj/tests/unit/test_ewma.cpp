#include <doctest.h>

#include <cmath>
#include <vector>

#include "tbea/errors.hpp"
#include "tbea/ewma.hpp"
#include "tbea/rng.hpp"

using namespace tbea;

namespace {

Phase1Estimates reference() {
  Phase1Estimates est;
  est.theta_t0 = 1;
  est.theta_x0 = 1.2263;
  est.mu_t0 = 10.9149;
  est.mu_x0 = 1.2511;
  return est;
}

EventRecord gapped(int t, double x) {
  EventRecord e;
  e.month = {2000, 1};
  e.amplitude = x;
  e.gap_months = t;
  return e;
}

double upper_tail(double x) { return 0.5 * std::erfc(x / std::sqrt(2.0)); }

}  // namespace

TEST_CASE("sign statistics examples") {
  const auto est = reference();
  auto a = sign_stats(gapped(5, 1.5), est);
  CHECK(a.st == 1);
  CHECK(a.sx == 1);
  CHECK(a.s == 0);
  auto b = sign_stats(gapped(1, 2.0), est);
  CHECK(b.st == -1);
  CHECK(b.sx == 1);
  CHECK(b.s == 1);
  auto c = sign_stats(gapped(12, 1.05), est);
  CHECK(c.st == 1);
  CHECK(c.sx == -1);
  CHECK(c.s == -1);
  CHECK(sign_stats(gapped(1, 2.0), est, TieRule::Plus).st == 1);
  EventRecord first;
  CHECK_THROWS_AS(sign_stats(first, est), DataError);
}

TEST_CASE("sign mapping over all gap and amplitude sign pairs") {
  Phase1Estimates est;
  est.theta_t0 = 5;
  est.theta_x0 = 1.5;
  for (int st : {-1, 1}) {
    for (int sx : {-1, 1}) {
      const auto sig = sign_stats(gapped(st > 0 ? 9 : 2, sx > 0 ? 2.5 : 1.1), est);
      CHECK(sig.st == st);
      CHECK(sig.sx == sx);
      CHECK(sig.s * 2 == sx - st);
      const int expected = (st == -1 && sx == 1) ? 1 : (st == 1 && sx == -1) ? -1 : 0;
      CHECK(sig.s == expected);
    }
  }
}

TEST_CASE("continuousify moments") {
  Rng rng(5);
  const int n = 1000000;
  for (int s : {-1, 0, 1}) {
    double sum = 0.0, sum2 = 0.0;
    for (int i = 0; i < n; ++i) {
      const double v = continuousify(s, 0.125, rng);
      sum += v;
      sum2 += v * v;
    }
    const double m = sum / n;
    const double sd = std::sqrt((sum2 - n * m * m) / (n - 1));
    CHECK(std::abs(m - s) < 0.001);
    CHECK(std::abs(sd - 0.125) < 0.001);
  }
}

TEST_CASE("continuousify at the narrowest spread stays near its centre") {
  Rng rng(9);
  for (int i = 0; i < 1000; ++i) CHECK(std::abs(continuousify(1, 0.1, rng) - 1.0) < 0.6);
  CHECK_THROWS_AS(continuousify(1, 0.05, rng), ConfigError);
  CHECK_THROWS_AS(continuousify(1, 0.25, rng), ConfigError);
}

TEST_CASE("ewma update") {
  CHECK(ewma_update({0, 0.0}, -1.0, 0.07).z_star == 0.0);
  CHECK(ewma_update({0, 0.0}, -1.0, 0.5).z_star == 0.0);
  CHECK(ewma_update({0, 0.3}, 1.0, 0.07).z_star == doctest::Approx(0.349));
  CHECK(ewma_update({4, 0.3}, 1.0, 0.07).index == 5);
  CHECK(ewma_update({0, 0.8}, 0.4, 1.0).z_star == doctest::Approx(0.4));
  CHECK(ewma_update({0, 0.8}, -0.4, 1.0).z_star == 0.0);
}

TEST_CASE("z_star stays nonnegative over a million random updates") {
  Rng rng(21);
  EwmaState st;
  bool ok = true;
  for (int i = 0; i < 1000000; ++i) {
    const double lambda = 0.01 + 0.99 * rng.uniform();
    st = ewma_update(st, rng.normal(0.0, 2.0), lambda);
    ok = ok && st.z_star >= 0.0;
  }
  CHECK(ok);
}

TEST_CASE("control limit") {
  CHECK(ucl(0.07, 2.515, 0.125) == doctest::Approx(0.34393).epsilon(1e-5 / 0.34393));
  CHECK(ucl(0.07, 0.0, 0.125) == 0.0);
  double prev = 0.0;
  for (double k = 0.5; k <= 4.0; k += 0.5) {
    CHECK(ucl(0.07, k, 0.125) > prev);
    prev = ucl(0.07, k, 0.125);
  }
  prev = 0.0;
  for (double l = 0.05; l <= 1.0; l += 0.05) {
    CHECK(ucl(l, 2.5, 0.125) > prev);
    prev = ucl(l, 2.5, 0.125);
  }
  CHECK(EwmaParams(0.07, 2.515, 0.125).ucl() == ucl(0.07, 2.515, 0.125));
  CHECK_THROWS_AS(EwmaParams(0.0, 2.5, 0.125), ConfigError);
  CHECK_THROWS_AS(EwmaParams(1.5, 2.5, 0.125), ConfigError);
  CHECK_THROWS_AS(EwmaParams(0.07, -1.0, 0.125), ConfigError);
  CHECK_THROWS_AS(EwmaParams(0.07, 2.5, 0.3), ConfigError);
}

TEST_CASE("in-control cell probabilities from independent continuous gaps and amplitudes") {
  // Continuous gaps avoid ties, so each sign is a fair coin.
  Rng rng(17);
  Phase1Estimates est;
  est.theta_t0 = 10.0 * std::log(2.0);
  est.theta_x0 = 1.0 + std::log(2.0);
  int counts[3] = {0, 0, 0};
  const int n = 200000;
  for (int i = 0; i < n; ++i) {
    const double t = -10.0 * std::log(1.0 - rng.uniform());
    const double x = 1.0 - std::log(1.0 - rng.uniform());
    const int st = t > est.theta_t0 ? 1 : -1;
    const int sx = x > est.theta_x0 ? 1 : -1;
    ++counts[(sx - st) / 2 + 1];
  }
  CHECK(std::abs(counts[0] / double(n) - 0.25) < 0.005);
  CHECK(std::abs(counts[1] / double(n) - 0.5) < 0.005);
  CHECK(std::abs(counts[2] / double(n) - 0.25) < 0.005);
}

TEST_CASE("Markov ARL") {
  const EwmaParams p(0.07, 2.515, 0.125);
  const double arl = markov_arl(p);
  CHECK(arl >= 358.0);
  CHECK(arl <= 382.0);
  CHECK(std::abs(markov_arl(p, {}, 601) - arl) / arl < 0.005);
  CHECK_THROWS_AS(markov_arl(p, {}, 20), ConfigError);
  CHECK_THROWS_AS(markov_arl(p, {0.5, 0.5, 0.5}), ConfigError);
}

TEST_CASE("Markov ARL without memory is the Shewhart geometric mean") {
  for (double k : {0.5, 1.0, 2.0}) {
    const EwmaParams p(1.0, k, 0.15);
    const double h = p.ucl();
    const double tail =
        0.25 * upper_tail((h + 1.0) / 0.15) + 0.5 * upper_tail(h / 0.15) + 0.25 * upper_tail((h - 1.0) / 0.15);
    CHECK(markov_arl(p) == doctest::Approx(1.0 / tail).epsilon(1e-9));
  }
}

TEST_CASE("solving the limit multiplier") {
  const double k = solve_kappa(370.0, 0.07, 0.125);
  CHECK(std::abs(k - 2.515) < 0.02);
  CHECK(markov_arl(EwmaParams(0.07, k, 0.125)) == doctest::Approx(370.0).epsilon(0.005));

  // Without memory ARL0 = 1 / tail mass. ARL0 = 2 is the K -> 0 boundary itself, so
  // the inversion is checked at 2.5 (tail mass 0.4) and the boundary must be refused.
  CHECK_THROWS_AS(solve_kappa(2.0, 1.0, 0.125), NumericError);
  const double k2 = solve_kappa(2.5, 1.0, 0.125);
  const double h = ucl(1.0, k2, 0.125);
  const double tail =
      0.25 * upper_tail((h + 1.0) / 0.125) + 0.5 * upper_tail(h / 0.125) + 0.25 * upper_tail((h - 1.0) / 0.125);
  CHECK(tail == doctest::Approx(0.4).epsilon(0.005));

  double prev = 0.0;
  for (double target : {50.0, 100.0, 200.0, 370.0, 500.0}) {
    const double kk = solve_kappa(target, 0.1, 0.125);
    CHECK(kk > prev);
    prev = kk;
  }
  CHECK_THROWS_AS(solve_kappa(0.5, 0.07, 0.125), ConfigError);
}

TEST_CASE("design picks the smallest lambda with a solution") {
  const std::vector<double> grid{0.2, 0.07, 0.1};
  const auto d = design_params(370.0, 0.125, grid);
  CHECK(d.lambda == 0.07);
  CHECK(std::abs(d.kappa - 2.515) < 0.02);
  CHECK(d.arl0 == doctest::Approx(370.0).epsilon(0.005));
  CHECK_THROWS_AS(design_params(370.0, 0.125, std::vector<double>{}), ConfigError);
}

TEST_CASE("Monte Carlo ARL agrees with the Markov chain") {
  const EwmaParams p(0.07, 2.515, 0.125);
  const auto mc = monte_carlo_arl(p, {}, 100000, 42);
  CHECK(std::abs(mc.mean / markov_arl(p) - 1.0) < 0.03);
  CHECK(monte_carlo_arl(p, {}, 2000, 3, 1).mean == monte_carlo_arl(p, {}, 2000, 3, 4).mean);
}

TEST_CASE("turning points") {
  const std::vector<double> rising{0.0, 0.1, 0.2, 0.3};
  CHECK(turning_points(rising, 0.5, 0.05).empty());
  const std::vector<double> valley{0.3, 0.1, 0.4};
  CHECK(turning_points(valley, 0.5, 0.1) == std::vector<std::size_t>{1});
  const std::vector<double> plateau{0.3, 0.1, 0.1, 0.1, 0.4};
  CHECK(turning_points(plateau, 0.5, 0.1) == std::vector<std::size_t>{3});
  const std::vector<double> shallow{0.3, 0.1, 0.12, 0.05, 0.4};
  CHECK(turning_points(shallow, 0.5, 0.1) == std::vector<std::size_t>{3});
  const std::vector<double> above{0.9, 0.6, 0.9};
  CHECK(turning_points(above, 0.5, 0.1).empty());
}

TEST_CASE("a run of benign events never signals") {
  const auto est = reference();
  std::vector<EventRecord> ev;
  for (int i = 0; i < 200; ++i) {
    auto e = gapped(12, 1.05);
    e.month = YearMonth{2000, 1}.plus_months(12 * i);
    e.ordinal = static_cast<std::size_t>(i + 1);
    ev.push_back(e);
  }
  Rng rng(1);
  const auto res = run_chart(ev, est, EwmaParams(0.07, 2.515, 0.125), rng);
  CHECK(res.signals.empty());
  CHECK(res.trajectory.size() == ev.size());
  CHECK(res.trajectory.back().z_star < 0.01);
}

TEST_CASE("run_chart is reproducible and signals only above the limit") {
  const auto est = reference();
  std::vector<EventRecord> ev;
  Rng data(8);
  for (int i = 0; i < 300; ++i) {
    auto e = gapped(1 + data.uniform_int(0, 3), 1.0 + 2.0 * data.uniform());
    e.month = YearMonth{2000, 1}.plus_months(i);
    ev.push_back(e);
  }
  const EwmaParams p(0.07, 2.515, 0.125);
  Rng a(3), b(3);
  const auto ra = run_chart(ev, est, p, a);
  const auto rb = run_chart(ev, est, p, b);
  REQUIRE(ra.trajectory.size() == rb.trajectory.size());
  for (std::size_t i = 0; i < ra.trajectory.size(); ++i) {
    CHECK(ra.trajectory[i].z_star == rb.trajectory[i].z_star);
    CHECK(ra.trajectory[i].signal == (ra.trajectory[i].z_star > ra.ucl));
  }
  CHECK_FALSE(ra.signals.empty());
}
