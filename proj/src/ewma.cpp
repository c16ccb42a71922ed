#include "tbea/ewma.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "tbea/errors.hpp"
#include "tbea/parallel.hpp"

namespace tbea {

namespace {

int sign_with_ties(double x, TieRule ties) {
  if (x > 0.0) return 1;
  if (x < 0.0) return -1;
  return ties == TieRule::Minus ? -1 : 1;
}

double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); }

void check_probabilities(const CellProbabilities& p) {
  if (p.minus < 0.0 || p.zero < 0.0 || p.plus < 0.0 ||
      std::abs(p.minus + p.zero + p.plus - 1.0) > 1e-9) {
    throw ConfigError("cell probabilities must be nonnegative and sum to 1");
  }
}

// P(lambda * S* + base <= edge) under the three-component mixture.
double mixture_cdf(double edge, double base, double lambda, double sigma,
                   const CellProbabilities& p) {
  const double u = (edge - base) / lambda;
  return p.minus * normal_cdf((u + 1.0) / sigma) + p.zero * normal_cdf(u / sigma) +
         p.plus * normal_cdf((u - 1.0) / sigma);
}

}  // namespace

SignTriple sign_stats(const EventRecord& event, const Phase1Estimates& est, TieRule ties) {
  if (!event.gap_months) {
    throw DataError("event " + event.month.to_string() + " has no gap (first event of the stream)");
  }
  SignTriple t;
  t.st = sign_with_ties(static_cast<double>(*event.gap_months) - est.theta_t0, ties);
  t.sx = sign_with_ties(event.amplitude - est.theta_x0, ties);
  t.s = (t.sx - t.st) / 2;
  return t;
}

double continuousify(int s, double sigma, Rng& rng) {
  if (!(sigma >= 0.1 && sigma <= 0.2)) {
    throw ConfigError("continuousify sigma must lie in [0.1, 0.2], got " + std::to_string(sigma));
  }
  if (s < -1 || s > 1) throw UsageError("sign statistic must be -1, 0 or +1");
  return rng.normal(static_cast<double>(s), sigma);
}

EwmaState ewma_update(const EwmaState& state, double s_star, double lambda) {
  return {state.index + 1, std::max(0.0, lambda * s_star + (1.0 - lambda) * state.z_star)};
}

double ucl(double lambda, double kappa, double sigma) {
  return kappa * std::sqrt(lambda * (sigma * sigma + 0.5) / (2.0 - lambda));
}

EwmaParams::EwmaParams(double lambda, double kappa, double sigma)
    : lambda_(lambda), kappa_(kappa), sigma_(sigma) {
  if (!(lambda > 0.0 && lambda <= 1.0)) throw ConfigError("lambda must lie in (0, 1]");
  if (!(kappa > 0.0) || !std::isfinite(kappa)) throw ConfigError("K must be positive");
  if (!(sigma >= 0.1 && sigma <= 0.2)) throw ConfigError("sigma must lie in [0.1, 0.2]");
  ucl_ = tbea::ucl(lambda_, kappa_, sigma_);
}

EwmaChart::EwmaChart(const EwmaParams& params, Phase1Estimates est, TieRule ties)
    : params_(params), est_(est), ties_(ties) {}

EwmaChart::Step EwmaChart::step_sign(int s, Rng& rng) {
  Step out;
  out.signs.s = s;
  out.s_star = continuousify(s, params_.sigma(), rng);
  state_ = ewma_update(state_, out.s_star, params_.lambda());
  out.z_star = state_.z_star;
  out.signal = out.z_star > params_.ucl();
  return out;
}

EwmaChart::Step EwmaChart::step(const EventRecord& event, Rng& rng) {
  const SignTriple signs = sign_stats(event, est_, ties_);
  Step out = step_sign(signs.s, rng);
  out.signs = signs;
  return out;
}

std::vector<std::size_t> turning_points(std::span<const double> z, double limit, double min_rise) {
  std::vector<std::size_t> out;
  const std::size_t n = z.size();
  if (n < 3) return out;
  std::size_t a = 0;
  while (a < n) {
    std::size_t b = a;
    while (b + 1 < n && z[b + 1] == z[a]) ++b;
    const double v = z[b];
    if (a > 0 && z[a - 1] > v && v < limit) {
      for (std::size_t j = b + 1; j < n; ++j) {
        if (z[j] < v) break;
        if (z[j] >= v + min_rise && z[j] > v) {
          out.push_back(b);
          break;
        }
      }
    }
    a = b + 1;
  }
  return out;
}

EwmaRunResult run_chart(std::span<const EventRecord> events, const Phase1Estimates& est,
                        const EwmaParams& params, Rng& rng, TieRule ties, TurningPointOptions tp) {
  if (events.empty()) throw DataError("no events to monitor");
  EwmaChart chart(params, est, ties);
  EwmaRunResult result;
  result.ucl = params.ucl();
  result.trajectory.reserve(events.size());
  std::vector<double> z;
  z.reserve(events.size());
  for (const auto& ev : events) {
    const auto step = chart.step(ev, rng);
    result.trajectory.push_back({ev.month, step.signs.s, step.s_star, step.z_star, step.signal});
    if (step.signal) result.signals.push_back(ev.month);
    z.push_back(step.z_star);
  }
  for (std::size_t i : turning_points(z, params.ucl(), tp.min_rise_fraction * params.ucl())) {
    result.turning_points.push_back(events[i].month);
  }
  return result;
}

double markov_arl(const EwmaParams& params, CellProbabilities probs, int m_states) {
  check_probabilities(probs);
  if (m_states < 50) throw ConfigError("markov_arl needs at least 50 states");
  const double limit = params.ucl();
  if (!(limit > 0.0)) throw NumericError("control limit must be positive for the Markov chain");
  const double lambda = params.lambda();
  const double sigma = params.sigma();
  const int m = m_states;
  const double width = limit / m;

  Eigen::MatrixXd a = Eigen::MatrixXd::Identity(m, m);
  std::vector<double> cdf(static_cast<std::size_t>(m) + 1);
  for (int i = 0; i < m; ++i) {
    const double base = (1.0 - lambda) * (i + 0.5) * width;
    for (int j = 0; j <= m; ++j) cdf[j] = mixture_cdf(j * width, base, lambda, sigma, probs);
    // Mass below zero folds into the first cell.
    a(i, 0) -= cdf[1];
    for (int j = 1; j < m; ++j) a(i, j) -= cdf[j + 1] - cdf[j];
  }
  const Eigen::VectorXd ones = Eigen::VectorXd::Ones(m);
  Eigen::PartialPivLU<Eigen::MatrixXd> lu(a);
  const Eigen::VectorXd arl = lu.solve(ones);
  const double result = arl(0);
  if (!std::isfinite(result) || result <= 0.0 || (a * arl - ones).norm() > 1e-6 * arl.norm()) {
    throw NumericError("Markov chain system is singular or ill-conditioned");
  }
  return result;
}

double solve_kappa(double target_arl0, double lambda, double sigma, CellProbabilities probs,
                   int m_states) {
  if (!(target_arl0 > 1.0)) throw ConfigError("target ARL0 must exceed 1");
  auto arl_at = [&](double k) { return markov_arl(EwmaParams(lambda, k, sigma), probs, m_states); };
  double lo = 1e-9;
  double hi = 1.0;
  const double arl_lo = arl_at(lo);
  if (arl_lo > target_arl0) {
    throw NumericError("target ARL0 " + std::to_string(target_arl0) +
                       " is below the chart's smallest attainable ARL (" + std::to_string(arl_lo) + ")");
  }
  while (arl_at(hi) < target_arl0) {
    hi *= 2.0;
    if (hi > 1e3) throw NumericError("could not bracket K for target ARL0");
  }
  for (int it = 0; it < 200 && (hi - lo) > 1e-10 * hi; ++it) {
    const double mid = 0.5 * (lo + hi);
    (arl_at(mid) < target_arl0 ? lo : hi) = mid;
  }
  const double k = 0.5 * (lo + hi);
  if (std::abs(arl_at(k) / target_arl0 - 1.0) > 0.005) {
    throw NumericError("bisection on K did not reach the target ARL0 within 0.5%");
  }
  return k;
}

EwmaDesign design_params(double target_arl0, double sigma, std::span<const double> lambda_grid,
                         CellProbabilities probs, int m_states) {
  if (lambda_grid.empty()) throw ConfigError("empty lambda grid");
  std::vector<double> grid(lambda_grid.begin(), lambda_grid.end());
  std::sort(grid.begin(), grid.end());
  for (double lambda : grid) {
    try {
      const double k = solve_kappa(target_arl0, lambda, sigma, probs, m_states);
      return {lambda, k, markov_arl(EwmaParams(lambda, k, sigma), probs, m_states)};
    } catch (const NumericError&) {
      continue;
    }
  }
  throw NumericError("no lambda in the grid attains target ARL0 " + std::to_string(target_arl0));
}

RunLengthSummary monte_carlo_arl(const EwmaParams& params, CellProbabilities probs,
                                 std::size_t replications, std::uint64_t seed, unsigned workers) {
  check_probabilities(probs);
  if (replications < 2) throw ConfigError("need at least 2 replications");
  constexpr std::size_t max_run = 100'000'000;
  std::vector<double> lengths(replications);
  parallel_for(replications, workers, [&](std::size_t r) {
    Rng rng = Rng::stream(seed, r);
    EwmaChart chart(params, Phase1Estimates{});
    for (std::size_t n = 1; n <= max_run; ++n) {
      const double u = rng.uniform();
      const int s = u < probs.minus ? -1 : (u < probs.minus + probs.zero ? 0 : 1);
      if (chart.step_sign(s, rng).signal) {
        lengths[r] = static_cast<double>(n);
        return;
      }
    }
    throw NumericError("run length exceeded " + std::to_string(max_run) + " observations");
  });
  RunLengthSummary out;
  out.replications = replications;
  double sum = 0.0;
  for (double v : lengths) sum += v;
  out.mean = sum / static_cast<double>(replications);
  double ss = 0.0;
  for (double v : lengths) ss += (v - out.mean) * (v - out.mean);
  out.sd = std::sqrt(ss / static_cast<double>(replications - 1));
  return out;
}

}  // namespace tbea
