#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "tbea/rng.hpp"
#include "tbea/series.hpp"
#include "tbea/tbea.hpp"

namespace tbea {

/// Sign assigned to a gap or amplitude exactly equal to its reference median.
/// Integer gaps tie with an integer median often, so the rule matters.
enum class TieRule { Minus, Plus };

struct SignTriple {
  int st = 0;  // sign(T - theta_T0)
  int sx = 0;  // sign(X - theta_X0)
  int s = 0;   // (sx - st) / 2
};

SignTriple sign_stats(const EventRecord& event, const Phase1Estimates& est,
                      TieRule ties = TieRule::Minus);

/// Draw of the continuous surrogate S* ~ N(s, sigma^2). sigma must lie in [0.1, 0.2].
double continuousify(int s, double sigma, Rng& rng);

struct EwmaState {
  std::size_t index = 0;
  double z_star = 0.0;
};

/// Z*_i = max(0, lambda * S*_i + (1 - lambda) * Z*_{i-1}).
EwmaState ewma_update(const EwmaState& state, double s_star, double lambda);

/// Upper asymptotic limit K * sqrt(lambda (sigma^2 + 0.5) / (2 - lambda)).
double ucl(double lambda, double kappa, double sigma);

/// Validated chart constants; the control limit is derived on construction.
class EwmaParams {
 public:
  EwmaParams(double lambda, double kappa, double sigma);

  double lambda() const { return lambda_; }
  double kappa() const { return kappa_; }
  double sigma() const { return sigma_; }
  double ucl() const { return ucl_; }

 private:
  double lambda_;
  double kappa_;
  double sigma_;
  double ucl_;
};

/// Probabilities of S = -1, 0, +1.
struct CellProbabilities {
  double minus = 0.25;
  double zero = 0.5;
  double plus = 0.25;
};

/// Streaming upper-sided chart. One continuousify draw per observation.
class EwmaChart {
 public:
  EwmaChart(const EwmaParams& params, Phase1Estimates est, TieRule ties = TieRule::Minus);

  struct Step {
    SignTriple signs;
    double s_star = 0.0;
    double z_star = 0.0;
    bool signal = false;
  };

  Step step(const EventRecord& event, Rng& rng);
  /// Advances with an already computed sign statistic.
  Step step_sign(int s, Rng& rng);
  void reset() { state_ = {}; }
  const EwmaState& state() const { return state_; }
  const EwmaParams& params() const { return params_; }

 private:
  EwmaParams params_;
  Phase1Estimates est_;
  TieRule ties_;
  EwmaState state_;
};

struct EwmaPoint {
  YearMonth month;
  int s = 0;
  double s_star = 0.0;
  double z_star = 0.0;
  bool signal = false;
};

struct EwmaRunResult {
  std::vector<EwmaPoint> trajectory;
  std::vector<YearMonth> signals;
  std::vector<YearMonth> turning_points;
  double ucl = 0.0;
};

struct TurningPointOptions {
  /// Minimum rise after a valley, as a fraction of the control limit.
  double min_rise_fraction = 0.25;
};

/// Indices of lower turning points: strict local minima of z (a run of equal
/// values counts as one point, located at its last index) lying below `limit`,
/// after which z climbs at least `min_rise` before falling below the valley.
std::vector<std::size_t> turning_points(std::span<const double> z, double limit, double min_rise);

EwmaRunResult run_chart(std::span<const EventRecord> events, const Phase1Estimates& est,
                        const EwmaParams& params, Rng& rng, TieRule ties = TieRule::Minus,
                        TurningPointOptions tp = {});

/// Zero-state in-control ARL from a Brook-Evans discretization of [0, UCL]
/// into `m_states` equal cells, transitions evaluated at cell centres.
double markov_arl(const EwmaParams& params, CellProbabilities probs = {}, int m_states = 301);

/// Limit multiplier K giving markov_arl == target at fixed lambda and sigma.
double solve_kappa(double target_arl0, double lambda, double sigma, CellProbabilities probs = {},
                   int m_states = 301);

struct EwmaDesign {
  double lambda = 0.0;
  double kappa = 0.0;
  double arl0 = 0.0;
};

/// Solves K for every lambda of the grid and returns the smallest lambda that
/// admits a solution.
EwmaDesign design_params(double target_arl0, double sigma, std::span<const double> lambda_grid,
                         CellProbabilities probs = {}, int m_states = 301);

struct RunLengthSummary {
  double mean = 0.0;
  double sd = 0.0;
  std::size_t replications = 0;
};

/// Monte Carlo zero-state ARL with S drawn i.i.d. from `probs`.
RunLengthSummary monte_carlo_arl(const EwmaParams& params, CellProbabilities probs,
                                 std::size_t replications, std::uint64_t seed,
                                 unsigned workers = 0);

}  // namespace tbea
