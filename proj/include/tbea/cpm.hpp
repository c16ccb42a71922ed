#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace tbea {

enum class Detector { MW, KS };

std::string to_string(Detector d);
Detector parse_detector(std::string_view name);

/// Mann-Whitney U_{k,n}: sum over i <= k < j of sign(z_i - z_j), sign(0) = 0.
/// Direct double sum; `k` is 1-based and must lie in [1, n-1].
long long mw_u(std::span<const double> z, std::size_t k);

/// U / sqrt(k (n-k) (n+1) / 3).
double mw_standardize(long long u, std::size_t k, std::size_t n);

/// Maximum of a split statistic and the smallest split attaining it.
struct MaxStat {
  double value = 0.0;
  std::size_t argmax_k = 0;
};

MaxStat mw_tmax(std::span<const double> z);

/// Two-sample Kolmogorov-Smirnov distance between z[0..k) and z[k..t),
/// evaluated at every observed value. Reference implementation.
double ks_d(std::span<const double> z, std::size_t k);

/// D_{k,t} for every k in [1, t-1] (element k-1), via integer rank counts.
/// Each value equals num[k-1] / (k (t-k)); the integer numerators are exposed
/// so moment accumulation can be exact.
void ks_profile(std::span<const double> z, std::vector<std::int64_t>& numerators);

/// Growing sample whose KS split profile can be recomputed after each push
/// without re-sorting.
class KsProfile {
 public:
  void push(double z);
  void clear();
  std::size_t size() const { return group_of_.size(); }
  /// Same result as ks_profile over the pushed values.
  void compute(std::vector<std::int64_t>& numerators) const;

 private:
  std::vector<double> distinct_;         // sorted distinct values
  std::vector<std::int32_t> x_end_;      // observations <= distinct_[g]
  std::vector<std::int32_t> group_of_;   // group of each observation, in arrival order
  mutable std::vector<std::int32_t> h_;  // scratch
};

/// Null mean and standard deviation of D_{k,t} for 2 <= t <= t_max.
class KsMoments {
 public:
  KsMoments() = default;
  KsMoments(std::size_t t_max, std::vector<double> mean, std::vector<double> sd);

  std::size_t t_max() const { return t_max_; }
  bool covers(std::size_t t) const { return t >= 2 && t <= t_max_; }

  struct Entry {
    double mean = 0.0;
    double sd = 0.0;
  };

  /// Throws ConfigError when (k, t) is outside the table.
  Entry at(std::size_t k, std::size_t t) const;
  /// Beyond t_max, rescales the entry at the same split fraction of t_max by
  /// the square root of the effective sample size ratio.
  Entry at_or_extrapolated(std::size_t k, std::size_t t) const;

  static std::size_t offset(std::size_t k, std::size_t t) { return (t - 2) * (t - 1) / 2 + (k - 1); }

  const std::vector<double>& means() const { return mean_; }
  const std::vector<double>& sds() const { return sd_; }

 private:
  std::size_t t_max_ = 0;
  std::vector<double> mean_;
  std::vector<double> sd_;
};

/// Monte Carlo null moments of D_{k,t} from i.i.d. uniform sequences.
KsMoments estimate_ks_moments(std::size_t t_max, std::size_t replications, std::uint64_t seed,
                              unsigned workers = 0);

/// max_k (D_{k,t} - mean_{k,t}) / sd_{k,t}.
MaxStat ks_tmax(std::span<const double> z, const KsMoments& moments);

/// Running window that yields the detector's maximum statistic after each push.
class SplitStatistic {
 public:
  SplitStatistic(Detector detector, std::shared_ptr<const KsMoments> moments);

  void push(double z);
  void assign(std::span<const double> values);
  void clear();
  /// Requires size() >= 2.
  MaxStat evaluate();

  std::size_t size() const { return values_.size(); }
  std::span<const double> values() const { return values_; }
  Detector detector() const { return detector_; }

 private:
  Detector detector_;
  std::shared_ptr<const KsMoments> moments_;
  std::vector<double> values_;
  std::vector<long long> u_;  // MW: U_{k,n} for k = 1..n-1
  KsProfile profile_;
  std::vector<std::int64_t> numerators_;
};

/// Per-sample-size thresholds h_n for n in [burn_in + 1, n_max].
struct ThresholdTable {
  Detector detector = Detector::MW;
  double alpha = 0.0;
  std::size_t burn_in = 20;
  std::size_t n_max = 0;
  std::size_t replications = 0;
  std::uint64_t seed = 0;
  std::vector<double> thresholds;
  std::shared_ptr<const KsMoments> moments;  // KS only

  /// Threshold for window size n; sizes beyond n_max reuse the last entry.
  double threshold(std::size_t n) const;
  bool beyond_table(std::size_t n) const { return n > n_max; }
};

struct CalibrationOptions {
  double alpha = 0.0027;
  std::size_t burn_in = 20;
  std::size_t n_max = 500;
  std::size_t replications = 20000;
  std::uint64_t seed = 1;
  std::size_t moment_replications = 0;  // KS only; 0 means `replications`
  unsigned workers = 0;
};

/// Sequential-quantile calibration on standard-uniform null sequences: at each
/// n the threshold is the (1 - alpha) quantile of the max statistic among the
/// sequences that have not yet exceeded an earlier threshold.
ThresholdTable calibrate_thresholds(Detector detector, const CalibrationOptions& options);

void write_table(const std::filesystem::path& path, const ThresholdTable& table);
ThresholdTable read_table(const std::filesystem::path& path);

struct HazardCheck {
  std::vector<std::size_t> at_risk;     // per n, sequences tested
  std::vector<std::size_t> exceedances;  // per n, first exceedances
};

/// Conditional false-alarm counts per n on fresh null sequences.
HazardCheck empirical_hazard(const ThresholdTable& table, std::size_t replications,
                             std::uint64_t seed, unsigned workers = 0);

enum class RestartPolicy {
  AfterChangePoint,  // keep the observations after tau_hat as the new window
  AfterDetection,    // start an empty window after the alarm
};

RestartPolicy parse_restart_policy(std::string_view name);
std::string to_string(RestartPolicy p);

struct ChangePointDetection {
  Detector detector = Detector::MW;
  std::size_t detection_index = 0;  // 1-based position in the stream
  std::size_t tau_hat = 0;          // last observation of the old regime, 1-based
  double statistic = 0.0;
  double threshold = 0.0;
  bool threshold_extrapolated = false;
};

/// Sequential change-point monitoring with restarts after each detection.
class ChangePointMonitor {
 public:
  ChangePointMonitor(const ThresholdTable& table, RestartPolicy policy);

  std::optional<ChangePointDetection> push(double z);

  std::size_t observations() const { return seen_; }
  std::size_t tests() const { return tests_; }
  std::size_t window_size() const { return stat_.size(); }

 private:
  const ThresholdTable* table_;
  RestartPolicy policy_;
  SplitStatistic stat_;
  std::size_t window_start_ = 0;  // observations before the window
  std::size_t seen_ = 0;
  std::size_t tests_ = 0;
};

std::vector<ChangePointDetection> monitor(std::span<const double> z, const ThresholdTable& table,
                                          RestartPolicy policy = RestartPolicy::AfterChangePoint);

struct Segment {
  std::size_t first = 0;  // 1-based, inclusive
  std::size_t last = 0;
  double mean = 0.0;
};

std::vector<Segment> segment_means(std::span<const double> z,
                                   std::span<const ChangePointDetection> detections);

}  // namespace tbea
