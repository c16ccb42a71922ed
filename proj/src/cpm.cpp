#include "tbea/cpm.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <limits>
#include <map>
#include <numeric>
#include <sstream>

#include "tbea/errors.hpp"
#include "tbea/parallel.hpp"
#include "tbea/rng.hpp"
#include "tbea/series.hpp"

namespace tbea {

namespace {

int sign_of(double x) { return (x > 0.0) - (x < 0.0); }

void check_split(std::size_t k, std::size_t n) {
  if (k < 1 || k + 1 > n) {
    throw UsageError("split k=" + std::to_string(k) + " outside [1, " + std::to_string(n) + "-1]");
  }
}

std::string format_double(double v) {
  std::ostringstream os;
  os << std::setprecision(17) << v;
  return os.str();
}

// Fixed partition of [0, n) into at most `blocks` contiguous ranges.
std::pair<std::size_t, std::size_t> block_range(std::size_t b, std::size_t blocks, std::size_t n) {
  return {b * n / blocks, (b + 1) * n / blocks};
}

}  // namespace

std::string to_string(Detector d) { return d == Detector::MW ? "MW" : "KS"; }

Detector parse_detector(std::string_view name) {
  std::string s(name);
  std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return std::tolower(c); });
  if (s == "mw") return Detector::MW;
  if (s == "ks") return Detector::KS;
  throw ConfigError("unknown change-point detector '" + std::string(name) + "'");
}

RestartPolicy parse_restart_policy(std::string_view name) {
  if (name == "change-point" || name == "after-change-point") return RestartPolicy::AfterChangePoint;
  if (name == "detection" || name == "after-detection") return RestartPolicy::AfterDetection;
  throw ConfigError("unknown restart policy '" + std::string(name) + "'");
}

std::string to_string(RestartPolicy p) {
  return p == RestartPolicy::AfterChangePoint ? "change-point" : "detection";
}

long long mw_u(std::span<const double> z, std::size_t k) {
  check_split(k, z.size());
  long long u = 0;
  for (std::size_t i = 0; i < k; ++i) {
    for (std::size_t j = k; j < z.size(); ++j) u += sign_of(z[i] - z[j]);
  }
  return u;
}

double mw_standardize(long long u, std::size_t k, std::size_t n) {
  check_split(k, n);
  const double kd = static_cast<double>(k);
  const double nd = static_cast<double>(n);
  return static_cast<double>(u) / std::sqrt(kd * (nd - kd) * (nd + 1.0) / 3.0);
}

MaxStat mw_tmax(std::span<const double> z) {
  if (z.size() < 2) throw UsageError("mw_tmax needs at least two observations");
  SplitStatistic stat(Detector::MW, nullptr);
  stat.assign(z);
  return stat.evaluate();
}

double ks_d(std::span<const double> z, std::size_t k) {
  check_split(k, z.size());
  const auto s1 = z.subspan(0, k);
  const auto s2 = z.subspan(k);
  double d = 0.0;
  for (double x : z) {
    const double f1 = static_cast<double>(std::count_if(s1.begin(), s1.end(), [&](double v) { return v <= x; })) /
                      static_cast<double>(s1.size());
    const double f2 = static_cast<double>(std::count_if(s2.begin(), s2.end(), [&](double v) { return v <= x; })) /
                      static_cast<double>(s2.size());
    d = std::max(d, std::abs(f1 - f2));
  }
  return d;
}

// h[g] = t * (first-k observations <= value g) - k * x_end[g]; D_k = max|h| / (k (t-k)).
// Cloned for AVX2 where available: this loop dominates KS calibration time.
__attribute__((target_clones("avx2", "default"))) static void sweep_splits(
    const std::int32_t* group_of, const std::int32_t* xp, std::int32_t* hp, std::size_t groups, std::size_t t,
    std::int64_t* out) {
  std::fill(hp, hp + groups, 0);
  const auto tt = static_cast<std::int32_t>(t);
  for (std::size_t k = 1; k < t; ++k) {
    const auto r = static_cast<std::size_t>(group_of[k - 1]);
    const auto ri = static_cast<std::int32_t>(r);
    std::int32_t hi = 0;
    std::int32_t lo = 0;
    for (std::size_t g = 0; g < groups; ++g) {
      hp[g] += (static_cast<std::int32_t>(g) >= ri ? tt : 0) - xp[g];
      hi = std::max(hi, hp[g]);
      lo = std::min(lo, hp[g]);
    }
    out[k - 1] = std::max<std::int64_t>(hi, -static_cast<std::int64_t>(lo));
  }
}

void KsProfile::push(double z) {
  const auto it = std::lower_bound(distinct_.begin(), distinct_.end(), z);
  const auto g = static_cast<std::int32_t>(it - distinct_.begin());
  if (it == distinct_.end() || *it != z) {
    distinct_.insert(it, z);
    const std::int32_t below = g > 0 ? x_end_[static_cast<std::size_t>(g) - 1] : 0;
    x_end_.insert(x_end_.begin() + g, below);
    for (auto& q : group_of_) q += (q >= g);
  }
  for (auto x = x_end_.begin() + g; x != x_end_.end(); ++x) ++*x;
  group_of_.push_back(g);
}

void KsProfile::clear() {
  distinct_.clear();
  x_end_.clear();
  group_of_.clear();
}

void KsProfile::compute(std::vector<std::int64_t>& numerators) const {
  const std::size_t t = size();
  numerators.assign(t > 0 ? t - 1 : 0, 0);
  if (t < 2) return;
  h_.resize(x_end_.size());
  sweep_splits(group_of_.data(), x_end_.data(), h_.data(), x_end_.size(), t, numerators.data());
}

void ks_profile(std::span<const double> z, std::vector<std::int64_t>& numerators) {
  KsProfile profile;
  for (double v : z) profile.push(v);
  profile.compute(numerators);
}

KsMoments::KsMoments(std::size_t t_max, std::vector<double> mean, std::vector<double> sd)
    : t_max_(t_max), mean_(std::move(mean)), sd_(std::move(sd)) {
  const std::size_t expected = t_max >= 2 ? offset(t_max - 1, t_max) + 1 : 0;
  if (mean_.size() != expected || sd_.size() != expected) {
    throw ConfigError("KS moment table has " + std::to_string(mean_.size()) + " entries, expected " +
                      std::to_string(expected));
  }
}

KsMoments::Entry KsMoments::at(std::size_t k, std::size_t t) const {
  if (!covers(t) || k < 1 || k >= t) {
    throw ConfigError("no KS null moments for k=" + std::to_string(k) + ", t=" + std::to_string(t) +
                      " (table covers t <= " + std::to_string(t_max_) + ")");
  }
  const std::size_t i = offset(k, t);
  return {mean_[i], sd_[i]};
}

KsMoments::Entry KsMoments::at_or_extrapolated(std::size_t k, std::size_t t) const {
  if (t <= t_max_) return at(k, t);
  if (t_max_ < 3) throw ConfigError("KS moment table too small to extrapolate");
  const double frac = static_cast<double>(k) / static_cast<double>(t);
  const auto kk = std::clamp<std::size_t>(static_cast<std::size_t>(std::lround(frac * static_cast<double>(t_max_))),
                                          1, t_max_ - 1);
  const Entry base = at(kk, t_max_);
  const double ne = static_cast<double>(k) * static_cast<double>(t - k) / static_cast<double>(t);
  const double ne_base =
      static_cast<double>(kk) * static_cast<double>(t_max_ - kk) / static_cast<double>(t_max_);
  const double scale = std::sqrt(ne_base / ne);
  return {base.mean * scale, base.sd * scale};
}

KsMoments estimate_ks_moments(std::size_t t_max, std::size_t replications, std::uint64_t seed,
                              unsigned workers) {
  if (t_max < 3) throw ConfigError("KS moments need t_max >= 3");
  if (replications < 2) throw ConfigError("KS moments need at least 2 replications");
  const std::size_t entries = KsMoments::offset(t_max - 1, t_max) + 1;
  const std::size_t blocks = std::min<std::size_t>(16, replications);
  std::vector<std::vector<std::int64_t>> sum(blocks), sum2(blocks);

  parallel_for(blocks, workers, [&](std::size_t b) {
    sum[b].assign(entries, 0);
    sum2[b].assign(entries, 0);
    std::vector<double> z(t_max);
    std::vector<std::int64_t> num;
    const auto [first, last] = block_range(b, blocks, replications);
    KsProfile profile;
    for (std::size_t r = first; r < last; ++r) {
      Rng rng = Rng::stream(seed, r);
      for (double& v : z) v = rng.uniform();
      profile.clear();
      profile.push(z[0]);
      for (std::size_t t = 2; t <= t_max; ++t) {
        profile.push(z[t - 1]);
        profile.compute(num);
        const std::size_t off = KsMoments::offset(1, t);
        for (std::size_t k = 1; k < t; ++k) {
          sum[b][off + k - 1] += num[k - 1];
          sum2[b][off + k - 1] += num[k - 1] * num[k - 1];
        }
      }
    }
  });

  std::vector<double> mean(entries), sd(entries);
  const double reps = static_cast<double>(replications);
  for (std::size_t t = 2; t <= t_max; ++t) {
    for (std::size_t k = 1; k < t; ++k) {
      const std::size_t i = KsMoments::offset(k, t);
      std::int64_t s = 0, s2 = 0;
      for (std::size_t b = 0; b < blocks; ++b) {
        s += sum[b][i];
        s2 += sum2[b][i];
      }
      const double denom = static_cast<double>(k) * static_cast<double>(t - k);
      const double m = static_cast<double>(s) / reps;
      const double var = std::max(0.0, (static_cast<double>(s2) - reps * m * m) / (reps - 1.0));
      mean[i] = m / denom;
      sd[i] = std::sqrt(var) / denom;
    }
  }
  return KsMoments(t_max, std::move(mean), std::move(sd));
}

MaxStat ks_tmax(std::span<const double> z, const KsMoments& moments) {
  const std::size_t t = z.size();
  if (t < 2) throw UsageError("ks_tmax needs at least two observations");
  std::vector<std::int64_t> num;
  ks_profile(z, num);
  MaxStat best{-std::numeric_limits<double>::infinity(), 1};
  for (std::size_t k = 1; k < t; ++k) {
    const auto m = moments.at(k, t);
    if (!(m.sd > 0.0)) continue;
    const double d = static_cast<double>(num[k - 1]) / (static_cast<double>(k) * static_cast<double>(t - k));
    const double v = (d - m.mean) / m.sd;
    if (v > best.value) best = {v, k};
  }
  return best;
}

SplitStatistic::SplitStatistic(Detector detector, std::shared_ptr<const KsMoments> moments)
    : detector_(detector), moments_(std::move(moments)) {
  if (detector_ == Detector::KS && !moments_) throw ConfigError("KS statistic requires null moments");
}

void SplitStatistic::push(double z) {
  values_.push_back(z);
  if (detector_ == Detector::KS) {
    profile_.push(z);
    return;
  }
  const std::size_t n = values_.size();
  if (n < 2) return;
  long long prefix = 0;
  for (std::size_t k = 1; k < n; ++k) {
    prefix += sign_of(values_[k - 1] - z);
    if (k < n - 1) {
      u_[k - 1] += prefix;
    } else {
      u_.push_back(prefix);
    }
  }
}

void SplitStatistic::assign(std::span<const double> values) {
  std::vector<double> copy(values.begin(), values.end());
  clear();
  for (double v : copy) push(v);
}

void SplitStatistic::clear() {
  values_.clear();
  u_.clear();
  profile_.clear();
}

MaxStat SplitStatistic::evaluate() {
  const std::size_t n = values_.size();
  if (n < 2) throw UsageError("split statistic needs at least two observations");
  MaxStat best{-std::numeric_limits<double>::infinity(), 1};
  if (detector_ == Detector::MW) {
    const double nd = static_cast<double>(n);
    for (std::size_t k = 1; k < n; ++k) {
      const double kd = static_cast<double>(k);
      const double v = std::abs(static_cast<double>(u_[k - 1])) / std::sqrt(kd * (nd - kd) * (nd + 1.0) / 3.0);
      if (v > best.value) best = {v, k};
    }
    return best;
  }
  profile_.compute(numerators_);
  for (std::size_t k = 1; k < n; ++k) {
    const auto m = moments_->at_or_extrapolated(k, n);
    if (!(m.sd > 0.0)) continue;
    const double d =
        static_cast<double>(numerators_[k - 1]) / (static_cast<double>(k) * static_cast<double>(n - k));
    const double v = (d - m.mean) / m.sd;
    if (v > best.value) best = {v, k};
  }
  return best;
}

double ThresholdTable::threshold(std::size_t n) const {
  if (thresholds.empty()) throw ConfigError("empty threshold table");
  if (n <= burn_in) throw UsageError("no threshold for n=" + std::to_string(n) + " within the burn-in");
  if (n > n_max) return thresholds.back();
  return thresholds[n - burn_in - 1];
}

ThresholdTable calibrate_thresholds(Detector detector, const CalibrationOptions& o) {
  if (!(o.alpha > 0.0 && o.alpha <= 0.1)) throw ConfigError("alpha must lie in (0, 0.1]");
  if (static_cast<double>(o.replications) < 10.0 / o.alpha) {
    throw ConfigError("calibration needs at least 10/alpha = " + std::to_string(std::ceil(10.0 / o.alpha)) +
                      " replications");
  }
  const std::size_t min_burn_in = detector == Detector::KS ? 2 : 1;
  if (o.burn_in < min_burn_in) throw ConfigError("burn-in too small for " + to_string(detector));
  if (o.n_max <= o.burn_in) throw ConfigError("n_max must exceed the burn-in");

  ThresholdTable table;
  table.detector = detector;
  table.alpha = o.alpha;
  table.burn_in = o.burn_in;
  table.n_max = o.n_max;
  table.replications = o.replications;
  table.seed = o.seed;
  if (detector == Detector::KS) {
    const std::size_t mreps = o.moment_replications > 0 ? o.moment_replications : o.replications;
    table.moments = std::make_shared<const KsMoments>(
        estimate_ks_moments(o.n_max, mreps, derive_seed(o.seed, 1), o.workers));
  }

  const std::size_t width = o.n_max - o.burn_in;
  const std::uint64_t trace_seed = derive_seed(o.seed, 2);
  std::vector<float> traces(o.replications * width);
  parallel_for(o.replications, o.workers, [&](std::size_t r) {
    Rng rng = Rng::stream(trace_seed, r);
    SplitStatistic stat(detector, table.moments);
    float* row = traces.data() + r * width;
    for (std::size_t n = 1; n <= o.n_max; ++n) {
      stat.push(rng.uniform());
      if (n > o.burn_in) row[n - o.burn_in - 1] = static_cast<float>(stat.evaluate().value);
    }
  });

  const auto min_survivors = static_cast<std::size_t>(std::ceil(1.0 / o.alpha));
  std::vector<char> alive(o.replications, 1);
  std::vector<double> pool;
  pool.reserve(o.replications);
  table.thresholds.reserve(width);
  for (std::size_t c = 0; c < width; ++c) {
    pool.clear();
    for (std::size_t r = 0; r < o.replications; ++r) {
      if (alive[r]) pool.push_back(traces[r * width + c]);
    }
    if (pool.size() < min_survivors) {
      throw CalibrationError("survivor pool exhausted at n=" + std::to_string(o.burn_in + 1 + c) + " (" +
                             std::to_string(pool.size()) + " left); increase the replications");
    }
    std::sort(pool.begin(), pool.end());
    const double h = quantile_sorted(pool, 1.0 - o.alpha);
    if (!std::isfinite(h) || !(h > 0.0)) {
      throw CalibrationError("non-positive threshold at n=" + std::to_string(o.burn_in + 1 + c));
    }
    table.thresholds.push_back(h);
    for (std::size_t r = 0; r < o.replications; ++r) {
      if (alive[r] && static_cast<double>(traces[r * width + c]) > h) alive[r] = 0;
    }
  }
  return table;
}

void write_table(const std::filesystem::path& path, const ThresholdTable& table) {
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot write " + path.string());
  out << "# detector=" << to_string(table.detector) << '\n'
      << "# alpha=" << format_double(table.alpha) << '\n'
      << "# burn_in=" << table.burn_in << '\n'
      << "# n_max=" << table.n_max << '\n'
      << "# replications=" << table.replications << '\n'
      << "# seed=" << table.seed << '\n';
  if (table.detector == Detector::KS) {
    if (!table.moments) throw ConfigError("KS table without null moments");
    const std::filesystem::path moments_path = path.string() + ".moments.csv";
    out << "# moments=" << moments_path.filename().string() << '\n';
    std::ofstream mout(moments_path);
    if (!mout) throw ConfigError("cannot write " + moments_path.string());
    mout << "# t_max=" << table.moments->t_max() << '\n' << "t,k,mean,sd\n";
    for (std::size_t t = 2; t <= table.moments->t_max(); ++t) {
      for (std::size_t k = 1; k < t; ++k) {
        const auto e = table.moments->at(k, t);
        mout << t << ',' << k << ',' << format_double(e.mean) << ',' << format_double(e.sd) << '\n';
      }
    }
  }
  out << "n,threshold\n";
  for (std::size_t i = 0; i < table.thresholds.size(); ++i) {
    out << table.burn_in + 1 + i << ',' << format_double(table.thresholds[i]) << '\n';
  }
}

namespace {

std::map<std::string, std::string> read_metadata_and_rows(std::istream& in, const std::string& header,
                                                          std::vector<std::vector<double>>& rows,
                                                          const std::string& what) {
  std::map<std::string, std::string> meta;
  std::string line;
  bool header_seen = false;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (line.front() == '#') {
      const auto eq = line.find('=');
      if (eq != std::string::npos) {
        auto key = line.substr(1, eq - 1);
        key.erase(0, key.find_first_not_of(' '));
        meta[key] = line.substr(eq + 1);
      }
      continue;
    }
    if (!header_seen) {
      if (line != header) throw DataError(what + " line " + std::to_string(line_no) + ": expected '" + header + "'");
      header_seen = true;
      continue;
    }
    std::vector<double> row;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) {
      try {
        std::size_t used = 0;
        row.push_back(std::stod(cell, &used));
        if (used != cell.size()) throw std::invalid_argument(cell);
      } catch (const std::exception&) {
        throw DataError(what + " line " + std::to_string(line_no) + ": invalid number '" + cell + "'");
      }
    }
    rows.push_back(std::move(row));
  }
  if (!header_seen) throw DataError(what + ": missing header '" + header + "'");
  return meta;
}

const std::string& require(const std::map<std::string, std::string>& meta, const std::string& key,
                           const std::string& what) {
  const auto it = meta.find(key);
  if (it == meta.end()) throw DataError(what + ": missing metadata '" + key + "'");
  return it->second;
}

}  // namespace

ThresholdTable read_table(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open threshold table " + path.string());
  const std::string what = "threshold table " + path.string();
  std::vector<std::vector<double>> rows;
  const auto meta = read_metadata_and_rows(in, "n,threshold", rows, what);

  ThresholdTable table;
  try {
    table.detector = parse_detector(require(meta, "detector", what));
    table.alpha = std::stod(require(meta, "alpha", what));
    table.burn_in = std::stoul(require(meta, "burn_in", what));
    table.n_max = std::stoul(require(meta, "n_max", what));
    table.replications = std::stoul(require(meta, "replications", what));
    table.seed = std::stoull(require(meta, "seed", what));
  } catch (const std::logic_error&) {
    throw DataError(what + ": malformed metadata");
  }
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (rows[i].size() != 2 || rows[i][0] != static_cast<double>(table.burn_in + 1 + i)) {
      throw DataError(what + ": rows must cover n = burn_in+1 .. n_max without holes");
    }
    if (!std::isfinite(rows[i][1]) || !(rows[i][1] > 0.0)) throw DataError(what + ": thresholds must be positive");
    table.thresholds.push_back(rows[i][1]);
  }
  if (table.thresholds.size() != table.n_max - table.burn_in) {
    throw DataError(what + ": expected " + std::to_string(table.n_max - table.burn_in) + " thresholds");
  }
  if (table.detector == Detector::KS) {
    const auto moments_path = path.parent_path() / require(meta, "moments", what);
    std::ifstream min(moments_path);
    if (!min) throw ConfigError("cannot open KS moments " + moments_path.string());
    std::vector<std::vector<double>> mrows;
    const auto mmeta = read_metadata_and_rows(min, "t,k,mean,sd", mrows, "KS moments " + moments_path.string());
    const std::size_t t_max = std::stoul(require(mmeta, "t_max", "KS moments"));
    std::vector<double> mean, sd;
    for (const auto& row : mrows) {
      if (row.size() != 4) throw DataError("KS moments: expected 4 columns");
      const auto t = static_cast<std::size_t>(row[0]);
      const auto k = static_cast<std::size_t>(row[1]);
      if (t < 2 || t > t_max || k < 1 || k >= t || KsMoments::offset(k, t) != mean.size()) {
        throw DataError("KS moments: rows out of order");
      }
      mean.push_back(row[2]);
      sd.push_back(row[3]);
    }
    table.moments = std::make_shared<const KsMoments>(t_max, std::move(mean), std::move(sd));
  }
  return table;
}

HazardCheck empirical_hazard(const ThresholdTable& table, std::size_t replications, std::uint64_t seed,
                             unsigned workers) {
  std::vector<std::size_t> first_alarm(replications, 0);
  parallel_for(replications, workers, [&](std::size_t r) {
    Rng rng = Rng::stream(seed, r);
    SplitStatistic stat(table.detector, table.moments);
    for (std::size_t n = 1; n <= table.n_max; ++n) {
      stat.push(rng.uniform());
      if (n > table.burn_in && stat.evaluate().value > table.threshold(n)) {
        first_alarm[r] = n;
        return;
      }
    }
  });
  HazardCheck check;
  const std::size_t width = table.n_max - table.burn_in;
  check.at_risk.assign(width, 0);
  check.exceedances.assign(width, 0);
  for (std::size_t fa : first_alarm) {
    const std::size_t last = fa == 0 ? table.n_max : fa;
    for (std::size_t n = table.burn_in + 1; n <= last; ++n) ++check.at_risk[n - table.burn_in - 1];
    if (fa != 0) ++check.exceedances[fa - table.burn_in - 1];
  }
  return check;
}

ChangePointMonitor::ChangePointMonitor(const ThresholdTable& table, RestartPolicy policy)
    : table_(&table), policy_(policy), stat_(table.detector, table.moments) {}

std::optional<ChangePointDetection> ChangePointMonitor::push(double z) {
  ++seen_;
  stat_.push(z);
  const std::size_t n = stat_.size();
  if (n <= table_->burn_in) return std::nullopt;
  ++tests_;
  const MaxStat m = stat_.evaluate();
  const double h = table_->threshold(n);
  if (!(m.value > h)) return std::nullopt;

  ChangePointDetection det;
  det.detector = table_->detector;
  det.detection_index = seen_;
  det.tau_hat = window_start_ + m.argmax_k;
  det.statistic = m.value;
  det.threshold = h;
  det.threshold_extrapolated = table_->beyond_table(n);
  if (policy_ == RestartPolicy::AfterChangePoint) {
    std::vector<double> retained(stat_.values().begin() + static_cast<std::ptrdiff_t>(m.argmax_k),
                                 stat_.values().end());
    window_start_ += m.argmax_k;
    stat_.assign(retained);
  } else {
    window_start_ = seen_;
    stat_.clear();
  }
  return det;
}

std::vector<ChangePointDetection> monitor(std::span<const double> z, const ThresholdTable& table,
                                          RestartPolicy policy) {
  ChangePointMonitor mon(table, policy);
  std::vector<ChangePointDetection> out;
  for (double v : z) {
    if (auto det = mon.push(v)) out.push_back(*det);
  }
  return out;
}

std::vector<Segment> segment_means(std::span<const double> z,
                                   std::span<const ChangePointDetection> detections) {
  std::vector<Segment> out;
  if (z.empty()) return out;
  std::size_t first = 1;
  auto close = [&](std::size_t last) {
    const auto part = z.subspan(first - 1, last - first + 1);
    out.push_back({first, last, mean(part)});
    first = last + 1;
  };
  for (const auto& d : detections) {
    if (d.tau_hat < first || d.tau_hat >= z.size()) {
      throw DataError("change points must be increasing and inside the stream");
    }
    close(d.tau_hat);
  }
  close(z.size());
  return out;
}

}  // namespace tbea
