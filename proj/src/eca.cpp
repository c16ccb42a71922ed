#include "tbea/eca.hpp"

#include <algorithm>
#include <numeric>
#include <string>

#include "tbea/errors.hpp"
#include "tbea/parallel.hpp"
#include "tbea/rng.hpp"

namespace tbea {

namespace {

void validate(const EcaInput& in) {
  if (in.a_times.empty() || in.b_times.empty()) throw DataError("ECA needs at least one event of each type");
  if (in.delta_t < 0 || in.tau < 0) throw ConfigError("ECA tolerance and lag must be nonnegative");
  if (in.span_end < in.span_start) throw DataError("ECA observation span is empty");
  for (const auto* seq : {&in.a_times, &in.b_times}) {
    for (std::size_t i = 0; i < seq->size(); ++i) {
      const int t = (*seq)[i];
      if (t < in.span_start || t > in.span_end) throw DataError("ECA event outside the observation span");
      if (i > 0 && (*seq)[i - 1] >= t) throw DataError("ECA event times must be strictly increasing");
    }
  }
}

std::size_t count_coincidences(const std::vector<int>& a, const std::vector<int>& b, int delta_t, int tau) {
  std::size_t count = 0;
  for (int ta : a) {
    // Need some tb in [ta - tau - delta_t, ta - tau].
    const int hi = ta - tau;
    const auto it = std::lower_bound(b.begin(), b.end(), hi - delta_t);
    if (it != b.end() && *it <= hi) ++count;
  }
  return count;
}

// k distinct sorted integers drawn uniformly from [lo, hi].
void draw_sorted(Rng& rng, int lo, int hi, std::size_t k, std::vector<int>& pool, std::vector<int>& out) {
  const auto n = static_cast<std::size_t>(hi - lo + 1);
  pool.resize(n);
  std::iota(pool.begin(), pool.end(), lo);
  for (std::size_t i = 0; i < k; ++i) {
    const int j = rng.uniform_int(static_cast<int>(i), static_cast<int>(n - 1));
    std::swap(pool[i], pool[static_cast<std::size_t>(j)]);
  }
  out.assign(pool.begin(), pool.begin() + static_cast<std::ptrdiff_t>(k));
  std::sort(out.begin(), out.end());
}

}  // namespace

EcaRate precursor_rate(const EcaInput& input) {
  validate(input);
  const std::size_t count = count_coincidences(input.a_times, input.b_times, input.delta_t, input.tau);
  return {static_cast<double>(count) / static_cast<double>(input.a_times.size()), count};
}

double eca_significance(const EcaInput& input, std::size_t replications, std::uint64_t seed, unsigned workers) {
  validate(input);
  if (replications < 1000) throw ConfigError("ECA significance needs at least 1000 replications");
  const int span = input.span_end - input.span_start + 1;
  if (span <= input.delta_t) throw DataError("observation span is not longer than the tolerance");
  const std::size_t observed = count_coincidences(input.a_times, input.b_times, input.delta_t, input.tau);

  std::vector<char> hit(replications, 0);
  parallel_for(replications, workers, [&](std::size_t r) {
    Rng rng = Rng::stream(seed, r);
    std::vector<int> pool, a, b;
    draw_sorted(rng, input.span_start, input.span_end, input.a_times.size(), pool, a);
    draw_sorted(rng, input.span_start, input.span_end, input.b_times.size(), pool, b);
    hit[r] = count_coincidences(a, b, input.delta_t, input.tau) >= observed;
  });
  const auto extreme = static_cast<double>(std::count(hit.begin(), hit.end(), 1));
  return (1.0 + extreme) / (static_cast<double>(replications) + 1.0);
}

std::vector<EcaRow> eca_table(const EcaInput& base, int delta_min, int delta_max, std::size_t replications,
                              std::uint64_t seed, unsigned workers) {
  if (delta_max < delta_min) throw ConfigError("empty tolerance range");
  std::vector<EcaRow> rows;
  for (int d = delta_min; d <= delta_max; ++d) {
    EcaInput in = base;
    in.delta_t = d;
    const auto rate = precursor_rate(in);
    rows.push_back({d, rate.rp, rate.coincident_count,
                    eca_significance(in, replications, derive_seed(seed, static_cast<std::uint64_t>(d)), workers)});
  }
  return rows;
}

}  // namespace tbea
