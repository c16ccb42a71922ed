#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

namespace tbea {

/// Two event sequences on an integer month axis.
struct EcaInput {
  std::vector<int> a_times;  // strictly increasing
  std::vector<int> b_times;  // strictly increasing
  int delta_t = 0;
  int tau = 0;
  int span_start = 0;
  int span_end = 0;  // inclusive
};

struct EcaRate {
  double rp = 0.0;
  std::size_t coincident_count = 0;
};

struct EcaRow {
  int delta_t = 0;
  double rp = 0.0;
  std::size_t coincident_count = 0;
  double p_value = 1.0;
};

/// Fraction of A events with some B event satisfying
/// 0 <= (t_A - tau) - t_B <= delta_t.
EcaRate precursor_rate(const EcaInput& input);

/// Monte Carlo p-value against independent uniform placements of N_A and N_B
/// events over the span: (1 + #{surrogate count >= observed}) / (R + 1).
double eca_significance(const EcaInput& input, std::size_t replications, std::uint64_t seed,
                        unsigned workers = 0);

/// One row per delta_t in [delta_min, delta_max].
std::vector<EcaRow> eca_table(const EcaInput& base, int delta_min, int delta_max,
                              std::size_t replications, std::uint64_t seed, unsigned workers = 0);

}  // namespace tbea
