#pragma once

#include <string>
#include <vector>

#include "gcs/constellation.hpp"

namespace gcs {

// Per-(constellation, SNR, LW) mutual-information summary over
// Monte-Carlo runs. mi_bits_std is the sample standard deviation across
// runs; the standard error is mi_bits_std / sqrt(runs).
struct MiReport {
  std::string constellation;
  double snr_db = 0.0;
  double linewidth_hz = 0.0;
  double mi_bits_mean = 0.0;
  double mi_bits_std = 0.0;
  int runs = 0;
  long long symbols_per_run = 0;
};

// Mismatched-Gaussian-receiver MI estimate in bits/symbol, uniform input
// distribution:
//   log2 M + (1/N) sum_k [ log2 q_k(tx_k) - log2 sum_i q_k(i) ],
//   q_k(i) = exp(-|y_k - c_i|^2 / noise_var)
// computed with max-subtraction for stability. The value may be slightly
// negative for independent inputs; it is reported raw.
double mi_mismatched_gaussian(const std::vector<int>& tx_indices,
                              const std::vector<cplx>& y, const Constellation& c,
                              double noise_var);

// Pointwise-best report per (snr, lw) cell across candidates. All
// candidates must cover the same grid. Winners keep their original
// constellation label (which carries the training conditions).
std::vector<MiReport> envelope(const std::vector<MiReport>& candidates);

}  // namespace gcs
