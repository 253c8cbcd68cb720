#pragma once

#include <vector>

#include "gcs/constellation.hpp"

namespace gcs {

// Blind phase search parameters. The window is the total sliding-window
// length, centered on the current symbol: for even W the window covers
// W/2-1 past symbols, the current one and W/2 future symbols; for odd W
// it is symmetric. Windows are truncated at sequence edges.
struct BpsConfig {
  int n_test_phases = 60;
  int window = 128;
  double search_half_range = 0.78539816339744831;  // pi/4
  double symmetry_angle = 1.5707963267948966;      // pi/2
  void validate() const;
};

// The N_s candidate rotations: -half_range + b * (2*half_range / N_s).
std::vector<double> bps_test_phases(const BpsConfig& cfg);

// Windowed nearest-point costs, row-major n x N_s. Production kernel:
// per-phase sliding sums, OpenMP across symbols/phases.
std::vector<double> bps_windowed_costs(const std::vector<cplx>& y,
                                       const Constellation& c, const BpsConfig& cfg);

// Per-symbol phase estimates: windowed-cost argmin over the test phases,
// unwrapped against the previous estimate by the nearest integer multiple
// of symmetry_angle.
std::vector<double> bps_estimate(const std::vector<cplx>& y, const Constellation& c,
                                 const BpsConfig& cfg);

// out_k = y_k * e^{-j phase_k}
std::vector<cplx> derotate(const std::vector<cplx>& y, const std::vector<double>& phases);

// Evaluation-only ambiguity resolution: splits the estimate at cycle
// slips (jumps of est-true by more than symmetry/2 between consecutive
// symbols) and aligns each segment to the true phase by the integer
// multiple of symmetry_angle minimizing the mean absolute error.
std::vector<double> genie_slip_removal(const std::vector<double>& est,
                                       const std::vector<double>& true_phase,
                                       double symmetry_angle);

}  // namespace gcs
