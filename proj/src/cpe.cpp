#include "gcs/cpe.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace gcs {

void BpsConfig::validate() const {
  if (n_test_phases < 2) throw std::invalid_argument("bps: n_test_phases must be >= 2");
  if (window < 1) throw std::invalid_argument("bps: window must be >= 1");
  if (!(search_half_range > 0.0) || search_half_range > M_PI) {
    throw std::invalid_argument("bps: search_half_range must be in (0, pi]");
  }
  if (!(symmetry_angle > 0.0)) throw std::invalid_argument("bps: symmetry_angle must be > 0");
}

std::vector<double> bps_test_phases(const BpsConfig& cfg) {
  cfg.validate();
  std::vector<double> phases(cfg.n_test_phases);
  const double spacing = 2.0 * cfg.search_half_range / cfg.n_test_phases;
  for (int b = 0; b < cfg.n_test_phases; ++b) {
    phases[b] = -cfg.search_half_range + b * spacing;
  }
  return phases;
}

namespace {

// Squared distance to the nearest constellation point; exact linear scan
// (M is small, and it keeps the test oracle trivially identical).
inline double nearest_sq_dist(double ri, double rq, const double* ci, const double* cq,
                              int m) {
  double best = std::numeric_limits<double>::infinity();
  for (int i = 0; i < m; ++i) {
    const double di = ri - ci[i];
    const double dq = rq - cq[i];
    const double d = di * di + dq * dq;
    if (d < best) best = d;
  }
  return best;
}

struct WindowExtents {
  int past;
  int future;
};

WindowExtents window_extents(int w) {
  const int past = (w - 1) / 2;
  return {past, w - 1 - past};
}

}  // namespace

std::vector<double> bps_windowed_costs(const std::vector<cplx>& y,
                                       const Constellation& c, const BpsConfig& cfg) {
  cfg.validate();
  const int n = static_cast<int>(y.size());
  const int ns = cfg.n_test_phases;
  const int m = c.size();
  if (m < 1) throw std::invalid_argument("bps: empty constellation");
  if (n < cfg.window) {
    throw std::invalid_argument("bps: sequence length " + std::to_string(n) +
                                " shorter than window " + std::to_string(cfg.window));
  }

  std::vector<double> ci(m), cq(m);
  for (int i = 0; i < m; ++i) {
    ci[i] = c.points()[i].real();
    cq[i] = c.points()[i].imag();
  }
  const std::vector<double> phases = bps_test_phases(cfg);
  std::vector<double> rot_re(ns), rot_im(ns);
  for (int b = 0; b < ns; ++b) {
    rot_re[b] = std::cos(-phases[b]);
    rot_im[b] = std::sin(-phases[b]);
  }

  // Per-(symbol, phase) nearest-point distances, k-major.
  std::vector<double> dist(static_cast<std::size_t>(n) * ns);
#pragma omp parallel for schedule(static)
  for (int k = 0; k < n; ++k) {
    const double yi = y[k].real();
    const double yq = y[k].imag();
    double* row = &dist[static_cast<std::size_t>(k) * ns];
    for (int b = 0; b < ns; ++b) {
      const double ri = yi * rot_re[b] - yq * rot_im[b];
      const double rq = yi * rot_im[b] + yq * rot_re[b];
      row[b] = nearest_sq_dist(ri, rq, ci.data(), cq.data(), m);
    }
  }

  // Sliding-sum windowed costs, one running sum per test phase.
  const auto [past, future] = window_extents(cfg.window);
  std::vector<double> cost(static_cast<std::size_t>(n) * ns);
#pragma omp parallel for schedule(static)
  for (int b = 0; b < ns; ++b) {
    double run = 0.0;
    for (int j = 0; j <= std::min(n - 1, future); ++j) {
      run += dist[static_cast<std::size_t>(j) * ns + b];
    }
    cost[b] = run;
    for (int k = 1; k < n; ++k) {
      const int enter = k + future;
      const int leave = k - past - 1;
      if (enter < n) run += dist[static_cast<std::size_t>(enter) * ns + b];
      if (leave >= 0) run -= dist[static_cast<std::size_t>(leave) * ns + b];
      cost[static_cast<std::size_t>(k) * ns + b] = run;
    }
  }
  return cost;
}

std::vector<double> bps_estimate(const std::vector<cplx>& y, const Constellation& c,
                                 const BpsConfig& cfg) {
  const std::vector<double> cost = bps_windowed_costs(y, c, cfg);
  const std::vector<double> phases = bps_test_phases(cfg);
  const int n = static_cast<int>(y.size());
  const int ns = cfg.n_test_phases;

  std::vector<double> raw(n);
#pragma omp parallel for schedule(static)
  for (int k = 0; k < n; ++k) {
    const double* row = &cost[static_cast<std::size_t>(k) * ns];
    int best = 0;
    for (int b = 1; b < ns; ++b) {
      if (row[b] < row[best]) best = b;
    }
    raw[k] = phases[best];
  }

  // Continuity: shift each raw estimate by the multiple of the symmetry
  // angle closest to the previous unwrapped estimate. Sequential chain.
  std::vector<double> est(n);
  est[0] = raw[0];
  for (int k = 1; k < n; ++k) {
    const double shift = std::round((est[k - 1] - raw[k]) / cfg.symmetry_angle);
    est[k] = raw[k] + shift * cfg.symmetry_angle;
  }
  return est;
}

std::vector<cplx> derotate(const std::vector<cplx>& y, const std::vector<double>& phases) {
  if (y.size() != phases.size()) {
    throw std::invalid_argument("derotate: length mismatch");
  }
  std::vector<cplx> out(y.size());
  for (std::size_t k = 0; k < y.size(); ++k) {
    out[k] = y[k] * std::polar(1.0, -phases[k]);
  }
  return out;
}

std::vector<double> genie_slip_removal(const std::vector<double>& est,
                                       const std::vector<double>& true_phase,
                                       double symmetry_angle) {
  if (est.size() != true_phase.size()) {
    throw std::invalid_argument("genie_slip_removal: length mismatch");
  }
  if (!(symmetry_angle > 0.0)) {
    throw std::invalid_argument("genie_slip_removal: symmetry angle must be > 0");
  }
  const int n = static_cast<int>(est.size());
  std::vector<double> corrected(n);
  std::vector<double> err(n);
  for (int k = 0; k < n; ++k) err[k] = est[k] - true_phase[k];

  int seg_start = 0;
  auto align_segment = [&](int lo, int hi) {  // [lo, hi)
    double mean_err = 0.0;
    for (int k = lo; k < hi; ++k) mean_err += err[k];
    mean_err /= (hi - lo);
    // Mean |err - m*sym| is convex in m; search around the mean shift.
    const long long m0 = std::llround(mean_err / symmetry_angle);
    long long best_m = m0;
    double best_cost = std::numeric_limits<double>::infinity();
    for (long long m = m0 - 2; m <= m0 + 2; ++m) {
      double cost = 0.0;
      for (int k = lo; k < hi; ++k) cost += std::abs(err[k] - m * symmetry_angle);
      if (cost < best_cost) {
        best_cost = cost;
        best_m = m;
      }
    }
    for (int k = lo; k < hi; ++k) corrected[k] = est[k] - best_m * symmetry_angle;
  };

  for (int k = 1; k < n; ++k) {
    if (std::abs(err[k] - err[k - 1]) > symmetry_angle / 2.0) {
      align_segment(seg_start, k);
      seg_start = k;
    }
  }
  align_segment(seg_start, n);
  return corrected;
}

}  // namespace gcs
