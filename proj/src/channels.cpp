#include "gcs/channels.hpp"

#include <cmath>
#include <stdexcept>

namespace gcs {

double noise_var_from_snr(double snr_db) {
  if (!std::isfinite(snr_db)) throw std::invalid_argument("noise_var_from_snr: snr_db not finite");
  return std::pow(10.0, -snr_db / 10.0);
}

double sigma_phi2_from_linewidth(double linewidth_hz, double symbol_rate_baud) {
  if (!(linewidth_hz > 0.0)) {
    throw std::invalid_argument("sigma_phi2_from_linewidth: linewidth must be > 0");
  }
  if (!(symbol_rate_baud > 0.0)) {
    throw std::invalid_argument("sigma_phi2_from_linewidth: symbol rate must be > 0");
  }
  return 2.0 * M_PI * linewidth_hz / symbol_rate_baud;
}

std::vector<cplx> apply_phase_and_noise(const std::vector<cplx>& x,
                                        const RpnRealization& r) {
  if (r.theta.size() != x.size() || r.noise.size() != x.size()) {
    throw std::invalid_argument("apply_phase_and_noise: realization length mismatch");
  }
  std::vector<cplx> y(x.size());
  for (std::size_t k = 0; k < x.size(); ++k) {
    y[k] = x[k] * std::polar(1.0, r.theta[k]) + r.noise[k];
  }
  return y;
}

RpnRealization draw_rpn_realization(std::size_t n, double rpn_var, double noise_var,
                                    RngStream& phase_rng, RngStream& noise_rng) {
  if (rpn_var < 0.0 || noise_var < 0.0) {
    throw std::invalid_argument("draw_rpn_realization: negative variance");
  }
  RpnRealization r;
  r.theta.resize(n);
  r.noise.resize(n);
  const double phase_sigma = std::sqrt(rpn_var);
  const double quad_sigma = std::sqrt(noise_var / 2.0);
  for (std::size_t k = 0; k < n; ++k) r.theta[k] = phase_rng.normal(phase_sigma);
  for (std::size_t k = 0; k < n; ++k) {
    const double ni = noise_rng.normal(quad_sigma);
    const double nq = noise_rng.normal(quad_sigma);
    r.noise[k] = cplx(ni, nq);
  }
  return r;
}

TrainingChannelOutput training_channel(const std::vector<cplx>& x,
                                       const ChannelConditions& cond,
                                       RngStream& phase_rng, RngStream& noise_rng) {
  TrainingChannelOutput out;
  out.realization = draw_rpn_realization(x.size(), cond.rpn_var,
                                         noise_var_from_snr(cond.snr_db),
                                         phase_rng, noise_rng);
  out.y = apply_phase_and_noise(x, out.realization);
  return out;
}

std::vector<double> wiener_phase(std::size_t n, double sigma_phi2, RngStream& rng) {
  if (n < 1) throw std::invalid_argument("wiener_phase: n must be >= 1");
  if (sigma_phi2 < 0.0) throw std::invalid_argument("wiener_phase: negative variance");
  std::vector<double> phi(n);
  phi[0] = 0.0;  // BPS must track an arbitrary start anyway
  const double sigma = std::sqrt(sigma_phi2);
  for (std::size_t k = 1; k < n; ++k) phi[k] = phi[k - 1] + rng.normal(sigma);
  return phi;
}

TestChannelOutput test_channel(const std::vector<cplx>& x,
                               const ChannelConditions& cond,
                               RngStream& phase_rng, RngStream& noise_rng) {
  const double sigma_phi2 =
      cond.linewidth_hz > 0.0
          ? sigma_phi2_from_linewidth(cond.linewidth_hz, cond.symbol_rate_baud)
          : 0.0;
  const double noise_var = noise_var_from_snr(cond.snr_db);
  TestChannelOutput out;
  out.true_phase = wiener_phase(x.size(), sigma_phi2, phase_rng);
  out.y.resize(x.size());
  const double quad_sigma = std::sqrt(noise_var / 2.0);
  for (std::size_t k = 0; k < x.size(); ++k) {
    // phase rotation first, then receiver noise
    const cplx rotated = x[k] * std::polar(1.0, out.true_phase[k]);
    out.y[k] = rotated + cplx(noise_rng.normal(quad_sigma), noise_rng.normal(quad_sigma));
  }
  return out;
}

}  // namespace gcs
