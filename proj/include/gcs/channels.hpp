#pragma once

#include <cstddef>
#include <vector>

#include "gcs/constellation.hpp"
#include "gcs/rng.hpp"

namespace gcs {

// Channel conditions. Only the fields relevant to the chosen channel are
// read: the training channel uses (snr_db, rpn_var), the test channel
// (snr_db, linewidth_hz, symbol_rate_baud).
struct ChannelConditions {
  double snr_db = 17.0;
  double rpn_var = 0.0;           // sigma^2_RPN [rad^2], training channel
  double linewidth_hz = 0.0;      // laser linewidth, test channel
  double symbol_rate_baud = 32e9;
};

// Complex noise variance for a unit-power signal: 10^(-snr_db/10).
double noise_var_from_snr(double snr_db);

// Wiener increment variance 2*pi*linewidth/symbol_rate. Both inputs must
// be strictly positive; a zero-linewidth channel should skip the phase
// noise path instead.
double sigma_phi2_from_linewidth(double linewidth_hz, double symbol_rate_baud);

// One realization of the training channel's randomness, kept so the
// backward pass can reuse the exact samples (reparameterization).
struct RpnRealization {
  std::vector<double> theta;  // per-symbol phase rotation
  std::vector<cplx> noise;    // per-symbol additive noise
};

// y_k = x_k * e^{j theta_k} + n_k. Shared by the channel and the backward
// pass so both produce bit-identical values.
std::vector<cplx> apply_phase_and_noise(const std::vector<cplx>& x,
                                        const RpnRealization& r);

RpnRealization draw_rpn_realization(std::size_t n, double rpn_var, double noise_var,
                                    RngStream& phase_rng, RngStream& noise_rng);

struct TrainingChannelOutput {
  std::vector<cplx> y;
  RpnRealization realization;
};

// Training channel: i.i.d. Gaussian residual phase noise plus circularly
// symmetric AWGN (variance noise_var total, noise_var/2 per quadrature).
TrainingChannelOutput training_channel(const std::vector<cplx>& x,
                                       const ChannelConditions& cond,
                                       RngStream& phase_rng, RngStream& noise_rng);

// Wiener phase trajectory: phi_0 = 0, phi_k = phi_{k-1} + N(0, sigma_phi2).
std::vector<double> wiener_phase(std::size_t n, double sigma_phi2, RngStream& rng);

struct TestChannelOutput {
  std::vector<cplx> y;
  std::vector<double> true_phase;  // for genie-aided evaluation
};

// Test channel: Wiener laser phase noise then AWGN.
TestChannelOutput test_channel(const std::vector<cplx>& x,
                               const ChannelConditions& cond,
                               RngStream& phase_rng, RngStream& noise_rng);

}  // namespace gcs
