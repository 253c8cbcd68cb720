#pragma once

#include <span>
#include <string>
#include <vector>

#include "gcs/channels.hpp"
#include "gcs/constellation.hpp"
#include "gcs/rng.hpp"

namespace gcs {

// Minimal row-major dense matrix; all shapes in this network are tiny.
struct Mat {
  int rows = 0;
  int cols = 0;
  std::vector<double> a;

  Mat() = default;
  Mat(int r, int c) : rows(r), cols(c), a(static_cast<std::size_t>(r) * c, 0.0) {}
  double& operator()(int r, int c) { return a[static_cast<std::size_t>(r) * cols + c]; }
  double operator()(int r, int c) const { return a[static_cast<std::size_t>(r) * cols + c]; }
};

// Linear encoder: one-hot index -> row of w interpreted as (I, Q), then
// power normalization across all M rows. No bias, no activation.
struct EncoderParams {
  Mat w;  // M x 2
  int constellation_size() const { return w.rows; }
};

// Decoder: 2 -> M/2 leaky-ReLU -> M softmax.
struct DecoderParams {
  Mat w1;                  // 2 x H
  std::vector<double> b1;  // H
  Mat w2;                  // H x M
  std::vector<double> b2;  // M
  double leaky_slope = 0.01;
  int hidden_size() const { return w1.cols; }
  int num_classes() const { return w2.cols; }
};

struct OneHotBatch {
  int num_classes = 0;
  std::vector<int> indices;  // each in [0, num_classes)
  void validate() const;
};

struct Gradients {
  Mat d_we;
  Mat d_w1;
  std::vector<double> d_b1;
  Mat d_w2;
  std::vector<double> d_b2;
};

// Encoder output for the full alphabet (all M indices), normalized.
// Throws on an all-zero weight matrix (normalization singularity).
std::vector<cplx> encoder_points(const EncoderParams& enc);
std::vector<cplx> encoder_forward(const EncoderParams& enc, const OneHotBatch& batch);

// Per-row softmax probabilities, batch x M. Rows sum to 1 within 1e-12.
Mat decoder_forward(const DecoderParams& dec, const std::vector<cplx>& y);

struct CrossEntropyResult {
  double nats = 0.0;
  long long clamped = 0;  // labels whose probability hit the 1e-30 floor
};

// Mean over the batch of -ln p[label]; probabilities are floored at 1e-30
// so a degenerate softmax never poisons the loss with NaN.
CrossEntropyResult cross_entropy(const Mat& probs, const OneHotBatch& batch);

struct BackwardResult {
  double loss_nats = 0.0;
  long long clamped = 0;
  Gradients grads;
};

// Exact gradients of the batch cross-entropy with respect to all encoder
// and decoder parameters, with the channel realization held fixed
// (reparameterized). The path through the encoder's power normalization
// and the channel's rotation is differentiated analytically.
BackwardResult backward(const EncoderParams& enc, const DecoderParams& dec,
                        const OneHotBatch& batch, const RpnRealization& realization);

struct AdamConfig {
  double lr = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
};

struct AdamMoments {
  std::vector<double> m, v;
};

struct AdamState {
  AdamConfig cfg;
  long long step = 0;
  AdamMoments we, w1, b1, w2, b2;
};

AdamState adam_init(const EncoderParams& enc, const DecoderParams& dec,
                    const AdamConfig& cfg = {});

// Standard bias-corrected Adam update of a single tensor. Throws (naming
// the tensor) on a non-finite gradient.
void adam_update_tensor(const char* name, const AdamConfig& cfg, long long step,
                        std::span<double> param, AdamMoments& mom,
                        std::span<const double> grad);

void adam_step(AdamState& state, EncoderParams& enc, DecoderParams& dec,
               const Gradients& grads);

// Initialization: encoder rows start at unit-power QAM-M plus Gaussian
// jitter (sigma = 0.01) to break symmetry; decoder weights are uniform
// in +-sqrt(1/fan_in).
EncoderParams init_encoder_qam(int m, double jitter_sigma, RngStream& rng);
DecoderParams init_decoder(int m, RngStream& rng);

// Model file: text, header "aemodel v1 <M>", then named sections W_e, W_1,
// b_1, W_2, b_2 with dimensions and row-major values (>= 17 digits).
struct Model {
  EncoderParams enc;
  DecoderParams dec;
};

void save_model(const Model& model, const std::string& path);
Model load_model(const std::string& path);

}  // namespace gcs
