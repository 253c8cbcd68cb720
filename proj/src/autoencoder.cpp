#include "gcs/autoencoder.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace gcs {

namespace {

constexpr double kProbFloor = 1e-30;
// Batch work is split into fixed-size blocks and block partials are merged
// in index order, so results do not depend on the number of threads.
constexpr int kBlock = 128;

void check_decoder_shapes(const DecoderParams& dec) {
  const int h = dec.w1.cols;
  const int m = dec.w2.cols;
  if (dec.w1.rows != 2 || static_cast<int>(dec.b1.size()) != h ||
      dec.w2.rows != h || static_cast<int>(dec.b2.size()) != m) {
    throw std::invalid_argument("decoder parameter shapes are inconsistent");
  }
}

struct BlockAccum {
  double loss = 0.0;
  long long clamped = 0;
  Mat d_w1;
  std::vector<double> d_b1;
  Mat d_w2;
  std::vector<double> d_b2;
  Mat g_points;   // M x 2, gradient w.r.t. normalized points, summed per slot
  double dot = 0.0;  // sum_k <g_x_k, unnormalized row of sample k>
};

}  // namespace

void OneHotBatch::validate() const {
  if (indices.empty()) throw std::invalid_argument("batch is empty");
  if (num_classes < 1) throw std::invalid_argument("batch num_classes < 1");
  for (int i : indices) {
    if (i < 0 || i >= num_classes) {
      throw std::invalid_argument("batch index " + std::to_string(i) + " out of [0, " +
                                  std::to_string(num_classes) + ")");
    }
  }
}

std::vector<cplx> encoder_points(const EncoderParams& enc) {
  const int m = enc.w.rows;
  if (m < 1 || enc.w.cols != 2) throw std::invalid_argument("encoder weight must be M x 2");
  double power = 0.0;
  for (int r = 0; r < m; ++r) {
    power += enc.w(r, 0) * enc.w(r, 0) + enc.w(r, 1) * enc.w(r, 1);
  }
  power /= m;
  if (!(power > 0.0) || !std::isfinite(power)) {
    throw std::invalid_argument("encoder normalization singularity: weight power is " +
                                std::to_string(power));
  }
  const double scale = 1.0 / std::sqrt(power);
  std::vector<cplx> pts(m);
  for (int r = 0; r < m; ++r) pts[r] = cplx(scale * enc.w(r, 0), scale * enc.w(r, 1));
  return pts;
}

std::vector<cplx> encoder_forward(const EncoderParams& enc, const OneHotBatch& batch) {
  batch.validate();
  if (batch.num_classes != enc.w.rows) {
    throw std::invalid_argument("batch num_classes does not match encoder size");
  }
  const std::vector<cplx> pts = encoder_points(enc);
  std::vector<cplx> x(batch.indices.size());
  for (std::size_t k = 0; k < batch.indices.size(); ++k) x[k] = pts[batch.indices[k]];
  return x;
}

Mat decoder_forward(const DecoderParams& dec, const std::vector<cplx>& y) {
  check_decoder_shapes(dec);
  const int h = dec.hidden_size();
  const int m = dec.num_classes();
  const int n = static_cast<int>(y.size());
  for (const auto& v : y) {
    if (!std::isfinite(v.real()) || !std::isfinite(v.imag())) {
      throw std::invalid_argument("decoder_forward: non-finite input sample");
    }
  }
  Mat probs(n, m);
#pragma omp parallel for schedule(static)
  for (int k = 0; k < n; ++k) {
    std::vector<double> hidden(h);
    const double yi = y[k].real();
    const double yq = y[k].imag();
    for (int j = 0; j < h; ++j) {
      const double pre = yi * dec.w1(0, j) + yq * dec.w1(1, j) + dec.b1[j];
      hidden[j] = pre > 0.0 ? pre : dec.leaky_slope * pre;
    }
    double* row = &probs(k, 0);
    for (int i = 0; i < m; ++i) row[i] = dec.b2[i];
    for (int j = 0; j < h; ++j) {
      const double hj = hidden[j];
      const double* w2row = &dec.w2.a[static_cast<std::size_t>(j) * m];
      for (int i = 0; i < m; ++i) row[i] += hj * w2row[i];
    }
    double mx = row[0];
    for (int i = 1; i < m; ++i) mx = std::max(mx, row[i]);
    double sum = 0.0;
    for (int i = 0; i < m; ++i) {
      row[i] = std::exp(row[i] - mx);
      sum += row[i];
    }
    const double inv = 1.0 / sum;
    for (int i = 0; i < m; ++i) row[i] *= inv;
  }
  return probs;
}

CrossEntropyResult cross_entropy(const Mat& probs, const OneHotBatch& batch) {
  batch.validate();
  if (probs.rows != static_cast<int>(batch.indices.size()) || probs.cols != batch.num_classes) {
    throw std::invalid_argument("cross_entropy: shape mismatch");
  }
  CrossEntropyResult r;
  for (int k = 0; k < probs.rows; ++k) {
    double p = probs(k, batch.indices[k]);
    if (p < kProbFloor) {
      p = kProbFloor;
      ++r.clamped;
    }
    r.nats -= std::log(p);
  }
  r.nats /= probs.rows;
  return r;
}

BackwardResult backward(const EncoderParams& enc, const DecoderParams& dec,
                        const OneHotBatch& batch, const RpnRealization& realization) {
  batch.validate();
  check_decoder_shapes(dec);
  const int m = enc.w.rows;
  const int h = dec.hidden_size();
  const int n = static_cast<int>(batch.indices.size());
  if (batch.num_classes != m || dec.num_classes() != m) {
    throw std::invalid_argument("backward: encoder/decoder/batch sizes disagree");
  }
  if (static_cast<int>(realization.theta.size()) != n ||
      static_cast<int>(realization.noise.size()) != n) {
    throw std::invalid_argument("backward: channel realization length mismatch");
  }

  // Forward pieces shared across the batch.
  double power = 0.0;
  for (int r = 0; r < m; ++r) {
    power += enc.w(r, 0) * enc.w(r, 0) + enc.w(r, 1) * enc.w(r, 1);
  }
  power /= m;
  if (!(power > 0.0) || !std::isfinite(power)) {
    throw std::invalid_argument("backward: encoder normalization singularity");
  }
  const double scale = 1.0 / std::sqrt(power);       // s
  const double scale3 = scale * scale * scale;       // s^3
  const double inv_n = 1.0 / n;

  const int num_blocks = (n + kBlock - 1) / kBlock;
  std::vector<BlockAccum> acc(num_blocks);

#pragma omp parallel for schedule(static)
  for (int blk = 0; blk < num_blocks; ++blk) {
    BlockAccum& a = acc[blk];
    a.d_w1 = Mat(2, h);
    a.d_b1.assign(h, 0.0);
    a.d_w2 = Mat(h, m);
    a.d_b2.assign(m, 0.0);
    a.g_points = Mat(m, 2);

    std::vector<double> pre1(h), hidden(h), logits(m), prob(m), d_a1(h);
    const int lo = blk * kBlock;
    const int hi = std::min(n, lo + kBlock);
    for (int k = lo; k < hi; ++k) {
      const int label = batch.indices[k];
      const double zi = enc.w(label, 0);
      const double zq = enc.w(label, 1);
      const double xi = scale * zi;
      const double xq = scale * zq;
      const double c = std::cos(realization.theta[k]);
      const double s = std::sin(realization.theta[k]);
      const double yi = xi * c - xq * s + realization.noise[k].real();
      const double yq = xi * s + xq * c + realization.noise[k].imag();

      for (int j = 0; j < h; ++j) {
        pre1[j] = yi * dec.w1(0, j) + yq * dec.w1(1, j) + dec.b1[j];
        hidden[j] = pre1[j] > 0.0 ? pre1[j] : dec.leaky_slope * pre1[j];
      }
      for (int i = 0; i < m; ++i) logits[i] = dec.b2[i];
      for (int j = 0; j < h; ++j) {
        const double hj = hidden[j];
        const double* w2row = &dec.w2.a[static_cast<std::size_t>(j) * m];
        for (int i = 0; i < m; ++i) logits[i] += hj * w2row[i];
      }
      double mx = logits[0];
      for (int i = 1; i < m; ++i) mx = std::max(mx, logits[i]);
      double sum = 0.0;
      for (int i = 0; i < m; ++i) {
        prob[i] = std::exp(logits[i] - mx);
        sum += prob[i];
      }
      const double inv_sum = 1.0 / sum;
      for (int i = 0; i < m; ++i) prob[i] *= inv_sum;

      double p_label = prob[label];
      if (p_label < kProbFloor) {
        p_label = kProbFloor;
        ++a.clamped;
      }
      a.loss -= std::log(p_label);

      // softmax + cross-entropy: dL/d logits = (p - onehot) / n
      // (exact even when the reported loss was floored)
      double gy_i = 0.0, gy_q = 0.0;
      for (int j = 0; j < h; ++j) d_a1[j] = 0.0;
      {
        const double* w2 = dec.w2.a.data();
        for (int i = 0; i < m; ++i) {
          const double d_logit = (prob[i] - (i == label ? 1.0 : 0.0)) * inv_n;
          a.d_b2[i] += d_logit;
          for (int j = 0; j < h; ++j) {
            a.d_w2.a[static_cast<std::size_t>(j) * m + i] += hidden[j] * d_logit;
            d_a1[j] += w2[static_cast<std::size_t>(j) * m + i] * d_logit;
          }
        }
      }
      for (int j = 0; j < h; ++j) {
        const double slope = pre1[j] > 0.0 ? 1.0 : dec.leaky_slope;
        const double g = d_a1[j] * slope;
        a.d_b1[j] += g;
        a.d_w1(0, j) += yi * g;
        a.d_w1(1, j) += yq * g;
        gy_i += dec.w1(0, j) * g;
        gy_q += dec.w1(1, j) * g;
      }
      // back through the rotation y = x e^{j theta} + n
      const double gx_i = c * gy_i + s * gy_q;
      const double gx_q = -s * gy_i + c * gy_q;
      a.g_points(label, 0) += gx_i;
      a.g_points(label, 1) += gx_q;
      a.dot += gx_i * zi + gx_q * zq;
    }
  }

  BackwardResult out;
  out.grads.d_we = Mat(m, 2);
  out.grads.d_w1 = Mat(2, h);
  out.grads.d_b1.assign(h, 0.0);
  out.grads.d_w2 = Mat(h, m);
  out.grads.d_b2.assign(m, 0.0);
  Mat g_points(m, 2);
  double dot = 0.0;
  for (const BlockAccum& a : acc) {
    out.loss_nats += a.loss;
    out.clamped += a.clamped;
    dot += a.dot;
    for (std::size_t i = 0; i < g_points.a.size(); ++i) g_points.a[i] += a.g_points.a[i];
    for (std::size_t i = 0; i < out.grads.d_w1.a.size(); ++i) out.grads.d_w1.a[i] += a.d_w1.a[i];
    for (std::size_t i = 0; i < out.grads.d_b1.size(); ++i) out.grads.d_b1[i] += a.d_b1[i];
    for (std::size_t i = 0; i < out.grads.d_w2.a.size(); ++i) out.grads.d_w2.a[i] += a.d_w2.a[i];
    for (std::size_t i = 0; i < out.grads.d_b2.size(); ++i) out.grads.d_b2[i] += a.d_b2[i];
  }
  out.loss_nats *= inv_n;

  // Through the power normalization x_r = s(W) * w_r:
  //   dL/dw_r = s * G_r - (s^3 / M) * w_r * sum_k <g_k, w_{label_k}>
  for (int r = 0; r < m; ++r) {
    out.grads.d_we(r, 0) = scale * g_points(r, 0) - scale3 * enc.w(r, 0) * dot / m;
    out.grads.d_we(r, 1) = scale * g_points(r, 1) - scale3 * enc.w(r, 1) * dot / m;
  }
  return out;
}

AdamState adam_init(const EncoderParams& enc, const DecoderParams& dec,
                    const AdamConfig& cfg) {
  AdamState st;
  st.cfg = cfg;
  auto zeros = [](std::size_t n) {
    return AdamMoments{std::vector<double>(n, 0.0), std::vector<double>(n, 0.0)};
  };
  st.we = zeros(enc.w.a.size());
  st.w1 = zeros(dec.w1.a.size());
  st.b1 = zeros(dec.b1.size());
  st.w2 = zeros(dec.w2.a.size());
  st.b2 = zeros(dec.b2.size());
  return st;
}

void adam_update_tensor(const char* name, const AdamConfig& cfg, long long step,
                        std::span<double> param, AdamMoments& mom,
                        std::span<const double> grad) {
  if (param.size() != grad.size() || mom.m.size() != param.size() ||
      mom.v.size() != param.size()) {
    throw std::invalid_argument(std::string("adam: shape mismatch for ") + name);
  }
  const double bc1 = 1.0 - std::pow(cfg.beta1, static_cast<double>(step));
  const double bc2 = 1.0 - std::pow(cfg.beta2, static_cast<double>(step));
  for (std::size_t i = 0; i < param.size(); ++i) {
    const double g = grad[i];
    if (!std::isfinite(g)) {
      throw std::runtime_error(std::string("adam: non-finite gradient in ") + name);
    }
    mom.m[i] = cfg.beta1 * mom.m[i] + (1.0 - cfg.beta1) * g;
    mom.v[i] = cfg.beta2 * mom.v[i] + (1.0 - cfg.beta2) * g * g;
    const double mhat = mom.m[i] / bc1;
    const double vhat = mom.v[i] / bc2;
    param[i] -= cfg.lr * mhat / (std::sqrt(vhat) + cfg.eps);
  }
}

void adam_step(AdamState& state, EncoderParams& enc, DecoderParams& dec,
               const Gradients& grads) {
  ++state.step;
  adam_update_tensor("W_e", state.cfg, state.step, enc.w.a, state.we, grads.d_we.a);
  adam_update_tensor("W_1", state.cfg, state.step, dec.w1.a, state.w1, grads.d_w1.a);
  adam_update_tensor("b_1", state.cfg, state.step, dec.b1, state.b1, grads.d_b1);
  adam_update_tensor("W_2", state.cfg, state.step, dec.w2.a, state.w2, grads.d_w2.a);
  adam_update_tensor("b_2", state.cfg, state.step, dec.b2, state.b2, grads.d_b2);
}

EncoderParams init_encoder_qam(int m, double jitter_sigma, RngStream& rng) {
  const Constellation qam = square_qam(m);
  EncoderParams enc;
  enc.w = Mat(m, 2);
  for (int r = 0; r < m; ++r) {
    enc.w(r, 0) = qam.points()[r].real() + rng.normal(jitter_sigma);
    enc.w(r, 1) = qam.points()[r].imag() + rng.normal(jitter_sigma);
  }
  return enc;
}

DecoderParams init_decoder(int m, RngStream& rng) {
  if (m < 2 || m % 2 != 0) throw std::invalid_argument("init_decoder: M must be even");
  const int h = m / 2;
  DecoderParams dec;
  dec.w1 = Mat(2, h);
  dec.b1.assign(h, 0.0);
  dec.w2 = Mat(h, m);
  dec.b2.assign(m, 0.0);
  const double lim1 = std::sqrt(1.0 / 2.0);
  for (auto& w : dec.w1.a) w = rng.uniform(-lim1, lim1);
  for (auto& b : dec.b1) b = rng.uniform(-lim1, lim1);
  const double lim2 = std::sqrt(1.0 / h);
  for (auto& w : dec.w2.a) w = rng.uniform(-lim2, lim2);
  for (auto& b : dec.b2) b = rng.uniform(-lim2, lim2);
  return dec;
}

namespace {

void write_section(std::ofstream& f, const char* name, int rows, int cols,
                   const std::vector<double>& v) {
  f << name << ' ' << rows << ' ' << cols << '\n';
  char buf[32];
  for (int r = 0; r < rows; ++r) {
    for (int c = 0; c < cols; ++c) {
      std::snprintf(buf, sizeof(buf), "%.17g", v[static_cast<std::size_t>(r) * cols + c]);
      f << buf << (c + 1 == cols ? '\n' : ' ');
    }
  }
}

std::vector<double> read_section(std::ifstream& f, const std::string& path,
                                 const char* name, int rows, int cols) {
  std::string tok;
  int r = 0, c = 0;
  if (!(f >> tok >> r >> c) || tok != name || r != rows || c != cols) {
    std::ostringstream os;
    os << path << ": expected section '" << name << " " << rows << " " << cols
       << "', got '" << tok << " " << r << " " << c << "'";
    throw std::runtime_error(os.str());
  }
  std::vector<double> v(static_cast<std::size_t>(rows) * cols);
  for (auto& x : v) {
    if (!(f >> x)) throw std::runtime_error(path + ": truncated section " + name);
  }
  return v;
}

}  // namespace

void save_model(const Model& model, const std::string& path) {
  check_decoder_shapes(model.dec);
  const int m = model.enc.w.rows;
  std::ofstream f(path);
  if (!f) throw std::runtime_error("cannot open '" + path + "' for writing");
  f << "aemodel v1 " << m << '\n';
  write_section(f, "W_e", m, 2, model.enc.w.a);
  write_section(f, "W_1", 2, m / 2, model.dec.w1.a);
  write_section(f, "b_1", 1, m / 2, model.dec.b1);
  write_section(f, "W_2", m / 2, m, model.dec.w2.a);
  write_section(f, "b_2", 1, m, model.dec.b2);
  if (!f) throw std::runtime_error("write to '" + path + "' failed");
}

Model load_model(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw std::runtime_error("cannot open '" + path + "' for reading");
  std::string magic, version;
  int m = 0;
  if (!(f >> magic >> version >> m) || magic != "aemodel" || version != "v1" || m < 2) {
    throw std::runtime_error(path + ": malformed model header");
  }
  Model model;
  model.enc.w = Mat(m, 2);
  model.enc.w.a = read_section(f, path, "W_e", m, 2);
  model.dec.w1 = Mat(2, m / 2);
  model.dec.w1.a = read_section(f, path, "W_1", 2, m / 2);
  model.dec.b1 = read_section(f, path, "b_1", 1, m / 2);
  model.dec.w2 = Mat(m / 2, m);
  model.dec.w2.a = read_section(f, path, "W_2", m / 2, m);
  model.dec.b2 = read_section(f, path, "b_2", 1, m);
  for (double x : model.enc.w.a) {
    if (!std::isfinite(x)) throw std::runtime_error(path + ": non-finite value in W_e");
  }
  return model;
}

}  // namespace gcs
