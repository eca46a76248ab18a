// Copyright 2026 The deverb authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#include "deverb/model.hpp"

#include <cmath>
#include <random>
#include <stdexcept>

namespace deverb {

void ModelConfig::validate() const {
  if (d_model <= 0 || d_model % 2 != 0)
    throw std::invalid_argument("model config: d_model must be positive even");
  if (heads <= 0 || d_model % heads != 0)
    throw std::invalid_argument("model config: d_model must divide by heads");
  if (n_window <= 0 || n_window % 2 != 0)
    throw std::invalid_argument("model config: n_window must be positive even");
  if (loops < 1) throw std::invalid_argument("model config: loops >= 1");
  if (conv_kernel % 2 == 0 || dec_conv_kernel % 2 == 0)
    throw std::invalid_argument("model config: conv kernels must be odd");
  if (visual_len < 2 || visual_dims < 1)
    throw std::invalid_argument("model config: bad visual dims");
  if (bins < 2 || frames < 2)
    throw std::invalid_argument("model config: bad spectrogram dims");
  if (!(mask_bound > 0.0))
    throw std::invalid_argument("model config: mask_bound must be positive");
}

// ---------------- parameters ----------------

namespace {

Matrix randn(std::mt19937_64& rng, long rows, long cols, double stddev) {
  std::normal_distribution<double> g(0.0, stddev);
  Matrix m(rows, cols);
  for (long i = 0; i < rows; ++i)
    for (long j = 0; j < cols; ++j) m(i, j) = g(rng);
  return m;
}

double xavier_std(long fan_in, long fan_out) {
  return std::sqrt(2.0 / static_cast<double>(fan_in + fan_out));
}

}  // namespace

Tensor ModelParams::get(const std::string& name) const {
  auto it = index_.find(name);
  if (it == index_.end())
    throw std::invalid_argument("model params: unknown parameter " + name);
  return entries_[it->second].second;
}

bool ModelParams::has(const std::string& name) const {
  return index_.count(name) > 0;
}

void ModelParams::add(const std::string& name, Matrix value) {
  if (index_.count(name))
    throw std::invalid_argument("model params: duplicate parameter " + name);
  index_[name] = entries_.size();
  entries_.emplace_back(name, Tensor::leaf(std::move(value), true));
}

ModelParams ModelParams::clone() const {
  ModelParams out;
  out.config = config;
  for (const auto& [name, tensor] : entries_) out.add(name, tensor.value());
  return out;
}

void ModelParams::zero_grads() const {
  for (const auto& [name, tensor] : entries_) tensor.grad().setZero();
}

long ModelParams::total_size() const {
  long n = 0;
  for (const auto& [name, tensor] : entries_) n += tensor.rows() * tensor.cols();
  return n;
}

ModelParams ModelParams::init(const ModelConfig& cfg, uint64_t seed) {
  cfg.validate();
  ModelParams p;
  p.config = cfg;
  std::mt19937_64 rng(seed);

  const int d = cfg.d_model;
  const int c = cfg.complex_width();
  const int f = cfg.bins;
  const int ffn = 4 * d;

  auto dense = [&](const std::string& name, long rows, long cols) {
    p.add(name, randn(rng, rows, cols, xavier_std(rows, cols)));
  };
  auto zeros = [&](const std::string& name, long rows, long cols) {
    p.add(name, Matrix::Zero(rows, cols));
  };
  auto ones_row = [&](const std::string& name, long cols) {
    p.add(name, Matrix::Ones(1, cols));
  };
  auto norm_pair = [&](const std::string& prefix, long cols) {
    ones_row(prefix + ".gamma", cols);
    zeros(prefix + ".beta", 1, cols);
  };

  // audio front end: complex projection F -> C and complex self-attention
  dense("enc.proj.wr", f, c);
  dense("enc.proj.wi", f, c);
  for (const char* m : {"wq", "wk", "wv", "wo"}) {
    dense(std::string("enc.csa.") + m + "_r", c, c);
    dense(std::string("enc.csa.") + m + "_i", c, c);
  }

  if (cfg.use_geometry) {
    dense("vis.proj.w", cfg.visual_dims, d);
    zeros("vis.proj.b", 1, d);
  }

  const char* kinds[4] = {"window", "panoptic", "shifted", "panoptic2"};
  for (int l = 0; l < cfg.loops; ++l) {
    for (int b = 0; b < 4; ++b) {
      const std::string blk =
          "blk" + std::to_string(l) + "." + kinds[b] + ".";
      norm_pair(blk + "ln_ffn1", d);
      dense(blk + "ffn1.w1", d, ffn);
      zeros(blk + "ffn1.b1", 1, ffn);
      dense(blk + "ffn1.w2", ffn, d);
      zeros(blk + "ffn1.b2", 1, d);
      if (cfg.use_geometry) {
        norm_pair(blk + "ln_cm", d);
        dense(blk + "cm.wq", d, d);
        dense(blk + "cm.wk", d, d);
        dense(blk + "cm.wv", d, d);
        dense(blk + "cm.wo", d, d);
      }
      norm_pair(blk + "ln_att", d);
      dense(blk + "att.wq", d, d);
      dense(blk + "att.wk", d, d);
      dense(blk + "att.wv", d, d);
      dense(blk + "att.wo", d, d);
      const bool panoptic = (b == 1 || b == 3);
      zeros(blk + "att.bias", cfg.heads,
            panoptic ? cfg.panoptic_table_len() : cfg.window_table_len());
      norm_pair(blk + "ln_conv", d);
      dense(blk + "conv.pw1", d, 2 * d);
      zeros(blk + "conv.pw1b", 1, 2 * d);
      p.add(blk + "conv.dw",
            randn(rng, cfg.conv_kernel, d,
                  xavier_std(cfg.conv_kernel, cfg.conv_kernel)));
      zeros(blk + "conv.dwb", 1, d);
      dense(blk + "conv.pw2", d, d);
      zeros(blk + "conv.pw2b", 1, d);
      norm_pair(blk + "ln_ffn2", d);
      dense(blk + "ffn2.w1", d, ffn);
      zeros(blk + "ffn2.b1", 1, ffn);
      dense(blk + "ffn2.w2", ffn, d);
      zeros(blk + "ffn2.b2", 1, d);
      norm_pair(blk + "ln_final", d);
    }
  }

  // decoder: complex conv -> complex self-attention -> complex dense -> norm
  p.add("dec.conv.wr", randn(rng, cfg.dec_conv_kernel, c,
                             xavier_std(cfg.dec_conv_kernel, cfg.dec_conv_kernel)));
  p.add("dec.conv.wi", randn(rng, cfg.dec_conv_kernel, c,
                             xavier_std(cfg.dec_conv_kernel, cfg.dec_conv_kernel)));
  zeros("dec.conv.br", 1, c);
  zeros("dec.conv.bi", 1, c);
  for (const char* m : {"wq", "wk", "wv", "wo"}) {
    dense(std::string("dec.csa.") + m + "_r", c, c);
    dense(std::string("dec.csa.") + m + "_i", c, c);
  }
  dense("dec.dense.wr", c, f);
  dense("dec.dense.wi", c, f);
  zeros("dec.dense.br", 1, f);
  zeros("dec.dense.bi", 1, f);
  norm_pair("dec.norm.re", f);
  norm_pair("dec.norm.im", f);
  // start from an identity mask: offset the real part to compress(1)
  {
    Tensor beta = p.get("dec.norm.re.beta");
    beta.mutable_value().setConstant(cfg.mask_bound *
                                     std::tanh(1.0 / cfg.mask_bound));
  }

  // acoustic-token classifier head (trained with the ATM loss)
  zeros("atm.w", cfg.atm_latent_dim, cfg.atm_classes);
  zeros("atm.b", 1, cfg.atm_classes);
  return p;
}

// ---------------- structural ops ----------------

std::vector<Tensor> window_partition(const Tensor& seq, int n_window) {
  if (n_window <= 0) throw std::invalid_argument("window_partition: bad N_w");
  const long z = seq.rows();
  const long padded = (z + n_window - 1) / n_window * n_window;
  Tensor padded_seq = padded == z ? seq : pad_rows(seq, padded);
  std::vector<Tensor> windows;
  windows.reserve(padded / n_window);
  for (long w = 0; w < padded / n_window; ++w)
    windows.push_back(rows_slice(padded_seq, w * n_window, n_window));
  return windows;
}

Tensor window_merge(const std::vector<Tensor>& windows, long original_len) {
  if (windows.empty()) throw std::invalid_argument("window_merge: empty");
  Tensor merged = concat_rows(windows);
  if (merged.rows() < original_len)
    throw std::invalid_argument("window_merge: fewer rows than original");
  if (merged.rows() == original_len) return merged;
  return rows_slice(merged, 0, original_len);
}

Tensor shifted_fold(const Tensor& seq, int n_window) {
  if (seq.rows() < n_window)
    throw std::invalid_argument("shifted_fold: sequence shorter than window");
  return roll_rows(seq, n_window / 2);
}

Tensor shifted_unfold(const Tensor& seq, int n_window) {
  if (seq.rows() < n_window)
    throw std::invalid_argument("shifted_unfold: sequence shorter than window");
  return roll_rows(seq, -(n_window / 2));
}

Eigen::MatrixXi window_bias_index(int z) {
  // offset j - i in [-(z-1), z-1] maps to table slot j - i + z - 1
  Eigen::MatrixXi idx(z, z);
  for (int i = 0; i < z; ++i)
    for (int j = 0; j < z; ++j) idx(i, j) = j - i + z - 1;
  return idx;
}

Eigen::MatrixXi panoptic_bias_index(int z) {
  // symmetric wrapped distance: |j-i| if <= z/2 else z - |j-i|
  Eigen::MatrixXi idx(z, z);
  for (int i = 0; i < z; ++i)
    for (int j = 0; j < z; ++j) {
      const int dist = std::abs(j - i);
      idx(i, j) = dist <= z / 2 ? dist : z - dist;
    }
  return idx;
}

Tensor attention_with_bias(const Tensor& x, const Tensor& wq, const Tensor& wk,
                           const Tensor& wv, const Tensor& wo,
                           const Tensor& bias_table, BlockKind kind,
                           int heads, const std::vector<bool>* key_valid) {
  const long z = x.rows();
  const long d = x.cols();
  if (d % heads != 0)
    throw std::invalid_argument("attention_with_bias: heads must divide D");
  const long hd = d / heads;

  const Eigen::MatrixXi idx = kind == BlockKind::kPanoptic
                                  ? panoptic_bias_index(static_cast<int>(z))
                                  : window_bias_index(static_cast<int>(z));
  const long needed = idx.maxCoeff() + 1;
  if (bias_table.cols() < needed)
    throw std::invalid_argument(
        "attention_with_bias: bias table too short for sequence length " +
        std::to_string(z) + " (kind mismatch?)");
  if (bias_table.rows() != heads)
    throw std::invalid_argument("attention_with_bias: table rows != heads");

  Matrix key_mask;
  if (key_valid) {
    if (static_cast<long>(key_valid->size()) != z)
      throw std::invalid_argument("attention_with_bias: key mask length");
    key_mask = Matrix::Zero(z, z);
    for (long j = 0; j < z; ++j)
      if (!(*key_valid)[j]) key_mask.col(j).setConstant(-1e30);
  }

  Tensor q = matmul(x, wq), k = matmul(x, wk), v = matmul(x, wv);
  const double inv_sqrt_d = 1.0 / std::sqrt(static_cast<double>(d));
  std::vector<Tensor> head_outputs;
  head_outputs.reserve(heads);
  for (int h = 0; h < heads; ++h) {
    Tensor qh = cols_slice(q, h * hd, hd);
    Tensor kh = cols_slice(k, h * hd, hd);
    Tensor vh = cols_slice(v, h * hd, hd);
    Tensor scores = scale(matmul(qh, transpose(kh)), inv_sqrt_d);
    Tensor table_row = rows_slice(bias_table, h, 1);
    Tensor bias = gather_matrix(table_row, idx);
    Tensor alpha = add(scores, bias);
    Tensor attn = softmax_rows(alpha, key_valid ? &key_mask : nullptr);
    head_outputs.push_back(matmul(attn, vh));
  }
  return matmul(concat_cols(head_outputs), wo);
}

Tensor cross_modal_attention(const Tensor& audio, const Tensor& visual,
                             const Tensor& wq, const Tensor& wk,
                             const Tensor& wv, const Tensor& wo, int heads) {
  if (audio.rows() != visual.rows())
    throw std::invalid_argument(
        "cross_modal_attention: audio/visual length mismatch");
  if (audio.cols() % heads != 0)
    throw std::invalid_argument("cross_modal_attention: heads must divide D");
  const long hd = audio.cols() / heads;
  const double inv_sqrt_s = 1.0 / std::sqrt(static_cast<double>(hd));

  Tensor q = matmul(audio, wq), k = matmul(visual, wk), v = matmul(visual, wv);
  std::vector<Tensor> head_outputs;
  head_outputs.reserve(heads);
  for (int h = 0; h < heads; ++h) {
    Tensor qh = cols_slice(q, h * hd, hd);
    Tensor kh = cols_slice(k, h * hd, hd);
    Tensor vh = cols_slice(v, h * hd, hd);
    Tensor attn = softmax_rows(scale(matmul(qh, transpose(kh)), inv_sqrt_s));
    head_outputs.push_back(matmul(attn, vh));
  }
  return matmul(concat_cols(head_outputs), wo);
}

namespace {

CPair complex_linear(const CPair& x, const Tensor& wr, const Tensor& wi) {
  return CPair{sub(matmul(x.re, wr), matmul(x.im, wi)),
               add(matmul(x.re, wi), matmul(x.im, wr))};
}

}  // namespace

CPair complex_self_attention(const CPair& x, const Tensor& wq_r,
                             const Tensor& wq_i, const Tensor& wk_r,
                             const Tensor& wk_i, const Tensor& wv_r,
                             const Tensor& wv_i, const Tensor& wo_r,
                             const Tensor& wo_i) {
  CPair q = complex_linear(x, wq_r, wq_i);
  CPair k = complex_linear(x, wk_r, wk_i);
  CPair v = complex_linear(x, wv_r, wv_i);
  // Re(Q K^H) = Qr Kr^T + Qi Ki^T
  const double inv_sqrt_c = 1.0 / std::sqrt(static_cast<double>(x.re.cols()));
  Tensor scores = scale(add(matmul(q.re, transpose(k.re)),
                            matmul(q.im, transpose(k.im))),
                        inv_sqrt_c);
  Tensor attn = softmax_rows(scores);
  CPair out{matmul(attn, v.re), matmul(attn, v.im)};
  return complex_linear(out, wo_r, wo_i);
}

Matrix interpolation_matrix(long source_len, long target_len) {
  if (source_len < 2 || target_len < 2)
    throw std::invalid_argument("interpolation_matrix: lengths must be >= 2");
  Matrix interp = Matrix::Zero(target_len, source_len);
  for (long t = 0; t < target_len; ++t) {
    const double pos = static_cast<double>(t) * (source_len - 1) /
                       static_cast<double>(target_len - 1);
    const long lo = static_cast<long>(std::floor(pos));
    const long hi = std::min(lo + 1, source_len - 1);
    const double frac = pos - lo;
    interp(t, lo) += 1.0 - frac;
    interp(t, hi) += frac;
  }
  return interp;
}

Tensor resample_visual(const GeometryFeatures& features, long target_len,
                       const Tensor& proj_w, const Tensor& proj_b) {
  const long n = features.positions();
  if (n < 2 || target_len < 2)
    throw std::invalid_argument("resample_visual: need N, T >= 2");
  Matrix resampled = interpolation_matrix(n, target_len) * features.seq;
  Tensor base = Tensor::constant(std::move(resampled));
  return add_rowvec(matmul(base, proj_w), proj_b);
}

// ---------------- conformer block ----------------

namespace {

Tensor layer_norm_affine(const Tensor& x, const ModelParams& p,
                         const std::string& prefix) {
  return add_rowvec(
      mul_rowvec(layernorm_rows(x), p.get(prefix + ".gamma")),
      p.get(prefix + ".beta"));
}

Tensor swish(const Tensor& x) { return mul(x, sigmoid(x)); }

Tensor feed_forward(const Tensor& x, const ModelParams& p,
                    const std::string& prefix) {
  Tensor h = swish(add_rowvec(matmul(x, p.get(prefix + ".w1")),
                              p.get(prefix + ".b1")));
  return add_rowvec(matmul(h, p.get(prefix + ".w2")), p.get(prefix + ".b2"));
}

Tensor conv_module(const Tensor& x, const ModelParams& p,
                   const std::string& blk) {
  const long d = x.cols();
  Tensor h = add_rowvec(matmul(x, p.get(blk + "conv.pw1")),
                        p.get(blk + "conv.pw1b"));
  Tensor a = cols_slice(h, 0, d);
  Tensor b = cols_slice(h, d, d);
  Tensor gated = mul(a, sigmoid(b));  // GLU
  Tensor conv = add_rowvec(conv1d_depthwise(gated, p.get(blk + "conv.dw")),
                           p.get(blk + "conv.dwb"));
  return add_rowvec(matmul(swish(conv), p.get(blk + "conv.pw2")),
                    p.get(blk + "conv.pw2b"));
}

// window / shifted-window / panoptic self-attention over a padded sequence,
// with padded rows masked out of the keys
Tensor geometry_attention(const Tensor& x, const ModelParams& p,
                          const std::string& blk, BlockKind kind) {
  const ModelConfig& cfg = p.config;
  const long z = x.rows();
  const int nw = cfg.n_window;
  const long padded = (z + nw - 1) / nw * nw;

  std::vector<bool> valid(padded, true);
  for (long i = z; i < padded; ++i) valid[i] = false;

  Tensor wq = p.get(blk + "att.wq"), wk = p.get(blk + "att.wk");
  Tensor wv = p.get(blk + "att.wv"), wo = p.get(blk + "att.wo");
  Tensor table = p.get(blk + "att.bias");

  if (kind == BlockKind::kPanoptic) {
    Tensor padded_seq = padded == z ? x : pad_rows(x, padded);
    Tensor out = attention_with_bias(padded_seq, wq, wk, wv, wo, table,
                                     BlockKind::kPanoptic, cfg.heads, &valid);
    return padded == z ? out : rows_slice(out, 0, z);
  }

  Tensor seq = padded == z ? x : pad_rows(x, padded);
  if (kind == BlockKind::kShiftedWindow) {
    seq = shifted_fold(seq, nw);
    std::vector<bool> rolled(padded);
    for (long i = 0; i < padded; ++i)
      rolled[(i + nw / 2) % padded] = valid[i];
    valid = std::move(rolled);
  }

  std::vector<Tensor> windows = window_partition(seq, nw);
  std::vector<Tensor> outputs;
  outputs.reserve(windows.size());
  for (size_t w = 0; w < windows.size(); ++w) {
    std::vector<bool> wvalid(valid.begin() + w * nw,
                             valid.begin() + (w + 1) * nw);
    outputs.push_back(attention_with_bias(windows[w], wq, wk, wv, wo, table,
                                          BlockKind::kWindow, cfg.heads,
                                          &wvalid));
  }
  Tensor merged = window_merge(outputs, padded);
  if (kind == BlockKind::kShiftedWindow) merged = shifted_unfold(merged, nw);
  return padded == z ? merged : rows_slice(merged, 0, z);
}

}  // namespace

Tensor conformer_block(const Tensor& audio, const Tensor& visual,
                       const ModelParams& params, const std::string& prefix,
                       BlockKind kind) {
  const std::string blk = prefix + ".";
  Tensor x = audio;

  x = add(x, scale(feed_forward(layer_norm_affine(x, params, blk + "ln_ffn1"),
                                params, blk + "ffn1"),
                   0.5));

  if (params.config.use_geometry) {
    if (!visual.defined())
      throw std::invalid_argument("conformer_block: missing visual tokens");
    if (visual.rows() != audio.rows())
      throw std::invalid_argument("conformer_block: visual length mismatch");
    Tensor cm = cross_modal_attention(
        layer_norm_affine(x, params, blk + "ln_cm"), visual,
        params.get(blk + "cm.wq"), params.get(blk + "cm.wk"),
        params.get(blk + "cm.wv"), params.get(blk + "cm.wo"),
        params.config.heads);
    x = add(x, cm);
  }

  x = add(x, geometry_attention(layer_norm_affine(x, params, blk + "ln_att"),
                                params, blk, kind));
  x = add(x, conv_module(layer_norm_affine(x, params, blk + "ln_conv"),
                         params, blk));
  x = add(x, scale(feed_forward(layer_norm_affine(x, params, blk + "ln_ffn2"),
                                params, blk + "ffn2"),
                   0.5));
  return layer_norm_affine(x, params, blk + "ln_final");
}

// ---------------- decoder ----------------

CPair mask_decoder(const Tensor& tokens, const ModelParams& params,
                   std::vector<std::string>* stage_trace) {
  return mask_decoder_with_preimage(tokens, params, nullptr, stage_trace);
}

CPair mask_decoder_with_preimage(const Tensor& tokens,
                                 const ModelParams& params, CPair* preimage,
                                 std::vector<std::string>* stage_trace) {
  // Exposes the unbounded affine output alongside the bounded mask: it
  // equals decompress(mask) exactly (K*atanh(tanh(x/K)) == x), and the
  // forward path applies it directly so gradients avoid the atanh blow-up
  // near the bound.
  const ModelConfig& cfg = params.config;
  const int c = cfg.complex_width();
  if (tokens.cols() != cfg.d_model)
    throw std::invalid_argument("mask_decoder: token width != d_model");

  CPair x{cols_slice(tokens, 0, c), cols_slice(tokens, c, c)};
  x = CPair{relu(x.re), relu(x.im)};
  if (stage_trace) stage_trace->push_back("crelu");

  Tensor conv_rr = conv1d_depthwise(x.re, params.get("dec.conv.wr"));
  Tensor conv_ii = conv1d_depthwise(x.im, params.get("dec.conv.wi"));
  Tensor conv_ri = conv1d_depthwise(x.re, params.get("dec.conv.wi"));
  Tensor conv_ir = conv1d_depthwise(x.im, params.get("dec.conv.wr"));
  // residual connections keep per-frame identity through the global stages
  x = CPair{add(x.re, add_rowvec(sub(conv_rr, conv_ii),
                                 params.get("dec.conv.br"))),
            add(x.im, add_rowvec(add(conv_ri, conv_ir),
                                 params.get("dec.conv.bi")))};
  if (stage_trace) stage_trace->push_back("complex_conv");

  CPair attended = complex_self_attention(
      x, params.get("dec.csa.wq_r"), params.get("dec.csa.wq_i"),
      params.get("dec.csa.wk_r"), params.get("dec.csa.wk_i"),
      params.get("dec.csa.wv_r"), params.get("dec.csa.wv_i"),
      params.get("dec.csa.wo_r"), params.get("dec.csa.wo_i"));
  x = CPair{add(x.re, attended.re), add(x.im, attended.im)};
  if (stage_trace) stage_trace->push_back("complex_self_attention");

  CPair dense = complex_linear(x, params.get("dec.dense.wr"),
                               params.get("dec.dense.wi"));
  dense = CPair{add_rowvec(dense.re, params.get("dec.dense.br")),
                add_rowvec(dense.im, params.get("dec.dense.bi"))};
  if (stage_trace) stage_trace->push_back("complex_dense");

  Tensor pre_re =
      add_rowvec(mul_rowvec(dense.re, params.get("dec.norm.re.gamma")),
                 params.get("dec.norm.re.beta"));
  Tensor pre_im =
      add_rowvec(mul_rowvec(dense.im, params.get("dec.norm.im.gamma")),
                 params.get("dec.norm.im.beta"));
  if (preimage) *preimage = CPair{pre_re, pre_im};
  Tensor re = scaled_tanh(pre_re, cfg.mask_bound);
  Tensor im = scaled_tanh(pre_im, cfg.mask_bound);
  if (stage_trace) stage_trace->push_back("normalization");
  return CPair{re, im};
}

// ---------------- full forward ----------------

ModelOutput model_forward_t(const Tensor& reverb_re, const Tensor& reverb_im,
                            const GeometryFeatures& features,
                            const ModelParams& params) {
  const ModelConfig& cfg = params.config;
  if (reverb_re.rows() != cfg.frames || reverb_re.cols() != cfg.bins)
    throw std::invalid_argument(
        "model_forward: spectrogram shape does not match the model config");

  // audio path: complex projection, complex self-attention with residual,
  // then pack the complex pair into D real channels
  CPair tokens = complex_linear(CPair{reverb_re, reverb_im},
                                params.get("enc.proj.wr"),
                                params.get("enc.proj.wi"));
  CPair attended = complex_self_attention(
      tokens, params.get("enc.csa.wq_r"), params.get("enc.csa.wq_i"),
      params.get("enc.csa.wk_r"), params.get("enc.csa.wk_i"),
      params.get("enc.csa.wv_r"), params.get("enc.csa.wv_i"),
      params.get("enc.csa.wo_r"), params.get("enc.csa.wo_i"));
  tokens = CPair{add(tokens.re, attended.re), add(tokens.im, attended.im)};
  Tensor x = concat_cols({tokens.re, tokens.im});

  Tensor visual;
  if (cfg.use_geometry) {
    if (features.positions() != cfg.visual_len ||
        features.feature_dims() != cfg.visual_dims)
      throw std::invalid_argument(
          "model_forward: geometry features do not match the model config");
    visual = resample_visual(features, cfg.frames, params.get("vis.proj.w"),
                             params.get("vis.proj.b"));
  }

  const char* kinds[4] = {"window", "panoptic", "shifted", "panoptic2"};
  const BlockKind kind_of[4] = {BlockKind::kWindow, BlockKind::kPanoptic,
                                BlockKind::kShiftedWindow,
                                BlockKind::kPanoptic};
  for (int l = 0; l < cfg.loops; ++l)
    for (int b = 0; b < 4; ++b)
      x = conformer_block(x, visual, params,
                          "blk" + std::to_string(l) + "." + kinds[b],
                          kind_of[b]);

  CPair pre;
  CPair mask = mask_decoder_with_preimage(x, params, &pre);
  // pre == decompress(mask); applying it directly keeps gradients clean
  CPair estimate{sub(mul(pre.re, reverb_re), mul(pre.im, reverb_im)),
                 add(mul(pre.re, reverb_im), mul(pre.im, reverb_re))};
  return ModelOutput{mask, estimate};
}

InferenceResult model_forward(const ComplexSpectrogram& reverb,
                              const GeometryFeatures& features,
                              const ModelParams& params) {
  Tensor re = Tensor::constant(reverb.data.real());
  Tensor im = Tensor::constant(reverb.data.imag());
  ModelOutput out = model_forward_t(re, im, features, params);

  InferenceResult result;
  result.mask_compressed.data.resize(reverb.data.rows(), reverb.data.cols());
  result.mask_compressed.floor_hits =
      Eigen::Matrix<bool, Eigen::Dynamic, Eigen::Dynamic>::Constant(
          reverb.data.rows(), reverb.data.cols(), false);
  result.estimate = reverb;
  for (long t = 0; t < reverb.data.rows(); ++t)
    for (long f = 0; f < reverb.data.cols(); ++f) {
      result.mask_compressed.data(t, f) = {out.mask_compressed.re.value()(t, f),
                                           out.mask_compressed.im.value()(t, f)};
      result.estimate.data(t, f) = {out.estimate.re.value()(t, f),
                                    out.estimate.im.value()(t, f)};
    }
  return result;
}

}  // namespace deverb
