// Copyright 2026 The deverb authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#ifndef DEVERB_MODEL_HPP
#define DEVERB_MODEL_HPP

#include <cstdint>
#include <string>
#include <unordered_map>
#include <vector>

#include "deverb/cirm.hpp"
#include "deverb/geometry.hpp"
#include "deverb/nn_ops.hpp"
#include "deverb/stft.hpp"
#include "deverb/tensor.hpp"

namespace deverb {

struct ModelConfig {
  int d_model = 64;      // token width D (even, divisible by heads)
  int n_window = 16;     // attention window length N_w (even)
  int loops = 2;         // repetitions of the four-block sequence
  int heads = 4;
  int conv_kernel = 15;      // conformer depthwise kernel (odd)
  int dec_conv_kernel = 5;   // decoder complex conv kernel (odd)
  int visual_len = 64;       // geometry feature positions N
  int visual_dims = 64;      // geometry feature channels D_v
  int bins = 257;            // F
  int frames = 99;           // audio frames T per clip
  bool use_geometry = true;
  double mask_bound = kMaskCompressK;
  int atm_latent_dim = 32;   // acoustic-token latent width d
  int atm_classes = 50;      // K-means cluster count K

  int complex_width() const { return d_model / 2; }
  int head_dim() const { return d_model / heads; }
  // token count after right-padding to a multiple of the window length
  int padded_frames() const {
    return (frames + n_window - 1) / n_window * n_window;
  }
  int window_table_len() const { return 2 * n_window - 1; }
  int panoptic_table_len() const { return padded_frames() / 2 + 1; }
  void validate() const;
};

// Every learnable array, enumerable in a stable order.
class ModelParams {
 public:
  ModelConfig config;

  static ModelParams init(const ModelConfig& cfg, uint64_t seed);

  Tensor get(const std::string& name) const;
  bool has(const std::string& name) const;
  void add(const std::string& name, Matrix value);
  const std::vector<std::pair<std::string, Tensor>>& entries() const {
    return entries_;
  }
  // Deep copy with fresh leaf tensors (for per-worker gradient accumulation).
  ModelParams clone() const;
  void zero_grads() const;
  long total_size() const;

 private:
  std::vector<std::pair<std::string, Tensor>> entries_;
  std::unordered_map<std::string, size_t> index_;
};

// Real/imaginary tensor pair standing in for a complex matrix.
struct CPair {
  Tensor re, im;
};

enum class BlockKind { kWindow, kShiftedWindow, kPanoptic };

// ---- building blocks (exposed for tests) ----

// partition into Z/N_w windows of N_w rows (zero right-padded); merge is the
// exact inverse and trims back to the original length
std::vector<Tensor> window_partition(const Tensor& seq, int n_window);
Tensor window_merge(const std::vector<Tensor>& windows, long original_len);

// circular shift by N_w/2; unfold reverses it exactly
Tensor shifted_fold(const Tensor& seq, int n_window);
Tensor shifted_unfold(const Tensor& seq, int n_window);

// relative-position bias index maps
Eigen::MatrixXi window_bias_index(int z);                 // b_{j-i}
Eigen::MatrixXi panoptic_bias_index(int z);               // wrapped |j-i|

// multi-head attention with a learnable per-head scalar bias table,
// alpha = QK^T/sqrt(D) + B. key_valid flags exclude padded keys.
Tensor attention_with_bias(const Tensor& x, const Tensor& wq, const Tensor& wk,
                           const Tensor& wv, const Tensor& wo,
                           const Tensor& bias_table, BlockKind kind,
                           int heads,
                           const std::vector<bool>* key_valid = nullptr);

// queries from audio, keys/values from visual, per-head 1/sqrt(S) scaling
Tensor cross_modal_attention(const Tensor& audio, const Tensor& visual,
                             const Tensor& wq, const Tensor& wk,
                             const Tensor& wv, const Tensor& wo, int heads);

// complex self-attention: scores Re(Q K^H)/sqrt(C), real softmax weights
// applied to complex values
CPair complex_self_attention(const CPair& x, const Tensor& wq_r,
                             const Tensor& wq_i, const Tensor& wk_r,
                             const Tensor& wk_i, const Tensor& wv_r,
                             const Tensor& wv_i, const Tensor& wo_r,
                             const Tensor& wo_i);

// linear interpolation of the position axis to target_len rows
Matrix interpolation_matrix(long source_len, long target_len);
Tensor resample_visual(const GeometryFeatures& features, long target_len,
                       const Tensor& proj_w, const Tensor& proj_b);

Tensor conformer_block(const Tensor& audio, const Tensor& visual,
                       const ModelParams& params, const std::string& prefix,
                       BlockKind kind);

// decoder stages in order: crelu, complex conv, complex self-attention,
// complex dense, normalization (which bounds into the compressed domain)
CPair mask_decoder(const Tensor& tokens, const ModelParams& params,
                   std::vector<std::string>* stage_trace = nullptr);
// also yields the pre-bound affine output, equal to decompress(mask)
CPair mask_decoder_with_preimage(const Tensor& tokens,
                                 const ModelParams& params, CPair* preimage,
                                 std::vector<std::string>* stage_trace = nullptr);

struct ModelOutput {
  CPair mask_compressed;  // decoder output, parts bounded in (-K, K)
  CPair estimate;         // decompress(mask) * reverb
};

// Differentiable forward pass. reverb_re/im are T x F constants.
ModelOutput model_forward_t(const Tensor& reverb_re, const Tensor& reverb_im,
                            const GeometryFeatures& features,
                            const ModelParams& params);

// Convenience wrapper on library types (no gradient use).
struct InferenceResult {
  ComplexMask mask_compressed;
  ComplexSpectrogram estimate;
};
InferenceResult model_forward(const ComplexSpectrogram& reverb,
                              const GeometryFeatures& features,
                              const ModelParams& params);

}  // namespace deverb

#endif  // DEVERB_MODEL_HPP
