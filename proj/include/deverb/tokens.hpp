// Copyright 2026 The deverb authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#ifndef DEVERB_TOKENS_HPP
#define DEVERB_TOKENS_HPP

#include <cstdint>
#include <vector>

#include "deverb/nn_ops.hpp"
#include "deverb/stft.hpp"
#include "deverb/tensor.hpp"
#include "deverb/waveform.hpp"

namespace deverb {

// Frozen acoustic encoder: log-mel filterbank (25 ms / 10 ms), 3-frame
// stacking, and a fixed seeded orthogonal projection to latent_dim.
// Deterministic per seed and differentiable w.r.t. the waveform.
class PseudoLabeler {
 public:
  PseudoLabeler(int n_mels = 40, int stack = 3, int latent_dim = 32,
                int k = 50, uint64_t encoder_seed = 1234,
                const StftConfig& cfg = StftConfig::defaults());

  // J x latent_dim latents; J = frame count - (stack - 1)
  Tensor encode(const Tensor& wave) const;
  Matrix encode(const Waveform& wave) const;

  // Lloyd's algorithm with seeded distinct-point init; empty clusters are
  // re-seeded from the farthest point. Throws with fewer than K distinct rows.
  void fit(const Matrix& latents, uint64_t seed, int max_iters = 50);
  void set_centroids(Matrix centroids);

  // nearest-centroid index per latent row of the clean waveform; ties break
  // to the lowest index
  std::vector<int> pseudo_labels(const Waveform& clean) const;
  std::vector<int> assign(const Matrix& latents) const;

  bool fitted() const { return fitted_; }
  const Matrix& centroids() const;
  int n_mels() const { return n_mels_; }
  int stack() const { return stack_; }
  int latent_dim() const { return latent_dim_; }
  int clusters() const { return k_; }
  uint64_t encoder_seed() const { return encoder_seed_; }
  const StftConfig& stft_config() const { return cfg_; }

  double inertia(const Matrix& latents) const;

 private:
  int n_mels_, stack_, latent_dim_, k_;
  uint64_t encoder_seed_;
  StftConfig cfg_;
  Matrix mel_;         // F x M triangular filters
  Matrix projection_;  // (stack*M) x latent_dim, orthonormal columns
  Matrix centroids_;   // K x latent_dim
  bool fitted_ = false;
};

// Standalone K-means for tests and fitting pipelines.
Matrix kmeans_fit(const Matrix& points, int k, uint64_t seed,
                  int max_iters = 50);

// Triangular mel filterbank, bins x n_mels, 0..fs/2.
Matrix mel_filterbank(int bins, int n_mels, int sample_rate_hz, int fft_size);

}  // namespace deverb

#endif  // DEVERB_TOKENS_HPP
