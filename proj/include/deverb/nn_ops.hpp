// Copyright 2026 The deverb authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#ifndef DEVERB_NN_OPS_HPP
#define DEVERB_NN_OPS_HPP

#include <vector>

#include "deverb/stft.hpp"
#include "deverb/tensor.hpp"

namespace deverb {

// elementwise / arithmetic
Tensor add(const Tensor& a, const Tensor& b);
Tensor sub(const Tensor& a, const Tensor& b);
Tensor mul(const Tensor& a, const Tensor& b);
Tensor scale(const Tensor& a, double c);
Tensor relu(const Tensor& x);
Tensor tanh_t(const Tensor& x);
Tensor sigmoid(const Tensor& x);
// log(max(x, floor)); zero slope where clamped
Tensor log_clamped(const Tensor& x, double floor);
// sqrt(x + eps)
Tensor sqrt_t(const Tensor& x, double eps = 0.0);
// K * tanh(x / K): bounded compression into (-K, K)
Tensor scaled_tanh(const Tensor& x, double k);
// K * atanh(x / K): exact inverse of scaled_tanh on (-K, K); the argument is
// clamped just inside the open interval for numerical safety
Tensor scaled_atanh(const Tensor& x, double k);

// linear algebra
Tensor matmul(const Tensor& a, const Tensor& b);
Tensor transpose(const Tensor& a);

// broadcasting over rows (v is 1 x D)
Tensor add_rowvec(const Tensor& x, const Tensor& v);
Tensor mul_rowvec(const Tensor& x, const Tensor& v);

// reductions
Tensor sum_all(const Tensor& x);
Tensor mean_all(const Tensor& x);

// shape ops
Tensor rows_slice(const Tensor& x, long r0, long n);
Tensor cols_slice(const Tensor& x, long c0, long n);
Tensor concat_rows(const std::vector<Tensor>& parts);
Tensor concat_cols(const std::vector<Tensor>& parts);
Tensor pad_rows(const Tensor& x, long total_rows);
// circular shift: row i of x lands on row (i + shift) mod Z
Tensor roll_rows(const Tensor& x, long shift);

// row-wise softmax; optional constant additive mask (e.g. -1e30 to exclude
// padded keys)
Tensor softmax_rows(const Tensor& x, const Matrix* additive_mask = nullptr);

// row-wise normalization to zero mean / unit variance (no affine part)
Tensor layernorm_rows(const Tensor& x, double eps = 1e-6);

// depthwise 1D convolution along rows (time); w is K x D with odd K,
// zero-padded "same" output
Tensor conv1d_depthwise(const Tensor& x, const Tensor& w);

// y(i,j) = table(0, idx(i,j)); adjoint scatters into the table
Tensor gather_matrix(const Tensor& table, const Eigen::MatrixXi& idx);

// mean cross-entropy of row-wise softmax(logits) against integer labels
Tensor cross_entropy_rows(const Tensor& logits, const std::vector<int>& labels);

// --- structured signal ops (linear maps with FFT-based adjoints) ---

// wave (1 x L) -> frames (T x win_len), strided windowed gather with zero
// right-padding; T = stft_frame_count(L, cfg)
Tensor frames_gather(const Tensor& wave, const StftConfig& cfg);

// frames (T x win_len) -> [Re | Im] one-sided spectra (T x 2F)
Tensor rfft_frames(const Tensor& frames, const StftConfig& cfg);

// (re, im) spectrogram tensors (T x F each) -> waveform (1 x out_len) via
// normalized overlap-add synthesis
Tensor istft_wave(const Tensor& re, const Tensor& im, const StftConfig& cfg,
                  long out_len);

}  // namespace deverb

#endif  // DEVERB_NN_OPS_HPP
