// Copyright 2026 The deverb authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#ifndef DEVERB_LOSSES_HPP
#define DEVERB_LOSSES_HPP

#include <vector>

#include "deverb/model.hpp"
#include "deverb/nn_ops.hpp"
#include "deverb/tensor.hpp"
#include "deverb/tokens.hpp"

namespace deverb {

struct LossWeights {
  double lambda = 1.0;  // spectrogram prediction
  double mu = 0.1;      // acoustic token matching
};

// Mean squared error over stacked real and imaginary parts, restricted to
// valid (non-floored) bins: sum over valid bins of |pred-clean|^2 divided by
// 2 * n_valid.
Tensor spectrogram_loss(const CPair& pred, const Matrix& clean_re,
                        const Matrix& clean_im,
                        const Eigen::Matrix<bool, Eigen::Dynamic,
                                            Eigen::Dynamic>& valid,
                        bool magnitude_only = false);

// Mean cross-entropy of the linear-softmax classifier on the estimated
// waveform's latents against pseudo-labels from the clean waveform.
// Sequences are trimmed to the shorter length.
Tensor atm_loss(const Tensor& est_wave, const std::vector<int>& labels,
                const PseudoLabeler& labeler, const Tensor& classifier_w,
                const Tensor& classifier_b);

Tensor total_loss(const Tensor& sp, const Tensor& atm, const LossWeights& w);

}  // namespace deverb

#endif  // DEVERB_LOSSES_HPP
