// Copyright 2026 The deverb authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#include "deverb/losses.hpp"

#include <stdexcept>

namespace deverb {

Tensor spectrogram_loss(const CPair& pred, const Matrix& clean_re,
                        const Matrix& clean_im,
                        const Eigen::Matrix<bool, Eigen::Dynamic,
                                            Eigen::Dynamic>& valid,
                        bool magnitude_only) {
  if (pred.re.rows() != clean_re.rows() || pred.re.cols() != clean_re.cols())
    throw std::invalid_argument("spectrogram_loss: shape mismatch");
  if (valid.rows() != clean_re.rows() || valid.cols() != clean_re.cols())
    throw std::invalid_argument("spectrogram_loss: valid-mask shape mismatch");

  Matrix mask(valid.rows(), valid.cols());
  long n_valid = 0;
  for (long i = 0; i < valid.rows(); ++i)
    for (long j = 0; j < valid.cols(); ++j) {
      mask(i, j) = valid(i, j) ? 1.0 : 0.0;
      if (valid(i, j)) ++n_valid;
    }
  if (n_valid == 0)
    throw std::invalid_argument("spectrogram_loss: no valid bins");
  Tensor mask_t = Tensor::constant(mask);

  if (magnitude_only) {
    Tensor pred_mag =
        sqrt_t(add(mul(pred.re, pred.re), mul(pred.im, pred.im)), 1e-12);
    Matrix clean_mag =
        (clean_re.array().square() + clean_im.array().square() + 1e-12)
            .sqrt()
            .matrix();
    Tensor diff = mul(sub(pred_mag, Tensor::constant(clean_mag)), mask_t);
    return scale(sum_all(mul(diff, diff)), 1.0 / static_cast<double>(n_valid));
  }

  Tensor dr = mul(sub(pred.re, Tensor::constant(clean_re)), mask_t);
  Tensor di = mul(sub(pred.im, Tensor::constant(clean_im)), mask_t);
  Tensor sum = add(sum_all(mul(dr, dr)), sum_all(mul(di, di)));
  return scale(sum, 1.0 / (2.0 * static_cast<double>(n_valid)));
}

Tensor atm_loss(const Tensor& est_wave, const std::vector<int>& labels,
                const PseudoLabeler& labeler, const Tensor& classifier_w,
                const Tensor& classifier_b) {
  Tensor latents = labeler.encode(est_wave);
  const long j_est = latents.rows();
  const long j_lab = static_cast<long>(labels.size());
  const long j = std::min(j_est, j_lab);
  if (j < 1) throw std::invalid_argument("atm_loss: empty label overlap");

  Tensor trimmed = j == j_est ? latents : rows_slice(latents, 0, j);
  std::vector<int> trimmed_labels(labels.begin(), labels.begin() + j);
  Tensor logits =
      add_rowvec(matmul(trimmed, classifier_w), classifier_b);
  return cross_entropy_rows(logits, trimmed_labels);
}

Tensor total_loss(const Tensor& sp, const Tensor& atm, const LossWeights& w) {
  if (w.lambda < 0.0 || w.mu < 0.0)
    throw std::invalid_argument("total_loss: weights must be nonnegative");
  return add(scale(sp, w.lambda), scale(atm, w.mu));
}

}  // namespace deverb
