// Copyright 2026 The deverb authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#ifndef DEVERB_OPTIM_HPP
#define DEVERB_OPTIM_HPP

#include <vector>

#include "deverb/model.hpp"
#include "deverb/tensor.hpp"

namespace deverb {

// Bias-corrected Adam over a stable parameter enumeration.
struct AdamState {
  double lr = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
  long step = 0;
  std::vector<Matrix> m;  // first moments, one per parameter entry
  std::vector<Matrix> v;  // second moments

  static AdamState init(const ModelParams& params, double lr = 1e-3);
};

// params[i] -= lr_t * m_hat / (sqrt(v_hat) + eps); grads must align with the
// parameter enumeration.
void adam_step(ModelParams& params, const std::vector<Matrix>& grads,
               AdamState& state);

}  // namespace deverb

#endif  // DEVERB_OPTIM_HPP
