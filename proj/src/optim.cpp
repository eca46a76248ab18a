// Copyright 2026 The deverb authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#include "deverb/optim.hpp"

#include <cmath>
#include <stdexcept>

namespace deverb {

AdamState AdamState::init(const ModelParams& params, double lr) {
  AdamState state;
  state.lr = lr;
  state.m.reserve(params.entries().size());
  state.v.reserve(params.entries().size());
  for (const auto& [name, tensor] : params.entries()) {
    state.m.push_back(Matrix::Zero(tensor.rows(), tensor.cols()));
    state.v.push_back(Matrix::Zero(tensor.rows(), tensor.cols()));
  }
  return state;
}

void adam_step(ModelParams& params, const std::vector<Matrix>& grads,
               AdamState& state) {
  const auto& entries = params.entries();
  if (grads.size() != entries.size() || state.m.size() != entries.size())
    throw std::invalid_argument("adam_step: entry count mismatch");

  state.step += 1;
  const double bc1 = 1.0 - std::pow(state.beta1, state.step);
  const double bc2 = 1.0 - std::pow(state.beta2, state.step);

  for (size_t i = 0; i < entries.size(); ++i) {
    const Matrix& g = grads[i];
    Tensor param = entries[i].second;
    if (g.rows() != param.rows() || g.cols() != param.cols())
      throw std::invalid_argument("adam_step: gradient shape mismatch for " +
                                  entries[i].first);
    state.m[i] = state.beta1 * state.m[i] + (1.0 - state.beta1) * g;
    state.v[i] =
        (state.beta2 * state.v[i].array() + (1.0 - state.beta2) * g.array().square())
            .matrix();
    const Eigen::ArrayXXd m_hat = state.m[i].array() / bc1;
    const Eigen::ArrayXXd v_hat = state.v[i].array() / bc2;
    param.mutable_value().array() -=
        state.lr * m_hat / (v_hat.sqrt() + state.eps);
  }
}

}  // namespace deverb
