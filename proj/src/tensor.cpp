// Copyright 2026 The deverb authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#include "deverb/tensor.hpp"

#include <stdexcept>
#include <unordered_set>

namespace deverb {

Tensor Tensor::leaf(Matrix v, bool requires_grad) {
  auto node = std::make_shared<TensorNode>();
  node->value = std::move(v);
  node->requires_grad = requires_grad;
  return from_node(std::move(node));
}

Tensor Tensor::scalar(double v) {
  Matrix m(1, 1);
  m(0, 0) = v;
  return leaf(std::move(m), false);
}

Tensor Tensor::from_node(std::shared_ptr<TensorNode> n) {
  Tensor t;
  t.node_ = std::move(n);
  return t;
}

void backward(const Tensor& loss) {
  if (!loss.defined() || loss.rows() != 1 || loss.cols() != 1)
    throw std::invalid_argument("backward: loss must be a defined 1x1 tensor");

  // Iterative post-order DFS for a topological ordering.
  std::vector<TensorNode*> order;
  std::unordered_set<TensorNode*> visited;
  std::vector<std::pair<TensorNode*, size_t>> stack;
  stack.emplace_back(loss.node().get(), 0);
  visited.insert(loss.node().get());
  while (!stack.empty()) {
    auto& [node, next] = stack.back();
    if (next < node->parents.size()) {
      TensorNode* parent = node->parents[next++].get();
      if (parent->requires_grad && visited.insert(parent).second)
        stack.emplace_back(parent, 0);
    } else {
      order.push_back(node);
      stack.pop_back();
    }
  }

  loss.node()->ensure_grad();
  loss.node()->grad(0, 0) = 1.0;
  for (auto it = order.rbegin(); it != order.rend(); ++it) {
    TensorNode* node = *it;
    if (node->backprop) node->backprop(*node);
  }
}

}  // namespace deverb
