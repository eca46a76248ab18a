// Copyright 2026 The deverb authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#ifndef DEVERB_TENSOR_HPP
#define DEVERB_TENSOR_HPP

#include <Eigen/Dense>
#include <functional>
#include <memory>
#include <string>
#include <vector>

namespace deverb {

using Matrix = Eigen::MatrixXd;

struct TensorNode {
  Matrix value;
  Matrix grad;  // allocated on first use
  bool requires_grad = false;
  std::vector<std::shared_ptr<TensorNode>> parents;
  // Distributes this node's grad into its parents' grads.
  std::function<void(TensorNode&)> backprop;
  const char* op = "leaf";

  void ensure_grad() {
    if (grad.rows() != value.rows() || grad.cols() != value.cols())
      grad = Matrix::Zero(value.rows(), value.cols());
  }
};

// Reverse-mode autodiff handle with shared-node semantics. Graphs are built
// by the ops in nn_ops.hpp; backward() runs the tape in reverse topological
// order.
class Tensor {
 public:
  Tensor() = default;

  static Tensor leaf(Matrix v, bool requires_grad = true);
  static Tensor constant(Matrix v) { return leaf(std::move(v), false); }
  static Tensor scalar(double v);

  bool defined() const { return static_cast<bool>(node_); }
  const Matrix& value() const { return node_->value; }
  Matrix& mutable_value() { return node_->value; }
  Matrix& grad() const {
    node_->ensure_grad();
    return node_->grad;
  }
  bool requires_grad() const { return node_->requires_grad; }
  long rows() const { return node_->value.rows(); }
  long cols() const { return node_->value.cols(); }
  const char* op() const { return node_->op; }
  void zero_grad() { node_->grad.setZero(); }

  std::shared_ptr<TensorNode>& node() { return node_; }
  const std::shared_ptr<TensorNode>& node() const { return node_; }

  static Tensor from_node(std::shared_ptr<TensorNode> n);

 private:
  std::shared_ptr<TensorNode> node_;
};

// Seeds d(loss)/d(loss) = 1 and accumulates exact gradients into every
// reachable node that requires them. loss must be 1x1.
void backward(const Tensor& loss);

}  // namespace deverb

#endif  // DEVERB_TENSOR_HPP
