// Copyright (c) 2026 ctxtts Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//   http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef CTXTTS_NN_TENSOR_H_
#define CTXTTS_NN_TENSOR_H_

#include <Eigen/Dense>

#include <functional>
#include <memory>
#include <vector>

namespace ctxtts::nn {

// Sequences are stored time-major: one row per frame, one column per channel.
using Matrix =
    Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

// A vertex of the dynamically recorded computation graph.
struct Node {
  Matrix value;
  Matrix grad;  // empty until something flows into it
  bool requires_grad = false;
  std::vector<std::shared_ptr<Node>> parents;
  // Reads this node's grad and accumulates into the parents' grads.
  std::function<void(Node& self)> backward;

  template <typename Derived>
  void Accumulate(const Eigen::MatrixBase<Derived>& g) {
    if (!requires_grad) return;
    if (grad.size() == 0) {
      grad = g;
    } else {
      grad += g;
    }
  }
};

// Handle to a graph node. Copies share the node.
class Tensor {
 public:
  Tensor() = default;
  explicit Tensor(Matrix value, bool requires_grad = false);

  static Tensor Zeros(Eigen::Index rows, Eigen::Index cols) {
    return Tensor(Matrix::Zero(rows, cols));
  }
  static Tensor Scalar(double v) { return Tensor(Matrix::Constant(1, 1, v)); }

  bool defined() const { return node_ != nullptr; }
  const Matrix& value() const { return node_->value; }
  Matrix& mutable_value() { return node_->value; }
  const Matrix& grad() const { return node_->grad; }
  Matrix& mutable_grad() { return node_->grad; }
  Eigen::Index rows() const { return node_->value.rows(); }
  Eigen::Index cols() const { return node_->value.cols(); }
  double item() const;
  bool requires_grad() const { return node_ && node_->requires_grad; }

  // Reverse-mode sweep from a 1x1 tensor. Leaf gradients accumulate until
  // ZeroGrad(); intermediate gradients are released after use.
  void Backward() const;
  void ZeroGrad() { node_->grad.resize(0, 0); }
  Tensor Detach() const { return Tensor(node_->value); }

  const std::shared_ptr<Node>& node() const { return node_; }

  // Builds an op result. Graph edges are recorded only when gradients are
  // enabled and at least one parent requires them.
  static Tensor FromOp(Matrix value, std::vector<Tensor> parents,
                       std::function<void(Node& self)> backward);

 private:
  std::shared_ptr<Node> node_;
};

// Disables graph recording on this thread for its lifetime.
class NoGradGuard {
 public:
  NoGradGuard();
  ~NoGradGuard();
  NoGradGuard(const NoGradGuard&) = delete;
  NoGradGuard& operator=(const NoGradGuard&) = delete;

 private:
  bool previous_;
};

bool GradEnabled();

}  // namespace ctxtts::nn

#endif  // CTXTTS_NN_TENSOR_H_
