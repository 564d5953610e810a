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

#ifndef CTXTTS_NN_OPS_H_
#define CTXTTS_NN_OPS_H_

#include <vector>

#include "ctxtts/nn/tensor.h"

namespace ctxtts::nn {

// Arithmetic
Tensor MatMul(const Tensor& a, const Tensor& b);
Tensor Add(const Tensor& a, const Tensor& b);
Tensor Sub(const Tensor& a, const Tensor& b);
Tensor Mul(const Tensor& a, const Tensor& b);
// x + row, with row of shape [1 x cols] broadcast over rows.
Tensor AddRow(const Tensor& x, const Tensor& row);
// x * row elementwise, row broadcast over rows.
Tensor MulRow(const Tensor& x, const Tensor& row);
Tensor Scale(const Tensor& x, double s);
Tensor AddScalar(const Tensor& x, double s);

// Elementwise nonlinearities
Tensor Relu(const Tensor& x);
Tensor LeakyRelu(const Tensor& x, double slope);
Tensor Gelu(const Tensor& x);
Tensor Silu(const Tensor& x);
Tensor Sigmoid(const Tensor& x);
Tensor Tanh(const Tensor& x);
Tensor Exp(const Tensor& x);
Tensor Log(const Tensor& x);
Tensor Sqrt(const Tensor& x);
Tensor Square(const Tensor& x);
Tensor Abs(const Tensor& x);

// Reductions to 1x1
Tensor Sum(const Tensor& x);
Tensor Mean(const Tensor& x);

// Shape manipulation
Tensor Transpose(const Tensor& x);
Tensor SliceRows(const Tensor& x, Eigen::Index start, Eigen::Index count);
Tensor SliceCols(const Tensor& x, Eigen::Index start, Eigen::Index count);
Tensor ConcatRows(const std::vector<Tensor>& parts);
Tensor ConcatCols(const std::vector<Tensor>& parts);
// Row-major reinterpretation.
Tensor Reshape(const Tensor& x, Eigen::Index rows, Eigen::Index cols);
// out.row(i) = x.row(index[i]); a negative index yields a zero row.
Tensor GatherRows(const Tensor& x, const std::vector<int>& index);
// out(r, c) = x.flat(index[r * cols + c]) over row-major storage; a negative
// index yields zero.
Tensor GatherFlat(const Tensor& x, const std::vector<int>& index,
                  Eigen::Index rows, Eigen::Index cols);

// Row-wise normalizers
Tensor Softmax(const Tensor& x);
Tensor LogSoftmax(const Tensor& x);
Tensor LayerNorm(const Tensor& x, const Tensor& gamma, const Tensor& beta,
                 double eps = 1e-5);

// Temporal convolution helpers on [time x channels] inputs.
// im2col: out.row(t) = [x(t*stride + k*dilation - pad_left) for k in kernel],
// zero outside the input.
Tensor Unfold(const Tensor& x, int kernel, int stride, int dilation,
              int pad_left, int pad_right);
// Per-channel convolution with weights [kernel x channels], "same" padding.
Tensor DepthwiseConv1d(const Tensor& x, const Tensor& weight,
                       const Tensor& bias);
// Average pooling with zero padding counted in the window.
Tensor AvgPool1d(const Tensor& x, int kernel, int stride, int pad);
// Inserts factor-1 zero rows after every input row.
Tensor ZeroStuff(const Tensor& x, int factor);

}  // namespace ctxtts::nn

#endif  // CTXTTS_NN_OPS_H_
