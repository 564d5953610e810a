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

#include <gtest/gtest.h>

#include <functional>
#include <string>

#include "ctxtts/nn/layers.h"
#include "ctxtts/nn/ops.h"
#include "ctxtts/nn/optim.h"
#include "gradcheck.h"

namespace ctxtts::nn {
namespace {

Tensor RandomParam(int rows, int cols, Rng& rng) {
  return Tensor(NormalInit(rows, cols, 1.0, rng), true);
}

// Weighted sum so every output entry gets a distinct upstream gradient.
Tensor Probe(const Tensor& y, uint64_t seed) {
  Rng rng(seed);
  Tensor w(NormalInit(y.rows(), y.cols(), 1.0, rng));
  return Sum(Mul(y, w));
}

void ExpectGradOk(const std::string& what, const std::function<Tensor()>& f,
                  Tensor p) {
  Rng rng(7);
  auto r = testing::CheckGradient(f, p, 40, rng);
  EXPECT_LT(r.slice_rel_error, 1e-6) << what;
}

TEST(NnOpsTest, UnaryAndBinaryGradients) {
  Rng rng(1);
  Tensor a = RandomParam(4, 5, rng);
  Tensor b = RandomParam(4, 5, rng);
  Tensor c = RandomParam(5, 3, rng);
  Tensor row = RandomParam(1, 5, rng);
  ExpectGradOk("matmul", [&] { return Probe(MatMul(a, c), 1); }, a);
  ExpectGradOk("matmul rhs", [&] { return Probe(MatMul(a, c), 1); }, c);
  ExpectGradOk("mul", [&] { return Probe(Mul(a, b), 2); }, b);
  ExpectGradOk("sub", [&] { return Probe(Sub(a, b), 2); }, b);
  ExpectGradOk("addrow", [&] { return Probe(AddRow(a, row), 3); }, row);
  ExpectGradOk("mulrow", [&] { return Probe(MulRow(a, row), 3); }, row);
  ExpectGradOk("gelu", [&] { return Probe(Gelu(a), 4); }, a);
  ExpectGradOk("silu", [&] { return Probe(Silu(a), 4); }, a);
  ExpectGradOk("sigmoid", [&] { return Probe(Sigmoid(a), 4); }, a);
  ExpectGradOk("tanh", [&] { return Probe(Tanh(a), 4); }, a);
  ExpectGradOk("exp", [&] { return Probe(Exp(a), 4); }, a);
  ExpectGradOk("log", [&] { return Probe(Log(AddScalar(Square(a), 1.0)), 4); }, a);
  ExpectGradOk("sqrt", [&] { return Probe(Sqrt(AddScalar(Square(a), 0.5)), 4); }, a);
  ExpectGradOk("mean", [&] { return Mean(Square(a)); }, a);
  ExpectGradOk("transpose", [&] { return Probe(Transpose(a), 5); }, a);
}

TEST(NnOpsTest, NormalizerGradients) {
  Rng rng(2);
  Tensor x = RandomParam(6, 8, rng);
  Tensor gamma = RandomParam(1, 8, rng);
  Tensor beta = RandomParam(1, 8, rng);
  ExpectGradOk("softmax", [&] { return Probe(Softmax(x), 1); }, x);
  ExpectGradOk("logsoftmax", [&] { return Probe(LogSoftmax(x), 1); }, x);
  ExpectGradOk("layernorm x", [&] { return Probe(LayerNorm(x, gamma, beta), 2); }, x);
  ExpectGradOk("layernorm gamma", [&] { return Probe(LayerNorm(x, gamma, beta), 2); }, gamma);
  ExpectGradOk("layernorm beta", [&] { return Probe(LayerNorm(x, gamma, beta), 2); }, beta);
}

TEST(NnOpsTest, StructuralGradients) {
  Rng rng(3);
  Tensor x = RandomParam(10, 3, rng);
  ExpectGradOk("slice rows", [&] { return Probe(SliceRows(x, 2, 5), 1); }, x);
  ExpectGradOk("slice cols", [&] { return Probe(SliceCols(x, 1, 2), 1); }, x);
  ExpectGradOk("concat", [&] {
    return Probe(ConcatRows({SliceRows(x, 0, 3), x}), 2);
  }, x);
  ExpectGradOk("concat cols", [&] { return Probe(ConcatCols({x, x}), 2); }, x);
  ExpectGradOk("reshape", [&] { return Probe(Reshape(x, 5, 6), 3); }, x);
  ExpectGradOk("gather rows", [&] {
    return Probe(GatherRows(x, {0, 0, -1, 9, 4}), 4);
  }, x);
  ExpectGradOk("gather flat", [&] {
    return Probe(GatherFlat(x, {0, 29, -1, 3, 3, 7}, 2, 3), 5);
  }, x);
  ExpectGradOk("unfold", [&] { return Probe(Unfold(x, 3, 2, 2, 2, 1), 6); }, x);
  ExpectGradOk("avgpool", [&] { return Probe(AvgPool1d(x, 4, 2, 2), 7); }, x);
  ExpectGradOk("zerostuff", [&] { return Probe(ZeroStuff(x, 3), 8); }, x);
  Tensor w = RandomParam(5, 3, rng);
  Tensor b = RandomParam(1, 3, rng);
  ExpectGradOk("depthwise x", [&] { return Probe(DepthwiseConv1d(x, w, b), 9); }, x);
  ExpectGradOk("depthwise w", [&] { return Probe(DepthwiseConv1d(x, w, b), 9); }, w);
}

TEST(NnOpsTest, UnfoldMatchesDirectConvolution) {
  Rng rng(4);
  Conv1d conv(2, 3, {.kernel = 3, .stride = 1, .dilation = 2}, rng);
  Tensor x(NormalInit(7, 2, 1.0, rng));
  Tensor y = conv.Forward(x);
  ASSERT_EQ(y.rows(), 7);
  auto params = conv.NamedParameters();
  const Matrix& w = params[0].second.value();
  const Matrix& bias = params[1].second.value();
  for (int t = 0; t < 7; ++t) {
    for (int o = 0; o < 3; ++o) {
      double acc = bias(0, o);
      for (int k = 0; k < 3; ++k) {
        const int src = t + 2 * k - 2;
        if (src < 0 || src >= 7) continue;
        for (int c = 0; c < 2; ++c) acc += w(k * 2 + c, o) * x.value()(src, c);
      }
      EXPECT_NEAR(y.value()(t, o), acc, 1e-12);
    }
  }
}

TEST(NnOpsTest, AttentionIgnoresKeyOrder) {
  Rng rng(5);
  MultiHeadAttention attn(8, 2, rng);
  Tensor q(NormalInit(4, 8, 1.0, rng));
  Matrix kv = NormalInit(6, 8, 1.0, rng);
  Matrix shuffled = kv;
  shuffled.row(0).swap(shuffled.row(5));
  shuffled.row(2).swap(shuffled.row(3));
  Tensor a = attn.Forward(q, Tensor(kv));
  Tensor b = attn.Forward(q, Tensor(shuffled));
  EXPECT_LT((a.value() - b.value()).norm(), 1e-12);
}

TEST(NnOpsTest, NoGradGuardSkipsGraph) {
  Rng rng(6);
  Tensor p = RandomParam(2, 2, rng);
  NoGradGuard guard;
  Tensor y = MatMul(p, p);
  EXPECT_FALSE(y.requires_grad());
}

TEST(NnOpsTest, AdamReducesQuadratic) {
  Rng rng(8);
  Tensor p = RandomParam(3, 3, rng);
  Adam opt({p}, {.lr = 0.05});
  double first = 0.0, last = 0.0;
  for (int i = 0; i < 200; ++i) {
    Tensor loss = Sum(Square(p));
    if (i == 0) first = loss.item();
    last = loss.item();
    loss.Backward();
    opt.Step();
  }
  EXPECT_LT(last, 1e-3 * first);
}

}  // namespace
}  // namespace ctxtts::nn
