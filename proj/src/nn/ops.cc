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

#include "ctxtts/nn/ops.h"

#include <cmath>
#include <string>

#include "ctxtts/common/error.h"

namespace ctxtts::nn {

namespace {

void CheckSameShape(const Tensor& a, const Tensor& b, const char* op) {
  CTXTTS_CHECK(a.rows() == b.rows() && a.cols() == b.cols(),
               errc::kLengthMismatch,
               std::string(op) + ": shape mismatch " + std::to_string(a.rows()) +
                   "x" + std::to_string(a.cols()) + " vs " +
                   std::to_string(b.rows()) + "x" + std::to_string(b.cols()));
}

Node& Parent(Node& self, size_t i) { return *self.parents[i]; }

}  // namespace

Tensor MatMul(const Tensor& a, const Tensor& b) {
  CTXTTS_CHECK(a.cols() == b.rows(), errc::kLengthMismatch,
               "MatMul: inner dimensions differ");
  Matrix out = a.value() * b.value();
  return Tensor::FromOp(std::move(out), {a, b}, [](Node& self) {
    Node& pa = Parent(self, 0);
    Node& pb = Parent(self, 1);
    if (pa.requires_grad) pa.Accumulate(self.grad * pb.value.transpose());
    if (pb.requires_grad) pb.Accumulate(pa.value.transpose() * self.grad);
  });
}

Tensor Add(const Tensor& a, const Tensor& b) {
  CheckSameShape(a, b, "Add");
  return Tensor::FromOp(a.value() + b.value(), {a, b}, [](Node& self) {
    Parent(self, 0).Accumulate(self.grad);
    Parent(self, 1).Accumulate(self.grad);
  });
}

Tensor Sub(const Tensor& a, const Tensor& b) {
  CheckSameShape(a, b, "Sub");
  return Tensor::FromOp(a.value() - b.value(), {a, b}, [](Node& self) {
    Parent(self, 0).Accumulate(self.grad);
    Parent(self, 1).Accumulate(-self.grad);
  });
}

Tensor Mul(const Tensor& a, const Tensor& b) {
  CheckSameShape(a, b, "Mul");
  Matrix out = a.value().cwiseProduct(b.value());
  return Tensor::FromOp(std::move(out), {a, b}, [](Node& self) {
    Node& pa = Parent(self, 0);
    Node& pb = Parent(self, 1);
    if (pa.requires_grad) pa.Accumulate(self.grad.cwiseProduct(pb.value));
    if (pb.requires_grad) pb.Accumulate(self.grad.cwiseProduct(pa.value));
  });
}

Tensor AddRow(const Tensor& x, const Tensor& row) {
  CTXTTS_CHECK(row.rows() == 1 && row.cols() == x.cols(),
               errc::kLengthMismatch, "AddRow: row must be [1 x cols]");
  Matrix out = x.value().rowwise() + row.value().row(0);
  return Tensor::FromOp(std::move(out), {x, row}, [](Node& self) {
    Parent(self, 0).Accumulate(self.grad);
    Node& pr = Parent(self, 1);
    if (pr.requires_grad) pr.Accumulate(self.grad.colwise().sum());
  });
}

Tensor MulRow(const Tensor& x, const Tensor& row) {
  CTXTTS_CHECK(row.rows() == 1 && row.cols() == x.cols(),
               errc::kLengthMismatch, "MulRow: row must be [1 x cols]");
  Matrix out = x.value().array().rowwise() * row.value().row(0).array();
  return Tensor::FromOp(std::move(out), {x, row}, [](Node& self) {
    Node& px = Parent(self, 0);
    Node& pr = Parent(self, 1);
    if (px.requires_grad) {
      Matrix g = self.grad.array().rowwise() * pr.value.row(0).array();
      px.Accumulate(g);
    }
    if (pr.requires_grad) {
      pr.Accumulate(self.grad.cwiseProduct(px.value).colwise().sum());
    }
  });
}

Tensor Scale(const Tensor& x, double s) {
  return Tensor::FromOp(x.value() * s, {x}, [s](Node& self) {
    Parent(self, 0).Accumulate(self.grad * s);
  });
}

Tensor AddScalar(const Tensor& x, double s) {
  Matrix out = x.value().array() + s;
  return Tensor::FromOp(std::move(out), {x}, [](Node& self) {
    Parent(self, 0).Accumulate(self.grad);
  });
}

Tensor Relu(const Tensor& x) {
  Matrix out = x.value().cwiseMax(0.0);
  return Tensor::FromOp(std::move(out), {x}, [](Node& self) {
    Node& px = Parent(self, 0);
    Matrix g = (px.value.array() > 0.0).select(self.grad, 0.0);
    px.Accumulate(g);
  });
}

Tensor LeakyRelu(const Tensor& x, double slope) {
  Matrix out = (x.value().array() > 0.0)
                   .select(x.value(), x.value() * slope);
  return Tensor::FromOp(std::move(out), {x}, [slope](Node& self) {
    Node& px = Parent(self, 0);
    Matrix g = (px.value.array() > 0.0).select(self.grad, self.grad * slope);
    px.Accumulate(g);
  });
}

namespace {
constexpr double kGeluC = 0.7978845608028654;  // sqrt(2/pi)
constexpr double kGeluA = 0.044715;
}  // namespace

Tensor Gelu(const Tensor& x) {
  constexpr double kC = kGeluC;
  constexpr double kA = kGeluA;
  const auto& v = x.value().array();
  Eigen::ArrayXXd inner = kC * (v + kA * v.cube());
  Matrix out = 0.5 * v * (1.0 + inner.tanh());
  return Tensor::FromOp(std::move(out), {x}, [](Node& self) {
    Node& px = Parent(self, 0);
    const auto& v = px.value.array();
    Eigen::ArrayXXd t = (kGeluC * (v + kGeluA * v.cube())).tanh();
    Eigen::ArrayXXd d = 0.5 * (1.0 + t) +
                        0.5 * v * (1.0 - t.square()) * kGeluC *
                            (1.0 + 3.0 * kGeluA * v.square());
    Matrix g = self.grad.array() * d;
    px.Accumulate(g);
  });
}

Tensor Silu(const Tensor& x) {
  Eigen::ArrayXXd sig = 1.0 / (1.0 + (-x.value().array()).exp());
  Matrix out = x.value().array() * sig;
  return Tensor::FromOp(std::move(out), {x}, [](Node& self) {
    Node& px = Parent(self, 0);
    Eigen::ArrayXXd s = 1.0 / (1.0 + (-px.value.array()).exp());
    Matrix g =
        self.grad.array() * (s * (1.0 + px.value.array() * (1.0 - s)));
    px.Accumulate(g);
  });
}

Tensor Sigmoid(const Tensor& x) {
  Matrix out = 1.0 / (1.0 + (-x.value().array()).exp());
  return Tensor::FromOp(std::move(out), {x}, [](Node& self) {
    Matrix g =
        self.grad.array() * self.value.array() * (1.0 - self.value.array());
    Parent(self, 0).Accumulate(g);
  });
}

Tensor Tanh(const Tensor& x) {
  Matrix out = x.value().array().tanh();
  return Tensor::FromOp(std::move(out), {x}, [](Node& self) {
    Matrix g = self.grad.array() * (1.0 - self.value.array().square());
    Parent(self, 0).Accumulate(g);
  });
}

Tensor Exp(const Tensor& x) {
  Matrix out = x.value().array().exp();
  return Tensor::FromOp(std::move(out), {x}, [](Node& self) {
    Parent(self, 0).Accumulate(self.grad.cwiseProduct(self.value));
  });
}

Tensor Log(const Tensor& x) {
  Matrix out = x.value().array().log();
  return Tensor::FromOp(std::move(out), {x}, [](Node& self) {
    Node& px = Parent(self, 0);
    px.Accumulate(self.grad.cwiseQuotient(px.value));
  });
}

Tensor Sqrt(const Tensor& x) {
  Matrix out = x.value().array().sqrt();
  return Tensor::FromOp(std::move(out), {x}, [](Node& self) {
    Matrix g = 0.5 * self.grad.array() / self.value.array();
    Parent(self, 0).Accumulate(g);
  });
}

Tensor Square(const Tensor& x) {
  Matrix out = x.value().array().square();
  return Tensor::FromOp(std::move(out), {x}, [](Node& self) {
    Node& px = Parent(self, 0);
    px.Accumulate(2.0 * self.grad.cwiseProduct(px.value));
  });
}

Tensor Abs(const Tensor& x) {
  Matrix out = x.value().cwiseAbs();
  return Tensor::FromOp(std::move(out), {x}, [](Node& self) {
    Node& px = Parent(self, 0);
    Matrix g = self.grad.array() * px.value.array().sign();
    px.Accumulate(g);
  });
}

Tensor Sum(const Tensor& x) {
  Matrix out = Matrix::Constant(1, 1, x.value().sum());
  return Tensor::FromOp(std::move(out), {x}, [](Node& self) {
    Node& px = Parent(self, 0);
    px.Accumulate(
        Matrix::Constant(px.value.rows(), px.value.cols(), self.grad(0, 0)));
  });
}

Tensor Mean(const Tensor& x) {
  const double n = static_cast<double>(x.value().size());
  CTXTTS_CHECK(n > 0, errc::kInvalidArgument, "Mean of empty tensor");
  Matrix out = Matrix::Constant(1, 1, x.value().sum() / n);
  return Tensor::FromOp(std::move(out), {x}, [n](Node& self) {
    Node& px = Parent(self, 0);
    px.Accumulate(Matrix::Constant(px.value.rows(), px.value.cols(),
                                   self.grad(0, 0) / n));
  });
}

Tensor Transpose(const Tensor& x) {
  Matrix out = x.value().transpose();
  return Tensor::FromOp(std::move(out), {x}, [](Node& self) {
    Parent(self, 0).Accumulate(self.grad.transpose());
  });
}

Tensor SliceRows(const Tensor& x, Eigen::Index start, Eigen::Index count) {
  CTXTTS_CHECK(start >= 0 && count >= 0 && start + count <= x.rows(),
               errc::kInvalidArgument, "SliceRows: out of range");
  Matrix out = x.value().middleRows(start, count);
  return Tensor::FromOp(std::move(out), {x}, [start, count](Node& self) {
    Node& px = Parent(self, 0);
    if (!px.requires_grad) return;
    if (px.grad.size() == 0) px.grad = Matrix::Zero(px.value.rows(), px.value.cols());
    px.grad.middleRows(start, count) += self.grad;
  });
}

Tensor SliceCols(const Tensor& x, Eigen::Index start, Eigen::Index count) {
  CTXTTS_CHECK(start >= 0 && count >= 0 && start + count <= x.cols(),
               errc::kInvalidArgument, "SliceCols: out of range");
  Matrix out = x.value().middleCols(start, count);
  return Tensor::FromOp(std::move(out), {x}, [start, count](Node& self) {
    Node& px = Parent(self, 0);
    if (!px.requires_grad) return;
    if (px.grad.size() == 0) px.grad = Matrix::Zero(px.value.rows(), px.value.cols());
    px.grad.middleCols(start, count) += self.grad;
  });
}

Tensor ConcatRows(const std::vector<Tensor>& parts) {
  CTXTTS_CHECK(!parts.empty(), errc::kInvalidArgument, "ConcatRows: no parts");
  const Eigen::Index cols = parts.front().cols();
  Eigen::Index rows = 0;
  for (const auto& p : parts) {
    CTXTTS_CHECK(p.cols() == cols, errc::kLengthMismatch,
                 "ConcatRows: column mismatch");
    rows += p.rows();
  }
  Matrix out(rows, cols);
  Eigen::Index r = 0;
  for (const auto& p : parts) {
    out.middleRows(r, p.rows()) = p.value();
    r += p.rows();
  }
  return Tensor::FromOp(std::move(out), parts, [](Node& self) {
    Eigen::Index r = 0;
    for (auto& p : self.parents) {
      const Eigen::Index n = p->value.rows();
      if (p->requires_grad) p->Accumulate(self.grad.middleRows(r, n));
      r += n;
    }
  });
}

Tensor ConcatCols(const std::vector<Tensor>& parts) {
  CTXTTS_CHECK(!parts.empty(), errc::kInvalidArgument, "ConcatCols: no parts");
  const Eigen::Index rows = parts.front().rows();
  Eigen::Index cols = 0;
  for (const auto& p : parts) {
    CTXTTS_CHECK(p.rows() == rows, errc::kLengthMismatch,
                 "ConcatCols: row mismatch");
    cols += p.cols();
  }
  Matrix out(rows, cols);
  Eigen::Index c = 0;
  for (const auto& p : parts) {
    out.middleCols(c, p.cols()) = p.value();
    c += p.cols();
  }
  return Tensor::FromOp(std::move(out), parts, [](Node& self) {
    Eigen::Index c = 0;
    for (auto& p : self.parents) {
      const Eigen::Index n = p->value.cols();
      if (p->requires_grad) p->Accumulate(self.grad.middleCols(c, n));
      c += n;
    }
  });
}

Tensor Reshape(const Tensor& x, Eigen::Index rows, Eigen::Index cols) {
  CTXTTS_CHECK(rows * cols == x.value().size(), errc::kInvalidArgument,
               "Reshape: element count changes");
  Matrix out = Eigen::Map<const Matrix>(x.value().data(), rows, cols);
  return Tensor::FromOp(std::move(out), {x}, [](Node& self) {
    Node& px = Parent(self, 0);
    px.Accumulate(Eigen::Map<const Matrix>(self.grad.data(), px.value.rows(),
                                           px.value.cols()));
  });
}

Tensor GatherRows(const Tensor& x, const std::vector<int>& index) {
  const auto n = static_cast<Eigen::Index>(index.size());
  Matrix out = Matrix::Zero(n, x.cols());
  for (Eigen::Index i = 0; i < n; ++i) {
    const int src = index[i];
    if (src < 0) continue;
    CTXTTS_CHECK(src < x.rows(), errc::kInvalidArgument,
                 "GatherRows: index out of range");
    out.row(i) = x.value().row(src);
  }
  return Tensor::FromOp(std::move(out), {x}, [index](Node& self) {
    Node& px = Parent(self, 0);
    if (!px.requires_grad) return;
    if (px.grad.size() == 0) px.grad = Matrix::Zero(px.value.rows(), px.value.cols());
    for (size_t i = 0; i < index.size(); ++i) {
      if (index[i] >= 0) px.grad.row(index[i]) += self.grad.row(i);
    }
  });
}

Tensor GatherFlat(const Tensor& x, const std::vector<int>& index,
                  Eigen::Index rows, Eigen::Index cols) {
  CTXTTS_CHECK(static_cast<Eigen::Index>(index.size()) == rows * cols,
               errc::kInvalidArgument, "GatherFlat: index size mismatch");
  const double* src = x.value().data();
  const Eigen::Index size = x.value().size();
  Matrix out(rows, cols);
  double* dst = out.data();
  for (size_t i = 0; i < index.size(); ++i) {
    CTXTTS_CHECK(index[i] < size, errc::kInvalidArgument,
                 "GatherFlat: index out of range");
    dst[i] = index[i] >= 0 ? src[index[i]] : 0.0;
  }
  return Tensor::FromOp(std::move(out), {x}, [index](Node& self) {
    Node& px = Parent(self, 0);
    if (!px.requires_grad) return;
    if (px.grad.size() == 0) px.grad = Matrix::Zero(px.value.rows(), px.value.cols());
    double* g = px.grad.data();
    const double* go = self.grad.data();
    for (size_t i = 0; i < index.size(); ++i) {
      if (index[i] >= 0) g[index[i]] += go[i];
    }
  });
}

Tensor Softmax(const Tensor& x) {
  Matrix out = x.value();
  for (Eigen::Index r = 0; r < out.rows(); ++r) {
    auto row = out.row(r);
    row.array() -= row.maxCoeff();
    row = row.array().exp().matrix();
    row /= row.sum();
  }
  return Tensor::FromOp(std::move(out), {x}, [](Node& self) {
    const Matrix& y = self.value;
    Eigen::VectorXd dot = self.grad.cwiseProduct(y).rowwise().sum();
    Matrix g = y.array() * (self.grad.colwise() - dot).array();
    Parent(self, 0).Accumulate(g);
  });
}

Tensor LogSoftmax(const Tensor& x) {
  Matrix out = x.value();
  for (Eigen::Index r = 0; r < out.rows(); ++r) {
    auto row = out.row(r);
    const double m = row.maxCoeff();
    const double lse = m + std::log((row.array() - m).exp().sum());
    row.array() -= lse;
  }
  return Tensor::FromOp(std::move(out), {x}, [](Node& self) {
    Matrix p = self.value.array().exp();
    Eigen::VectorXd gsum = self.grad.rowwise().sum();
    Matrix g = self.grad - (p.array().colwise() * gsum.array()).matrix();
    Parent(self, 0).Accumulate(g);
  });
}

Tensor LayerNorm(const Tensor& x, const Tensor& gamma, const Tensor& beta,
                 double eps) {
  const Eigen::Index d = x.cols();
  CTXTTS_CHECK(gamma.cols() == d && beta.cols() == d, errc::kLengthMismatch,
               "LayerNorm: parameter width mismatch");
  Eigen::VectorXd mean = x.value().rowwise().mean();
  Matrix centered = x.value().colwise() - mean;
  Eigen::VectorXd var = centered.array().square().rowwise().mean();
  Eigen::VectorXd inv_std = (var.array() + eps).rsqrt();
  Matrix xhat = centered.array().colwise() * inv_std.array();
  Matrix out = (xhat.array().rowwise() * gamma.value().row(0).array())
                   .rowwise() +
               beta.value().row(0).array();
  return Tensor::FromOp(
      std::move(out), {x, gamma, beta},
      [xhat = std::move(xhat), inv_std = std::move(inv_std)](Node& self) {
        Node& px = Parent(self, 0);
        Node& pg = Parent(self, 1);
        Node& pb = Parent(self, 2);
        if (pg.requires_grad) {
          pg.Accumulate(self.grad.cwiseProduct(xhat).colwise().sum());
        }
        if (pb.requires_grad) pb.Accumulate(self.grad.colwise().sum());
        if (px.requires_grad) {
          Matrix dxhat = self.grad.array().rowwise() * pg.value.row(0).array();
          Eigen::VectorXd m1 = dxhat.rowwise().mean();
          Eigen::VectorXd m2 = dxhat.cwiseProduct(xhat).rowwise().mean();
          Matrix dx = dxhat.colwise() - m1;
          dx -= (xhat.array().colwise() * m2.array()).matrix();
          dx = dx.array().colwise() * inv_std.array();
          px.Accumulate(dx);
        }
      });
}

Tensor Unfold(const Tensor& x, int kernel, int stride, int dilation,
              int pad_left, int pad_right) {
  const Eigen::Index t_in = x.rows();
  const Eigen::Index c = x.cols();
  const Eigen::Index span = static_cast<Eigen::Index>(dilation) * (kernel - 1) + 1;
  const Eigen::Index padded = t_in + pad_left + pad_right;
  CTXTTS_CHECK(padded >= span, errc::kInvalidArgument,
               "Unfold: input shorter than the receptive field");
  const Eigen::Index t_out = (padded - span) / stride + 1;
  Matrix out = Matrix::Zero(t_out, kernel * c);
  for (Eigen::Index t = 0; t < t_out; ++t) {
    for (int k = 0; k < kernel; ++k) {
      const Eigen::Index src = t * stride + k * dilation - pad_left;
      if (src < 0 || src >= t_in) continue;
      out.block(t, k * c, 1, c) = x.value().row(src);
    }
  }
  return Tensor::FromOp(
      std::move(out), {x},
      [kernel, stride, dilation, pad_left, t_out](Node& self) {
        Node& px = Parent(self, 0);
        if (!px.requires_grad) return;
        const Eigen::Index t_in = px.value.rows();
        const Eigen::Index c = px.value.cols();
        if (px.grad.size() == 0) px.grad = Matrix::Zero(t_in, c);
        for (Eigen::Index t = 0; t < t_out; ++t) {
          for (int k = 0; k < kernel; ++k) {
            const Eigen::Index src = t * stride + k * dilation - pad_left;
            if (src < 0 || src >= t_in) continue;
            px.grad.row(src) += self.grad.block(t, k * c, 1, c);
          }
        }
      });
}

Tensor DepthwiseConv1d(const Tensor& x, const Tensor& weight,
                       const Tensor& bias) {
  const Eigen::Index t_len = x.rows();
  const Eigen::Index c = x.cols();
  const int kernel = static_cast<int>(weight.rows());
  CTXTTS_CHECK(weight.cols() == c && bias.cols() == c, errc::kLengthMismatch,
               "DepthwiseConv1d: channel mismatch");
  const int pad = (kernel - 1) / 2;
  Matrix out(t_len, c);
  out.rowwise() = bias.value().row(0);
  for (Eigen::Index t = 0; t < t_len; ++t) {
    for (int k = 0; k < kernel; ++k) {
      const Eigen::Index src = t + k - pad;
      if (src < 0 || src >= t_len) continue;
      out.row(t).array() += weight.value().row(k).array() * x.value().row(src).array();
    }
  }
  return Tensor::FromOp(std::move(out), {x, weight, bias}, [kernel, pad](Node& self) {
    Node& px = Parent(self, 0);
    Node& pw = Parent(self, 1);
    Node& pb = Parent(self, 2);
    const Eigen::Index t_len = px.value.rows();
    const Eigen::Index c = px.value.cols();
    if (pb.requires_grad) pb.Accumulate(self.grad.colwise().sum());
    Matrix gx = Matrix::Zero(t_len, c);
    Matrix gw = Matrix::Zero(kernel, c);
    for (Eigen::Index t = 0; t < t_len; ++t) {
      for (int k = 0; k < kernel; ++k) {
        const Eigen::Index src = t + k - pad;
        if (src < 0 || src >= t_len) continue;
        gx.row(src).array() += pw.value.row(k).array() * self.grad.row(t).array();
        gw.row(k).array() += px.value.row(src).array() * self.grad.row(t).array();
      }
    }
    if (px.requires_grad) px.Accumulate(gx);
    if (pw.requires_grad) pw.Accumulate(gw);
  });
}

Tensor AvgPool1d(const Tensor& x, int kernel, int stride, int pad) {
  const Eigen::Index t_in = x.rows();
  const Eigen::Index padded = t_in + 2 * pad;
  CTXTTS_CHECK(padded >= kernel, errc::kInvalidArgument,
               "AvgPool1d: input too short");
  const Eigen::Index t_out = (padded - kernel) / stride + 1;
  const double inv = 1.0 / kernel;
  Matrix out = Matrix::Zero(t_out, x.cols());
  for (Eigen::Index t = 0; t < t_out; ++t) {
    for (int k = 0; k < kernel; ++k) {
      const Eigen::Index src = t * stride + k - pad;
      if (src < 0 || src >= t_in) continue;
      out.row(t) += x.value().row(src) * inv;
    }
  }
  return Tensor::FromOp(std::move(out), {x}, [kernel, stride, pad, inv](Node& self) {
    Node& px = Parent(self, 0);
    const Eigen::Index t_in = px.value.rows();
    Matrix g = Matrix::Zero(t_in, px.value.cols());
    for (Eigen::Index t = 0; t < self.grad.rows(); ++t) {
      for (int k = 0; k < kernel; ++k) {
        const Eigen::Index src = t * stride + k - pad;
        if (src < 0 || src >= t_in) continue;
        g.row(src) += self.grad.row(t) * inv;
      }
    }
    px.Accumulate(g);
  });
}

Tensor ZeroStuff(const Tensor& x, int factor) {
  CTXTTS_CHECK(factor >= 1, errc::kInvalidArgument, "ZeroStuff: factor < 1");
  std::vector<int> index(static_cast<size_t>(x.rows()) * factor, -1);
  for (Eigen::Index t = 0; t < x.rows(); ++t) {
    index[static_cast<size_t>(t) * factor] = static_cast<int>(t);
  }
  return GatherRows(x, index);
}

}  // namespace ctxtts::nn
