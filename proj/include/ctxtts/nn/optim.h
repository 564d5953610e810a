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

#ifndef CTXTTS_NN_OPTIM_H_
#define CTXTTS_NN_OPTIM_H_

#include <vector>

#include "ctxtts/nn/tensor.h"

namespace ctxtts::nn {

struct AdamOptions {
  double lr = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
  // Decoupled (AdamW-style) decay; 0 gives plain Adam.
  double weight_decay = 0.0;
  // Global-norm clipping threshold; <= 0 disables clipping.
  double clip_norm = 0.0;
};

class Adam {
 public:
  Adam(std::vector<Tensor> params, AdamOptions options);

  // Applies one update from the accumulated gradients, then clears them.
  // Returns the pre-clipping global gradient norm.
  double Step();
  void ZeroGrad();

  void set_lr(double lr) { options_.lr = lr; }
  double lr() const { return options_.lr; }
  long steps() const { return steps_; }

 private:
  std::vector<Tensor> params_;
  std::vector<Matrix> m_;
  std::vector<Matrix> v_;
  AdamOptions options_;
  long steps_ = 0;
};

}  // namespace ctxtts::nn

#endif  // CTXTTS_NN_OPTIM_H_
