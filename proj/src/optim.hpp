// src/optim.hpp

// Copyright 2026  CRP-Kit Authors

// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0
//
// THIS CODE IS PROVIDED *AS IS* BASIS, WITHOUT WARRANTIES OR CONDITIONS OF ANY
// KIND, EITHER EXPRESS OR IMPLIED, INCLUDING WITHOUT LIMITATION ANY IMPLIED
// WARRANTIES OR CONDITIONS OF TITLE, FITNESS FOR A PARTICULAR PURPOSE,
// MERCHANTABLITY OR NON-INFRINGEMENT.
// See the Apache 2 License for the specific language governing permissions and
// limitations under the License.

#ifndef CRPKIT_OPTIM_HPP_
#define CRPKIT_OPTIM_HPP_

#include <cstdint>
#include <vector>

namespace crpkit {

struct AdamState {
  std::vector<double> m;
  std::vector<double> v;
  std::int64_t step = 0;
  double lr = 1e-4;
  double weight_decay = 1e-6;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps_adam = 1e-8;

  void init(std::size_t n) {
    m.assign(n, 0.0);
    v.assign(n, 0.0);
    step = 0;
  }
};

// Bias-corrected Adam with decoupled weight decay (lr * wd * theta subtracted
// on top of the moment update). A non-finite gradient rejects the whole
// update and throws, leaving theta and the moments untouched.
void adam_step(std::vector<double>* theta, const std::vector<double>& grad,
               AdamState* state);

struct EmaState {
  std::vector<double> shadow;
  double decay = 0.999;
};

// shadow <- decay * shadow + (1 - decay) * theta.
void ema_update(EmaState* ema, const std::vector<double>& theta);

}  // namespace crpkit

#endif  // CRPKIT_OPTIM_HPP_
